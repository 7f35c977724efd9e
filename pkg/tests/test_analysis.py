import datetime
import math
import random

import pytest

from reactorkit.analysis import (
    AnalysisResult,
    AnalysisTool,
    ShapeError,
    Table,
    ToolParam,
    default_registry,
    pin_diff,
    pin_feature_vectors,
    write_artifacts,
)
from reactorkit.model import (
    AssemblyDef,
    AssemblyType,
    DataEntry,
    Material,
    MaterialBlock,
    Reactor,
    ReactorType,
    Ring,
    RodDef,
    RodKind,
)


def assembly_with_series(per_pin: dict, size: int = 1, name: str = "a") -> AssemblyDef:
    """Build a frozen size x size assembly whose pins carry the given
    axial values; per_pin maps (row, col) -> list of values (z = 0, 1, ...)."""
    reactor = Reactor(f"r_{name}", ReactorType.PWR, 1, assembly_pitch=20.0)
    unit = reactor.add_unit("W")
    rod = reactor.add_rod_def(RodDef("rod", RodKind.FUEL, [
        MaterialBlock(0.0, 100.0, [Ring(Material("m", "solid"), 0.0, 0.5, 100.0)]),
    ]))
    assembly = AssemblyDef(name, AssemblyType.FUEL, size, rod_pitch=1.26)
    for (row, col), values in per_pin.items():
        assembly.set_rod(row, col, rod)
        provider = assembly.provider_at(row, col)
        for k, v in enumerate(values):
            provider.add_data("Axial Power", DataEntry(
                v, 0.0, unit, (col * 1.26, row * 1.26, float(k)), 0.0,
            ))
    reactor.add_assembly_def(assembly)
    reactor.freeze()
    return assembly


class TestRegistry:
    def test_builtins_present(self):
        registry = default_registry()
        assert registry.list_tools() == ["pin_diff", "kmeans"]
        assert registry.get("pin_diff").enabled_by_default
        assert not registry.get("kmeans").enabled_by_default

    def test_duplicate_rejected(self):
        registry = default_registry()
        tool = AnalysisTool("pin_diff", [], lambda a, p: None)
        with pytest.raises(ValueError):
            registry.register(tool)

    def test_custom_tool_listed_and_dispatched(self):
        registry = default_registry()
        marker = AnalysisResult(
            "certify", datetime.datetime.now(datetime.timezone.utc)
        )
        tool = AnalysisTool("certify", [ToolParam("n", "int", 1)],
                            lambda assemblies, params: marker, n_assemblies=0)
        registry.register(tool)
        assert "certify" in registry.list_tools()
        assert registry.run("certify", []) is tool.run([])
        # run-by-name returns exactly what direct invocation returns
        assert registry.run("certify", []) is marker

    def test_unknown_tool(self):
        with pytest.raises(KeyError):
            default_registry().get("mahout")

    def test_param_coercion_and_validation(self):
        tool = AnalysisTool(
            "t",
            [ToolParam("k", "int", 2), ToolParam("mode", "choice", "a", ("a", "b"))],
            lambda assemblies, params: params,
            n_assemblies=0,
        )
        assert tool.run([], {"k": "5"}) == {"k": 5, "mode": "a"}
        with pytest.raises(ValueError):
            tool.run([], {"mode": "c"})
        with pytest.raises(ValueError):
            tool.run([], {"bogus": 1})


class TestPinDiff:
    def test_hand_case(self):
        """Input [1, 3] vs reference [2, 2] on one pin -> [-50, +50]."""
        inp = assembly_with_series({(0, 0): [1.0, 3.0]}, name="in")
        ref = assembly_with_series({(0, 0): [2.0, 2.0]}, name="ref")
        result = pin_diff(inp, ref, "Axial Power", ["A1"], 0.0)
        assert [d for _, d in result.series["A1"]] == [-50.0, 50.0]
        # independent check: normalize by the plain mean and diff directly
        in_norm = [v / (4.0 / 2.0) for v in (1.0, 3.0)]
        ref_norm = [v / (4.0 / 2.0) for v in (2.0, 2.0)]
        expected = [100.0 * (a - b) / b for a, b in zip(in_norm, ref_norm)]
        assert [d for _, d in result.series["A1"]] == expected
        assert result.auto_plot

    def test_identity_is_exactly_zero(self):
        a = assembly_with_series({(0, 0): [1.0, 2.0, 5.0]})
        result = pin_diff(a, a, "Axial Power", ["A1"], 0.0)
        assert all(d == 0.0 for _, d in result.series["A1"])

    def test_three_pins_49_levels(self, sample_3a):
        assembly = sample_3a.assembly_defs[0]
        result = pin_diff(assembly, assembly, "Axial Power", "B2,E4,H7", 0.0)
        assert sorted(result.series) == ["B2", "E4", "H7"]
        for points in result.series.values():
            assert len(points) == 49
            assert all(d == 0.0 for _, d in points)
        table = result.tables["diff_percent"]
        assert table.row_labels == ["B2", "E4", "H7"]
        assert len(table.col_labels) == 49

    def test_scale_invariance(self):
        rng = random.Random(8)
        base_in = {(0, 0): [rng.uniform(0.5, 2) for _ in range(6)],
                   (0, 1): [rng.uniform(0.5, 2) for _ in range(6)]}
        base_ref = {(0, 0): [rng.uniform(0.5, 2) for _ in range(6)],
                    (0, 1): [rng.uniform(0.5, 2) for _ in range(6)]}
        plain = pin_diff(
            assembly_with_series(base_in, 2, "i0"),
            assembly_with_series(base_ref, 2, "r0"),
            "Axial Power", ["A1", "A2"], 0.0,
        )
        for trial in range(5):
            c = rng.uniform(0.01, 100.0)
            d = rng.uniform(0.01, 100.0)
            scaled = pin_diff(
                assembly_with_series(
                    {k: [c * v for v in vs] for k, vs in base_in.items()}, 2, "i1"),
                assembly_with_series(
                    {k: [d * v for v in vs] for k, vs in base_ref.items()}, 2, "r1"),
                "Axial Power", ["A1", "A2"], 0.0,
            )
            for pin in ("A1", "A2"):
                for (z0, d0), (z1, d1) in zip(plain.series[pin], scaled.series[pin]):
                    assert z0 == z1
                    assert d1 == pytest.approx(d0, rel=1e-12, abs=1e-12)

    def test_zero_reference_is_gap_not_failure(self):
        inp = assembly_with_series({(0, 0): [1.0, 1.0, 1.0]}, name="in")
        ref = assembly_with_series({(0, 0): [2.0, 0.0, 2.0]}, name="ref")
        result = pin_diff(inp, ref, "Axial Power", ["A1"], 0.0)
        assert len(result.series["A1"]) == 2  # middle level omitted
        assert [z for z, _ in result.series["A1"]] == [0.0, 2.0]
        assert math.isnan(result.tables["diff_percent"].values[0][1])

    def test_level_count_mismatch(self):
        inp = assembly_with_series({(0, 0): [1.0, 2.0]}, name="in")
        ref = assembly_with_series({(0, 0): [1.0, 2.0, 3.0]}, name="ref")
        with pytest.raises(ShapeError):
            pin_diff(inp, ref, "Axial Power", ["A1"], 0.0)

    def test_size_mismatch(self):
        inp = assembly_with_series({(0, 0): [1.0]}, size=1, name="in")
        ref = assembly_with_series({(0, 0): [1.0]}, size=2, name="ref")
        with pytest.raises(ShapeError):
            pin_diff(inp, ref, "Axial Power", ["A1"], 0.0)

    def test_unknown_pin(self):
        a = assembly_with_series({(0, 0): [1.0]})
        with pytest.raises(KeyError):
            pin_diff(a, a, "Axial Power", ["Z9"], 0.0)

    def test_unoccupied_pin(self):
        a = assembly_with_series({(0, 0): [1.0]}, size=2)
        with pytest.raises(KeyError):
            pin_diff(a, a, "Axial Power", ["B2"], 0.0)

    def test_registry_dispatch_matches_direct(self, sample_3a):
        assembly = sample_3a.assembly_defs[0]
        registry = default_registry()
        via_registry = registry.run(
            "pin_diff", [assembly, assembly],
            {"feature": "Axial Power", "pins": "B2,H7", "time": 0.0},
        )
        direct = pin_diff(assembly, assembly, "Axial Power", ["B2", "H7"], 0.0)
        assert via_registry.series == direct.series
        assert via_registry.tables == direct.tables


class TestPinFeatureVectors:
    def test_shape(self, sample_3a):
        assembly = sample_3a.assembly_defs[0]
        labels, matrix = pin_feature_vectors(assembly, "Axial Power", 0.0)
        assert matrix.shape == (289, 49)
        assert len(labels) == 289
        assert labels[0] == "A1"  # row-major

    def test_empty_assembly(self):
        reactor = Reactor("r", ReactorType.PWR, 1, assembly_pitch=20.0)
        assembly = AssemblyDef("hollow", AssemblyType.FUEL, 2, rod_pitch=1.0)
        reactor.add_assembly_def(assembly)
        reactor.freeze()
        labels, matrix = pin_feature_vectors(assembly, "Axial Power", 0.0)
        assert labels == [] and matrix.shape == (0, 0)

    def test_pin_missing_feature_named(self):
        assembly = assembly_with_series({(0, 0): [1.0], (1, 1): []}, size=2)
        with pytest.raises(ShapeError, match="B2"):
            pin_feature_vectors(assembly, "Axial Power", 0.0)

    def test_ragged_series_named(self):
        assembly = assembly_with_series({(0, 0): [1.0, 2.0], (0, 1): [1.0]}, size=2)
        with pytest.raises(ShapeError, match="A2"):
            pin_feature_vectors(assembly, "Axial Power", 0.0)

    def test_kmeans_tool_runs(self, sample_3a):
        registry = default_registry()
        result = registry.run(
            "kmeans", [sample_3a.assembly_defs[0]],
            {"feature": "Axial Power", "k": 3, "seed": 1},
        )
        table = result.tables["assignments"]
        assert len(table.row_labels) == 289
        clusters = {v[0] for v in table.values}
        assert clusters <= {0.0, 1.0, 2.0} and len(clusters) == 3
        # guide tubes carry ~5% of fuel power; they must cluster together
        by_pin = dict(zip(table.row_labels, (v[0] for v in table.values)))
        assert by_pin["F3"] == by_pin["C6"] == by_pin["I9"]  # guide/instrument tubes
        assert by_pin["B2"] != by_pin["F3"]


class TestResultObjects:
    def test_table_shape_validation(self):
        with pytest.raises(ValueError):
            Table(["a"], ["x", "y"], [[1.0]])
        with pytest.raises(ValueError):
            Table(["a", "b"], ["x"], [[1.0]])

    def test_artifact_names_unique(self):
        now = datetime.datetime.now(datetime.timezone.utc)
        with pytest.raises(ValueError):
            AnalysisResult("t", now, artifacts=[("a.csv", b""), ("a.csv", b"")])

    def test_write_artifacts_stamped(self, tmp_path):
        now = datetime.datetime(2026, 8, 9, 12, 30, 45, tzinfo=datetime.timezone.utc)
        result = AnalysisResult("t", now, artifacts=[("out.csv", b"x,y\n")])
        paths = write_artifacts(result, tmp_path)
        assert paths == [tmp_path / "2026-08-09T12-30-45_out.csv"]
        assert paths[0].read_bytes() == b"x,y\n"
