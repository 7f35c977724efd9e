import re

import pytest

from reactorkit import nrdf, reactor_io
from reactorkit.cli import main


@pytest.fixture(scope="module")
def sample_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "3a.nrdf"
    assert main(["gen-sample", "--preset", "3a", "-o", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def sfr_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "sfr7.nrdf"
    assert main(["gen-sample", "--preset", "sfr7", "-o", str(path)]) == 0
    return path


class TestUsage:
    def test_no_command(self, capsys):
        assert main([]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag(self, capsys):
        assert main(["diff", "a.nrdf", "b.nrdf"]) == 1

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "reactorkit" in capsys.readouterr().out


class TestDumpInfo:
    def test_dump_tree(self, sample_path, capsys):
        assert main(["dump", str(sample_path)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("/\n  reactors\n    pwr_3a\n")

    def test_dump_full(self, sample_path, capsys):
        assert main(["dump", str(sample_path), "--full"]) == 0
        out = capsys.readouterr().out
        assert '@reactor_type = ' in out and "times: f64[1]" in out

    def test_dump_bad_magic(self, tmp_path, capsys):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"HDF5 is elsewhere")
        assert main(["dump", str(bad)]) == 2
        assert "not an NRDF file" in capsys.readouterr().err

    def test_dump_missing_file(self, tmp_path, capsys):
        assert main(["dump", str(tmp_path / "nope.nrdf")]) == 2

    def test_info_reports_shapes(self, sample_path, capsys):
        assert main(["info", str(sample_path)]) == 0
        out = capsys.readouterr().out
        assert '"pwr_3a"' in out and "17x17" in out
        assert '"Axial Power": 49 axial levels' in out
        assert '"Total Power": 1 axial levels' in out

    def test_info_sfr(self, sfr_path, capsys):
        assert main(["info", str(sfr_path)]) == 0
        out = capsys.readouterr().out
        assert "SFR" in out and "lattice pitch" in out


class TestDiff:
    def test_identity_diff_zero_table(self, sample_path, capsys):
        code = main([
            "diff", str(sample_path), str(sample_path),
            "--feature", "Axial Power", "--pins", "H7",
        ])
        assert code == 0
        out = capsys.readouterr().out
        row = next(line for line in out.splitlines() if line.startswith("H7"))
        values = row.split("\t")[1].split()
        assert len(values) == 49
        assert set(values) == {"0"}

    def test_diff_with_plot(self, sample_path, tmp_path, capsys):
        plot = tmp_path / "diff.svg"
        code = main([
            "diff", str(sample_path), str(sample_path),
            "--feature", "Axial Power", "--pins", "B2,E4,H7",
            "--plot", str(plot),
        ])
        assert code == 0
        svg = plot.read_text()
        assert svg.count("<polyline") == 3

    def test_diff_unknown_pin(self, sample_path, capsys):
        code = main([
            "diff", str(sample_path), str(sample_path),
            "--feature", "Axial Power", "--pins", "Z99",
        ])
        assert code == 3
        assert "Z99" in capsys.readouterr().err

    def test_diff_unknown_feature(self, sample_path, capsys):
        code = main([
            "diff", str(sample_path), str(sample_path),
            "--feature", "Nope", "--pins", "H7",
        ])
        assert code == 3

    def test_diff_artifacts(self, sample_path, tmp_path, capsys):
        code = main([
            "diff", str(sample_path), str(sample_path),
            "--feature", "Axial Power", "--pins", "H7",
            "--results-dir", str(tmp_path / "results"),
        ])
        assert code == 0
        files = list((tmp_path / "results").iterdir())
        assert len(files) == 1
        assert re.match(r"\d{4}-\d{2}-\d{2}T\d{2}-\d{2}-\d{2}_pin_diff\.csv",
                        files[0].name)


class TestCluster:
    def test_cluster_runs(self, sample_path, capsys):
        code = main([
            "cluster", str(sample_path), "--feature", "Axial Power",
            "--k", "3", "--seed", "1",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "inertia" in out
        assert len([l for l in out.splitlines() if "\t" in l]) == 289

    def test_cluster_bad_k(self, sample_path, capsys):
        code = main([
            "cluster", str(sample_path), "--feature", "Axial Power",
            "--k", "1000", "--seed", "1",
        ])
        assert code == 3


class TestRender:
    @pytest.mark.parametrize("extra", [
        ["--view", "core", "--type", "fuel"],
        ["--view", "core", "--type", "control_bank", "--selected", "1,2"],
        ["--view", "assembly", "--mode", "geometry"],
        ["--view", "assembly", "--mode", "data", "--feature", "Axial Power",
         "--level", "28", "--norm", "whole_assembly"],
        ["--view", "rod"],
        ["--view", "plot", "--feature", "Axial Power", "--pins", "B2,H7"],
    ])
    def test_render_views(self, sample_path, tmp_path, extra, capsys):
        out = tmp_path / "out.svg"
        assert main(["render", str(sample_path), *extra, "-o", str(out)]) == 0
        assert out.read_text().startswith("<svg ")

    def test_render_sfr_core(self, sfr_path, tmp_path):
        out = tmp_path / "sfr.svg"
        assert main(["render", str(sfr_path), "--view", "core", "-o", str(out)]) == 0
        assert "polygon" in out.read_text()

    def test_render_bad_type(self, sample_path, tmp_path, capsys):
        out = tmp_path / "x.svg"
        code = main(["render", str(sample_path), "--view", "core",
                     "--type", "shield", "-o", str(out)])
        assert code == 1


class TestConvert:
    CSV = (
        "row_label,col_label,z_cm,time_s,feature,value,uncertainty,units\n"
        "A,1,5.0,0.0,Axial Power,1.5,0.01,W/cm\n"
        "A,1,15.0,0.0,Axial Power,2.5,0.01,W/cm\n"
        "B,1,5.0,0.0,Axial Power,1.0,0.0,W/cm\n"
    )

    @pytest.fixture
    def skeleton(self, tmp_path):
        from helpers import make_mini_pwr

        path = tmp_path / "skel.nrdf"
        nrdf.write_path(reactor_io.store_reactor(make_mini_pwr()), path)
        return path

    def test_convert_round_trip(self, tmp_path, skeleton, capsys):
        csv_path = tmp_path / "in.csv"
        csv_path.write_text(self.CSV)
        out = tmp_path / "out.nrdf"
        code = main(["convert", "csv", str(csv_path),
                     "--reactor-spec", str(skeleton), "-o", str(out)])
        assert code == 0
        reactor = reactor_io.load_reactor(nrdf.read_path(out))
        assembly = reactor.assembly_defs[0]
        series = assembly.axial_series(0, 0, "Axial Power", 0.0)
        assert [(z, v) for z, v, _ in series] == [(5.0, 1.5), (15.0, 2.5)]
        # skeleton's own data was dropped
        assert assembly.features() == ["Axial Power"]
        assert len(assembly.axial_series(1, 0, "Axial Power", 0.0)) == 1

    def test_convert_deterministic(self, tmp_path, skeleton):
        csv_path = tmp_path / "in.csv"
        csv_path.write_text(self.CSV)
        a = tmp_path / "a.nrdf"
        b = tmp_path / "b.nrdf"
        assert main(["convert", "csv", str(csv_path),
                     "--reactor-spec", str(skeleton), "-o", str(a)]) == 0
        assert main(["convert", "csv", str(csv_path),
                     "--reactor-spec", str(skeleton), "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_convert_bad_header(self, tmp_path, skeleton, capsys):
        csv_path = tmp_path / "in.csv"
        csv_path.write_text("pin,value\nA1,1.0\n")
        code = main(["convert", "csv", str(csv_path),
                     "--reactor-spec", str(skeleton), "-o", str(tmp_path / "o.nrdf")])
        assert code == 2
        assert "header" in capsys.readouterr().err

    def test_convert_bad_cell(self, tmp_path, skeleton, capsys):
        csv_path = tmp_path / "in.csv"
        csv_path.write_text(
            "row_label,col_label,z_cm,time_s,feature,value,uncertainty,units\n"
            "Z,9,0.0,0.0,F,1.0,0.0,W\n"
        )
        code = main(["convert", "csv", str(csv_path),
                     "--reactor-spec", str(skeleton), "-o", str(tmp_path / "o.nrdf")])
        assert code == 2
        assert ":2:" in capsys.readouterr().err


class TestGenSampleAndBench:
    def test_gen_sample_binary_stable(self, tmp_path):
        a = tmp_path / "a.nrdf"
        b = tmp_path / "b.nrdf"
        assert main(["gen-sample", "--preset", "3a", "-o", str(a)]) == 0
        assert main(["gen-sample", "--preset", "3a", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bench_small(self, capsys):
        assert main(["bench", "--pins", "1000", "--levels", "5"]) == 0
        out = capsys.readouterr().out
        assert "write:" in out and "read:" in out and "file:" in out
        assert "round trip: ok" in out
