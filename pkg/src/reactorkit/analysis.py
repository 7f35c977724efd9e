"""Pluggable analysis routines and the two built-ins.

Tools receive assemblies only (never whole cores), must be pure
functions of their inputs, and return immutable :class:`AnalysisResult`
objects that plots and the viewer consume.  The registry dispatches by
name; "pin_diff" and "kmeans" are pre-registered, with pin_diff the only
one enabled by default and flagged for automatic plotting.
"""

from __future__ import annotations

import datetime
import math
from dataclasses import dataclass, field

import numpy as np

from .kmeans import kmeans
from .model import AssemblyDef


class ShapeError(ValueError):
    """Inputs disagree in size/level count in a way a tool cannot repair."""


@dataclass
class Table:
    row_labels: list
    col_labels: list
    values: list  # row-major lists of floats; NaN marks a gap

    def __post_init__(self):
        if len(self.values) != len(self.row_labels):
            raise ValueError("row count does not match row labels")
        for row in self.values:
            if len(row) != len(self.col_labels):
                raise ValueError("column count does not match column labels")


@dataclass
class AnalysisResult:
    tool: str
    created_at: datetime.datetime
    tables: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)  # name -> [(x, y), ...]
    artifacts: list = field(default_factory=list)  # (filename, bytes)
    auto_plot: bool = False

    def __post_init__(self):
        names = [f for f, _ in self.artifacts]
        if len(set(names)) != len(names):
            raise ValueError("artifact filenames must be unique")


@dataclass(frozen=True)
class ToolParam:
    name: str
    type: str  # int | float | string | choice
    default: object
    choices: tuple = ()

    def coerce(self, raw):
        if self.type == "int":
            return int(raw)
        if self.type == "float":
            return float(raw)
        if self.type == "choice":
            value = str(raw)
            if value not in self.choices:
                raise ValueError(f"{self.name} must be one of {self.choices}")
            return value
        return str(raw)


class AnalysisTool:
    """Named entry point taking (assemblies, params) to an AnalysisResult."""

    def __init__(self, name, params, run, n_assemblies=1, enabled_by_default=True):
        self.name = name
        self.params = list(params)
        self._run = run
        self.n_assemblies = n_assemblies
        self.enabled_by_default = enabled_by_default
        for p in self.params:
            p.coerce(p.default)  # defaults must satisfy their own types

    def run(self, assemblies, params=None) -> AnalysisResult:
        merged = {p.name: p.default for p in self.params}
        by_name = {p.name: p for p in self.params}
        for key, raw in (params or {}).items():
            if key not in by_name:
                raise ValueError(f"unknown parameter {key!r} for tool {self.name!r}")
            merged[key] = by_name[key].coerce(raw)
        assemblies = list(assemblies)
        if len(assemblies) != self.n_assemblies:
            raise ValueError(
                f"tool {self.name!r} takes {self.n_assemblies} assemblies, "
                f"got {len(assemblies)}"
            )
        return self._run(assemblies, merged)


class AnalysisRegistry:
    def __init__(self):
        self._tools: dict[str, AnalysisTool] = {}

    def register(self, tool: AnalysisTool) -> None:
        if tool.name in self._tools:
            raise ValueError(f"tool {tool.name!r} already registered")
        self._tools[tool.name] = tool

    def get(self, name: str) -> AnalysisTool:
        if name not in self._tools:
            raise KeyError(f"no tool named {name!r}")
        return self._tools[name]

    def list_tools(self) -> list[str]:
        return list(self._tools)

    def run(self, name: str, assemblies, params=None) -> AnalysisResult:
        return self.get(name).run(assemblies, params)


# ---------------------------------------------------------------------------
# built-in: normalized pin-power percentage difference


def _normalization_mean(assembly: AssemblyDef, feature: str, time: float) -> float:
    """Mean over all occupied pins carrying the feature, all levels."""
    total = 0.0
    count = 0
    for row, col in assembly.occupied():
        try:
            series = assembly.axial_series(row, col, feature, time)
        except KeyError:
            continue
        total += sum(v for _, v, _ in series)
        count += len(series)
    if count == 0:
        raise KeyError(f"no feature {feature!r} at t={time} on {assembly.name!r}")
    return total / count


def pin_diff(
    input_assembly: AssemblyDef,
    reference_assembly: AssemblyDef,
    feature: str,
    pins,
    time: float = 0.0,
) -> AnalysisResult:
    """Percentage difference of per-pin axial series after normalizing
    each assembly so its mean over all occupied pins and levels is 1.

    Normalization makes codes with different absolute power units
    comparable.  Levels where the normalized reference is zero are
    emitted as gaps (NaN in the table, omitted from the series) rather
    than failures.
    """
    if isinstance(pins, str):
        pins = [p.strip() for p in pins.split(",") if p.strip()]
    pins = list(pins)
    if not pins:
        raise ValueError("at least one pin label is required")
    if input_assembly.size != reference_assembly.size:
        raise ShapeError(
            f"assembly sizes differ: {input_assembly.size} vs {reference_assembly.size}"
        )
    in_mean = _normalization_mean(input_assembly, feature, time)
    ref_mean = _normalization_mean(reference_assembly, feature, time)
    if in_mean == 0 or ref_mean == 0:
        raise ValueError("cannot normalize: assembly mean is zero")

    series: dict[str, list] = {}
    rows = []
    n_levels = None
    for pin in pins:
        ri, ci = input_assembly.labels.parse_cell(pin)
        rr, cr = reference_assembly.labels.parse_cell(pin)
        if input_assembly.rod_index_at(ri, ci) is None:
            raise KeyError(f"pin {pin} is not occupied in the input assembly")
        if reference_assembly.rod_index_at(rr, cr) is None:
            raise KeyError(f"pin {pin} is not occupied in the reference assembly")
        in_series = input_assembly.axial_series(ri, ci, feature, time)
        ref_series = reference_assembly.axial_series(rr, cr, feature, time)
        if len(in_series) != len(ref_series):
            raise ShapeError(
                f"pin {pin}: {len(in_series)} levels in input, "
                f"{len(ref_series)} in reference"
            )
        if n_levels is None:
            n_levels = len(in_series)
        elif len(in_series) != n_levels:
            raise ShapeError(
                f"pin {pin} has {len(in_series)} levels, others have {n_levels}"
            )
        points = []
        row = []
        for (z, vin, _), (_, vref, _) in zip(in_series, ref_series):
            norm_in = vin / in_mean
            norm_ref = vref / ref_mean
            if norm_ref == 0:
                row.append(math.nan)  # gap, not a failure
                continue
            diff = 100.0 * (norm_in - norm_ref) / norm_ref
            points.append((z, diff))
            row.append(diff)
        series[pin] = points
        rows.append(row)

    table = Table(pins, [f"L{k + 1}" for k in range(n_levels or 0)], rows)
    csv_lines = ["pin,z_cm,diff_percent"]
    for pin, points in series.items():
        csv_lines.extend(f"{pin},{z!r},{d!r}" for z, d in points)
    return AnalysisResult(
        tool="pin_diff",
        created_at=datetime.datetime.now(datetime.timezone.utc),
        tables={"diff_percent": table},
        series=series,
        artifacts=[("pin_diff.csv", "\n".join(csv_lines).encode())],
        auto_plot=True,
    )


# ---------------------------------------------------------------------------
# built-in: k-means triage over per-pin feature vectors


def pin_feature_vectors(assembly: AssemblyDef, feature: str, time: float = 0.0):
    """(labels, n x d matrix): one row per occupied pin, row-major, the
    row being the pin's axial series values."""
    labels = []
    rows = []
    width = None
    for row, col in assembly.occupied():
        label = assembly.labels.cell_name(row, col)
        try:
            series = assembly.axial_series(row, col, feature, time)
        except KeyError:
            raise ShapeError(f"pin {label} has no {feature!r} data at t={time}")
        if width is None:
            width = len(series)
        elif len(series) != width:
            raise ShapeError(
                f"pin {label} has {len(series)} levels, others have {width}"
            )
        labels.append(label)
        rows.append([v for _, v, _ in series])
    if not rows:
        return [], np.zeros((0, 0))
    return labels, np.array(rows, dtype=float)


def _run_pin_diff(assemblies, params):
    inp, ref = assemblies
    return pin_diff(inp, ref, params["feature"], params["pins"], params["time"])


def _run_kmeans(assemblies, params):
    (assembly,) = assemblies
    labels, matrix = pin_feature_vectors(assembly, params["feature"], params["time"])
    if not labels:
        raise ShapeError(f"assembly {assembly.name!r} has no occupied pins")
    result = kmeans(matrix, params["k"], params["seed"], params["max_iter"])
    assignments = Table(labels, ["cluster"], [[float(a)] for a in result.assignments])
    centroids = Table(
        [f"c{j}" for j in range(len(result.centroids))],
        [f"L{k + 1}" for k in range(matrix.shape[1])],
        [[float(v) for v in row] for row in result.centroids],
    )
    csv_lines = ["pin,cluster"]
    csv_lines.extend(f"{p},{int(a)}" for p, a in zip(labels, result.assignments))
    return AnalysisResult(
        tool="kmeans",
        created_at=datetime.datetime.now(datetime.timezone.utc),
        tables={
            "assignments": assignments,
            "centroids": centroids,
            "inertia": Table(["total"], ["inertia"], [[result.inertia]]),
        },
        artifacts=[("clusters.csv", "\n".join(csv_lines).encode())],
    )


def default_registry() -> AnalysisRegistry:
    """Fresh registry with the built-in tools pre-registered."""
    registry = AnalysisRegistry()
    registry.register(AnalysisTool(
        "pin_diff",
        [
            ToolParam("feature", "string", "Axial Power"),
            ToolParam("pins", "string", ""),
            ToolParam("time", "float", 0.0),
        ],
        _run_pin_diff,
        n_assemblies=2,
    ))
    registry.register(AnalysisTool(
        "kmeans",
        [
            ToolParam("feature", "string", "Axial Power"),
            ToolParam("k", "int", 2),
            ToolParam("seed", "int", 0),
            ToolParam("time", "float", 0.0),
            ToolParam("max_iter", "int", 100),
        ],
        _run_kmeans,
        n_assemblies=1,
        enabled_by_default=False,
    ))
    return registry


def write_artifacts(result: AnalysisResult, directory) -> list:
    """Write result artifacts with ISO-8601-stamped file names; returns paths."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stamp = result.created_at.strftime("%Y-%m-%dT%H-%M-%S")
    paths = []
    for filename, data in result.artifacts:
        path = directory / f"{stamp}_{filename}"
        path.write_bytes(data)
        paths.append(path)
    return paths
