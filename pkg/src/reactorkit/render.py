"""Deterministic SVG rendering: core maps, assembly geometry/data views,
pin cross-sections and line plots.

All functions are pure; identical inputs yield byte-identical SVG, which
is pinned by golden-file tests.  Output uses cm-scaled user coordinates
inside a viewBox, so doubling a pitch doubles every emitted coordinate.
Color palettes are fixed tables below.
"""

from __future__ import annotations

import colorsys
import enum
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .model import AssemblyDef, AssemblyType, Phase, Reactor, ReactorType, RodDef, RodKind

SVG_NS = 'xmlns="http://www.w3.org/2000/svg"'
FONT = "sans-serif"

ASSEMBLY_PALETTE = {
    AssemblyType.FUEL: "#3cb44b",              # green
    AssemblyType.CONTROL_BANK: "#ffe119",      # yellow
    AssemblyType.INCORE_INSTRUMENT: "#911eb4",
    AssemblyType.ROD_CLUSTER: "#f58231",
    AssemblyType.CONTROL: "#ffd711",
    AssemblyType.REFLECTOR: "#a9a9a9",
    AssemblyType.SHIELD: "#469990",
    AssemblyType.TEST: "#42d4f4",
}

ROD_PALETTE = {
    RodKind.FUEL: "#e6194b",     # red
    RodKind.CONTROL: "#4363d8",  # blue
    RodKind.POISON: "#911eb4",
    RodKind.EMPTY: "#d3d3d3",
    RodKind.REFLECTOR: "#3cb44b",
}

SERIES_PALETTE = ("#e6194b", "#4363d8", "#3cb44b", "#f58231", "#911eb4", "#469990")

COOLANT = "#9fc5e8"
MISSING = "#808080"  # 50% gray for missing/NaN data
SELECT = "#222222"


def material_color(material) -> str:
    """Fixed role palette: fuel red, fill gas yellow, cladding green,
    liquids coolant blue, anything else gray."""
    if material.phase is Phase.GAS:
        return "#ffe119"
    if material.phase is Phase.LIQUID:
        return COOLANT
    name = material.name.lower()
    if "fuel" in name or "uo2" in name or "u-zr" in name:
        return "#e6194b"
    if "clad" in name or "zirc" in name or "steel" in name:
        return "#3cb44b"
    return "#9e9e9e"


class Scope(str, enum.Enum):
    SELECTED_LEVEL = "selected_level"
    WHOLE_ASSEMBLY = "whole_assembly"
    ALL_ASSEMBLIES = "all_assemblies"


@dataclass(frozen=True)
class ColorScale:
    min: float
    max: float
    scope: Scope = Scope.SELECTED_LEVEL

    def __post_init__(self):
        if self.min > self.max:
            raise ValueError(f"scale min {self.min} > max {self.max}")
        object.__setattr__(self, "scope", Scope(self.scope))


class ViewKind(str, enum.Enum):
    CORE = "core"
    ASSEMBLY_GEOMETRY = "assembly_geometry"
    ASSEMBLY_DATA = "assembly_data"
    ROD_GEOMETRY = "rod_geometry"
    ROD_DATA = "rod_data"
    AXIAL_PLOT = "axial_plot"
    DIFF_PLOT = "diff_plot"


@dataclass(frozen=True)
class ViewSpec:
    kind: ViewKind
    axial_level: int = 1  # axial levels are numbered from 1 at the bottom
    feature: str | None = None
    scale: ColorScale | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ViewKind(self.kind))
        if self.kind in (ViewKind.ASSEMBLY_DATA, ViewKind.ROD_DATA) and not self.feature:
            raise ValueError(f"{self.kind.value} view requires a feature")
        if self.axial_level < 1:
            raise ValueError("axial_level is 1-based")


def color_for(value: float, scale: ColorScale) -> tuple:
    """Linear blue-to-red mapping: hue 240(1-t), full saturation, 50%
    lightness; NaN renders 50% gray, a degenerate scale mid-hue."""
    if math.isnan(value):
        return (128, 128, 128)
    if scale.max == scale.min:
        t = 0.5
    else:
        t = (value - scale.min) / (scale.max - scale.min)
        t = min(1.0, max(0.0, t))
    hue = 240.0 * (1.0 - t)
    r, g, b = colorsys.hls_to_rgb(hue / 360.0, 0.5, 1.0)
    return (round(r * 255), round(g * 255), round(b * 255))


def _rgb(color: tuple) -> str:
    return f"rgb({color[0]},{color[1]},{color[2]})"


def _n(x: float) -> str:
    s = format(float(x), ".6g")
    return "0" if s == "-0" else s


def _values_at_level(assembly: AssemblyDef, feature: str, time: float, level: int):
    """value per occupied cell at a 1-based level, NaN where absent."""
    out = {}
    for row, col in assembly.occupied():
        try:
            series = assembly.axial_series(row, col, feature, time)
        except KeyError:
            out[(row, col)] = math.nan
            continue
        out[(row, col)] = series[level - 1][1] if level <= len(series) else math.nan
    return out


def compute_scale(assembly: AssemblyDef, feature: str, time: float, level: int,
                  scope: Scope) -> ColorScale:
    """Color-scale bounds over the population the scope names."""
    scope = Scope(scope)
    values = []
    if scope is Scope.SELECTED_LEVEL:
        values = [v for v in _values_at_level(assembly, feature, time, level).values()
                  if not math.isnan(v)]
    else:
        if scope is Scope.ALL_ASSEMBLIES:
            if assembly._owner is None:
                raise ValueError("assembly is not attached to a reactor")
            assemblies = assembly._owner.assembly_defs
        else:
            assemblies = [assembly]
        for a in assemblies:
            for row, col in a.occupied():
                try:
                    series = a.axial_series(row, col, feature, time)
                except KeyError:
                    continue
                values.extend(v for _, v, _ in series)
    if not values:
        raise KeyError(f"no {feature!r} data at t={time} in scope {scope.value}")
    return ColorScale(min(values), max(values), scope)


# ---------------------------------------------------------------------------
# geometry helpers


def _hex_center(row: int, col: int, pitch: float) -> tuple:
    """Flat-top hexagon center in axial coordinates (q=col, r=row); all
    six neighbors sit exactly one pitch away."""
    radius = pitch / math.sqrt(3.0)
    return (1.5 * radius * col, math.sqrt(3.0) * radius * (row + col / 2.0))


def _hex_points(cx: float, cy: float, radius: float) -> str:
    pts = []
    for i in range(6):
        angle = math.pi / 3.0 * i
        pts.append(f"{_n(cx + radius * math.cos(angle))},{_n(cy + radius * math.sin(angle))}")
    return " ".join(pts)


def _svg_open(x0, y0, w, h, px_w=640):
    px_h = round(px_w * h / w) if w else px_w
    return (
        f'<svg {SVG_NS} width="{px_w}" height="{px_h}" '
        f'viewBox="{_n(x0)} {_n(y0)} {_n(w)} {_n(h)}">'
    )


def _text(x, y, size, content, anchor="middle") -> str:
    return (
        f'<text x="{_n(x)}" y="{_n(y)}" font-family="{FONT}" '
        f'font-size="{_n(size)}" text-anchor="{anchor}">{escape(str(content))}</text>'
    )


# ---------------------------------------------------------------------------
# core view


def render_core(reactor: Reactor, assembly_type, selected=None) -> str:
    """Core map: squares (PWR) or flat-top hexagons (SFR) colored by
    assembly type, row labels left, column labels top.

    Every type grid is drawn; the requested type is drawn last so it
    wins at co-located positions, and `selected` outlines that cell in
    the requested type's grid.
    """
    try:
        assembly_type = AssemblyType(assembly_type)
    except ValueError:
        raise KeyError(f"unknown assembly type {assembly_type!r}")
    if assembly_type not in reactor.grids:
        raise KeyError(
            f"no {assembly_type.value!r} grid on a {reactor.reactor_type.value}"
        )
    size = reactor.size
    hexagonal = reactor.reactor_type is ReactorType.SFR
    pitch = reactor.lattice_pitch if hexagonal else reactor.assembly_pitch

    cells = []
    order = [t for t in reactor.grids if t is not assembly_type] + [assembly_type]
    for atype in order:
        grid = reactor.grids[atype]
        for row in range(size):
            for col in range(size):
                if grid[row][col] is None:
                    continue
                fill = ASSEMBLY_PALETTE[atype]
                if hexagonal:
                    cx, cy = _hex_center(row, col, pitch)
                    radius = 0.95 * pitch / math.sqrt(3.0)
                    cells.append(
                        f'<polygon class="cell" data-type="{atype.value}" '
                        f'points="{_hex_points(cx, cy, radius)}" fill="{fill}"/>'
                    )
                else:
                    x = col * pitch + 0.04 * pitch
                    y = row * pitch + 0.04 * pitch
                    cells.append(
                        f'<rect class="cell" data-type="{atype.value}" '
                        f'x="{_n(x)}" y="{_n(y)}" width="{_n(0.92 * pitch)}" '
                        f'height="{_n(0.92 * pitch)}" fill="{fill}"/>'
                    )

    labels = []
    font = 0.35 * pitch
    if hexagonal:
        for row in range(size):
            cx, cy = _hex_center(row, 0, pitch)
            labels.append(_text(cx - pitch, cy + font / 3, font, reactor.labels.row_labels[row]))
        for col in range(size):
            cx, cy = _hex_center(0, col, pitch)
            labels.append(_text(cx, cy - pitch, font, reactor.labels.column_labels[col]))
    else:
        for row in range(size):
            labels.append(_text(-0.5 * pitch, (row + 0.5) * pitch + font / 3, font,
                                reactor.labels.row_labels[row]))
        for col in range(size):
            labels.append(_text((col + 0.5) * pitch, -0.3 * pitch, font,
                                reactor.labels.column_labels[col]))

    outline = []
    if selected is not None:
        row, col = selected
        if reactor.grids[assembly_type][row][col] is not None:
            if hexagonal:
                cx, cy = _hex_center(row, col, pitch)
                outline.append(
                    f'<polygon class="selected" points="'
                    f'{_hex_points(cx, cy, pitch / math.sqrt(3.0))}" fill="none" '
                    f'stroke="{SELECT}" stroke-width="{_n(0.08 * pitch)}"/>'
                )
            else:
                outline.append(
                    f'<rect class="selected" x="{_n(col * pitch)}" y="{_n(row * pitch)}" '
                    f'width="{_n(pitch)}" height="{_n(pitch)}" fill="none" '
                    f'stroke="{SELECT}" stroke-width="{_n(0.08 * pitch)}"/>'
                )

    if hexagonal:
        xs, ys = zip(*(_hex_center(r, c, pitch) for r in range(size) for c in range(size)))
        radius = pitch / math.sqrt(3.0)
        x0, y0 = min(xs) - 2 * pitch, min(ys) - 2 * pitch
        w = max(xs) - min(xs) + 4 * pitch
        h = max(ys) - min(ys) + 4 * pitch
    else:
        x0 = y0 = -pitch
        w = h = size * pitch + 2 * pitch
    parts = [_svg_open(x0, y0, w, h)]
    parts.extend(cells)
    parts.extend(labels)
    parts.extend(outline)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# assembly views


def _rod_draw_radius(rod: RodDef, pitch: float) -> float:
    outer = max((ring.outer_radius for block in rod.blocks for ring in block.rings),
                default=0.0)
    return outer if 0 < outer <= pitch / 2.0 else 0.38 * pitch


def _axial_strip(x: float, height: float, n_levels: int, level: int, width: float):
    """Clickable-axial-view stand-in: one slot per level, bottom-up, the
    selected level filled."""
    parts = [
        f'<g class="axial-strip" data-levels="{n_levels}" data-selected="{level}">'
    ]
    slot = height / n_levels
    for k in range(1, n_levels + 1):
        y = height - k * slot
        fill = SELECT if k == level else "#eeeeee"
        parts.append(
            f'<rect class="level" x="{_n(x)}" y="{_n(y)}" width="{_n(width)}" '
            f'height="{_n(slot * 0.9)}" fill="{fill}" stroke="#999999" '
            f'stroke-width="{_n(width / 30)}"/>'
        )
    parts.append("</g>")
    return parts


def render_assembly(assembly: AssemblyDef, spec: ViewSpec, time: float = 0.0) -> str:
    """Assembly view: geometry (circles colored by rod kind over coolant)
    or data (squares/hexagons colored via color_for at spec.axial_level),
    with labels and an axial side strip when a feature is present."""
    if spec.kind not in (ViewKind.ASSEMBLY_GEOMETRY, ViewKind.ASSEMBLY_DATA):
        raise ValueError(f"render_assembly cannot draw {spec.kind.value}")
    hexagonal = (
        assembly._owner is not None
        and assembly._owner.reactor_type is ReactorType.SFR
    )
    size = assembly.size
    pitch = assembly.rod_pitch
    data_view = spec.kind is ViewKind.ASSEMBLY_DATA

    n_levels = 0
    values = {}
    scale = spec.scale
    if data_view:
        n_levels = assembly.level_count(spec.feature, time)  # KeyError if absent
        if not 1 <= spec.axial_level <= n_levels:
            raise ValueError(
                f"axial level {spec.axial_level} outside 1..{n_levels}"
            )
        values = _values_at_level(assembly, spec.feature, time, spec.axial_level)
        if scale is None:
            scale = compute_scale(assembly, spec.feature, time, spec.axial_level,
                                  Scope.SELECTED_LEVEL)
    elif spec.feature:
        try:
            n_levels = assembly.level_count(spec.feature, time)
        except KeyError:
            n_levels = 0

    def center(row, col):
        if hexagonal:
            return _hex_center(row, col, pitch)
        return ((col + 0.5) * pitch, (row + 0.5) * pitch)

    cells = []
    if not data_view and not hexagonal:
        cells.append(
            f'<rect class="coolant" x="0" y="0" width="{_n(size * pitch)}" '
            f'height="{_n(size * pitch)}" fill="{COOLANT}"/>'
        )
    if not data_view and hexagonal and assembly.duct_thickness is not None:
        mid = (size - 1) / 2.0
        cx, cy = _hex_center(int(mid), int(mid), pitch) if size % 2 else (
            (_hex_center(0, 0, pitch)[0] + _hex_center(size - 1, size - 1, pitch)[0]) / 2,
            (_hex_center(0, 0, pitch)[1] + _hex_center(size - 1, size - 1, pitch)[1]) / 2,
        )
        duct_radius = (size * pitch) / math.sqrt(3.0) + assembly.duct_thickness
        cells.append(
            f'<polygon class="duct" points="{_hex_points(cx, cy, duct_radius)}" '
            f'fill="{COOLANT}" stroke="#607d8b" '
            f'stroke-width="{_n(assembly.duct_thickness)}"/>'
        )
    for row in range(size):
        for col in range(size):
            idx = assembly.rod_grid[row][col]
            if idx is None:
                continue
            cx, cy = center(row, col)
            if data_view:
                color = _rgb(color_for(values[(row, col)], scale))
                if hexagonal:
                    cells.append(
                        f'<polygon class="pin" points="'
                        f'{_hex_points(cx, cy, 0.95 * pitch / math.sqrt(3.0))}" '
                        f'fill="{color}"/>'
                    )
                else:
                    x = cx - 0.46 * pitch
                    y = cy - 0.46 * pitch
                    cells.append(
                        f'<rect class="pin" x="{_n(x)}" y="{_n(y)}" '
                        f'width="{_n(0.92 * pitch)}" height="{_n(0.92 * pitch)}" '
                        f'fill="{color}"/>'
                    )
            else:
                rod = assembly.rod_at(row, col)
                radius = _rod_draw_radius(rod, pitch)
                cells.append(
                    f'<circle class="pin" cx="{_n(cx)}" cy="{_n(cy)}" '
                    f'r="{_n(radius)}" fill="{ROD_PALETTE[rod.kind]}"/>'
                )

    labels = []
    font = 0.45 * pitch
    for row in range(size):
        cx, cy = center(row, 0)
        labels.append(_text(cx - pitch, cy + font / 3, font,
                            assembly.labels.row_labels[row]))
    for col in range(size):
        cx, cy = center(0, col)
        labels.append(_text(cx, cy - pitch, font, assembly.labels.column_labels[col]))

    if hexagonal:
        centers = [center(r, c) for r in range(size) for c in range(size)]
        xs = [p[0] for p in centers]
        ys = [p[1] for p in centers]
        x0, y0 = min(xs) - 2 * pitch, min(ys) - 2 * pitch
        w = max(xs) - min(xs) + 4 * pitch + 2 * pitch
        h = max(ys) - min(ys) + 4 * pitch
        strip_x = max(xs) + 1.5 * pitch
        grid_h = max(ys) - min(ys) + pitch
    else:
        x0 = y0 = -1.5 * pitch
        w = size * pitch + 4.5 * pitch
        h = size * pitch + 3 * pitch
        strip_x = size * pitch + pitch
        grid_h = size * pitch

    parts = [_svg_open(x0, y0, w, h)]
    parts.extend(cells)
    parts.extend(labels)
    if n_levels:
        parts.extend(_axial_strip(strip_x, grid_h, n_levels, spec.axial_level,
                                  0.8 * pitch))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# rod cross-section


def render_rod(rod: RodDef, z: float, data=None) -> str:
    """Concentric rings of the material block containing z, colored by
    material role.  With data (an axial series), the value at that level
    is overlaid as a color ring and numeric label.  A z in a gap renders
    a hollow dashed marker."""
    outer = max((ring.outer_radius for block in rod.blocks for ring in block.rings),
                default=1.0) or 1.0
    extent = 1.35 * outer
    parts = [_svg_open(-extent, -extent, 2 * extent, 2 * extent, px_w=480)]

    block = None
    for b in rod.blocks:
        if b.z_start <= z < b.z_end:
            block = b
            break
    if block is None:
        parts.append(
            f'<circle class="empty-section" cx="0" cy="0" r="{_n(0.8 * outer)}" '
            f'fill="none" stroke="{MISSING}" stroke-width="{_n(0.05 * outer)}" '
            f'stroke-dasharray="{_n(0.12 * outer)} {_n(0.08 * outer)}"/>'
        )
    else:
        for ring in reversed(block.rings):  # outermost first, innermost on top
            parts.append(
                f'<circle class="ring" cx="0" cy="0" r="{_n(ring.outer_radius)}" '
                f'fill="{material_color(ring.material)}"/>'
            )
        innermost = block.rings[0] if block.rings else None
        if innermost is not None and innermost.inner_radius > 0:
            parts.append(
                f'<circle class="bore" cx="0" cy="0" '
                f'r="{_n(innermost.inner_radius)}" fill="#ffffff"/>'
            )
    if data:
        values = [v for _, v, _ in data]
        scale = ColorScale(min(values), max(values), Scope.WHOLE_ASSEMBLY)
        nearest = min(data, key=lambda point: abs(point[0] - z))
        color = _rgb(color_for(nearest[1], scale))
        parts.append(
            f'<circle class="value-ring" cx="0" cy="0" r="{_n(1.15 * outer)}" '
            f'fill="none" stroke="{color}" stroke-width="{_n(0.12 * outer)}"/>'
        )
        parts.append(_text(0, 1.3 * outer - 0.02 * outer, 0.18 * outer, _n(nearest[1])))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# line plots


def _tick_values(lo: float, hi: float, target: int = 6) -> list:
    """Deterministic 1-2-5 tick progression covering [lo, hi]."""
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = 10 * magnitude
    for mult in (1, 2, 5, 10):
        if span / (mult * magnitude) <= target + 1:
            step = mult * magnitude
            break
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def render_plot(series, title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Multi-series line plot with a legend, linear axes auto-ranged with
    a 5% margin and 1-2-5 tick selection.

    ``series`` maps name -> list of (x, y) points (or is a list of such
    pairs); single-point and flat series pad their range by one unit.
    """
    if hasattr(series, "items"):
        series = list(series.items())
    series = [(name, list(points)) for name, points in series]
    if not series or any(not points for _, points in series):
        raise ValueError("every series must be non-empty")
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    if not all(math.isfinite(v) for v in xs + ys):
        raise ValueError("series values must be finite")

    def padded(lo, hi):
        if lo == hi:
            return lo - 1.0, hi + 1.0
        margin = 0.05 * (hi - lo)
        return lo - margin, hi + margin

    x_lo, x_hi = padded(min(xs), max(xs))
    y_lo, y_hi = padded(min(ys), max(ys))

    width, height = 640.0, 440.0
    left, right, top, bottom = 70.0, 170.0, 45.0, 55.0
    plot_w = width - left - right
    plot_h = height - top - bottom

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return top + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [_svg_open(0, 0, width, height)]
    parts.append(
        f'<rect class="frame" x="{_n(left)}" y="{_n(top)}" width="{_n(plot_w)}" '
        f'height="{_n(plot_h)}" fill="none" stroke="#444444" stroke-width="1"/>'
    )
    for tick in _tick_values(x_lo, x_hi):
        x = px(tick)
        parts.append(
            f'<line x1="{_n(x)}" y1="{_n(top + plot_h)}" x2="{_n(x)}" '
            f'y2="{_n(top + plot_h + 6)}" stroke="#444444" stroke-width="1"/>'
        )
        parts.append(_text(x, top + plot_h + 20, 12, _n(tick)))
    for tick in _tick_values(y_lo, y_hi):
        y = py(tick)
        parts.append(
            f'<line x1="{_n(left - 6)}" y1="{_n(y)}" x2="{_n(left)}" y2="{_n(y)}" '
            f'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(_text(left - 10, y + 4, 12, _n(tick), anchor="end"))
    if title:
        parts.append(_text(left + plot_w / 2, 25, 16, title))
    if x_label:
        parts.append(_text(left + plot_w / 2, height - 12, 13, x_label))
    if y_label:
        parts.append(
            f'<text x="18" y="{_n(top + plot_h / 2)}" font-family="{FONT}" '
            f'font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 18 {_n(top + plot_h / 2)})">{escape(y_label)}</text>'
        )

    for i, (name, points) in enumerate(series):
        color = SERIES_PALETTE[i % len(SERIES_PALETTE)]
        if len(points) == 1:
            x, y = points[0]
            parts.append(
                f'<circle class="series" data-name="{escape(str(name))}" '
                f'cx="{_n(px(x))}" cy="{_n(py(y))}" r="3" fill="{color}"/>'
            )
        else:
            coords = " ".join(f"{_n(px(x))},{_n(py(y))}" for x, y in points)
            parts.append(
                f'<polyline class="series" data-name="{escape(str(name))}" '
                f'points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = top + 10 + 18 * i
        lx = width - right + 14
        parts.append(
            f'<line x1="{_n(lx)}" y1="{_n(ly)}" x2="{_n(lx + 22)}" y2="{_n(ly)}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(_text(lx + 28, ly + 4, 12, name, anchor="start"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
