"""In-memory model of reactor parts and their state-point data.

The hierarchy mirrors the physical layout of a reactor rather than any
simulation mesh: a reactor core holds per-type grids of assemblies,
assemblies hold grids of rods/pins, rods are stacks of material blocks
made of concentric rings.  Geometric templates (:class:`RodDef`,
:class:`AssemblyDef`) are deduplicated: grids store indices into the
reactor's definition lists, so a core with hundreds of identical
assemblies carries each definition exactly once.

State-point data lives in :class:`DataProvider` containers.  Providers
are normally attached to an assembly at a grid location; they may also
be attached to a rod definition directly.  Queries union both, with the
assembly-level provider winning when a feature name is present in both.

Reactors are mutable while being built and must be frozen before they
are serialized or shared across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Phase(str, enum.Enum):
    GAS = "gas"
    LIQUID = "liquid"
    SOLID = "solid"


class RodKind(str, enum.Enum):
    FUEL = "fuel"
    CONTROL = "control"
    POISON = "poison"
    EMPTY = "empty"
    REFLECTOR = "reflector"


class ReactorType(str, enum.Enum):
    PWR = "PWR"
    SFR = "SFR"


class AssemblyType(str, enum.Enum):
    # PWR
    FUEL = "fuel"
    CONTROL_BANK = "control_bank"
    INCORE_INSTRUMENT = "incore_instrument"
    ROD_CLUSTER = "rod_cluster"
    # SFR (fuel is shared)
    CONTROL = "control"
    REFLECTOR = "reflector"
    SHIELD = "shield"
    TEST = "test"


#: Assembly types allowed per reactor type, in canonical order.
ASSEMBLY_TYPES = {
    ReactorType.PWR: (
        AssemblyType.FUEL,
        AssemblyType.CONTROL_BANK,
        AssemblyType.INCORE_INSTRUMENT,
        AssemblyType.ROD_CLUSTER,
    ),
    ReactorType.SFR: (
        AssemblyType.FUEL,
        AssemblyType.CONTROL,
        AssemblyType.REFLECTOR,
        AssemblyType.SHIELD,
        AssemblyType.TEST,
    ),
}

MAX_GRID_SIZE = 702  # ZZ in bijective base-26


class FrozenError(RuntimeError):
    """Raised when mutating a reactor after it has been frozen."""


def _letters(n: int) -> str:
    """Spreadsheet-style row letter for 1-based n: A..Z, AA, AB, ..."""
    out = []
    while n > 0:
        n, rem = divmod(n - 1, 26)
        out.append(chr(ord("A") + rem))
    return "".join(reversed(out))


def make_default_labels(size: int) -> "GridLabels":
    """Default grid labels: rows A, B, ... Z, AA, ...; columns "1".."size"."""
    if not 1 <= size <= MAX_GRID_SIZE:
        raise ValueError(f"grid size must be in 1..{MAX_GRID_SIZE}, got {size}")
    rows = [_letters(i) for i in range(1, size + 1)]
    cols = [str(i) for i in range(1, size + 1)]
    return GridLabels(rows, cols)


@dataclass(frozen=True)
class GridLabels:
    """Row and column labels of a square grid, unique within each axis."""

    row_labels: tuple
    column_labels: tuple

    def __init__(self, row_labels, column_labels):
        object.__setattr__(self, "row_labels", tuple(row_labels))
        object.__setattr__(self, "column_labels", tuple(column_labels))
        for axis, labels in (("row", self.row_labels), ("column", self.column_labels)):
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate {axis} labels")

    def check_size(self, size: int) -> None:
        if len(self.row_labels) != size or len(self.column_labels) != size:
            raise ValueError(
                f"labels sized {len(self.row_labels)}x{len(self.column_labels)} "
                f"do not match grid size {size}"
            )

    def cell_name(self, row: int, col: int) -> str:
        return self.row_labels[row] + self.column_labels[col]

    def parse_cell(self, name: str) -> tuple[int, int]:
        """Resolve a concatenated row+column label like "B2" to (row, col)."""
        for i, rl in enumerate(self.row_labels):
            if name.startswith(rl):
                rest = name[len(rl):]
                for j, cl in enumerate(self.column_labels):
                    if rest == cl:
                        return i, j
        raise KeyError(f"no grid cell labelled {name!r}")


@dataclass(frozen=True)
class Material:
    name: str
    phase: Phase

    def __post_init__(self):
        if not self.name:
            raise ValueError("material name must be non-empty")
        object.__setattr__(self, "phase", Phase(self.phase))


@dataclass(frozen=True)
class Ring:
    """Annulus of a single material: inner/outer radius and height, in cm."""

    material: Material
    inner_radius: float
    outer_radius: float
    height: float

    def __post_init__(self):
        if not 0 <= self.inner_radius < self.outer_radius:
            raise ValueError(
                f"need 0 <= inner < outer, got [{self.inner_radius}, {self.outer_radius})"
            )
        if self.height <= 0:
            raise ValueError("ring height must be positive")


class MaterialBlock:
    """Axial segment [z_start, z_end) of concentric, non-overlapping rings."""

    def __init__(self, z_start: float, z_end: float, rings):
        if z_start >= z_end:
            raise ValueError(f"need z_start < z_end, got [{z_start}, {z_end})")
        self.z_start = float(z_start)
        self.z_end = float(z_end)
        self.rings = sorted(rings, key=lambda r: r.inner_radius)
        for prev, cur in zip(self.rings, self.rings[1:]):
            if prev.outer_radius > cur.inner_radius:
                raise ValueError(
                    f"rings overlap: [{prev.inner_radius}, {prev.outer_radius}) and "
                    f"[{cur.inner_radius}, {cur.outer_radius})"
                )

    def ring_at(self, r: float):
        for ring in self.rings:
            if ring.inner_radius <= r < ring.outer_radius:
                return ring
        return None

    def __eq__(self, other):
        if not isinstance(other, MaterialBlock):
            return NotImplemented
        return (self.z_start, self.z_end, self.rings) == (
            other.z_start,
            other.z_end,
            other.rings,
        )

    def __repr__(self):
        return f"MaterialBlock([{self.z_start}, {self.z_end}), {len(self.rings)} rings)"


class RodDef:
    """Deduplicated rod/pin template: a stack of material blocks.

    A rod may carry its own :class:`DataProvider`; in the usual layout the
    data lives on the assembly at the rod's grid position instead.
    """

    def __init__(self, name: str, kind: RodKind, blocks, pressure: float | None = None):
        if not name:
            raise ValueError("rod name must be non-empty")
        self.name = name
        self.kind = RodKind(kind)
        self.blocks = sorted(blocks, key=lambda b: b.z_start)
        for prev, cur in zip(self.blocks, self.blocks[1:]):
            if prev.z_end > cur.z_start:
                raise ValueError(
                    f"blocks overlap: [{prev.z_start}, {prev.z_end}) and "
                    f"[{cur.z_start}, {cur.z_end})"
                )
        self.pressure = None if pressure is None else float(pressure)
        self.provider: DataProvider | None = None
        self._frozen = False

    @property
    def height(self) -> float:
        """Total height, max z_end - min z_start (zero for an empty stack)."""
        if not self.blocks:
            return 0.0
        return self.blocks[-1].z_end - self.blocks[0].z_start

    def ring_at(self, z: float, r: float):
        """Ring of the block containing z with inner <= r < outer, else None."""
        for block in self.blocks:
            if block.z_start <= z < block.z_end:
                return block.ring_at(r)
        return None

    def attach_provider(self) -> "DataProvider":
        if self._frozen:
            raise FrozenError("rod def is frozen")
        if self.provider is None:
            self.provider = DataProvider()
        return self.provider

    def __eq__(self, other):
        if not isinstance(other, RodDef):
            return NotImplemented
        return (self.name, self.kind, self.blocks, self.pressure, self.provider) == (
            other.name,
            other.kind,
            other.blocks,
            other.pressure,
            other.provider,
        )

    def __repr__(self):
        return f"RodDef({self.name!r}, {self.kind.value}, {len(self.blocks)} blocks)"


@dataclass(frozen=True)
class DataEntry:
    """One stored value: position in three dimensions plus time, with
    uncertainty and a units-table index.  An uncertainty of 0.0 means
    "not reported"."""

    value: float
    uncertainty: float
    units_id: int
    position: tuple
    time: float

    def __post_init__(self):
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be >= 0")
        if self.units_id < 0:
            raise ValueError("units_id must be >= 0")
        pos = tuple(float(c) for c in self.position)
        if len(pos) != 3:
            raise ValueError("position must be (x, y, z)")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "uncertainty", float(self.uncertainty))
        object.__setattr__(self, "time", float(self.time))


class DataProvider:
    """Associative container of data entries, keyed by feature tag and time.

    Entries within a (feature, time) bucket keep insertion order.
    """

    def __init__(self):
        self._features: dict[str, dict[float, list[DataEntry]]] = {}
        self._frozen = False

    def add_data(self, feature: str, entry: DataEntry) -> None:
        if self._frozen:
            raise FrozenError("provider is frozen")
        if not feature:
            raise ValueError("feature name must be non-empty")
        self._features.setdefault(feature, {}).setdefault(entry.time, []).append(entry)

    def features(self) -> list[str]:
        return list(self._features)

    def times(self, feature: str) -> list[float]:
        if feature not in self._features:
            raise KeyError(f"no feature {feature!r}")
        return list(self._features[feature])

    def entries(self, feature: str, time: float) -> list[DataEntry]:
        if feature not in self._features:
            raise KeyError(f"no feature {feature!r}")
        buckets = self._features[feature]
        if time not in buckets:
            raise KeyError(f"feature {feature!r} has no data at t={time}")
        return list(buckets[time])

    def has(self, feature: str, time: float | None = None) -> bool:
        if feature not in self._features:
            return False
        return time is None or time in self._features[feature]

    def __len__(self):
        return sum(len(b) for t in self._features.values() for b in t.values())

    def __eq__(self, other):
        if not isinstance(other, DataProvider):
            return NotImplemented
        return self._features == other._features

    def __repr__(self):
        return f"DataProvider({list(self._features)})"


class AssemblyDef:
    """Deduplicated assembly template: a size x size grid of rod indices
    plus a parallel grid of per-position data providers.

    Rod indices refer to the owning reactor's rod_defs list; provider
    entries may exist only at occupied rod positions.
    """

    def __init__(
        self,
        name: str,
        assembly_type: AssemblyType,
        size: int,
        rod_pitch: float,
        duct_thickness: float | None = None,
        labels: GridLabels | None = None,
    ):
        if not name:
            raise ValueError("assembly name must be non-empty")
        if size < 1:
            raise ValueError("assembly size must be positive")
        self.name = name
        self.assembly_type = AssemblyType(assembly_type)
        self.size = size
        self.rod_pitch = float(rod_pitch)
        self.duct_thickness = None if duct_thickness is None else float(duct_thickness)
        self.labels = labels or make_default_labels(size)
        self.labels.check_size(size)
        self.rod_grid: list[list[int | None]] = [[None] * size for _ in range(size)]
        self.provider_grid: list[list[DataProvider | None]] = [
            [None] * size for _ in range(size)
        ]
        self._owner: Reactor | None = None
        self._frozen = False

    def _check_cell(self, row: int, col: int) -> None:
        if not (0 <= row < self.size and 0 <= col < self.size):
            raise ValueError(
                f"cell ({row}, {col}) outside {self.size}x{self.size} assembly"
            )

    def set_rod(self, row: int, col: int, rod_index: int | None) -> None:
        if self._frozen:
            raise FrozenError("assembly def is frozen")
        self._check_cell(row, col)
        self.rod_grid[row][col] = rod_index

    def rod_index_at(self, row: int, col: int) -> int | None:
        self._check_cell(row, col)
        return self.rod_grid[row][col]

    def rod_at(self, row: int, col: int) -> RodDef | None:
        idx = self.rod_index_at(row, col)
        if idx is None:
            return None
        if self._owner is None:
            raise ValueError(f"assembly def {self.name!r} is not attached to a reactor")
        return self._owner.rod_defs[idx]

    def occupied(self):
        """Occupied (row, col) cells in row-major order."""
        return [
            (r, c)
            for r in range(self.size)
            for c in range(self.size)
            if self.rod_grid[r][c] is not None
        ]

    def provider_at(self, row: int, col: int) -> DataProvider:
        """Provider at an occupied cell, created on first use."""
        self._check_cell(row, col)
        if self.rod_grid[row][col] is None:
            raise ValueError(f"cell ({row}, {col}) holds no rod")
        if self.provider_grid[row][col] is None:
            if self._frozen:
                raise FrozenError("assembly def is frozen")
            self.provider_grid[row][col] = DataProvider()
        return self.provider_grid[row][col]

    def get_provider(self, row: int, col: int) -> DataProvider | None:
        self._check_cell(row, col)
        return self.provider_grid[row][col]

    def features(self) -> list[str]:
        """Union of feature tags over all cells and rod-attached providers."""
        seen = {}
        for r, c in self.occupied():
            p = self.provider_grid[r][c]
            if p is not None:
                for f in p.features():
                    seen[f] = True
            rod = self.rod_at(r, c)
            if rod is not None and rod.provider is not None:
                for f in rod.provider.features():
                    seen[f] = True
        return list(seen)

    def times(self, feature: str) -> list[float]:
        seen = {}
        for r, c in self.occupied():
            for p in self._providers_for(r, c, feature):
                if p.has(feature):
                    for t in p.times(feature):
                        seen[t] = True
                    break
        if not seen:
            raise KeyError(f"no feature {feature!r} on assembly {self.name!r}")
        return sorted(seen)

    def _providers_for(self, row: int, col: int, feature: str):
        """Providers to consult for a feature, assembly-level first."""
        out = []
        p = self.provider_grid[row][col]
        if p is not None:
            out.append(p)
        rod = self.rod_at(row, col)
        if rod is not None and rod.provider is not None:
            out.append(rod.provider)
        return out

    def axial_series(self, row: int, col: int, feature: str, time: float):
        """(z, value, uncertainty) triples at a pin, sorted ascending by z.

        The assembly-level provider wins when both it and the rod carry
        the feature.
        """
        self._check_cell(row, col)
        if self.rod_grid[row][col] is None:
            raise KeyError(f"cell ({row}, {col}) holds no rod")
        for p in self._providers_for(row, col, feature):
            if p.has(feature):
                entries = p.entries(feature, time)  # raises KeyError on bad time
                triples = [(e.position[2], e.value, e.uncertainty) for e in entries]
                triples.sort(key=lambda t: t[0])
                return triples
        raise KeyError(f"no feature {feature!r} at cell ({row}, {col})")

    def level_count(self, feature: str, time: float) -> int:
        """Number of axial levels stored for a feature, from the first
        occupied pin carrying it."""
        for r, c in self.occupied():
            try:
                return len(self.axial_series(r, c, feature, time))
            except KeyError:
                continue
        raise KeyError(f"no feature {feature!r} on assembly {self.name!r}")

    def __eq__(self, other):
        if not isinstance(other, AssemblyDef):
            return NotImplemented
        return (
            self.name,
            self.assembly_type,
            self.size,
            self.rod_pitch,
            self.duct_thickness,
            self.labels,
            self.rod_grid,
            self.provider_grid,
        ) == (
            other.name,
            other.assembly_type,
            other.size,
            other.rod_pitch,
            other.duct_thickness,
            other.labels,
            other.rod_grid,
            other.provider_grid,
        )

    def __repr__(self):
        return (
            f"AssemblyDef({self.name!r}, {self.assembly_type.value}, "
            f"{self.size}x{self.size})"
        )


class Reactor:
    """Root of the part hierarchy: a PWR square lattice or SFR hex lattice.

    Each assembly type gets its own size x size grid, so two types may
    occupy the same position.  SFR grids use axial (rhombic) coordinates
    stored in the same square arrays, with unoccupied corners left empty.

    Build with the add_* / set_assembly methods, then call :meth:`freeze`.
    A frozen reactor validates all cross-references, becomes immutable
    and may be shared across threads.
    """

    def __init__(
        self,
        name: str,
        reactor_type: ReactorType,
        size: int,
        assembly_pitch: float | None = None,
        lattice_pitch: float | None = None,
        flat_to_flat: float | None = None,
        labels: GridLabels | None = None,
    ):
        if not name:
            raise ValueError("reactor name must be non-empty")
        if size < 1:
            raise ValueError("reactor size must be positive")
        self.name = name
        self.reactor_type = ReactorType(reactor_type)
        self.size = size
        if self.reactor_type is ReactorType.PWR:
            if assembly_pitch is None:
                raise ValueError("PWR requires assembly_pitch")
            if lattice_pitch is not None or flat_to_flat is not None:
                raise ValueError("lattice_pitch/flat_to_flat are SFR-only")
            self.assembly_pitch = float(assembly_pitch)
            self.lattice_pitch = None
            self.flat_to_flat = None
        else:
            if lattice_pitch is None or flat_to_flat is None:
                raise ValueError("SFR requires lattice_pitch and flat_to_flat")
            if assembly_pitch is not None:
                raise ValueError("assembly_pitch is PWR-only")
            self.assembly_pitch = None
            self.lattice_pitch = float(lattice_pitch)
            self.flat_to_flat = float(flat_to_flat)
        self.labels = labels or make_default_labels(size)
        self.labels.check_size(size)
        self.units_table: list[str] = []
        self.rod_defs: list[RodDef] = []
        self.assembly_defs: list[AssemblyDef] = []
        self.grids: dict[AssemblyType, list[list[int | None]]] = {
            t: [[None] * size for _ in range(size)]
            for t in ASSEMBLY_TYPES[self.reactor_type]
        }
        self._frozen = False

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _mutable(self) -> None:
        if self._frozen:
            raise FrozenError(f"reactor {self.name!r} is frozen")

    def add_unit(self, unit: str) -> int:
        """Intern a units string, returning its stable table index."""
        try:
            return self.units_table.index(unit)
        except ValueError:
            self._mutable()
            self.units_table.append(unit)
            return len(self.units_table) - 1

    def add_rod_def(self, rod: RodDef) -> int:
        self._mutable()
        if any(r.name == rod.name for r in self.rod_defs):
            raise ValueError(f"duplicate rod def name {rod.name!r}")
        self.rod_defs.append(rod)
        return len(self.rod_defs) - 1

    def add_assembly_def(self, assembly: AssemblyDef) -> int:
        self._mutable()
        if assembly.assembly_type not in self.grids:
            raise TypeError(
                f"assembly type {assembly.assembly_type.value!r} not valid "
                f"for a {self.reactor_type.value}"
            )
        if assembly.duct_thickness is not None and self.reactor_type is ReactorType.PWR:
            raise ValueError("duct_thickness is SFR-only")
        if any(a.name == assembly.name for a in self.assembly_defs):
            raise ValueError(f"duplicate assembly def name {assembly.name!r}")
        assembly._owner = self
        self.assembly_defs.append(assembly)
        return len(self.assembly_defs) - 1

    def set_assembly(self, assembly_type, row: int, col: int, def_index: int | None) -> None:
        """Place an assembly def (by index) into the grid of its type."""
        self._mutable()
        assembly_type = AssemblyType(assembly_type)
        if assembly_type not in self.grids:
            raise TypeError(
                f"no {assembly_type.value!r} grid on a {self.reactor_type.value}"
            )
        if not (0 <= row < self.size and 0 <= col < self.size):
            raise ValueError(f"cell ({row}, {col}) outside {self.size}x{self.size} core")
        if def_index is not None:
            if not 0 <= def_index < len(self.assembly_defs):
                raise ValueError(f"assembly def index {def_index} out of range")
            if self.assembly_defs[def_index].assembly_type is not assembly_type:
                raise TypeError(
                    f"def {def_index} has type "
                    f"{self.assembly_defs[def_index].assembly_type.value!r}, "
                    f"not {assembly_type.value!r}"
                )
        self.grids[assembly_type][row][col] = def_index

    def assembly_at(self, assembly_type, row: int, col: int) -> AssemblyDef | None:
        assembly_type = AssemblyType(assembly_type)
        if assembly_type not in self.grids:
            raise KeyError(
                f"no {assembly_type.value!r} grid on a {self.reactor_type.value}"
            )
        idx = self.grids[assembly_type][row][col]
        return None if idx is None else self.assembly_defs[idx]

    def _validate(self) -> None:
        if len(set(self.units_table)) != len(self.units_table):
            raise ValueError("units table entries must be unique")
        n_units = len(self.units_table)
        n_rods = len(self.rod_defs)

        def check_provider(p: DataProvider, where: str) -> None:
            for f in p.features():
                for t in p.times(f):
                    for e in p.entries(f, t):
                        if e.units_id >= n_units:
                            raise ValueError(
                                f"units_id {e.units_id} out of range at {where}"
                            )

        for rod in self.rod_defs:
            if rod.provider is not None:
                check_provider(rod.provider, f"rod {rod.name!r}")
        for a in self.assembly_defs:
            if a._owner is not self:
                raise ValueError(f"assembly def {a.name!r} not owned by this reactor")
            for r in range(a.size):
                for c in range(a.size):
                    idx = a.rod_grid[r][c]
                    if idx is not None and not 0 <= idx < n_rods:
                        raise ValueError(
                            f"rod index {idx} out of range in assembly {a.name!r}"
                        )
                    p = a.provider_grid[r][c]
                    if p is not None:
                        if idx is None:
                            raise ValueError(
                                f"provider at empty cell ({r}, {c}) "
                                f"of assembly {a.name!r}"
                            )
                        check_provider(p, f"assembly {a.name!r} cell ({r}, {c})")
        for atype, grid in self.grids.items():
            for row in grid:
                for idx in row:
                    if idx is None:
                        continue
                    if not 0 <= idx < len(self.assembly_defs):
                        raise ValueError(f"assembly index {idx} out of range")
                    if self.assembly_defs[idx].assembly_type is not atype:
                        raise ValueError(
                            f"def {idx} placed in wrong grid {atype.value!r}"
                        )

    def freeze(self) -> "Reactor":
        """Validate all invariants and lock the reactor; returns self.

        Providers that were created but never filled are dropped so that
        a stored-and-reloaded reactor compares equal to the original.
        """
        if self._frozen:
            return self
        for rod in self.rod_defs:
            if rod.provider is not None and not rod.provider.features():
                rod.provider = None
        for a in self.assembly_defs:
            for row in a.provider_grid:
                for c, p in enumerate(row):
                    if p is not None and not p.features():
                        row[c] = None
        self._validate()
        self._frozen = True
        for rod in self.rod_defs:
            rod._frozen = True
            if rod.provider is not None:
                rod.provider._frozen = True
        for a in self.assembly_defs:
            a._frozen = True
            for row in a.provider_grid:
                for p in row:
                    if p is not None:
                        p._frozen = True
        return self

    def __eq__(self, other):
        if not isinstance(other, Reactor):
            return NotImplemented
        return (
            self.name,
            self.reactor_type,
            self.size,
            self.assembly_pitch,
            self.lattice_pitch,
            self.flat_to_flat,
            self.labels,
            self.units_table,
            self.rod_defs,
            self.assembly_defs,
            self.grids,
        ) == (
            other.name,
            other.reactor_type,
            other.size,
            other.assembly_pitch,
            other.lattice_pitch,
            other.flat_to_flat,
            other.labels,
            other.units_table,
            other.rod_defs,
            other.assembly_defs,
            other.grids,
        )

    def __repr__(self):
        return (
            f"Reactor({self.name!r}, {self.reactor_type.value}, "
            f"{self.size}x{self.size}, {len(self.assembly_defs)} assembly defs)"
        )
