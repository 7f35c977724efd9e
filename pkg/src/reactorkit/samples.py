"""Deterministic synthetic sample reactors for the CLI presets and tests.

The PWR preset mirrors the shapes of a single 17x17 fuel assembly at
beginning of life, refined with 49 axial levels and two data features;
the values themselves are synthetic (a chopped-cosine axial shape with a
mild radial tilt), not simulation output.  The SFR preset is a small
hex core with a seven-pin fuel assembly carrying seeded random data.
"""

from __future__ import annotations

import math
import random
import time as _time

from .model import (
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
from . import nrdf, reactor_io

#: guide-tube positions of a 17x17 lattice, 1-based (row, col); the
#: center position holds the instrument tube.
GUIDE_TUBE_CELLS = frozenset(
    [(3, 6), (3, 9), (3, 12), (4, 4), (4, 14)]
    + [(6, c) for c in (3, 6, 9, 12, 15)]
    + [(9, c) for c in (3, 6, 12, 15)]
    + [(12, c) for c in (3, 6, 9, 12, 15)]
    + [(14, 4), (14, 14)]
    + [(15, 6), (15, 9), (15, 12)]
)
INSTRUMENT_CELL = (9, 9)

ACTIVE_HEIGHT_CM = 365.76
N_LEVELS = 49

UO2 = Material("UO2 fuel", "solid")
HELIUM = Material("helium fill gas", "gas")
ZIRC = Material("zircaloy clad", "solid")
WATER = Material("borated water", "liquid")
AIC = Material("Ag-In-Cd absorber", "solid")
STEEL = Material("stainless steel", "solid")
SODIUM = Material("sodium coolant", "liquid")
UMETAL = Material("U-Zr fuel", "solid")
B4C = Material("B4C poison", "solid")


def _fuel_rod(h: float = ACTIVE_HEIGHT_CM) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(UO2, 0.0, 0.4096, h),
        Ring(HELIUM, 0.4096, 0.418, h),
        Ring(ZIRC, 0.418, 0.475, h),
    ])
    return RodDef("fuel_rod", RodKind.FUEL, [block], pressure=2.25)


def _guide_tube(h: float = ACTIVE_HEIGHT_CM) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(WATER, 0.0, 0.561, h),
        Ring(ZIRC, 0.561, 0.602, h),
    ])
    return RodDef("guide_tube", RodKind.EMPTY, [block])


def _instrument_tube(h: float = ACTIVE_HEIGHT_CM) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(WATER, 0.0, 0.559, h),
        Ring(STEEL, 0.559, 0.605, h),
    ])
    return RodDef("instrument_tube", RodKind.EMPTY, [block])


def _control_rod(h: float = ACTIVE_HEIGHT_CM) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(AIC, 0.0, 0.382, h),
        Ring(HELIUM, 0.382, 0.386, h),
        Ring(STEEL, 0.386, 0.484, h),
    ])
    return RodDef("control_rod", RodKind.CONTROL, [block])


def _poison_rod(h: float = ACTIVE_HEIGHT_CM) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(B4C, 0.0, 0.373, h),
        Ring(HELIUM, 0.373, 0.386, h),
        Ring(STEEL, 0.386, 0.484, h),
    ])
    return RodDef("poison_rod", RodKind.POISON, [block])


def _axial_shape(k: int, levels: int, height: float) -> tuple[float, float]:
    """(z, chopped-cosine shape) for level k (0-based)."""
    z = (k + 0.5) * height / levels
    extrapolated = height * 1.12
    return z, math.cos(math.pi * (z - height / 2.0) / extrapolated)


def _radial_factor(row: int, col: int, size: int) -> float:
    """Mild deterministic tilt: higher next to guide tubes, dip at edges."""
    center = (size - 1) / 2.0
    d = math.hypot(row - center, col - center)
    bump = 0.0
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if (row + dr + 1, col + dc + 1) in GUIDE_TUBE_CELLS and size == 17:
                bump += 0.02
    return 1.0 + bump - 0.012 * d


def _fill_pin_data(assembly: AssemblyDef, units, levels: int, height: float,
                   features=("Axial Power", "Total Power")) -> None:
    """Synthetic per-pin data: every occupied cell gets every feature."""
    watts_per_cm, watts = units
    for row, col in assembly.occupied():
        rod = assembly.rod_at(row, col)
        scale = 1.0 if rod.kind is RodKind.FUEL else 0.05
        scale *= _radial_factor(row, col, assembly.size)
        x = col * assembly.rod_pitch
        y = row * assembly.rod_pitch
        provider = assembly.provider_at(row, col)
        total = 0.0
        for k in range(levels):
            z, shape = _axial_shape(k, levels, height)
            value = scale * shape
            total += value * height / levels
            if "Axial Power" in features:
                provider.add_data("Axial Power", DataEntry(
                    value, 0.005 * abs(value), watts_per_cm, (x, y, z), 0.0,
                ))
            if "Temperature" in features:
                provider.add_data("Temperature", DataEntry(
                    560.0 + 40.0 * value, 0.5, watts, (x, y, z), 0.0,
                ))
        if "Total Power" in features:
            provider.add_data("Total Power", DataEntry(
                total, 0.002 * abs(total), watts, (x, y, height / 2.0), 0.0,
            ))


def _pwr_fuel_assembly(name: str, rod_indices: dict) -> AssemblyDef:
    assembly = AssemblyDef(name, AssemblyType.FUEL, 17, rod_pitch=1.26)
    for row in range(17):
        for col in range(17):
            cell = (row + 1, col + 1)
            if cell == INSTRUMENT_CELL:
                assembly.set_rod(row, col, rod_indices["instrument_tube"])
            elif cell in GUIDE_TUBE_CELLS:
                assembly.set_rod(row, col, rod_indices["guide_tube"])
            else:
                assembly.set_rod(row, col, rod_indices["fuel_rod"])
    return assembly


def make_3a(name: str = "pwr_3a") -> Reactor:
    """A 5x5 PWR core: a 17x17 fuel assembly with 49-level synthetic data
    in the middle, ringed by control banks, with an in-core instrument
    sharing the center position in its own grid."""
    reactor = Reactor(name, ReactorType.PWR, 5, assembly_pitch=21.5)
    w_cm = reactor.add_unit("W/cm")
    w = reactor.add_unit("W")
    rods = {}
    for make in (_fuel_rod, _guide_tube, _instrument_tube, _control_rod):
        rod = make()
        rods[rod.name] = reactor.add_rod_def(rod)

    fuel = _pwr_fuel_assembly("assembly_3a", rods)
    fuel_idx = reactor.add_assembly_def(fuel)
    _fill_pin_data(fuel, (w_cm, w), N_LEVELS, ACTIVE_HEIGHT_CM)

    bank = AssemblyDef("control_bank", AssemblyType.CONTROL_BANK, 17, rod_pitch=1.26)
    for row, col in [(r - 1, c - 1) for r, c in GUIDE_TUBE_CELLS]:
        bank.set_rod(row, col, rods["control_rod"])
    bank_idx = reactor.add_assembly_def(bank)

    instrument = AssemblyDef("incore_instrument", AssemblyType.INCORE_INSTRUMENT, 1,
                             rod_pitch=1.26)
    instrument.set_rod(0, 0, rods["instrument_tube"])
    instr_idx = reactor.add_assembly_def(instrument)

    center = reactor.size // 2
    reactor.set_assembly(AssemblyType.FUEL, center, center, fuel_idx)
    for row in range(reactor.size):
        for col in range(reactor.size):
            if (row, col) != (center, center):
                reactor.set_assembly(AssemblyType.CONTROL_BANK, row, col, bank_idx)
    reactor.set_assembly(AssemblyType.INCORE_INSTRUMENT, center, center, instr_idx)
    return reactor.freeze()


def make_3a_quarter(name: str = "pwr_3a_quarter") -> Reactor:
    """Southeast quarter of the 17x17 assembly (9x9, instrument at the
    corner), geometry only."""
    reactor = Reactor(name, ReactorType.PWR, 1, assembly_pitch=21.5)
    rods = {}
    for make in (_fuel_rod, _guide_tube, _instrument_tube):
        rod = make()
        rods[rod.name] = reactor.add_rod_def(rod)
    quarter = AssemblyDef("assembly_3a_quarter", AssemblyType.FUEL, 9, rod_pitch=1.26)
    for row in range(9):
        for col in range(9):
            cell = (row + 9, col + 9)  # rows/cols 9..17 of the full map
            if cell == INSTRUMENT_CELL:
                quarter.set_rod(row, col, rods["instrument_tube"])
            elif cell in GUIDE_TUBE_CELLS:
                quarter.set_rod(row, col, rods["guide_tube"])
            else:
                quarter.set_rod(row, col, rods["fuel_rod"])
    idx = reactor.add_assembly_def(quarter)
    reactor.set_assembly(AssemblyType.FUEL, 0, 0, idx)
    return reactor.freeze()


def hex_cells(size: int):
    """Cells of a size x size rhombic (axial-coordinate) array forming a
    hexagon: corners beyond the hex radius are excluded."""
    radius = (size - 1) // 2
    center = (size - 1) / 2.0
    out = []
    for r in range(size):
        for q in range(size):
            dq = q - center
            dr = r - center
            if (abs(dq) + abs(dr) + abs(dq + dr)) / 2.0 <= radius:
                out.append((r, q))
    return out


def _sfr_fuel_pin(h: float = 80.0) -> RodDef:
    block = MaterialBlock(0.0, h, [
        Ring(UMETAL, 0.0, 0.27, h),
        Ring(SODIUM, 0.27, 0.29, h),
        Ring(STEEL, 0.29, 0.34, h),
    ])
    return RodDef("sfr_fuel_pin", RodKind.FUEL, [block])


def make_sfr7(name: str = "sfr7", seed: int = 2718) -> Reactor:
    """Small hex SFR: seven fuel assemblies, each a seven-pin cluster
    with seeded random pin power over 10 axial levels."""
    rng = random.Random(seed)
    reactor = Reactor(name, ReactorType.SFR, 5, lattice_pitch=12.0, flat_to_flat=11.7)
    w = reactor.add_unit("W")
    pin_idx = reactor.add_rod_def(_sfr_fuel_pin())

    assembly = AssemblyDef("sfr_fuel_assembly", AssemblyType.FUEL, 3,
                           rod_pitch=0.9, duct_thickness=0.3)
    for row, col in hex_cells(3):
        assembly.set_rod(row, col, pin_idx)
    height = 80.0
    levels = 10
    for row, col in hex_cells(3):
        provider = assembly.provider_at(row, col)
        base = rng.uniform(0.8, 1.2)
        for k in range(levels):
            z = (k + 0.5) * height / levels
            value = base * (1.0 + 0.3 * math.sin(math.pi * z / height)) + rng.uniform(-0.05, 0.05)
            provider.add_data("Pin Power", DataEntry(
                value, 0.01, w, (col * 0.9, row * 0.9, z), 0.0,
            ))
    a_idx = reactor.add_assembly_def(assembly)
    for row, col in hex_cells(5):
        if (abs(row - 2) + abs(col - 2) + abs(row + col - 4)) / 2.0 <= 1:
            reactor.set_assembly(AssemblyType.FUEL, row, col, a_idx)
    return reactor.freeze()


PRESETS = {"3a": make_3a, "sfr7": make_sfr7}


def make_bench_reactor(pins: int = 52800, levels: int = 49,
                       name: str = "bench_core") -> Reactor:
    """Full-core benchmark: one 17x17 assembly definition (264 fuel/poison
    pins, five distinct rod types) shared by as many core positions as it
    takes to reach the requested pin count, with two data features."""
    n_assemblies = max(1, math.ceil(pins / 264))
    size = 1
    while size * size < n_assemblies:
        size += 2  # odd cores, like real ones
    reactor = Reactor(name, ReactorType.PWR, size, assembly_pitch=21.5)
    units = (reactor.add_unit("W/cm"), reactor.add_unit("K"))
    rods = {}
    for make in (_fuel_rod, _poison_rod, _guide_tube, _instrument_tube, _control_rod):
        rod = make()
        rods[rod.name] = reactor.add_rod_def(rod)

    assembly = _pwr_fuel_assembly("bench_assembly", rods)
    # a few poison pins and a partly inserted bank make all five types real
    for row, col in ((2, 2), (2, 14), (14, 2), (14, 14), (5, 8), (8, 5), (11, 8), (8, 11)):
        assembly.set_rod(row, col, rods["poison_rod"])
    for row, col in ((5, 2), (5, 14), (11, 2), (11, 14)):
        assembly.set_rod(row, col, rods["control_rod"])
    idx = reactor.add_assembly_def(assembly)
    _fill_pin_data(assembly, units, levels, ACTIVE_HEIGHT_CM,
                   features=("Axial Power", "Temperature"))

    placed = 0
    for row in range(size):
        for col in range(size):
            if placed >= n_assemblies:
                break
            reactor.set_assembly(AssemblyType.FUEL, row, col, idx)
            placed += 1
    return reactor.freeze()


def run_bench(pins: int = 52800, levels: int = 49):
    """Build the benchmark core, write it and read it back, timing both.

    Returns a dict with wall-clock seconds, the file size and the counts
    that show the deduplicated layout (definitions stored once).
    """
    reactor = make_bench_reactor(pins, levels)
    t0 = _time.perf_counter()
    data = nrdf.to_bytes(reactor_io.store_reactor(reactor))
    write_s = _time.perf_counter() - t0
    t0 = _time.perf_counter()
    loaded = reactor_io.load_reactor(nrdf.read_file(data))
    read_s = _time.perf_counter() - t0
    placements = sum(
        1 for row in loaded.grids[AssemblyType.FUEL] for idx in row if idx is not None
    )
    return {
        "pins": 264 * placements,
        "levels": levels,
        "assemblies_placed": placements,
        "assembly_defs_stored": len(loaded.assembly_defs),
        "rod_defs_stored": len(loaded.rod_defs),
        "file_bytes": len(data),
        "write_seconds": write_s,
        "read_seconds": read_s,
        "round_trip_equal": loaded == reactor,
    }
