"""Shared builders for randomized and miniature reactors."""

import random

from reactorkit.model import (
    ASSEMBLY_TYPES,
    AssemblyDef,
    AssemblyType,
    DataEntry,
    Material,
    MaterialBlock,
    Phase,
    Reactor,
    ReactorType,
    Ring,
    RodDef,
    RodKind,
)

FEATURE_POOL = ["Axial Power", "Total Power", "Cross sections", "Velocity", "Temperature"]
UNIT_POOL = ["W", "W/cm", "K", "m/s", "1/cm"]
MATERIAL_POOL = [
    Material("UO2", Phase.SOLID),
    Material("helium", Phase.GAS),
    Material("zircaloy", Phase.SOLID),
    Material("water", Phase.LIQUID),
]


def random_rod(rng: random.Random, name: str) -> RodDef:
    blocks = []
    z = round(rng.uniform(0.0, 5.0), 3)
    for _ in range(rng.randint(1, 2)):
        z_end = z + round(rng.uniform(1.0, 100.0), 3)
        rings = []
        r = 0.0 if rng.random() < 0.5 else round(rng.uniform(0.01, 0.1), 4)
        for _ in range(rng.randint(1, 3)):
            outer = r + round(rng.uniform(0.05, 0.3), 4)
            rings.append(Ring(rng.choice(MATERIAL_POOL), r, outer, z_end - z))
            r = outer + (0.0 if rng.random() < 0.5 else 0.01)
        blocks.append(MaterialBlock(z, z_end, rings))
        z = z_end + rng.choice([0.0, 2.5])
    pressure = round(rng.uniform(0.1, 16.0), 3) if rng.random() < 0.4 else None
    return RodDef(name, rng.choice(list(RodKind)), blocks, pressure)


def random_reactor(rng: random.Random, index: int = 0) -> Reactor:
    """Small but structurally varied reactor: mixed types, 1-5 features,
    1-3 times, random occupancy and placements."""
    rtype = rng.choice([ReactorType.PWR, ReactorType.SFR])
    size = rng.randint(1, 17)
    if rtype is ReactorType.PWR:
        reactor = Reactor(f"reactor_{index}", rtype, size,
                          assembly_pitch=round(rng.uniform(10, 30), 2))
    else:
        reactor = Reactor(f"reactor_{index}", rtype, size,
                          lattice_pitch=round(rng.uniform(8, 16), 2),
                          flat_to_flat=round(rng.uniform(7, 15), 2))
    units = [reactor.add_unit(u) for u in rng.sample(UNIT_POOL, rng.randint(1, 3))]
    rod_indices = [
        reactor.add_rod_def(random_rod(rng, f"rod_{i}"))
        for i in range(rng.randint(1, 4))
    ]
    features = rng.sample(FEATURE_POOL, rng.randint(1, 5))
    times = sorted(rng.sample([0.0, 1.5, 10.0], rng.randint(1, 3)))

    def fill(provider, x, y):
        for feature in features:
            for t in times:
                for _ in range(rng.randint(1, 3)):
                    provider.add_data(feature, DataEntry(
                        rng.uniform(-10, 10), rng.uniform(0, 1), rng.choice(units),
                        (x, y, round(rng.uniform(0, 400), 3)), t,
                    ))

    def_indices = []
    for a in range(rng.randint(1, 3)):
        asize = rng.randint(1, 4)
        atype = rng.choice(ASSEMBLY_TYPES[rtype])
        assembly = AssemblyDef(
            f"assembly_{a}", atype, asize, rod_pitch=round(rng.uniform(0.5, 2.0), 3),
            duct_thickness=(round(rng.uniform(0.1, 0.5), 3)
                            if rtype is ReactorType.SFR and rng.random() < 0.7 else None),
        )
        occupied = []
        for row in range(asize):
            for col in range(asize):
                if rng.random() < 0.7:
                    assembly.set_rod(row, col, rng.choice(rod_indices))
                    occupied.append((row, col))
        def_indices.append(reactor.add_assembly_def(assembly))
        for row, col in occupied:
            if rng.random() < 0.8:
                fill(assembly.provider_at(row, col), col * 1.26, row * 1.26)

    if rng.random() < 0.3 and reactor.rod_defs:
        fill(rng.choice(reactor.rod_defs).attach_provider(), 0.0, 0.0)

    for _ in range(rng.randint(0, 2 * size)):
        idx = rng.choice(def_indices)
        atype = reactor.assembly_defs[idx].assembly_type
        reactor.set_assembly(atype, rng.randrange(size), rng.randrange(size), idx)
    return reactor.freeze()


def make_mini_pwr() -> Reactor:
    """Tiny PWR with one 2x2 assembly and a short data series; small
    enough to truncate at every byte offset quickly."""
    reactor = Reactor("mini_pwr", ReactorType.PWR, 2, assembly_pitch=21.5)
    w = reactor.add_unit("W")
    fuel = reactor.add_rod_def(RodDef("fuel", RodKind.FUEL, [
        MaterialBlock(0.0, 10.0, [
            Ring(Material("UO2", Phase.SOLID), 0.0, 0.4, 10.0),
            Ring(Material("helium", Phase.GAS), 0.4, 0.42, 10.0),
            Ring(Material("zircaloy", Phase.SOLID), 0.42, 0.48, 10.0),
        ]),
    ], pressure=2.25))
    assembly = AssemblyDef("mini_assembly", AssemblyType.FUEL, 2, rod_pitch=1.26)
    for row, col in ((0, 0), (0, 1), (1, 0)):
        assembly.set_rod(row, col, fuel)
        p = assembly.provider_at(row, col)
        for k in range(3):
            p.add_data("Axial Power", DataEntry(
                1.0 + row + col + 0.25 * k, 0.01, w,
                (col * 1.26, row * 1.26, 2.0 + 3.0 * k), 0.0,
            ))
    idx = reactor.add_assembly_def(assembly)
    reactor.set_assembly(AssemblyType.FUEL, 0, 0, idx)
    reactor.set_assembly(AssemblyType.FUEL, 1, 1, idx)
    return reactor.freeze()


def make_mini_sfr() -> Reactor:
    reactor = Reactor("mini_sfr", ReactorType.SFR, 3, lattice_pitch=12.0, flat_to_flat=11.7)
    w = reactor.add_unit("W")
    pin = reactor.add_rod_def(RodDef("pin", RodKind.FUEL, [
        MaterialBlock(0.0, 8.0, [
            Ring(Material("U-Zr", Phase.SOLID), 0.0, 0.27, 8.0),
            Ring(Material("steel", Phase.SOLID), 0.29, 0.34, 8.0),
        ]),
    ]))
    assembly = AssemblyDef("mini_hex", AssemblyType.FUEL, 3, rod_pitch=0.9,
                           duct_thickness=0.3)
    for row, col in ((1, 1), (0, 1), (1, 0), (2, 1), (1, 2), (2, 0), (0, 2)):
        assembly.set_rod(row, col, pin)
    p = assembly.provider_at(1, 1)
    for k in range(2):
        p.add_data("Pin Power", DataEntry(2.0 - k, 0.0, w, (0.9, 0.9, 1.0 + 2 * k), 0.5))
    idx = reactor.add_assembly_def(assembly)
    reactor.set_assembly(AssemblyType.FUEL, 1, 1, idx)
    return reactor.freeze()
