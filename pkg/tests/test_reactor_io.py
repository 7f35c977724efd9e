import random

import pytest

from reactorkit import nrdf, reactor_io, samples
from reactorkit.model import (
    AssemblyDef,
    AssemblyType,
    DataEntry,
    Reactor,
    ReactorType,
)
from reactorkit.nrdf import LayoutError

from helpers import make_mini_pwr, make_mini_sfr, random_reactor


def round_trip(reactor):
    return reactor_io.load_reactor(nrdf.from_bytes(nrdf.to_bytes(reactor_io.store_reactor(reactor))))


def empty_reactor():
    return Reactor("empty", ReactorType.PWR, 3, assembly_pitch=20.0).freeze()


class TestRoundTrip:
    def test_empty_reactor(self):
        reactor = empty_reactor()
        assert round_trip(reactor) == reactor

    def test_mini_pwr(self):
        reactor = make_mini_pwr()
        assert round_trip(reactor) == reactor

    def test_mini_sfr(self):
        reactor = make_mini_sfr()
        assert round_trip(reactor) == reactor

    def test_full_core_shapes(self):
        """5 rod defs, 49 axial levels, 2 features round-trips losslessly."""
        reactor = samples.make_bench_reactor(pins=264, levels=49)
        assert len(reactor.rod_defs) == 5
        loaded = round_trip(reactor)
        assert loaded == reactor
        assembly = loaded.assembly_defs[0]
        assert assembly.level_count("Axial Power", 0.0) == 49
        assert sorted(assembly.features()) == ["Axial Power", "Temperature"]

    def test_rod_attached_provider(self):
        reactor = Reactor("r", ReactorType.PWR, 1, assembly_pitch=20.0)
        unit = reactor.add_unit("W")
        rod = random.Random(3)
        from helpers import random_rod

        rd = random_rod(rod, "lone")
        rd.attach_provider().add_data(
            "Flux", DataEntry(5.0, 0.5, unit, (0, 0, 1.0), 2.0)
        )
        reactor.add_rod_def(rd)
        reactor.freeze()
        loaded = round_trip(reactor)
        assert loaded == reactor
        assert loaded.rod_defs[0].provider.entries("Flux", 2.0)[0].value == 5.0

    def test_multiple_reactors_per_file(self):
        reactors = [make_mini_pwr(), make_mini_sfr()]
        f = reactor_io.store_reactors(reactors)
        loaded = reactor_io.load_reactors(nrdf.from_bytes(nrdf.to_bytes(f)))
        assert loaded == reactors
        assert reactor_io.load_reactor(f, "mini_sfr").name == "mini_sfr"
        with pytest.raises(LayoutError):
            reactor_io.load_reactor(f)  # ambiguous
        with pytest.raises(LayoutError):
            reactor_io.load_reactor(f, "nope")

    def test_duplicate_reactor_names_rejected(self):
        with pytest.raises(ValueError):
            reactor_io.store_reactors([make_mini_pwr(), make_mini_pwr()])

    def test_unfrozen_rejected(self):
        reactor = Reactor("r", ReactorType.PWR, 1, assembly_pitch=20.0)
        with pytest.raises(ValueError):
            reactor_io.store_reactor(reactor)

    def test_randomized_reactors(self):
        rng = random.Random(2024)
        for i in range(60):
            reactor = random_reactor(rng, i)
            assert round_trip(reactor) == reactor


class TestDedup:
    def test_shared_def_serialized_once(self):
        """200 placements of one assembly def: exactly one def node."""
        reactor = samples.make_bench_reactor(pins=52800, levels=4)
        f = reactor_io.store_reactor(reactor)
        rnode = f.child(f.child(f.root, "reactors"), "bench_core")
        defs = f.child(rnode, "assembly_defs")
        assert len(defs.children) == 1
        assert len(f.child(rnode, "rod_defs").children) == 5

    def test_file_growth_is_grid_only(self):
        """Adding 199 more placements of the same def costs only index
        bytes, not another copy of the assembly payload."""

        def core(placements):
            reactor = Reactor("growth", ReactorType.PWR, 15, assembly_pitch=21.5)
            unit = reactor.add_unit("W")
            rod = reactor.add_rod_def(samples._fuel_rod())
            assembly = AssemblyDef("shared", AssemblyType.FUEL, 17, rod_pitch=1.26)
            for row in range(17):
                for col in range(17):
                    assembly.set_rod(row, col, rod)
            idx = reactor.add_assembly_def(assembly)
            for k in range(3):
                assembly.provider_at(8, k).add_data(
                    "Axial Power", DataEntry(1.0, 0.0, unit, (0, 0, float(k)), 0.0)
                )
            placed = 0
            for row in range(15):
                for col in range(15):
                    if placed >= placements:
                        break
                    reactor.set_assembly(AssemblyType.FUEL, row, col, idx)
                    placed += 1
            return len(nrdf.to_bytes(reactor_io.store_reactor(reactor.freeze())))

        assert core(200) - core(1) < 16 * 200 + 1024


class TestCanonical:
    def test_insertion_order_does_not_change_bytes(self):
        """Features and times are sorted on write, so two logically equal
        reactors built in different orders encode identically."""

        def build(order):
            reactor = Reactor("r", ReactorType.PWR, 1, assembly_pitch=20.0)
            unit = reactor.add_unit("W")
            rod = reactor.add_rod_def(samples._fuel_rod())
            assembly = AssemblyDef("a", AssemblyType.FUEL, 1, rod_pitch=1.26)
            assembly.set_rod(0, 0, rod)
            reactor.add_assembly_def(assembly)
            p = assembly.provider_at(0, 0)
            for feature, t in order:
                p.add_data(feature, DataEntry(1.0, 0.0, unit, (0, 0, 0.5), t))
            return reactor.freeze()

        a = build([("P", 0.0), ("P", 1.0), ("Q", 0.0)])
        b = build([("Q", 0.0), ("P", 1.0), ("P", 0.0)])
        assert a == b
        assert nrdf.to_bytes(reactor_io.store_reactor(a)) == nrdf.to_bytes(
            reactor_io.store_reactor(b)
        )


class TestLayoutErrors:
    def test_missing_reactors_node(self):
        with pytest.raises(LayoutError):
            reactor_io.load_reactors(nrdf.NrdfFile())

    def test_load_survives_random_mutations(self):
        """Bit flips that still parse as NRDF must surface as structured
        errors from the reactor loader too, never exceptions from the
        guts (rank confusion, negative uncertainties, bad enums...)."""
        data = nrdf.to_bytes(reactor_io.store_reactor(make_mini_pwr()))
        rng = random.Random(5150)
        survivors = 0
        for _ in range(5000):
            buf = bytearray(data)
            for _ in range(rng.randint(1, 3)):
                buf[rng.randrange(len(buf))] ^= 1 << rng.randrange(8)
            try:
                reactor_io.load_reactors(nrdf.from_bytes(bytes(buf)))
                survivors += 1
            except nrdf.NrdfError:
                pass
        assert survivors >= 0  # reaching here means no crash

    def test_mangled_reactor_node(self):
        f = reactor_io.store_reactor(make_mini_pwr())
        rnode = f.child(f.child(f.root, "reactors"), "mini_pwr")
        rnode.attrs = [a for a in rnode.attrs if f.string(a.name) != "size"]
        with pytest.raises(LayoutError):
            reactor_io.load_reactors(f)

    def test_missing_units_node(self):
        f = reactor_io.store_reactor(make_mini_pwr())
        rnode = f.child(f.child(f.root, "reactors"), "mini_pwr")
        rnode.children = [c for c in rnode.children if f.name_of(c) != "units"]
        with pytest.raises(LayoutError):
            reactor_io.load_reactors(f)
