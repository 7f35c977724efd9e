"""Command-line front door: inspect, convert, analyze, render, benchmark
and serve NRDF files.

Exit codes: 0 success, 1 usage error, 2 file/parse error, 3 analysis
error.  Human-readable output goes to stdout, errors to stderr.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import nrdf, reactor_io, samples
from .analysis import ShapeError, default_registry, write_artifacts
from .model import DataEntry, Reactor
from .nrdf import NrdfError
from .render import (
    Scope,
    ViewKind,
    ViewSpec,
    compute_scale,
    render_assembly,
    render_core,
    render_plot,
    render_rod,
)

USAGE_ERROR, FILE_ERROR, ANALYSIS_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reactorkit",
                     description="Inspect, compare and render reactor data files.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dump", help="print the node tree of an NRDF file")
    p.add_argument("file")
    p.add_argument("--full", action="store_true",
                   help="include attributes and array payloads")

    p = sub.add_parser("info", help="summarize reactors, features and times")
    p.add_argument("file")

    p = sub.add_parser("convert", help="ingest external results into NRDF")
    p.add_argument("format", choices=["csv"])
    p.add_argument("input", help="csv with header "
                   "row_label,col_label,z_cm,time_s,feature,value,uncertainty,units")
    p.add_argument("--reactor-spec", required=True,
                   help="NRDF skeleton whose first assembly receives the data")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("diff", help="normalized percentage difference between pins")
    p.add_argument("input")
    p.add_argument("reference")
    p.add_argument("--feature", required=True)
    p.add_argument("--pins", required=True, help="comma-separated grid labels, e.g. B2,E4,H7")
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--assembly-def", type=int, default=0)
    p.add_argument("--plot", help="write the diff plot to this SVG path")
    p.add_argument("--results-dir", help="also write result artifacts here")

    p = sub.add_parser("cluster", help="k-means clustering over pin feature vectors")
    p.add_argument("file")
    p.add_argument("--feature", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--assembly-def", type=int, default=0)
    p.add_argument("--results-dir", help="also write result artifacts here")

    p = sub.add_parser("render", help="render a view to SVG")
    p.add_argument("file")
    p.add_argument("--view", required=True, choices=["core", "assembly", "rod", "plot"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reactor", help="reactor name if the file holds several")
    p.add_argument("--type", default="fuel", help="assembly type for core views")
    p.add_argument("--selected", help="R,C cell to outline in a core view")
    p.add_argument("--assembly-def", type=int, default=0)
    p.add_argument("--mode", choices=["geometry", "data"], default="geometry")
    p.add_argument("--level", type=int, default=1, help="1-based axial level")
    p.add_argument("--feature")
    p.add_argument("--norm", default="selected_level",
                   choices=[s.value for s in Scope])
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--rod-def", type=int, default=0)
    p.add_argument("--z", type=float, default=None, help="axial position for rod views")
    p.add_argument("--pins", help="pins for --view plot")

    p = sub.add_parser("gen-sample", help="write a synthetic sample file")
    p.add_argument("--preset", required=True, choices=sorted(samples.PRESETS))
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("bench", help="time a full-core write/read cycle")
    p.add_argument("--pins", type=int, default=52800)
    p.add_argument("--levels", type=int, default=49)

    p = sub.add_parser("serve", help="serve files to the browser viewer")
    p.add_argument("files", nargs="+")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", help="directory with built viewer assets")
    return parser


def _first_reactor(path: str, name: str | None = None) -> Reactor:
    reactors = reactor_io.load_reactors(nrdf.read_path(path))
    if not reactors:
        raise NrdfError(f"{path}: file holds no reactors")
    if name is None:
        return reactors[0]
    for reactor in reactors:
        if reactor.name == name:
            return reactor
    raise NrdfError(f"{path}: no reactor named {name!r}")


def _assembly(reactor: Reactor, index: int):
    if not 0 <= index < len(reactor.assembly_defs):
        raise ShapeError(
            f"assembly def {index} out of range; reactor has "
            f"{len(reactor.assembly_defs)}"
        )
    return reactor.assembly_defs[index]


def _default_time(assembly, feature: str, time: float | None) -> float:
    if time is not None:
        return time
    return assembly.times(feature)[0]


def _fmt(x: float) -> str:
    return format(x, ".6g")


def cmd_dump(args) -> int:
    print(nrdf.dump(nrdf.read_path(args.file), "full" if args.full else "tree"), end="")
    return 0


def cmd_info(args) -> int:
    data = nrdf.read_path(args.file)
    raw = nrdf.to_bytes(data)
    print(f"file: {args.file} ({len(raw)} bytes, NRDF v{data.version})")
    for reactor in reactor_io.load_reactors(data):
        pitch = (
            f"assembly pitch {_fmt(reactor.assembly_pitch)} cm"
            if reactor.assembly_pitch is not None
            else f"lattice pitch {_fmt(reactor.lattice_pitch)} cm, "
                 f"flat-to-flat {_fmt(reactor.flat_to_flat)} cm"
        )
        print(f'reactor "{reactor.name}": {reactor.reactor_type.value}, '
              f"{reactor.size}x{reactor.size}, {pitch}")
        print(f"  units: {', '.join(reactor.units_table) or '(none)'}")
        rods = ", ".join(r.name for r in reactor.rod_defs)
        print(f"  rod defs: {len(reactor.rod_defs)} ({rods})" if rods
              else "  rod defs: 0")
        for i, a in enumerate(reactor.assembly_defs):
            print(f"  assembly def [{i}] {a.name}: {a.assembly_type.value}, "
                  f"{a.size}x{a.size}, rod pitch {_fmt(a.rod_pitch)} cm, "
                  f"{len(a.occupied())} pins")
            for feature in sorted(a.features()):
                times = a.times(feature)
                levels = a.level_count(feature, times[0])
                print(f'    feature "{feature}": {levels} axial levels, '
                      f"times [{', '.join(_fmt(t) for t in times)}]")
        placements = ", ".join(
            f"{atype.value} {sum(1 for row in grid for x in row if x is not None)}"
            for atype, grid in reactor.grids.items()
            if any(x is not None for row in grid for x in row)
        )
        print(f"  placements: {placements or '(none)'}")
    return 0


CSV_HEADER = ["row_label", "col_label", "z_cm", "time_s", "feature", "value",
              "uncertainty", "units"]


def cmd_convert(args) -> int:
    skeleton = reactor_io.load_reactor(nrdf.read_path(args.reactor_spec), frozen=False)
    if not skeleton.assembly_defs:
        raise NrdfError(f"{args.reactor_spec}: skeleton has no assembly defs")
    assembly = skeleton.assembly_defs[0]
    for row in assembly.provider_grid:  # drop skeleton data, keep geometry
        for col in range(len(row)):
            row[col] = None
    for rod in skeleton.rod_defs:
        rod.provider = None

    with open(args.input, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise NrdfError(
                f"{args.input}: expected header {','.join(CSV_HEADER)}, "
                f"got {','.join(reader.fieldnames or [])}"
            )
        count = 0
        for line, record in enumerate(reader, start=2):
            try:
                row, col = assembly.labels.parse_cell(
                    record["row_label"] + record["col_label"]
                )
                entry = DataEntry(
                    float(record["value"]),
                    float(record["uncertainty"]),
                    skeleton.add_unit(record["units"]),
                    (col * assembly.rod_pitch, row * assembly.rod_pitch,
                     float(record["z_cm"])),
                    float(record["time_s"]),
                )
                assembly.provider_at(row, col).add_data(record["feature"], entry)
            except (KeyError, ValueError, TypeError) as exc:
                raise NrdfError(f"{args.input}:{line}: {exc}")
            count += 1
    skeleton.freeze()
    n = nrdf.write_path(reactor_io.store_reactor(skeleton), args.output)
    print(f"wrote {args.output}: {n} bytes, {count} data entries")
    return 0


def cmd_diff(args) -> int:
    inp = _assembly(_first_reactor(args.input), args.assembly_def)
    ref = _assembly(_first_reactor(args.reference), args.assembly_def)
    time = _default_time(inp, args.feature, args.time)
    result = default_registry().run(
        "pin_diff", [inp, ref],
        {"feature": args.feature, "pins": args.pins, "time": time},
    )
    table = result.tables["diff_percent"]
    print(f'pin_diff: feature "{args.feature}", t={_fmt(time)}, '
          f"{len(table.row_labels)} pins x {len(table.col_labels)} levels (%)")
    for pin, row in zip(table.row_labels, table.values):
        print(f"{pin}\t" + " ".join(_fmt(v) for v in row))
    if args.plot:
        with open(args.plot, "w") as fh:
            fh.write(render_plot(
                result.series, f"Normalized {args.feature} difference",
                "height from pin bottom (cm)", "difference (%)",
            ))
        print(f"plot written to {args.plot}")
    if args.results_dir:
        for path in write_artifacts(result, args.results_dir):
            print(f"artifact written to {path}")
    return 0


def cmd_cluster(args) -> int:
    assembly = _assembly(_first_reactor(args.file), args.assembly_def)
    time = _default_time(assembly, args.feature, args.time)
    result = default_registry().run(
        "kmeans", [assembly],
        {"feature": args.feature, "k": args.k, "seed": args.seed, "time": time},
    )
    table = result.tables["assignments"]
    inertia = result.tables["inertia"].values[0][0]
    print(f'kmeans: feature "{args.feature}", k={args.k}, seed={args.seed}, '
          f"inertia {_fmt(inertia)}")
    for pin, row in zip(table.row_labels, table.values):
        print(f"{pin}\t{int(row[0])}")
    if args.results_dir:
        for path in write_artifacts(result, args.results_dir):
            print(f"artifact written to {path}")
    return 0


def cmd_render(args) -> int:
    reactor = _first_reactor(args.file, args.reactor)
    if args.view == "core":
        selected = None
        if args.selected:
            parts = args.selected.split(",")
            if len(parts) != 2:
                raise ShapeError("--selected expects R,C")
            selected = (int(parts[0]), int(parts[1]))
        svg = render_core(reactor, args.type, selected)
    elif args.view == "assembly":
        assembly = _assembly(reactor, args.assembly_def)
        if args.mode == "data":
            if not args.feature:
                raise ShapeError("--feature is required for data views")
            time = _default_time(assembly, args.feature, args.time)
            scale = compute_scale(assembly, args.feature, time, args.level,
                                  Scope(args.norm))
            spec = ViewSpec(ViewKind.ASSEMBLY_DATA, args.level, args.feature, scale)
            svg = render_assembly(assembly, spec, time)
        else:
            spec = ViewSpec(ViewKind.ASSEMBLY_GEOMETRY, args.level, args.feature)
            svg = render_assembly(assembly, spec)
    elif args.view == "rod":
        if not 0 <= args.rod_def < len(reactor.rod_defs):
            raise ShapeError(f"rod def {args.rod_def} out of range")
        rod = reactor.rod_defs[args.rod_def]
        z = args.z if args.z is not None else (
            rod.blocks[0].z_start + rod.height / 2.0 if rod.blocks else 0.0
        )
        svg = render_rod(rod, z)
    else:  # plot
        if not (args.feature and args.pins):
            raise ShapeError("--view plot requires --feature and --pins")
        assembly = _assembly(reactor, args.assembly_def)
        time = _default_time(assembly, args.feature, args.time)
        series = {}
        for pin in [p.strip() for p in args.pins.split(",") if p.strip()]:
            row, col = assembly.labels.parse_cell(pin)
            series[pin] = [
                (z, v) for z, v, _ in assembly.axial_series(row, col, args.feature, time)
            ]
        svg = render_plot(series, args.feature, "height from pin bottom (cm)",
                          args.feature)
    with open(args.output, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.output}")
    return 0


def cmd_gen_sample(args) -> int:
    reactor = samples.PRESETS[args.preset]()
    n = nrdf.write_path(reactor_io.store_reactor(reactor), args.output)
    print(f"wrote {args.output}: {n} bytes, preset {args.preset}")
    return 0


def cmd_bench(args) -> int:
    result = samples.run_bench(args.pins, args.levels)
    print(f"pins: {result['pins']} "
          f"({result['assemblies_placed']} assemblies x 264), "
          f"{result['levels']} axial levels, 2 features")
    print(f"write: {result['write_seconds']:.3f} s")
    print(f"read:  {result['read_seconds']:.3f} s")
    print(f"file:  {result['file_bytes']} bytes")
    print(f"dedup: {result['assembly_defs_stored']} assembly def, "
          f"{result['rod_defs_stored']} rod defs stored once")
    print(f"round trip: {'ok' if result['round_trip_equal'] else 'MISMATCH'}")
    return 0 if result["round_trip_equal"] else FILE_ERROR


def cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app

    app = build_app(args.files, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


HANDLERS = {
    "dump": cmd_dump,
    "info": cmd_info,
    "convert": cmd_convert,
    "diff": cmd_diff,
    "cluster": cmd_cluster,
    "render": cmd_render,
    "gen-sample": cmd_gen_sample,
    "bench": cmd_bench,
    "serve": cmd_serve,
}

#: analysis-shaped failures; everything else I/O-shaped
_ANALYSIS_COMMANDS = {"diff", "cluster"}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return HANDLERS[args.command](args)
    except (NrdfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FILE_ERROR
    except (ShapeError, KeyError, ValueError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return ANALYSIS_ERROR if args.command in _ANALYSIS_COMMANDS else USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
