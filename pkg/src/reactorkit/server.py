"""Local HTTP/JSON service exposing loaded NRDF files to the viewer.

Read-only over immutable loaded reactors; analysis runs insert results
under a lock.  Responses are canonical JSON (sorted keys, compact
separators, shortest-round-trip floats) so equal requests yield
byte-identical, cacheable bodies.  Every payload carries schema_version.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import nrdf, reactor_io
from .analysis import AnalysisResult, ShapeError, default_registry
from .model import AssemblyDef, AssemblyType, Reactor
from .render import Scope, compute_scale

SCHEMA_VERSION = 1


class CanonicalJSONResponse(Response):
    media_type = "application/json"

    def render(self, content) -> bytes:
        return json.dumps(
            content, sort_keys=True, separators=(",", ":"), allow_nan=False
        ).encode("utf-8")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _not_found(message: str) -> ApiError:
    return ApiError(404, "not_found", message)


def _bad_param(message: str) -> ApiError:
    return ApiError(400, "bad_param", message)


class SessionState:
    """Loaded files plus analysis results, with stable session-scoped ids."""

    def __init__(self):
        self.files: dict[str, dict] = {}
        self.results: dict[str, AnalysisResult] = {}
        self._result_ids = itertools.count()
        self._lock = threading.Lock()

    def load(self, path: str) -> str:
        fid = f"f{len(self.files)}"
        data = nrdf.read_path(path)
        reactors = reactor_io.load_reactors(data)
        self.files[fid] = {
            "id": fid,
            "path": str(path),
            "bytes": len(nrdf.to_bytes(data)),
            "reactors": {r.name: r for r in reactors},
        }
        return fid

    def file(self, fid: str) -> dict:
        if fid not in self.files:
            raise _not_found(f"no file {fid!r}")
        return self.files[fid]

    def reactor(self, fid: str, rname: str) -> Reactor:
        reactors = self.file(fid)["reactors"]
        if rname not in reactors:
            raise _not_found(f"no reactor {rname!r} in {fid}")
        return reactors[rname]

    def add_result(self, result: AnalysisResult) -> str:
        with self._lock:
            rid = f"r{next(self._result_ids)}"
            self.results[rid] = result
        return rid


def _no_nan(value: float):
    return None if value is None or math.isnan(value) else value


def _assembly_at(reactor: Reactor, atype: str, row: int, col: int) -> AssemblyDef:
    try:
        grid = reactor.grids[AssemblyType(atype)]
    except (ValueError, KeyError):
        raise _bad_param(f"unknown assembly type {atype!r}")
    if not (0 <= row < reactor.size and 0 <= col < reactor.size):
        raise _bad_param(f"cell ({row}, {col}) outside {reactor.size}x{reactor.size}")
    idx = grid[row][col]
    if idx is None:
        raise _not_found(f"no {atype} assembly at ({row}, {col})")
    return reactor.assembly_defs[idx]


def _labels(labels) -> dict:
    return {"rows": list(labels.row_labels), "cols": list(labels.column_labels)}


def _assembly_descriptor(index: int, assembly: AssemblyDef) -> dict:
    features = {}
    for feature in sorted(assembly.features()):
        times = assembly.times(feature)
        features[feature] = {
            "times": times,
            "levels": assembly.level_count(feature, times[0]),
        }
    return {
        "index": index,
        "name": assembly.name,
        "type": assembly.assembly_type.value,
        "size": assembly.size,
        "rod_pitch": assembly.rod_pitch,
        "duct_thickness": assembly.duct_thickness,
        "pins": len(assembly.occupied()),
        "features": features,
        "labels": _labels(assembly.labels),
    }


def _reactor_descriptor(reactor: Reactor) -> dict:
    return {
        "name": reactor.name,
        "type": reactor.reactor_type.value,
        "size": reactor.size,
        "assembly_pitch": reactor.assembly_pitch,
        "lattice_pitch": reactor.lattice_pitch,
        "flat_to_flat": reactor.flat_to_flat,
        "units": list(reactor.units_table),
        "labels": _labels(reactor.labels),
        "rod_defs": [r.name for r in reactor.rod_defs],
        "assembly_defs": [
            _assembly_descriptor(i, a) for i, a in enumerate(reactor.assembly_defs)
        ],
        "grid_types": [t.value for t in reactor.grids],
    }


def _result_payload(rid: str, result: AnalysisResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "result_id": rid,
        "tool": result.tool,
        "created_at": result.created_at.isoformat(),
        "auto_plot": result.auto_plot,
        "tables": {
            name: {
                "row_labels": table.row_labels,
                "col_labels": table.col_labels,
                "values": [[_no_nan(v) for v in row] for row in table.values],
            }
            for name, table in result.tables.items()
        },
        "series": {
            name: [[x, _no_nan(y)] for x, y in points]
            for name, points in result.series.items()
        },
    }


def build_app(paths, ui_dir=None) -> FastAPI:
    """App over the given NRDF files; files must parse at startup."""
    state = SessionState()
    for path in paths:
        state.load(path)
    registry = default_registry()

    app = FastAPI(title="reactorkit", default_response_class=CanonicalJSONResponse)
    app.state.session = state
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return CanonicalJSONResponse(
            {
                "schema_version": SCHEMA_VERSION,
                "error": {"code": exc.code, "message": exc.message},
            },
            status_code=exc.status,
        )

    @app.get("/api/files")
    def list_files():
        return {
            "schema_version": SCHEMA_VERSION,
            "files": [
                {
                    "id": f["id"],
                    "path": f["path"],
                    "bytes": f["bytes"],
                    "reactors": sorted(f["reactors"]),
                }
                for f in state.files.values()
            ],
        }

    @app.get("/api/reactors/{fid}")
    def describe_file(fid: str):
        f = state.file(fid)
        return {
            "schema_version": SCHEMA_VERSION,
            "id": fid,
            "reactors": [
                _reactor_descriptor(r) for _, r in sorted(f["reactors"].items())
            ],
        }

    @app.get("/api/reactors/{fid}/{rname}/core")
    def core_view(fid: str, rname: str, type: str = "fuel"):
        reactor = state.reactor(fid, rname)
        try:
            atype = AssemblyType(type)
        except ValueError:
            raise _bad_param(f"unknown assembly type {type!r}")
        if atype not in reactor.grids:
            raise _not_found(
                f"no {type!r} grid on a {reactor.reactor_type.value}"
            )
        grid = reactor.grids[atype]
        cells = [
            [
                None
                if idx is None
                else {"def": idx, "name": reactor.assembly_defs[idx].name}
                for idx in row
            ]
            for row in grid
        ]
        return {
            "schema_version": SCHEMA_VERSION,
            "reactor": rname,
            "type": atype.value,
            "reactor_type": reactor.reactor_type.value,
            "size": reactor.size,
            "pitch": reactor.lattice_pitch or reactor.assembly_pitch,
            "labels": _labels(reactor.labels),
            "cells": cells,
        }

    @app.get("/api/reactors/{fid}/{rname}/assembly/{atype}/{row}/{col}")
    def assembly_view(
        fid: str,
        rname: str,
        atype: str,
        row: int,
        col: int,
        level: int = 1,
        feature: str | None = None,
        norm: str = "selected_level",
        time: float | None = None,
    ):
        reactor = state.reactor(fid, rname)
        assembly = _assembly_at(reactor, atype, row, col)
        features = sorted(assembly.features())
        if feature is None and features:
            feature = features[0]
        try:
            scope = Scope(norm)
        except ValueError:
            raise _bad_param(f"unknown norm scope {norm!r}")

        payload = {
            "schema_version": SCHEMA_VERSION,
            "reactor": rname,
            "type": assembly.assembly_type.value,
            "name": assembly.name,
            "size": assembly.size,
            "reactor_type": reactor.reactor_type.value,
            "rod_pitch": assembly.rod_pitch,
            "labels": _labels(assembly.labels),
            "features": features,
            "occupied": [
                [idx is not None for idx in grid_row]
                for grid_row in assembly.rod_grid
            ],
            "kinds": [
                [
                    None if idx is None else reactor.rod_defs[idx].kind.value
                    for idx in grid_row
                ]
                for grid_row in assembly.rod_grid
            ],
            "feature": feature,
            "level": level,
            "norm": scope.value,
        }
        if feature is None or feature not in features:
            if feature is not None:
                raise _not_found(f"no feature {feature!r} on this assembly")
            payload.update({"levels": 0, "times": [], "time": None,
                            "scale": None, "values": None})
            return payload
        times = assembly.times(feature)
        if time is None:
            time = times[0]
        if time not in times:
            raise _not_found(f"no data at t={time}")
        levels = assembly.level_count(feature, time)
        if not 1 <= level <= levels:
            raise _bad_param(f"level {level} outside 1..{levels}")
        # all three scopes at once, so the viewer can switch normalization
        # without refetching values
        scales = {}
        for s in Scope:
            bounds = compute_scale(assembly, feature, time, level, s)
            scales[s.value] = {"min": bounds.min, "max": bounds.max}
        scale = compute_scale(assembly, feature, time, level, scope)
        values = []
        for r in range(assembly.size):
            vrow = []
            for c in range(assembly.size):
                if assembly.rod_grid[r][c] is None:
                    vrow.append(None)
                    continue
                try:
                    series = assembly.axial_series(r, c, feature, time)
                    vrow.append(
                        _no_nan(series[level - 1][1]) if level <= len(series) else None
                    )
                except KeyError:
                    vrow.append(None)
            values.append(vrow)
        payload.update({
            "levels": levels,
            "times": times,
            "time": time,
            "scale": {"min": scale.min, "max": scale.max, "scope": scale.scope.value},
            "scales": scales,
            "values": values,
        })
        return payload

    @app.get("/api/reactors/{fid}/{rname}/rod/{arow}/{acol}/{prow}/{pcol}")
    def rod_view(
        fid: str, rname: str, arow: int, acol: int, prow: int, pcol: int,
        type: str = "fuel",
    ):
        reactor = state.reactor(fid, rname)
        assembly = _assembly_at(reactor, type, arow, acol)
        if not (0 <= prow < assembly.size and 0 <= pcol < assembly.size):
            raise _bad_param(f"pin ({prow}, {pcol}) outside assembly")
        rod = assembly.rod_at(prow, pcol)
        if rod is None:
            raise _not_found(f"no rod at ({prow}, {pcol})")
        series = []
        for feature in sorted(assembly.features()):
            for t in assembly.times(feature):
                try:
                    points = assembly.axial_series(prow, pcol, feature, t)
                except KeyError:
                    continue
                series.append({
                    "feature": feature,
                    "time": t,
                    "points": [[z, _no_nan(v), u] for z, v, u in points],
                })
        return {
            "schema_version": SCHEMA_VERSION,
            "name": rod.name,
            "kind": rod.kind.value,
            "pressure": rod.pressure,
            "height": rod.height,
            "label": assembly.labels.cell_name(prow, pcol),
            "blocks": [
                {
                    "z_start": block.z_start,
                    "z_end": block.z_end,
                    "rings": [
                        {
                            "material": ring.material.name,
                            "phase": ring.material.phase.value,
                            "inner_radius": ring.inner_radius,
                            "outer_radius": ring.outer_radius,
                            "height": ring.height,
                        }
                        for ring in block.rings
                    ],
                }
                for block in rod.blocks
            ],
            "series": series,
        }

    @app.get("/api/tools")
    def list_tools():
        return {
            "schema_version": SCHEMA_VERSION,
            "tools": [
                {
                    "name": tool.name,
                    "enabled_by_default": tool.enabled_by_default,
                    "n_assemblies": tool.n_assemblies,
                    "params": [
                        {
                            "name": p.name,
                            "type": p.type,
                            "default": p.default,
                            "choices": list(p.choices),
                        }
                        for p in tool.params
                    ],
                }
                for tool in (registry.get(name) for name in registry.list_tools())
            ],
        }

    def _resolve_assembly(descriptor) -> AssemblyDef:
        if not isinstance(descriptor, dict):
            raise _bad_param("assembly descriptor must be an object")
        try:
            reactor = state.reactor(descriptor["file"], descriptor["reactor"])
        except KeyError:
            raise _bad_param("assembly descriptor needs 'file' and 'reactor'")
        if "assembly_def" in descriptor:
            index = descriptor["assembly_def"]
            if not isinstance(index, int) or not 0 <= index < len(reactor.assembly_defs):
                raise _bad_param(f"assembly def {index!r} out of range")
            return reactor.assembly_defs[index]
        try:
            return _assembly_at(
                reactor, descriptor["type"], descriptor["row"], descriptor["col"]
            )
        except KeyError:
            raise _bad_param(
                "assembly descriptor needs 'assembly_def' or 'type'/'row'/'col'"
            )

    @app.post("/api/tools/{name}")
    async def run_tool(name: str, request: Request):
        try:
            tool = registry.get(name)
        except KeyError:
            raise _not_found(f"no tool named {name!r}")
        try:
            body = await request.json()
        except Exception:
            raise _bad_param("request body must be JSON")
        if not isinstance(body, dict):
            raise _bad_param("request body must be a JSON object")
        assemblies = [
            _resolve_assembly(d) for d in body.get("assemblies", [])
        ]
        params = body.get("params", {})
        if not isinstance(params, dict):
            raise _bad_param("'params' must be an object")
        try:
            result = tool.run(assemblies, params)
        except ShapeError as exc:
            raise ApiError(422, "shape_error", str(exc))
        except KeyError as exc:
            raise _not_found(exc.args[0] if exc.args else str(exc))
        except ValueError as exc:
            raise _bad_param(str(exc))
        rid = state.add_result(result)
        return _result_payload(rid, result)

    @app.get("/api/results")
    def list_results():
        return {
            "schema_version": SCHEMA_VERSION,
            "results": [
                {
                    "id": rid,
                    "tool": result.tool,
                    "created_at": result.created_at.isoformat(),
                }
                for rid, result in state.results.items()
            ],
        }

    if ui_dir is None:
        default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="viewer")

    return app
