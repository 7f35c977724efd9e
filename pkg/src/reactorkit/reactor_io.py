"""Mapping between :class:`~reactorkit.model.Reactor` objects and NRDF files.

The file layout mirrors the part hierarchy::

    /
      reactors
        <name>                  reactor_type, size, pitch attributes
          units                 names: u32 heap indices, stored once
          labels                rows/cols: u32 heap indices
          rod_defs
            <i>                 name, kind, optional pressure
              blocks/<j>        z_start/z_end + per-ring arrays
              features/...      optional rod-attached data
          assembly_defs
            <i>                 name, type, size, rod_pitch, rod_grid
              labels
              features
                <feature>       times: f64[k]
                  t<k>          value, uncertainty, units_id,
                                position[n x 3], cell[n]
          grids
            <assembly_type>     i64[size x size], -1 = empty

Definitions are serialized once and referenced by integer index from the
grids, and data entries carry a u32 index into the per-reactor units
table instead of a units string.  The writer sorts feature names and
times so that logically equal reactors produce byte-identical files;
entry order within a (feature, time, cell) bucket is preserved.
"""

from __future__ import annotations

import numpy as np

from .model import (
    AssemblyDef,
    DataEntry,
    DataProvider,
    GridLabels,
    Material,
    MaterialBlock,
    Reactor,
    Ring,
    RodDef,
)
from .nrdf import LayoutError, NrdfArray, NrdfAttr, NrdfFile, NrdfNode


def _attr_str(f: NrdfFile, node: NrdfNode, name: str, value: str) -> None:
    node.attrs.append(NrdfAttr(f.intern(name), "str", f.intern(value)))


def _attr_f64(f: NrdfFile, node: NrdfNode, name: str, value: float) -> None:
    node.attrs.append(NrdfAttr(f.intern(name), "f64", value))


def _attr_u32(f: NrdfFile, node: NrdfNode, name: str, value: int) -> None:
    node.attrs.append(NrdfAttr(f.intern(name), "u32", value))


def _array(f: NrdfFile, node: NrdfNode, name: str, elem: str, dims, data: np.ndarray) -> None:
    dtype = {"f64": "<f8", "i64": "<i8", "u32": "<u4"}[elem]
    payload = np.ascontiguousarray(data, dtype=dtype).tobytes()
    node.arrays.append(NrdfArray(f.intern(name), elem, dims, payload))


def _child(f: NrdfFile, parent: NrdfNode, name: str) -> NrdfNode:
    node = NrdfNode(f.intern(name))
    parent.children.append(node)
    return node


def _store_provider_tree(f, parent, buckets) -> None:
    """One features/<name>/t<k> subtree.

    ``buckets`` maps feature -> time -> list of (cell, entry); cell is a
    row-major index or None for rod-attached providers.
    """
    features = _child(f, parent, "features")
    for feature in sorted(buckets):
        fnode = _child(f, features, feature)
        times = sorted(buckets[feature])
        _array(f, fnode, "times", "f64", [len(times)], np.array(times))
        for k, t in enumerate(times):
            pairs = buckets[feature][t]
            tnode = _child(f, fnode, f"t{k}")
            n = len(pairs)
            _array(f, tnode, "value", "f64", [n], np.array([e.value for _, e in pairs]))
            _array(
                f, tnode, "uncertainty", "f64", [n],
                np.array([e.uncertainty for _, e in pairs]),
            )
            _array(
                f, tnode, "units_id", "u32", [n],
                np.array([e.units_id for _, e in pairs]),
            )
            _array(
                f, tnode, "position", "f64", [n, 3],
                np.array([e.position for _, e in pairs]).reshape(n, 3),
            )
            if pairs and pairs[0][0] is not None:
                _array(f, tnode, "cell", "u32", [n], np.array([c for c, _ in pairs]))


def _collect_rod_buckets(provider: DataProvider):
    out: dict[str, dict[float, list]] = {}
    for feature in provider.features():
        for t in provider.times(feature):
            out.setdefault(feature, {})[t] = [
                (None, e) for e in provider.entries(feature, t)
            ]
    return out


def _collect_assembly_buckets(assembly: AssemblyDef):
    out: dict[str, dict[float, list]] = {}
    for r in range(assembly.size):
        for c in range(assembly.size):
            p = assembly.provider_grid[r][c]
            if p is None:
                continue
            cell = r * assembly.size + c
            for feature in p.features():
                for t in p.times(feature):
                    out.setdefault(feature, {}).setdefault(t, []).extend(
                        (cell, e) for e in p.entries(feature, t)
                    )
    return out


def _store_labels(f: NrdfFile, parent: NrdfNode, labels: GridLabels) -> None:
    node = _child(f, parent, "labels")
    rows = [f.intern(s) for s in labels.row_labels]
    cols = [f.intern(s) for s in labels.column_labels]
    _array(f, node, "rows", "u32", [len(rows)], np.array(rows))
    _array(f, node, "cols", "u32", [len(cols)], np.array(cols))


def _grid_array(grid, size: int) -> np.ndarray:
    arr = np.full((size, size), -1, dtype="<i8")
    for r in range(size):
        for c in range(size):
            if grid[r][c] is not None:
                arr[r, c] = grid[r][c]
    return arr


def store_reactors(reactors) -> NrdfFile:
    """Serialize frozen reactors, one child node per reactor under /reactors."""
    f = NrdfFile()
    reactors = list(reactors)
    names = [r.name for r in reactors]
    if len(set(names)) != len(names):
        raise ValueError("reactor names within one file must be unique")
    top = _child(f, f.root, "reactors")
    for reactor in reactors:
        if not reactor.frozen:
            raise ValueError(f"reactor {reactor.name!r} must be frozen before storing")
        rnode = _child(f, top, reactor.name)
        _attr_str(f, rnode, "reactor_type", reactor.reactor_type.value)
        _attr_u32(f, rnode, "size", reactor.size)
        if reactor.assembly_pitch is not None:
            _attr_f64(f, rnode, "assembly_pitch", reactor.assembly_pitch)
        if reactor.lattice_pitch is not None:
            _attr_f64(f, rnode, "lattice_pitch", reactor.lattice_pitch)
        if reactor.flat_to_flat is not None:
            _attr_f64(f, rnode, "flat_to_flat", reactor.flat_to_flat)

        units = _child(f, rnode, "units")
        ids = [f.intern(u) for u in reactor.units_table]
        _array(f, units, "names", "u32", [len(ids)], np.array(ids))

        _store_labels(f, rnode, reactor.labels)

        rods = _child(f, rnode, "rod_defs")
        for i, rod in enumerate(reactor.rod_defs):
            rdnode = _child(f, rods, str(i))
            _attr_str(f, rdnode, "name", rod.name)
            _attr_str(f, rdnode, "kind", rod.kind.value)
            if rod.pressure is not None:
                _attr_f64(f, rdnode, "pressure", rod.pressure)
            blocks = _child(f, rdnode, "blocks")
            for j, block in enumerate(rod.blocks):
                bnode = _child(f, blocks, str(j))
                _attr_f64(f, bnode, "z_start", block.z_start)
                _attr_f64(f, bnode, "z_end", block.z_end)
                nr = len(block.rings)
                _array(f, bnode, "inner_radius", "f64", [nr],
                       np.array([rg.inner_radius for rg in block.rings]))
                _array(f, bnode, "outer_radius", "f64", [nr],
                       np.array([rg.outer_radius for rg in block.rings]))
                _array(f, bnode, "height", "f64", [nr],
                       np.array([rg.height for rg in block.rings]))
                _array(f, bnode, "material", "u32", [nr],
                       np.array([f.intern(rg.material.name) for rg in block.rings]))
                _array(f, bnode, "phase", "u32", [nr],
                       np.array([f.intern(rg.material.phase.value) for rg in block.rings]))
            if rod.provider is not None:
                _store_provider_tree(f, rdnode, _collect_rod_buckets(rod.provider))

        assemblies = _child(f, rnode, "assembly_defs")
        for i, a in enumerate(reactor.assembly_defs):
            anode = _child(f, assemblies, str(i))
            _attr_str(f, anode, "name", a.name)
            _attr_str(f, anode, "assembly_type", a.assembly_type.value)
            _attr_u32(f, anode, "size", a.size)
            _attr_f64(f, anode, "rod_pitch", a.rod_pitch)
            if a.duct_thickness is not None:
                _attr_f64(f, anode, "duct_thickness", a.duct_thickness)
            _array(f, anode, "rod_grid", "i64", [a.size, a.size],
                   _grid_array(a.rod_grid, a.size))
            _store_labels(f, anode, a.labels)
            _store_provider_tree(f, anode, _collect_assembly_buckets(a))

        grids = _child(f, rnode, "grids")
        for atype in reactor.grids:
            gnode = _child(f, grids, atype.value)
            _array(f, gnode, "indices", "i64", [reactor.size, reactor.size],
                   _grid_array(reactor.grids[atype], reactor.size))
    return f


def store_reactor(reactor: Reactor) -> NrdfFile:
    return store_reactors([reactor])


# ---------------------------------------------------------------------------
# loading


def _need_child(f: NrdfFile, node: NrdfNode, name: str, where: str) -> NrdfNode:
    child = f.child(node, name)
    if child is None:
        raise LayoutError(f"missing {name!r} node under {where}")
    return child


def _get_attr(f: NrdfFile, node: NrdfNode, name: str, kind: str, where: str, required=True):
    for a in node.attrs:
        if f.string(a.name) == name:
            if a.kind != kind:
                raise LayoutError(f"attribute {name!r} at {where} has kind {a.kind}")
            return f.string(a.value) if kind == "str" else a.value
    if required:
        raise LayoutError(f"missing attribute {name!r} at {where}")
    return None


def _get_array(f: NrdfFile, node: NrdfNode, name: str, elem: str, where: str,
               ndim: int = 1) -> np.ndarray:
    dtype = {"f64": "<f8", "i64": "<i8", "u32": "<u4"}[elem]
    for arr in node.arrays:
        if f.string(arr.name) == name:
            if arr.elem_type != elem:
                raise LayoutError(f"array {name!r} at {where} has type {arr.elem_type}")
            if len(arr.dims) != ndim:
                raise LayoutError(
                    f"array {name!r} at {where} has rank {len(arr.dims)}, need {ndim}"
                )
            return np.frombuffer(arr.payload, dtype=dtype).reshape(arr.dims)
    raise LayoutError(f"missing array {name!r} at {where}")


def _heap_string(f: NrdfFile, index: int, where: str) -> str:
    """Resolve a heap index stored in an array payload; unlike attribute
    string indices these are not validated at parse time."""
    if not 0 <= index < len(f.string_heap):
        raise LayoutError(f"dangling string index {index} at {where}")
    return f.string_heap[index]


def _load_labels(f: NrdfFile, parent: NrdfNode, where: str) -> GridLabels:
    node = _need_child(f, parent, "labels", where)
    rows = [_heap_string(f, int(i), where) for i in _get_array(f, node, "rows", "u32", where)]
    cols = [_heap_string(f, int(i), where) for i in _get_array(f, node, "cols", "u32", where)]
    try:
        return GridLabels(rows, cols)
    except ValueError as exc:
        raise LayoutError(f"invalid labels at {where}: {exc}") from exc


def _load_provider_buckets(f: NrdfFile, parent: NrdfNode, where: str, with_cells: bool):
    """Yields (feature, time, cell, entry) in file order."""
    features = f.child(parent, "features")
    if features is None:
        return
    for fnode in features.children:
        feature = f.name_of(fnode)
        if feature is None:
            raise LayoutError(f"unnamed feature node at {where}")
        times = _get_array(f, fnode, "times", "f64", where)
        for k, t in enumerate(times):
            tnode = _need_child(f, fnode, f"t{k}", where)
            values = _get_array(f, tnode, "value", "f64", where)
            unc = _get_array(f, tnode, "uncertainty", "f64", where)
            units = _get_array(f, tnode, "units_id", "u32", where)
            pos = _get_array(f, tnode, "position", "f64", where, ndim=2)
            n = len(values)
            if pos.shape != (n, 3) or len(unc) != n or len(units) != n:
                raise LayoutError(f"ragged data arrays under {where}/{feature}/t{k}")
            if with_cells:
                cells = _get_array(f, tnode, "cell", "u32", where) if n else np.zeros(0, "<u4")
                if len(cells) != n:
                    raise LayoutError(f"ragged cell array under {where}/{feature}/t{k}")
            for i in range(n):
                try:
                    entry = DataEntry(
                        float(values[i]), float(unc[i]), int(units[i]),
                        tuple(pos[i]), float(t),
                    )
                except ValueError as exc:
                    raise LayoutError(
                        f"invalid entry under {where}/{feature}/t{k}: {exc}"
                    ) from exc
                yield feature, float(t), (int(cells[i]) if with_cells else None), entry


def _load_rod(f: NrdfFile, node: NrdfNode, where: str) -> RodDef:
    name = _get_attr(f, node, "name", "str", where)
    kind = _get_attr(f, node, "kind", "str", where)
    pressure = _get_attr(f, node, "pressure", "f64", where, required=False)
    blocks = []
    bparent = _need_child(f, node, "blocks", where)
    for bnode in bparent.children:
        z_start = _get_attr(f, bnode, "z_start", "f64", where)
        z_end = _get_attr(f, bnode, "z_end", "f64", where)
        inner = _get_array(f, bnode, "inner_radius", "f64", where)
        outer = _get_array(f, bnode, "outer_radius", "f64", where)
        height = _get_array(f, bnode, "height", "f64", where)
        material = _get_array(f, bnode, "material", "u32", where)
        phase = _get_array(f, bnode, "phase", "u32", where)
        if not (len(inner) == len(outer) == len(height) == len(material) == len(phase)):
            raise LayoutError(f"ragged ring arrays at {where}")
        rings = []
        for i in range(len(inner)):
            try:
                mat = Material(_heap_string(f, int(material[i]), where),
                               _heap_string(f, int(phase[i]), where))
                rings.append(
                    Ring(mat, float(inner[i]), float(outer[i]), float(height[i]))
                )
            except ValueError as exc:
                raise LayoutError(f"invalid ring at {where}: {exc}") from exc
        try:
            blocks.append(MaterialBlock(float(z_start), float(z_end), rings))
        except ValueError as exc:
            raise LayoutError(f"invalid material block at {where}: {exc}") from exc
    try:
        rod = RodDef(name, kind, blocks, pressure)
    except ValueError as exc:
        raise LayoutError(f"invalid rod def at {where}: {exc}") from exc
    for feature, _, _, entry in _load_provider_buckets(f, node, where, with_cells=False):
        rod.attach_provider().add_data(feature, entry)
    return rod


def load_reactors(file: NrdfFile, frozen: bool = True) -> list[Reactor]:
    """Parse every reactor in the file.

    With frozen=False the reactors are validated but left mutable, for
    callers that use a stored reactor as a skeleton to fill.
    """
    top = file.child(file.root, "reactors")
    if top is None:
        raise LayoutError("missing 'reactors' node under root")
    return [_load_one(file, rnode, frozen) for rnode in top.children]


def _load_one(f: NrdfFile, rnode: NrdfNode, frozen: bool = True) -> Reactor:
    name = f.name_of(rnode)
    if name is None:
        raise LayoutError("unnamed reactor node")
    where = f"reactor {name!r}"
    rtype = _get_attr(f, rnode, "reactor_type", "str", where)
    size = _get_attr(f, rnode, "size", "u32", where)
    labels = _load_labels(f, rnode, where)
    try:
        reactor = Reactor(
            name,
            rtype,
            size,
            assembly_pitch=_get_attr(f, rnode, "assembly_pitch", "f64", where, required=False),
            lattice_pitch=_get_attr(f, rnode, "lattice_pitch", "f64", where, required=False),
            flat_to_flat=_get_attr(f, rnode, "flat_to_flat", "f64", where, required=False),
            labels=labels,
        )
    except ValueError as exc:
        raise LayoutError(f"invalid {where}: {exc}") from exc

    units = _need_child(f, rnode, "units", where)
    for idx in _get_array(f, units, "names", "u32", where):
        reactor.add_unit(_heap_string(f, int(idx), where))

    rods = _need_child(f, rnode, "rod_defs", where)
    for rdnode in rods.children:
        rod = _load_rod(f, rdnode, f"{where}/rod_defs/{f.name_of(rdnode)}")
        try:
            reactor.add_rod_def(rod)
        except ValueError as exc:
            raise LayoutError(f"{where}: {exc}") from exc

    assemblies = _need_child(f, rnode, "assembly_defs", where)
    for anode in assemblies.children:
        awhere = f"{where}/assembly_defs/{f.name_of(anode)}"
        try:
            assembly = AssemblyDef(
                _get_attr(f, anode, "name", "str", awhere),
                _get_attr(f, anode, "assembly_type", "str", awhere),
                _get_attr(f, anode, "size", "u32", awhere),
                _get_attr(f, anode, "rod_pitch", "f64", awhere),
                duct_thickness=_get_attr(f, anode, "duct_thickness", "f64", awhere, required=False),
                labels=_load_labels(f, anode, awhere),
            )
        except ValueError as exc:
            raise LayoutError(f"invalid assembly def at {awhere}: {exc}") from exc
        grid = _get_array(f, anode, "rod_grid", "i64", awhere, ndim=2)
        if grid.shape != (assembly.size, assembly.size):
            raise LayoutError(f"rod_grid shape {grid.shape} at {awhere}")
        try:
            reactor.add_assembly_def(assembly)
        except (ValueError, TypeError) as exc:
            raise LayoutError(f"{awhere}: {exc}") from exc
        for r in range(assembly.size):
            for c in range(assembly.size):
                if grid[r, c] >= 0:
                    assembly.set_rod(r, c, int(grid[r, c]))
        for feature, _, cell, entry in _load_provider_buckets(f, anode, awhere, with_cells=True):
            if cell >= assembly.size * assembly.size:
                raise LayoutError(f"cell index {cell} out of range at {awhere}")
            r, c = divmod(cell, assembly.size)
            try:
                assembly.provider_at(r, c).add_data(feature, entry)
            except ValueError as exc:
                raise LayoutError(f"data at empty cell ({r}, {c}) at {awhere}") from exc

    grids = _need_child(f, rnode, "grids", where)
    for gnode in grids.children:
        atype = f.name_of(gnode)
        gwhere = f"{where}/grids/{atype}"
        arr = _get_array(f, gnode, "indices", "i64", gwhere, ndim=2)
        if arr.shape != (size, size):
            raise LayoutError(f"grid shape {arr.shape} at {gwhere}")
        for r in range(size):
            for c in range(size):
                if arr[r, c] >= 0:
                    try:
                        reactor.set_assembly(atype, r, c, int(arr[r, c]))
                    except (ValueError, TypeError) as exc:
                        raise LayoutError(f"bad placement at {gwhere}: {exc}") from exc

    try:
        if frozen:
            return reactor.freeze()
        reactor._validate()
        return reactor
    except ValueError as exc:
        raise LayoutError(f"{where} fails validation: {exc}") from exc


def load_reactor(file: NrdfFile, name: str | None = None, frozen: bool = True) -> Reactor:
    """Load one reactor; by name, or the only one in the file."""
    reactors = load_reactors(file, frozen)
    if name is None:
        if len(reactors) != 1:
            raise LayoutError(
                f"file holds {len(reactors)} reactors, pass a name to pick one"
            )
        return reactors[0]
    for r in reactors:
        if r.name == name:
            return r
    raise LayoutError(f"no reactor named {name!r} in file")
