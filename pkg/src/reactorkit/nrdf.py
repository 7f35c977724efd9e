"""Self-describing hierarchical binary container (NRDF).

Physical layout, little-endian throughout::

    header:  magic "NRDF" | u32 version | u64 heap offset
             | u64 heap byte length | u64 root node offset     (32 bytes)
    heap:    u32 count, then per string: u32 byte length + UTF-8 bytes
    node:    u32 name index | u32 attr count | u32 array count
             | u32 child count
             attrs:  u32 name index | u8 type code | 8-byte value
             arrays: u32 name index | u8 element type | u8 rank
                     | rank x u64 dims | raw payload
             children, depth-first

Attribute type codes: 1=i64, 2=f64, 3=string index, 4=u32.  String-index
and u32 attribute values are zero-padded to 8 bytes.  Array element
types reuse the same codes (f64, i64, u32).  A node name index of
0xFFFFFFFF means "unnamed" and is normally used only by the root.

The writer is canonical: logically equal files produce byte-identical
output.  The reader never trusts declared lengths: every count, offset
and payload size is validated against the remaining bytes before any
allocation, and all failures raise :class:`NrdfError` subclasses.
"""

from __future__ import annotations

import struct

MAGIC = b"NRDF"
VERSION = 1
NONE_INDEX = 0xFFFFFFFF

_HEADER = struct.Struct("<4sIQQQ")
_U32 = struct.Struct("<I")
_I64 = struct.Struct("<q")
_F64 = struct.Struct("<d")
_NODE_HEAD = struct.Struct("<IIII")
_ATTR_HEAD = struct.Struct("<IB")
_ARRAY_HEAD = struct.Struct("<IBB")

#: attribute / array element type codes
_CODE = {"i64": 1, "f64": 2, "str": 3, "u32": 4}
_KIND = {v: k for k, v in _CODE.items()}
ELEMENT_SIZE = {"f64": 8, "i64": 8, "u32": 4}
_ELEM_FMT = {"f64": "<d", "i64": "<q", "u32": "<I"}


class NrdfError(Exception):
    """Base class for all container format errors."""


class NotNrdfError(NrdfError):
    """The input does not start with the NRDF magic."""


class CorruptFileError(NrdfError):
    """Structurally invalid input; offset is where the failing read began."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"corrupt NRDF file at offset {offset}: {message}")
        self.offset = offset


class UnsupportedVersionError(NrdfError):
    pass


class EncodeError(NrdfError):
    """A file violates its own invariants and cannot be written."""


class LayoutError(NrdfError):
    """A well-formed file does not follow the expected reactor layout."""


class NrdfAttr:
    """Typed scalar attribute.  ``value`` is an int for i64/u32, a float
    for f64, and a string-heap index for kind "str"."""

    __slots__ = ("name", "kind", "value")

    def __init__(self, name: int, kind: str, value):
        if kind not in _CODE:
            raise EncodeError(f"unknown attribute kind {kind!r}")
        self.name = name
        self.kind = kind
        self.value = float(value) if kind == "f64" else int(value)

    def __eq__(self, other):
        if not isinstance(other, NrdfAttr):
            return NotImplemented
        if (self.name, self.kind) != (other.name, other.kind):
            return False
        if self.kind == "f64":
            # bit-exact: the container stores raw IEEE754 doubles
            return _F64.pack(self.value) == _F64.pack(other.value)
        return self.value == other.value

    def __repr__(self):
        return f"NrdfAttr({self.name}, {self.kind!r}, {self.value!r})"


class NrdfArray:
    """Typed n-dimensional array with an opaque raw payload."""

    __slots__ = ("name", "elem_type", "dims", "payload")

    def __init__(self, name: int, elem_type: str, dims, payload: bytes):
        if elem_type not in ELEMENT_SIZE:
            raise EncodeError(f"unknown array element type {elem_type!r}")
        self.name = name
        self.elem_type = elem_type
        self.dims = tuple(int(d) for d in dims)
        self.payload = bytes(payload)
        n = 1
        for d in self.dims:
            n *= d
        if len(self.payload) != n * ELEMENT_SIZE[elem_type]:
            raise EncodeError(
                f"payload of {len(self.payload)} bytes does not match "
                f"dims {self.dims} of {elem_type}"
            )

    @classmethod
    def pack(cls, name: int, elem_type: str, dims, values) -> "NrdfArray":
        fmt = _ELEM_FMT[elem_type]
        payload = b"".join(struct.pack(fmt, v) for v in values)
        return cls(name, elem_type, dims, payload)

    def values(self) -> list:
        fmt = _ELEM_FMT[self.elem_type]
        size = ELEMENT_SIZE[self.elem_type]
        return [
            struct.unpack_from(fmt, self.payload, i * size)[0]
            for i in range(len(self.payload) // size)
        ]

    def __eq__(self, other):
        if not isinstance(other, NrdfArray):
            return NotImplemented
        return (self.name, self.elem_type, self.dims, self.payload) == (
            other.name,
            other.elem_type,
            other.dims,
            other.payload,
        )

    def __repr__(self):
        return f"NrdfArray({self.name}, {self.elem_type!r}, dims={self.dims})"


class NrdfNode:
    __slots__ = ("name", "attrs", "arrays", "children")

    def __init__(self, name: int | None = None, attrs=None, arrays=None, children=None):
        self.name = name  # heap index, or None for unnamed
        self.attrs: list[NrdfAttr] = list(attrs or [])
        self.arrays: list[NrdfArray] = list(arrays or [])
        self.children: list[NrdfNode] = list(children or [])

    def attr(self, name: int) -> NrdfAttr | None:
        for a in self.attrs:
            if a.name == name:
                return a
        return None

    def array(self, name: int) -> NrdfArray | None:
        for a in self.arrays:
            if a.name == name:
                return a
        return None

    def __eq__(self, other):
        if not isinstance(other, NrdfNode):
            return NotImplemented
        return (self.name, self.attrs, self.arrays, self.children) == (
            other.name,
            other.attrs,
            other.arrays,
            other.children,
        )

    def __repr__(self):
        return (
            f"NrdfNode(name={self.name}, {len(self.attrs)} attrs, "
            f"{len(self.arrays)} arrays, {len(self.children)} children)"
        )


class NrdfFile:
    """A version, an ordered unique string heap, and a node tree."""

    def __init__(self, version: int = VERSION, string_heap=None, root: NrdfNode | None = None):
        self.version = version
        self.string_heap: list[str] = list(string_heap or [])
        self.root = root if root is not None else NrdfNode()
        self._index: dict[str, int] = {s: i for i, s in enumerate(self.string_heap)}

    def intern(self, s: str) -> int:
        """Index of s in the heap, appending it on first use."""
        idx = self._index.get(s)
        if idx is None:
            idx = len(self.string_heap)
            self.string_heap.append(s)
            self._index[s] = idx
        return idx

    def string(self, index: int) -> str:
        if not 0 <= index < len(self.string_heap):
            raise EncodeError(f"string index {index} out of range")
        return self.string_heap[index]

    def name_of(self, node: NrdfNode) -> str | None:
        return None if node.name is None else self.string(node.name)

    def child(self, node: NrdfNode, name: str) -> NrdfNode | None:
        idx = self._index.get(name)
        if idx is None:
            return None
        for c in node.children:
            if c.name == idx:
                return c
        return None

    def __eq__(self, other):
        if not isinstance(other, NrdfFile):
            return NotImplemented
        return (self.version, self.string_heap, self.root) == (
            other.version,
            other.string_heap,
            other.root,
        )

    def __repr__(self):
        return f"NrdfFile(version={self.version}, {len(self.string_heap)} strings)"


# ---------------------------------------------------------------------------
# writing


def _check_index(idx: int, heap_len: int, what: str) -> None:
    if not 0 <= idx < heap_len:
        raise EncodeError(f"{what} index {idx} outside heap of {heap_len}")


def _encode_node(node: NrdfNode, out: bytearray, heap_len: int) -> None:
    stack = [node]
    while stack:
        n = stack.pop()
        if n.name is None:
            name_index = NONE_INDEX
        else:
            _check_index(n.name, heap_len, "node name")
            name_index = n.name
        out += _NODE_HEAD.pack(name_index, len(n.attrs), len(n.arrays), len(n.children))
        seen = set()
        for a in n.attrs:
            _check_index(a.name, heap_len, "attribute name")
            if a.name in seen:
                raise EncodeError(f"duplicate attribute name index {a.name}")
            seen.add(a.name)
            out += _ATTR_HEAD.pack(a.name, _CODE[a.kind])
            if a.kind == "i64":
                out += _I64.pack(a.value)
            elif a.kind == "f64":
                out += _F64.pack(a.value)
            else:  # str index or u32, zero-padded to 8 bytes
                if a.kind == "str":
                    _check_index(a.value, heap_len, "attribute string")
                elif not 0 <= a.value <= 0xFFFFFFFF:
                    raise EncodeError(f"u32 attribute value {a.value} out of range")
                out += _U32.pack(a.value) + b"\x00" * 4
        seen = set()
        for arr in n.arrays:
            _check_index(arr.name, heap_len, "array name")
            if arr.name in seen:
                raise EncodeError(f"duplicate array name index {arr.name}")
            seen.add(arr.name)
            out += _ARRAY_HEAD.pack(arr.name, _CODE[arr.elem_type], len(arr.dims))
            for d in arr.dims:
                out += struct.pack("<Q", d)
            out += arr.payload
        # children depth-first, in order
        stack.extend(reversed(n.children))


def to_bytes(file: NrdfFile) -> bytes:
    """Serialize to the canonical byte string."""
    if file.version != VERSION:
        raise EncodeError(f"cannot write version {file.version}")
    if len(set(file.string_heap)) != len(file.string_heap):
        raise EncodeError("string heap entries must be unique")
    heap = bytearray(_U32.pack(len(file.string_heap)))
    for s in file.string_heap:
        raw = s.encode("utf-8")
        heap += _U32.pack(len(raw)) + raw
    body = bytearray()
    _encode_node(file.root, body, len(file.string_heap))
    header = _HEADER.pack(
        MAGIC, VERSION, _HEADER.size, len(heap), _HEADER.size + len(heap)
    )
    return header + bytes(heap) + bytes(body)


def write_file(file: NrdfFile, sink) -> int:
    """Write the canonical encoding to a binary sink; returns byte count."""
    data = to_bytes(file)
    sink.write(data)
    return len(data)


# ---------------------------------------------------------------------------
# reading


class _Cursor:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int) -> bytes:
        start = self.pos
        if n < 0 or start + n > len(self.data):
            raise CorruptFileError(start, f"needed {n} bytes, have {len(self.data) - start}")
        self.pos = start + n
        return self.data[start : start + n]

    def unpack(self, st: struct.Struct):
        return st.unpack(self.take(st.size))


def _read_heap(cur: _Cursor) -> list[str]:
    (count,) = cur.unpack(_U32)
    heap = []
    for _ in range(count):
        (length,) = cur.unpack(_U32)
        raw = cur.take(length)
        try:
            heap.append(raw.decode("utf-8"))
        except UnicodeDecodeError:
            raise CorruptFileError(cur.pos - length, "heap string is not valid UTF-8")
    return heap


def _read_node_shell(cur: _Cursor, heap_len: int) -> tuple[NrdfNode, int]:
    """One node without its children; returns (node, child count)."""
    name_index, n_attrs, n_arrays, n_children = cur.unpack(_NODE_HEAD)
    if name_index == NONE_INDEX:
        name = None
    elif name_index >= heap_len:
        raise CorruptFileError(cur.pos - _NODE_HEAD.size, f"dangling node name index {name_index}")
    else:
        name = name_index
    attrs = []
    for _ in range(n_attrs):
        name_idx, code = cur.unpack(_ATTR_HEAD)
        if name_idx >= heap_len:
            raise CorruptFileError(cur.pos - _ATTR_HEAD.size, f"dangling attribute name index {name_idx}")
        kind = _KIND.get(code)
        if kind is None:
            raise CorruptFileError(cur.pos - 1, f"unknown attribute type code {code}")
        raw = cur.take(8)
        if kind == "i64":
            value = _I64.unpack(raw)[0]
        elif kind == "f64":
            value = _F64.unpack(raw)[0]
        else:
            value = _U32.unpack(raw[:4])[0]
            if kind == "str" and value >= heap_len:
                raise CorruptFileError(cur.pos - 8, f"dangling attribute string index {value}")
        attrs.append(NrdfAttr(name_idx, kind, value))
    arrays = []
    for _ in range(n_arrays):
        name_idx, code, rank = cur.unpack(_ARRAY_HEAD)
        if name_idx >= heap_len:
            raise CorruptFileError(cur.pos - _ARRAY_HEAD.size, f"dangling array name index {name_idx}")
        elem = _KIND.get(code)
        if elem is None or elem == "str":
            raise CorruptFileError(cur.pos - 2, f"unknown array element code {code}")
        dims = []
        count = 1
        for _ in range(rank):
            d = struct.unpack("<Q", cur.take(8))[0]
            dims.append(d)
            count *= d
        payload = cur.take(count * ELEMENT_SIZE[elem])  # bounds-checked, never over-allocates
        arrays.append(NrdfArray(name_idx, elem, dims, payload))
    return NrdfNode(name, attrs, arrays), n_children


def _read_tree(cur: _Cursor, heap_len: int) -> NrdfNode:
    root, n = _read_node_shell(cur, heap_len)
    stack = [(root, n)]
    while stack:
        node, remaining = stack[-1]
        if remaining == 0:
            stack.pop()
            continue
        stack[-1] = (node, remaining - 1)
        child, n = _read_node_shell(cur, heap_len)
        node.children.append(child)
        stack.append((child, n))
    return root


def from_bytes(data: bytes) -> NrdfFile:
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise NotNrdfError("not an NRDF file")
    cur = _Cursor(data)
    _, version, heap_off, heap_len_bytes, root_off = cur.unpack(_HEADER)
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported NRDF version {version}")
    for off, what in ((heap_off, "heap"), (root_off, "root node")):
        if off > len(data):
            raise CorruptFileError(8, f"{what} offset {off} beyond end of file")
    heap = _read_heap(_Cursor(data, heap_off))
    root = _read_tree(_Cursor(data, root_off), len(heap))
    return NrdfFile(version, heap, root)


def read_file(source) -> NrdfFile:
    """Parse NRDF bytes from a bytes object or a binary stream."""
    if hasattr(source, "read"):
        source = source.read()
    return from_bytes(source)


def read_path(path) -> NrdfFile:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def write_path(file: NrdfFile, path) -> int:
    with open(path, "wb") as fh:
        return write_file(file, fh)


# ---------------------------------------------------------------------------
# text dump


def _fmt_scalar(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def dump(file: NrdfFile, mode: str = "tree") -> str:
    """Line-oriented ASCII rendering of the node tree.

    Mode "tree" prints one line per node, indented two spaces per depth,
    with the root as "/".  Mode "full" also prints attributes ("@name =
    value") and arrays with full payloads; f64 values use shortest
    round-trip formatting.
    """
    if mode not in ("tree", "full"):
        raise ValueError(f"unknown dump mode {mode!r}")
    lines = []
    stack = [(file.root, 0)]
    while stack:
        node, depth = stack.pop()
        pad = "  " * depth
        name = file.name_of(node)
        lines.append(pad + ("/" if depth == 0 else (name if name is not None else "?")))
        if mode == "full":
            inner = "  " * (depth + 1)
            for a in node.attrs:
                if a.kind == "str":
                    value = repr(file.string(a.value))
                else:
                    value = _fmt_scalar(a.value)
                lines.append(f"{inner}@{file.string(a.name)} = {value}")
            for arr in node.arrays:
                dims = "x".join(str(d) for d in arr.dims)
                body = " ".join(_fmt_scalar(v) for v in arr.values())
                lines.append(
                    f"{inner}{file.string(arr.name)}: {arr.elem_type}[{dims}] = {body}"
                )
        for child in reversed(node.children):
            stack.append((child, depth + 1))
    return "\n".join(lines) + "\n"
