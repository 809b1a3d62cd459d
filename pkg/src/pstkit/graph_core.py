"""Simple undirected graphs as dense 01 matrices, named families, products and graph6 I/O."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import Graph6Error, InvalidParameter

__all__ = [
    "Graph",
    "make_named",
    "tensor",
    "cartesian",
    "cartesian_power",
    "switching_pair",
    "matching_cover",
    "complement",
    "parse_graph6",
    "write_graph6",
    "read_graph6_file",
    "FAMILIES",
]


@dataclass(frozen=True, eq=False)
class Graph:
    adj: np.ndarray
    labels: Optional[tuple[str, ...]] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        a = np.array(self.adj, dtype=np.int64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameter(f"adjacency must be square, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise InvalidParameter("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise InvalidParameter("loops are not allowed")
        if np.any((a != 0) & (a != 1)):
            raise InvalidParameter("adjacency entries must be 0 or 1")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != a.shape[0]:
                raise InvalidParameter("labels must have one entry per vertex")
            if len(set(labels)) != len(labels):
                raise InvalidParameter("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def num_edges(self) -> int:
        return int(self.adj.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adj, 1))
        return list(zip(i.tolist(), j.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"<Graph{tag} n={self.n} m={self.num_edges}>"


def _from_edges(n: int, edges: Iterable[tuple[int, int]], name: str) -> Graph:
    a = np.zeros((n, n), dtype=np.int64)
    for i, j in edges:
        a[i, j] = a[j, i] = 1
    return Graph(a, name=name)


def _path(k):
    return _from_edges(k, [(i, i + 1) for i in range(k - 1)], f"path:{k}")


def _cycle(k):
    if k < 3:
        raise InvalidParameter("cycle needs at least 3 vertices")
    return _from_edges(k, [(i, (i + 1) % k) for i in range(k)], f"cycle:{k}")


def _complete(k):
    return Graph(np.ones((k, k), dtype=np.int64) - np.eye(k, dtype=np.int64), name=f"complete:{k}")


def _star(k):
    # vertex 0 is the centre
    return _from_edges(k + 1, [(0, i) for i in range(1, k + 1)], f"star:{k}")


def _empty(k):
    return Graph(np.zeros((k, k), dtype=np.int64), name=f"empty:{k}")


def _hypercube(k):
    n = 1 << k
    return _from_edges(n, [(x, x ^ (1 << b)) for x in range(n) for b in range(k) if x < x ^ (1 << b)],
                       f"hypercube:{k}")


FAMILIES = {
    "path": _path,
    "cycle": _cycle,
    "complete": _complete,
    "star": _star,
    "empty": _empty,
    "hypercube": _hypercube,
}


def make_named(family: str, k: int) -> Graph:
    """Build a member of a standard family.

    ``star(k)`` has ``k`` leaves around centre 0 and ``hypercube(k)`` is the
    ``k``-dimensional cube on ``2**k`` vertices.
    """
    if family not in FAMILIES:
        raise InvalidParameter(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if int(k) != k or k < 1:
        raise InvalidParameter(f"{family} needs a positive integer parameter, got {k!r}")
    return FAMILIES[family](int(k))


def _pair_labels(x: Graph, y: Graph) -> tuple[str, ...]:
    return tuple(f"({x.label(w)},{y.label(u)})" for w in range(x.n) for u in range(y.n))


def tensor(x: Graph, y: Graph) -> Graph:
    """Tensor (direct) product; vertex ``(w, u)`` sits at index ``w * y.n + u``."""
    name = f"tensor({x.name},{y.name})" if x.name and y.name else ""
    return Graph(np.kron(x.adj, y.adj), labels=_pair_labels(x, y), name=name)


def cartesian(x: Graph, y: Graph) -> Graph:
    a = np.kron(x.adj, np.eye(y.n, dtype=np.int64)) + np.kron(np.eye(x.n, dtype=np.int64), y.adj)
    name = f"cartesian({x.name},{y.name})" if x.name and y.name else ""
    return Graph(a, labels=_pair_labels(x, y), name=name)


def cartesian_power(y: Graph, k: int) -> Graph:
    if k < 1:
        raise InvalidParameter("power must be positive")
    g = y
    for _ in range(k - 1):
        g = cartesian(g, y)
    return g


def _layer_labels(x: Graph) -> tuple[str, ...]:
    return tuple(f"({s},{x.label(u)})" for s in (0, 1) for u in range(x.n))


def switching_pair(x: Graph, y: Graph) -> Graph:
    """The 2n-vertex graph with block adjacency [[A(X), A(Y)], [A(Y), A(X)]]."""
    if x.n != y.n:
        raise InvalidParameter(f"vertex counts differ: {x.n} != {y.n}")
    a = np.block([[x.adj, y.adj], [y.adj, x.adj]])
    name = f"switching({x.name},{y.name})" if x.name and y.name else ""
    return Graph(a, labels=_layer_labels(x), name=name)


def matching_cover(x: Graph) -> Graph:
    """X joined to a copy of itself by the perfect matching ``(0,u) ~ (1,u)``."""
    eye = np.eye(x.n, dtype=np.int64)
    a = np.block([[x.adj, eye], [eye, x.adj]])
    return Graph(a, labels=_layer_labels(x), name=f"matching({x.name})" if x.name else "")


def complement(x: Graph) -> Graph:
    n = x.n
    a = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64) - x.adj
    return Graph(a, labels=x.labels, name=f"complement({x.name})" if x.name else "")


# -- graph6 -------------------------------------------------------------------

_HEADER = ">>graph6<<"


def _decode_n(data: bytes) -> tuple[int, int]:
    if not data:
        raise Graph6Error("empty graph6 string")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6Error("truncated vertex count")
        width, start = 6, 2
    else:
        if len(data) < 4:
            raise Graph6Error("truncated vertex count")
        width, start = 3, 1
    n = 0
    for c in data[start:start + width]:
        n = (n << 6) | (c - 63)
    return n, start + width


def _encode_n(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n < (1 << 36):
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise Graph6Error("graph too large for graph6")


def parse_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(_HEADER):
        s = s[len(_HEADER):]
    try:
        data = s.encode("ascii")
    except UnicodeEncodeError as exc:
        raise Graph6Error("graph6 must be printable ASCII") from exc
    bad = [c for c in data if not 63 <= c <= 126]
    if bad:
        raise Graph6Error(f"character {chr(bad[0])!r} outside the graph6 range 63..126")
    n, pos = _decode_n(data)
    nbits = n * (n - 1) // 2
    body = data[pos:]
    if len(body) != (nbits + 5) // 6:
        raise Graph6Error(f"expected {(nbits + 5) // 6} data bytes for n={n}, got {len(body)}")
    bits = []
    for c in body:
        v = c - 63
        bits.extend((v >> (5 - i)) & 1 for i in range(6))
    if any(bits[nbits:]):
        raise Graph6Error("nonzero padding bits")
    a = np.zeros((n, n), dtype=np.int64)
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                a[i, j] = a[j, i] = 1
            k += 1
    return Graph(a, name=s)


def write_graph6(g: Graph) -> str:
    n = g.n
    bits = [int(g.adj[i, j]) for j in range(1, n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    out = bytearray(_encode_n(n))
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k:k + 6]:
            v = (v << 1) | b
        out.append(v + 63)
    return out.decode("ascii")


def read_graph6_file(path) -> list[Graph]:
    graphs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith(_HEADER):
                line = line[len(_HEADER):]
            if line:
                graphs.append(parse_graph6(line))
    return graphs


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex ``i`` of the result being vertex ``perm[i]`` of ``g``."""
    p = np.asarray(perm)
    return Graph(g.adj[np.ix_(p, p)])
