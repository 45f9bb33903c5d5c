"""Weighted interaction graphs whose edge weights form a probability distribution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import AllLoops, EmptyGraph, GraphFormatError

GRAPH_HEADER = "qmclab-graph v1"


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected weighted graph stored as parallel index arrays.

    Edges are kept in canonical orientation (lexicographically smaller label
    first), duplicates merged, and sorted by (label of u, label of v).  Use
    :meth:`from_edges` or :meth:`from_index_arrays` rather than the raw
    constructor.
    """

    vertices: tuple[str, ...]
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    normalized: bool = False
    allow_loops: bool = False
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, float]], vertices: Sequence[str] | None = None,
                   allow_loops: bool = False, normalize: bool = True, metadata: dict | None = None):
        edges = list(edges)
        if vertices is None:
            seen: dict[str, None] = {}
            for a, b, _ in edges:
                seen.setdefault(str(a), None)
                seen.setdefault(str(b), None)
            vertices = list(seen)
        vertices = [str(x) for x in vertices]
        index = {lab: i for i, lab in enumerate(vertices)}
        if len(index) != len(vertices):
            raise ValueError("duplicate vertex labels")
        try:
            u = np.array([index[str(a)] for a, _, _ in edges], dtype=np.int64)
            v = np.array([index[str(b)] for _, b, _ in edges], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"edge endpoint {exc.args[0]!r} is not a vertex") from None
        w = np.array([float(x) for _, _, x in edges], dtype=float)
        return cls.from_index_arrays(vertices, u, v, w, allow_loops=allow_loops,
                                     normalize=normalize, metadata=metadata)

    @classmethod
    def from_index_arrays(cls, vertices: Sequence[str], u, v, w, allow_loops: bool = False,
                          normalize: bool = True, metadata: dict | None = None):
        vertices = tuple(str(x) for x in vertices)
        n = len(vertices)
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        w = np.asarray(w, dtype=float).ravel()
        if not (len(u) == len(v) == len(w)):
            raise ValueError("edge arrays differ in length")
        if len(u) and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if not allow_loops and np.any(u == v):
            raise ValueError("self-loop present but allow_loops is False")
        # canonical orientation and ordering by label rank
        order = sorted(range(n), key=vertices.__getitem__)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)
        ru, rv = rank[u], rank[v]
        swap = ru > rv
        u, v = np.where(swap, v, u), np.where(swap, u, v)
        key = np.minimum(ru, rv) * n + np.maximum(ru, rv)
        keys, inverse = np.unique(key, return_inverse=True)
        merged = np.zeros(len(keys))
        np.add.at(merged, inverse, w)
        first = np.full(len(keys), -1, dtype=np.int64)
        first[inverse[::-1]] = np.arange(len(key))[::-1]
        u, v = u[first], v[first]
        keep = merged > 0
        u, v, merged = u[keep], v[keep], merged[keep]
        g = cls(vertices, u, v, merged, normalized=False, allow_loops=allow_loops,
                metadata=dict(metadata or {}))
        return normalize_weights(g) if normalize else g

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.w)

    @property
    def edges(self) -> list[tuple[str, str, float]]:
        V = self.vertices
        return [(V[a], V[b], float(x)) for a, b, x in zip(self.u, self.v, self.w)]

    def index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.vertices)}

    def total_weight(self) -> float:
        return math.fsum(self.w.tolist())

    def loop_mask(self) -> np.ndarray:
        return self.u == self.v

    def has_loops(self) -> bool:
        return bool(np.any(self.loop_mask()))

    def adjacency(self, dense: bool = False):
        """Symmetric matrix with A[u, v] = A[v, u] = w_uv for non-loop edges."""
        nl = ~self.loop_mask()
        u, v, w = self.u[nl], self.v[nl], self.w[nl]
        A = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                          shape=(self.n, self.n)).tocsr()
        return A.toarray() if dense else A

    def with_metadata(self, **kw) -> "WeightedGraph":
        md = dict(self.metadata)
        md.update(kw)
        return WeightedGraph(self.vertices, self.u, self.v, self.w, self.normalized,
                             self.allow_loops, md)

    def __repr__(self) -> str:
        return (f"WeightedGraph(n={self.n}, edges={self.edge_count}, normalized={self.normalized}, "
                f"loops={self.has_loops()})")


@dataclass(frozen=True)
class GraphStats:
    p_max: float
    a_max: float
    n: int


def normalize_weights(g: WeightedGraph) -> WeightedGraph:
    """Rescale weights to sum to one; the rounding residual goes to the last edge."""
    total = g.total_weight()
    if g.edge_count == 0 or total <= 0:
        raise EmptyGraph("graph has no positive-weight edge")
    w = g.w / total
    if len(w) > 1:
        w[-1] = 1.0 - math.fsum(w[:-1].tolist())
    else:
        w[-1] = 1.0
    return WeightedGraph(g.vertices, g.u, g.v, w, True, g.allow_loops, dict(g.metadata))


def remove_self_loops(g: WeightedGraph) -> tuple[WeightedGraph, float]:
    """Drop self-loops and rescale the rest by 1/(1 - w_loops)."""
    loops = g.loop_mask()
    w_loops = math.fsum(g.w[loops].tolist())
    if not loops.any():
        return g, 0.0
    if np.all(loops):
        raise AllLoops("every edge is a self-loop")
    keep = ~loops
    h = WeightedGraph(g.vertices, g.u[keep], g.v[keep], g.w[keep], False, False, dict(g.metadata))
    h = normalize_weights(h)
    return h.with_metadata(w_loops=w_loops), w_loops


def split_vertices(g: WeightedGraph, M: int) -> WeightedGraph:
    """Replace each vertex by M copies and each edge by M^2 edges of weight w/M^2."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if M == 1:
        return g
    n = g.n
    labels = [f"{lab}#{i}" for lab in g.vertices for i in range(1, M + 1)]
    i, j = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    i, j = i.ravel(), j.ravel()
    u = (g.u[:, None] * M + i[None, :]).ravel()
    v = (g.v[:, None] * M + j[None, :]).ravel()
    w = np.repeat(g.w / (M * M), M * M)
    allow = g.allow_loops or g.has_loops()
    out = WeightedGraph.from_index_arrays(labels, u, v, w, allow_loops=allow, normalize=True,
                                          metadata=dict(g.metadata))
    assert out.n == n * M
    return out


def vertex_marginals(g: WeightedGraph) -> np.ndarray:
    """p_u = 1/2 Pr[edge contains u]; a loop at u counts as containing u twice."""
    p = np.zeros(g.n)
    np.add.at(p, g.u, 0.5 * g.w)
    np.add.at(p, g.v, 0.5 * g.w)
    return p / g.total_weight()


def bh_stats(g: WeightedGraph) -> GraphStats:
    """p_max and max conditional transition probability A[u, v] = Pr[u' = u | v' = v]."""
    if g.has_loops():
        raise ValueError("bh_stats expects a loop-free graph")
    p = vertex_marginals(g)
    total = g.total_weight()
    half = 0.5 * g.w / total
    a_uv = half / p[g.v]
    a_vu = half / p[g.u]
    a_max = float(max(a_uv.max(initial=0.0), a_vu.max(initial=0.0)))
    return GraphStats(p_max=float(p.max()), a_max=a_max, n=g.n)


def bh_error_bound(stats: GraphStats) -> float:
    """Additive gap between maximum energy and product-state value for high-degree graphs."""
    return 20.0 * (stats.n * stats.a_max * stats.p_max) ** 0.125 + stats.p_max


def format_graph(g: WeightedGraph) -> str:
    lines = [GRAPH_HEADER, f"vertices {g.n}", *g.vertices, f"edges {g.edge_count}"]
    lines += [f"{a} {b} {w!r}" for a, b, w in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, normalize: bool = True) -> WeightedGraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != GRAPH_HEADER:
        raise GraphFormatError(f"expected header {GRAPH_HEADER!r}, got {lines[0] if lines else ''!r}")
    try:
        tag, count = lines[1].split()
        if tag != "vertices":
            raise GraphFormatError("missing 'vertices' line")
        nv = int(count)
        vertices = lines[2:2 + nv]
        tag, count = lines[2 + nv].split()
        if tag != "edges":
            raise GraphFormatError("missing 'edges' line")
        ne = int(count)
        rows = [ln.split() for ln in lines[3 + nv:3 + nv + ne]]
    except (IndexError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph file: {exc}") from None
    if len(vertices) != nv or len(rows) != ne or any(len(r) != 3 for r in rows):
        raise GraphFormatError("vertex/edge counts do not match the body")
    edges = [(a, b, float(x)) for a, b, x in rows]
    loops = any(a == b for a, b, _ in edges)
    return WeightedGraph.from_edges(edges, vertices, allow_loops=loops, normalize=normalize)


def read_graph(path: str | Path) -> WeightedGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))
