"""Vector-form SDP relaxations  max_{f: V -> S^{r-1}} E_e[a - b <f(u), f(v)>].

The solver is low-rank block coordinate ascent on products of spheres: with
b > 0 the best unit vector for f(u), all others fixed, is the normalized
negative of the weighted neighbour sum.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingVertex
from .graph import WeightedGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Objective:
    a: float
    b: float
    kind: str = "CUSTOM"

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("objective needs b > 0")

    def edge_value(self, inner):
        return self.a - self.b * inner


MC = Objective(0.5, 0.5, "MC")
PROD = Objective(0.25, 0.25, "PROD")
QMC = Objective(0.25, 0.75, "QMC")
OBJECTIVES = {"MC": MC, "PROD": PROD, "QMC": QMC}


def objective(name: str) -> Objective:
    try:
        return OBJECTIVES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}") from None


@dataclass(frozen=True, eq=False)
class UnitVectorAssignment:
    labels: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=float)
        if vec.ndim != 2 or vec.shape[0] != len(self.labels):
            raise ValueError("vectors must be a |V| x r matrix matching labels")
        norms = np.linalg.norm(vec, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError(f"rows must be unit vectors (worst norm {norms[np.argmax(abs(norms - 1))]:.12g})")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "vectors", vec)

    @property
    def r(self) -> int:
        return self.vectors.shape[1]

    def for_graph(self, g: WeightedGraph) -> np.ndarray:
        """Rows reordered to match g's vertex order."""
        if self.labels == g.vertices:
            return self.vectors
        pos = {lab: i for i, lab in enumerate(self.labels)}
        missing = [lab for lab in g.vertices if lab not in pos]
        if missing:
            raise MissingVertex(f"assignment lacks vertices {missing[:5]}")
        return self.vectors[[pos[lab] for lab in g.vertices]]

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "r": self.r, "rows": self.vectors.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "UnitVectorAssignment":
        vec = np.asarray(d["rows"], dtype=float).reshape(len(d["labels"]), int(d["r"]))
        return cls(tuple(d["labels"]), vec)

    @classmethod
    def from_json(cls, text: str) -> "UnitVectorAssignment":
        return cls.from_dict(json.loads(text))


@dataclass
class SdpSolution:
    assignment: UnitVectorAssignment
    value: float
    iterations: int
    residual: float
    objective: Objective
    history: list[float] | None = None

    def to_dict(self) -> dict:
        return {"value": self.value, "iterations": self.iterations, "residual": self.residual,
                "objective": self.objective.kind, "a": self.objective.a, "b": self.objective.b,
                "assignment": self.assignment.to_dict()}


def graph_value(g: WeightedGraph, rows: np.ndarray, obj: Objective) -> float:
    """Sum_e w_e (a - b <rows[u], rows[v]>) for rows in g's vertex order (no norm check)."""
    inner = np.einsum("ij,ij->i", rows[g.u], rows[g.v])
    return float(np.dot(g.w, obj.a - obj.b * inner))


def evaluate_assignment(g: WeightedGraph, f: UnitVectorAssignment, obj: Objective) -> float:
    return graph_value(g, f.for_graph(g), obj)


def default_max_iter(n: int, tol: float) -> int:
    return max(100, int(10 * n * math.log(1.0 / tol)))


def _row_residual(A, F: np.ndarray, b: float) -> float:
    """Largest tangent-space gradient norm over rows."""
    G = -b * (A @ F)
    T = G - np.einsum("ij,ij->i", G, F)[:, None] * F
    return float(np.linalg.norm(T, axis=1).max()) if len(F) else 0.0


def random_unit_rows(n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.standard_normal((n, r))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _ascend(g: WeightedGraph, A, obj: Objective, F: np.ndarray, tol: float, max_iter: int,
            rng: np.random.Generator, track: bool):
    indptr, indices, data = A.indptr, A.indices, A.data
    value = graph_value(g, F, obj)
    history = [value] if track else None
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        for u in rng.permutation(g.n):
            lo, hi = indptr[u], indptr[u + 1]
            if lo == hi:
                continue
            s = data[lo:hi] @ F[indices[lo:hi]]
            norm = np.linalg.norm(s)
            if norm > 1e-300:
                F[u] = -s / norm
            # zero neighbour sum: every direction is optimal, keep the current vector
        new = graph_value(g, F, obj)
        if new < value - 1e-12 * max(1.0, abs(value)):
            raise AssertionError(f"coordinate ascent decreased the objective: {value!r} -> {new!r}")
        gain, value = new - value, new
        if track:
            history.append(value)
        if gain < tol:
            break
    return F, value, sweeps, history


def solve_vector_program(g: WeightedGraph, obj: Objective, r: int | None = None, tol: float = 1e-10,
                         max_iter: int | None = None, restarts: int = 5, seed: int = 0,
                         init: np.ndarray | None = None, track: bool = False) -> SdpSolution:
    """Best of `restarts` randomized block-coordinate-ascent runs.

    The returned value is a feasible (lower-bound) value of the relaxation; with
    r = |V| it is the optimum up to the risk of a non-global stationary point.
    """
    if r is None:
        r = g.n
    if r < 1:
        raise ValueError("rank r must be >= 1")
    if max_iter is None:
        max_iter = default_max_iter(g.n, tol)
    A = g.adjacency()
    seeds = np.random.SeedSequence(seed).spawn(max(1, restarts))
    best = None
    for i, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        if init is not None and i == 0:
            F = np.array(init, dtype=float, copy=True)
            F /= np.linalg.norm(F, axis=1, keepdims=True)
        else:
            F = random_unit_rows(g.n, r, rng)
        F, value, sweeps, history = _ascend(g, A, obj, F, tol, max_iter, rng, track)
        if sweeps >= max_iter:
            log.info("restart %d hit max_iter=%d", i, max_iter)
        if best is None or value > best[1]:
            best = (F, value, sweeps, history)
    F, value, sweeps, history = best
    assignment = UnitVectorAssignment(g.vertices, F)
    return SdpSolution(assignment, graph_value(g, F, obj), sweeps, _row_residual(A, F, obj.b), obj, history)


def sdp_identities(mc_value: float) -> tuple[float, float]:
    """(product-state SDP, Quantum Max-Cut SDP) values implied by a Max-Cut SDP value."""
    if not 0.0 <= mc_value <= 1.0:
        raise ValueError("mc_value must lie in [0, 1]")
    return mc_value / 2.0, 1.5 * mc_value - 0.5


def fast_rank(n: int) -> int:
    return max(1, math.ceil(math.sqrt(2 * n)))
