"""Projection rounding of vector solutions and the clamp-to-ball maps."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph
from .instances import hypercube_points, noisy_hypercube
from .special import f_star, find_alpha_rho
from .sdp import PROD, QMC, Objective, SdpSolution, UnitVectorAssignment, graph_value, solve_vector_program

log = logging.getLogger(__name__)

MIN_TRIALS = 30
GAUSSIAN_ALGORITHM = "numpy PCG64 standard_normal (ziggurat)"


def _project_rows(F: np.ndarray, Z: np.ndarray) -> np.ndarray | None:
    P = F @ Z.T
    norms = np.linalg.norm(P, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        return None
    return P / norms


def project_rows(F: np.ndarray, k: int, rng: np.random.Generator, max_retries: int = 100) -> np.ndarray:
    """Rows u -> Zu/|Zu| for one shared k x r Gaussian matrix Z."""
    if k < 1:
        raise ValueError("k must be >= 1")
    r = F.shape[1]
    Z = rng.standard_normal((k, r))
    for retry in range(max_retries + 1):
        out = _project_rows(F, Z)
        if out is not None:
            if retry:
                log.warning("projection hit a zero image; %d retries", retry)
            return out
        # a row of F lies in ker Z: refresh one random column of Z
        Z[:, rng.integers(r)] = rng.standard_normal(k)
    raise RuntimeError("repeated zero images; input rows are degenerate")


def project_round(f: UnitVectorAssignment, k: int, seed: int) -> UnitVectorAssignment:
    """Rank-k projection rounding; k = 1 is halfspace rounding."""
    rng = np.random.default_rng(seed)
    return UnitVectorAssignment(f.labels, project_rows(f.vectors, k, rng))


def expected_inner_product_mc(rho: float, k: int, samples: int = 10**5, seed: int = 0,
                              chunk: int = 1 << 16) -> tuple[float, float]:
    """Monte Carlo mean of <Zu/|Zu|, Zv/|Zv|> for <u, v> = rho, with a 95% half-width."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if abs(rho) == 1.0:
        return float(rho), 0.0
    # only Z's first two columns matter for vectors in a 2-plane
    s = math.sqrt(1.0 - rho * rho)
    rng = np.random.default_rng(seed)
    total = total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        g1 = rng.standard_normal((m, k))
        g2 = rng.standard_normal((m, k))
        zu = g1
        zv = rho * g1 + s * g2
        x = np.einsum("ij,ij->i", zu, zv) / (np.linalg.norm(zu, axis=1) * np.linalg.norm(zv, axis=1))
        total += float(x.sum())
        total_sq += float(np.dot(x, x))
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, 1.96 * math.sqrt(var / samples)


def rounding_score_objective(obj: Objective) -> Objective:
    """Objective used to score a rounded solution.

    Rounded QMC solutions are product states, scored by the product-state form.
    """
    return PROD if obj == QMC else obj


@dataclass
class RoundingReport:
    graph_id: str
    objective: str
    k: int
    trials: int
    sdp_value: float
    mean_rounded: float
    ratio: float
    stderr: float
    seed: int = 0
    values: list[float] = field(default_factory=list, repr=False)
    gaussian: str = GAUSSIAN_ALGORITHM

    def to_dict(self) -> dict:
        return {"graph_id": self.graph_id, "objective": self.objective, "k": self.k,
                "trials": self.trials, "sdp_value": self.sdp_value,
                "mean_rounded": self.mean_rounded, "ratio": self.ratio, "stderr": self.stderr}


def empirical_rounding_ratio(g: WeightedGraph, obj: Objective, k: int, trials: int, seed: int = 0,
                             solution: SdpSolution | UnitVectorAssignment | None = None,
                             graph_id: str = "graph") -> RoundingReport:
    """Average rounded value over independent trials, divided by the SDP value."""
    if trials < MIN_TRIALS:
        raise ValueError(f"ratio reports need at least {MIN_TRIALS} trials")
    if solution is None:
        solution = solve_vector_program(g, obj, seed=seed)
    f = solution.assignment if isinstance(solution, SdpSolution) else solution
    F = f.for_graph(g)
    sdp_value = graph_value(g, F, obj)
    score = rounding_score_objective(obj)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    values = [graph_value(g, project_rows(F, k, np.random.default_rng(s)), score) for s in seeds]
    arr = np.array(values)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / math.sqrt(trials))
    return RoundingReport(graph_id, obj.kind, k, trials, sdp_value, mean,
                          mean / sdp_value if sdp_value else math.nan, stderr, seed, values)


def round_to_ball(v: np.ndarray) -> np.ndarray:
    """v if |v| <= 1, else v/|v|; works row-wise on 2-D input."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("entries must be finite")
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.maximum(norm, 1.0)


def phi(v: np.ndarray) -> np.ndarray:
    """The part of v outside the unit ball, v - R(v)."""
    v = np.asarray(v, dtype=float)
    return v - round_to_ball(v)


def psi(v: np.ndarray) -> np.ndarray:
    """Squared norm clamped at 1."""
    v = np.asarray(v, dtype=float)
    return np.minimum(np.sum(v * v, axis=-1), 1.0)


@dataclass
class GapReport:
    n: int
    rho: float
    k: int
    w_loops: float
    closed_form: float
    dictator_value: float
    identity_sdp_value: float
    rounding: RoundingReport
    rounding_target: float
    alpha: float
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"n": self.n, "rho": self.rho, "k": self.k, "w_loops": self.w_loops,
                "closed_form": self.closed_form, "dictator_value": self.dictator_value,
                "identity_sdp_value": self.identity_sdp_value, "rounding": self.rounding.to_dict(),
                "rounding_target": self.rounding_target, "alpha": self.alpha,
                "checks": self.checks, "passed": self.passed}


def hypercube_gap(n: int, rho: float | None = None, k: int = 3, trials: int = 200,
                  seed: int = 0) -> GapReport:
    """Dictator, identity-solution and rounded values on the loop-free noisy hypercube.

    The identity solution sends x to x/sqrt(n); its rounded mean should sit near
    1/4 - F*(k, rho)/4 while the dictator reaches the SDP value.
    """
    alpha_rep = find_alpha_rho("kMC", k)
    if rho is None:
        rho = alpha_rep.rho_star
    g = noisy_hypercube(n, rho, loops=False)
    w_loops = g.metadata["w_loops"]
    closed = (0.25 - rho / 4.0) / (1.0 - w_loops)
    idx = [sum(1 << i for i, ch in enumerate(lab) if ch == "-") for lab in g.vertices]
    pts = hypercube_points(n)[idx]
    dict_rows = np.zeros((g.n, k))
    dict_rows[:, 0] = pts[:, 0]
    dictator_value = graph_value(g, dict_rows, PROD)
    identity = UnitVectorAssignment(g.vertices, pts / math.sqrt(n))
    identity_value = graph_value(g, identity.vectors, PROD)
    rep = empirical_rounding_ratio(g, PROD, k, trials, seed=seed, solution=identity,
                                   graph_id=f"hypercube:{n}:{rho}:noloops")
    target = 0.25 - f_star(k, rho) / 4.0
    checks = {
        "dictator_exact": abs(dictator_value - closed) <= 1e-12,
        "identity_sdp": abs(identity_value - closed) <= 1e-3,
        "rounding_mean": abs(rep.mean_rounded - target) <= 0.02,
        "ratio_near_alpha": abs(rep.ratio - alpha_rep.alpha) <= 0.02,
    }
    return GapReport(n, rho, k, w_loops, closed, dictator_value, identity_value, rep, target,
                     alpha_rep.alpha, checks)
