"""Gegenbauer polynomials and eigenvalues of zonal kernels on the sphere S^{n-1}.

A zonal kernel g(<u, v>) acts on functions of the sphere by averaging over v;
its eigenvalue on degree-d harmonics is

    lambda_d = (1/Z_n) int_{-1}^{1} C_d(t)/C_d(1) (1 - t^2)^(alpha - 1/2) g(t) dt,

with alpha = (n - 2)/2.  Integrals are taken in theta with t = cos(theta), which
turns the weight into sin(theta)^(2 alpha) and removes the endpoint singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, QuadratureNonConvergent
from .special import f_star

MAX_QUAD_POINTS = 1 << 15


def alpha_of(n: int) -> float:
    if n < 2:
        raise DomainError("sphere dimension n must be >= 2")
    return (n - 2) / 2.0


def gegenbauer_c(alpha: float, d: int, t):
    """C_d^(alpha)(t) by the three-term recurrence."""
    if alpha <= -0.5:
        raise DomainError("alpha must exceed -1/2")
    if d < 0:
        raise DomainError("degree must be >= 0")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if d == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * alpha * t
    for j in range(2, d + 1):
        prev, cur = cur, (2.0 * t * (j + alpha - 1.0) * cur - (j + 2.0 * alpha - 2.0) * prev) / j
    return cur if cur.ndim else float(cur)


def gegenbauer_at_one(alpha: float, d: int) -> float:
    """C_d^(alpha)(1) = (2 alpha)_d / d!."""
    out = 1.0
    for j in range(d):
        out *= (2.0 * alpha + j) / (j + 1.0)
    return out


def zonal(n: int, d: int, t):
    """Normalized zonal polynomial C_d(t)/C_d(1); Chebyshev T_d when n = 2."""
    alpha = alpha_of(n)
    t = np.asarray(t, dtype=float)
    if alpha == 0.0:
        out = np.cos(d * np.arccos(np.clip(t, -1.0, 1.0)))
    else:
        out = gegenbauer_c(alpha, d, t) / gegenbauer_at_one(alpha, d)
    return out if np.ndim(out) else float(out)


def ratio_d(n: int, d: int, t):
    """C_d(t)/C_d(1) (1 - t^2)^(alpha - 1/2)."""
    alpha = alpha_of(n)
    t = np.asarray(t, dtype=float)
    out = zonal(n, d, t) * (1.0 - t * t) ** (alpha - 0.5)
    return out if np.ndim(out) else float(out)


def nu_d(n: int, d: int, t):
    """Antiderivative int_{-1}^{t} ratio_d(s) ds in closed form (d >= 1)."""
    if d < 1:
        raise DomainError("nu_d needs d >= 1")
    alpha = alpha_of(n)
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    if alpha == 0.0:
        out = -np.sin(d * np.arccos(t)) / d
    else:
        w = (1.0 - t * t) ** (alpha + 0.5)
        out = (-2.0 * alpha / (d * (d + 2.0 * alpha)) * w * gegenbauer_c(alpha + 1.0, d - 1, t)
               / gegenbauer_at_one(alpha, d))
    return out if np.ndim(out) else float(out)


# ---- quadrature in theta --------------------------------------------------

def _gl_theta(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, points: int) -> float:
    x, w = np.polynomial.legendre.leggauss(points)
    theta = 0.5 * (b - a) * x + 0.5 * (b + a)
    return float(0.5 * (b - a) * np.dot(w, fn(theta)))


def integrate_theta(fn, breaks: Sequence[float], points: int = 64, tol: float = 1e-9) -> tuple[float, int]:
    """Piecewise Gauss-Legendre over theta, doubling points until two passes agree to tol."""
    if points < 2:
        raise ValueError("need at least 2 quadrature points")
    edges = sorted(set(float(b) for b in breaks))

    def once(p):
        return math.fsum(_gl_theta(fn, a, b, p) for a, b in zip(edges[:-1], edges[1:]) if b > a)

    prev = once(points)
    p = points
    while True:
        p *= 2
        if p > MAX_QUAD_POINTS:
            raise QuadratureNonConvergent(f"quadrature did not settle to {tol} by {p // 2} points")
        cur = once(p)
        if abs(cur - prev) <= tol:
            return cur, p
        prev = cur


@dataclass
class KernelSpec:
    """A zonal kernel g(t) on S^{n-1}; build with the class constructors."""
    form: str
    n: int
    params: dict = field(default_factory=dict)
    g: Callable[[np.ndarray], np.ndarray] = field(default=None, repr=False)
    theta_breaks: tuple[float, ...] = (0.0, math.pi)

    @property
    def alpha(self) -> float:
        return alpha_of(self.n)

    def __call__(self, t):
        return self.g(np.asarray(t, dtype=float))

    @classmethod
    def indicator_below(cls, t0: float, n: int) -> "KernelSpec":
        if not -1.0 <= t0 <= 1.0:
            raise DomainError("t0 must lie in [-1, 1]")
        th0 = math.acos(t0)
        return cls("indicator_below", n, {"t0": t0}, lambda t: (t <= t0).astype(float),
                   (th0, math.pi))

    @classmethod
    def conditioned_gaussian(cls, rho: float, r: float, s: float, n: int) -> "KernelSpec":
        """exp(c t)/A with c = rho r s/(1 - rho^2), normalized to a probability density."""
        if not -1.0 < rho < 1.0:
            raise DomainError("rho must lie in (-1, 1)")
        if r <= 0 or s <= 0:
            raise DomainError("radii must be positive")
        c = rho * r * s / (1.0 - rho * rho)
        # shift the exponent so its largest value is 0 on [-1, 1]
        top = abs(c)
        raw = cls("conditioned_gaussian", n, {"rho": rho, "r": r, "s": s, "c": c},
                  lambda t: np.exp(c * t - top))
        mass = _raw_moment(raw, 0)
        raw.params["log_A"] = math.log(mass) + top
        raw.g = lambda t: np.exp(c * t - top) / mass
        return raw

    @classmethod
    def tabulated(cls, ts: Sequence[float], values: Sequence[float], n: int) -> "KernelSpec":
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or len(ts) < 2:
            raise ValueError("tabulated kernel needs matching 1-D grids")
        if np.any(np.diff(ts) <= 0) or ts[0] < -1 or ts[-1] > 1:
            raise ValueError("grid must be increasing inside [-1, 1]")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("kernel values must be finite and non-negative")
        breaks = tuple(np.arccos(np.clip(ts, -1, 1)).tolist()) + (0.0, math.pi)
        return cls("tabulated", n, {"points": len(ts)},
                   lambda t: np.interp(t, ts, values, left=0.0, right=0.0), breaks)


def _raw_moment(spec: KernelSpec, d: int, points: int = 64, tol: float = 1e-12) -> float:
    """(1/Z_n) int zonal_d g, the unnormalized eigenvalue."""
    two_alpha = 2.0 * spec.alpha
    num, _ = integrate_theta(lambda th: np.sin(th) ** two_alpha * zonal(spec.n, d, np.cos(th)) * spec.g(np.cos(th)),
                             spec.theta_breaks, points, tol)
    z, _ = integrate_theta(lambda th: np.sin(th) ** two_alpha, (0.0, math.pi), points, tol)
    return num / z


def normalizer(n: int, points: int = 64) -> float:
    """Z_n = int_{-1}^{1} (1 - t^2)^(alpha - 1/2) dt, by the same quadrature as the eigenvalues."""
    two_alpha = 2.0 * alpha_of(n)
    return integrate_theta(lambda th: np.sin(th) ** two_alpha, (0.0, math.pi), points, 1e-12)[0]


def kernel_eigenvalue(spec: KernelSpec, d: int, quad_points: int = 64) -> float:
    """lambda_d of the zonal kernel; lambda_0 = 1 for probability densities."""
    if d < 0:
        raise DomainError("d must be >= 0")
    if quad_points < 64:
        raise ValueError("quad_points must be >= 64")
    return _raw_moment(spec, d, quad_points, 1e-9)


def nu_d_quadrature(n: int, d: int, t: float, points: int = 64) -> float:
    """int_{-1}^{t} ratio_d by quadrature, the independent check on nu_d."""
    two_alpha = 2.0 * alpha_of(n)
    th = math.acos(max(-1.0, min(1.0, t)))
    return integrate_theta(lambda x: np.sin(x) ** two_alpha * zonal(n, d, np.cos(x)), (th, math.pi),
                           points, 1e-13)[0]


# ---- reports ----------------------------------------------------------------

@dataclass
class KeyLemmaReport:
    alpha: float
    d_max: int
    grid_step: float
    passed: bool
    worst_margin: float
    worst_relative_margin: float
    worst_at: tuple[int, float]
    nu1_max: float
    violations: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "d_max": self.d_max, "grid_step": self.grid_step,
                "passed": self.passed, "worst_margin": self.worst_margin,
                "worst_relative_margin": self.worst_relative_margin,
                "worst_at": {"d": self.worst_at[0], "t": self.worst_at[1]},
                "nu1_max": self.nu1_max, "violations": [list(v) for v in self.violations[:20]]}


def check_key_lemma(alpha: float, d_max: int = 10, grid_step: float = 1e-3) -> KeyLemmaReport:
    """Check nu_1 <= 0 and |nu_d| < -nu_1 on an interior t-grid for 2 <= d <= d_max."""
    if d_max < 2:
        raise DomainError("d_max must be >= 2")
    n = 2.0 * alpha + 2.0
    if abs(n - round(n)) < 1e-12:
        n = int(round(n))
    count = int(round(2.0 / grid_step))
    t = -1.0 + grid_step * np.arange(1, count)
    nu1 = np.asarray(_nu_any(alpha, 1, t))
    worst = (math.inf, math.inf, (0, 0.0))
    violations = []
    for d in range(2, d_max + 1):
        nd = np.abs(_nu_any(alpha, d, t))
        margin = -nu1 - nd
        rel = margin / -nu1
        bad = np.flatnonzero(margin <= 0)
        violations += [(d, float(t[i])) for i in bad]
        i = int(np.argmin(rel))
        if rel[i] < worst[1]:
            worst = (float(margin.min()), float(rel[i]), (d, float(t[i])))
        else:
            worst = (min(worst[0], float(margin.min())), worst[1], worst[2])
    ok = not violations and bool(np.all(nu1 <= 0))
    return KeyLemmaReport(alpha, d_max, grid_step, ok, worst[0], worst[1], worst[2],
                          float(nu1.max()), violations)


def _nu_any(alpha: float, d: int, t):
    """nu_d for real alpha (not only alpha from an integer dimension)."""
    if alpha == 0.0:
        return -np.sin(d * np.arccos(t)) / d
    w = (1.0 - t * t) ** (alpha + 0.5)
    return -2.0 * alpha / (d * (d + 2.0 * alpha)) * w * gegenbauer_c(alpha + 1.0, d - 1, t) / gegenbauer_at_one(alpha, d)


def uniform_sphere(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((m, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@dataclass
class McCheck:
    name: str
    estimate: float
    stderr: float
    expected: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "estimate": self.estimate, "stderr": self.stderr,
                "expected": self.expected, "passed": self.passed}


def funk_hecke_spot_check(spec: KernelSpec, d: int, mc_samples: int = 200_000, seed: int = 0) -> McCheck:
    """Monte Carlo (U_g h)(e_1) for h(u) = C_d(u_1) against lambda_d h(e_1)."""
    if spec.n not in (3, 4) or not 0 <= d <= 3:
        raise DomainError("spot check supports n in {3, 4} and d <= 3")
    rng = np.random.default_rng(seed)
    v = uniform_sphere(spec.n, mc_samples, rng)
    vals = spec(v[:, 0]) * gegenbauer_c(spec.alpha, d, v[:, 0])
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(mc_samples))
    expected = kernel_eigenvalue(spec, d) * gegenbauer_at_one(spec.alpha, d)
    return McCheck(f"funk_hecke d={d}", est, se, expected, abs(est - expected) <= 4.0 * se + 1e-12)


# ---- vector-valued Gaussian noise stability ---------------------------------

def f_opt(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def candidate_library(n: int, seed: int = 0) -> dict[str, Callable[[np.ndarray], np.ndarray]]:
    """Fixed set of maps R^n -> unit ball that compete with x/|x| for least noise stability."""
    rng = np.random.default_rng(seed)
    M = random_rotation(n, rng)
    c = np.zeros(n)
    c[0] = 1.0
    return {
        "opt": f_opt,
        "rotated_opt": lambda x: f_opt(x) @ M.T,
        "constant": lambda x: np.broadcast_to(c, x.shape),
        "coordinate_sign": lambda x: np.sign(x) / math.sqrt(n),
        "radial_clamped": lambda x: f_opt(x) * np.minimum(np.linalg.norm(x, axis=1, keepdims=True), 1.0),
        "radial_tanh": lambda x: f_opt(x) * np.tanh(np.linalg.norm(x, axis=1, keepdims=True)),
        "first_coordinate_sign": lambda x: np.sign(x[:, :1]) * c,
    }


@dataclass
class BorellReport:
    n: int
    rho: float
    samples: int
    stab_opt: float
    stab_opt_stderr: float
    f_star: float
    opt_matches_f_star: bool
    candidates: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"n": self.n, "rho": self.rho, "samples": self.samples, "stab_opt": self.stab_opt,
                "stab_opt_stderr": self.stab_opt_stderr, "f_star": self.f_star,
                "opt_matches_f_star": self.opt_matches_f_star, "candidates": self.candidates,
                "passed": self.passed}


def correlated_pairs(n: int, rho: float, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    x = rng.standard_normal((m, n))
    y = rho * x + math.sqrt(1.0 - rho * rho) * rng.standard_normal((m, n))
    return x, y


def borell_nk_check(n: int, rho: float, candidates: Sequence[str] | None = None,
                    mc_samples: int = 200_000, seed: int = 0) -> BorellReport:
    """Stab_rho of each candidate must not fall below Stab_rho[f_opt] (up to 4 stderr).

    Stabilities are estimated on one shared sample of correlated pairs; the
    comparison uses the standard error of the per-sample difference.
    """
    if not -1.0 < rho < 0.0:
        raise DomainError("rho must lie in (-1, 0)")
    lib = candidate_library(n, seed)
    names = list(lib) if candidates is None else list(candidates)
    unknown = [c for c in names if c not in lib]
    if unknown:
        raise ValueError(f"unknown candidates {unknown}; choose from {sorted(lib)}")
    rng = np.random.default_rng(seed)
    x, y = correlated_pairs(n, rho, mc_samples, rng)
    opt = np.einsum("ij,ij->i", f_opt(x), f_opt(y))
    stab_opt = float(opt.mean())
    se_opt = float(opt.std(ddof=1) / math.sqrt(mc_samples))
    fs = f_star(n, rho)
    out = {}
    ok = True
    for name in names:
        f = lib[name]
        vals = np.einsum("ij,ij->i", f(x), f(y))
        diff = vals - opt
        se = float(diff.std(ddof=1) / math.sqrt(mc_samples))
        gap = float(diff.mean())
        passed = gap >= -4.0 * se - 1e-12
        ok &= passed
        out[name] = {"stab": float(vals.mean()), "gap": gap, "gap_stderr": se, "passed": passed}
    return BorellReport(n, rho, mc_samples, stab_opt, se_opt, fs,
                        abs(stab_opt - fs) <= 4.0 * se_opt, out, ok)
