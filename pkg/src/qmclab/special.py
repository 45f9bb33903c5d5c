"""Projection-rounding curve F*(k, rho) and worst-case approximation ratios.

F*(k, rho) is the expected inner product of two unit vectors at angle
arccos(rho) after both are pushed through the same random k x n Gaussian
matrix and renormalized.  Ratios compare the rounded value of an edge to its
SDP value; the approximation constants are their minima over rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SlowConvergence

MAX_TERMS = 10**6


def gauss_2f1(a: float, b: float, c: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """Sum the hypergeometric series 2F1(a, b; c; z) for 0 <= z < 1.

    Terms are generated in vectorized chunks from the term ratio
    (a+j)(b+j) z / ((c+j)(j+1)).  Summation stops once the newest term, scaled
    by the geometric tail factor 1/(1-z), drops below 1e-15 of the partial sum.
    """
    if c <= 0:
        raise DomainError("c must be positive")
    if not 0.0 <= z < 1.0:
        raise DomainError(f"z={z} outside [0, 1)")
    if z == 0.0:
        return 1.0
    tail = 1.0 / (1.0 - z)
    total = 1.0
    last = 1.0
    start = 0
    chunk = 64
    while start < max_terms:
        j = np.arange(start, min(start + chunk, max_terms), dtype=float)
        ratios = (a + j) * (b + j) * z / ((c + j) * (j + 1.0))
        terms = last * np.cumprod(ratios)
        total += float(np.sum(terms))
        last = float(terms[-1])
        start += len(j)
        if abs(last) * tail < 1e-15 * abs(total):
            return total
        chunk = min(2 * chunk, 1 << 16)
    raise SlowConvergence(f"2F1({a},{b};{c};{z}) did not converge in {max_terms} terms")


def gamma_ratio_squared(k: int) -> float:
    """(Gamma((k+1)/2) / Gamma(k/2))**2 via the step-2 recursion in k."""
    if k < 1:
        raise DomainError("k must be >= 1")
    # R(1) = 1/sqrt(pi), R(2) = sqrt(pi)/2, R(k+2) = R(k) (k+1)/k
    if k % 2:
        r, j = 1.0 / math.sqrt(math.pi), 1
    else:
        r, j = math.sqrt(math.pi) / 2.0, 2
    while j < k:
        r *= (j + 1) / j
        j += 2
    return r * r


def f_star(k: int, rho: float, endpoint_shortcut: bool = True) -> float:
    """Exact expected inner product after rank-k projection rounding."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho={rho} outside [-1, 1]")
    if abs(rho) == 1.0:
        if endpoint_shortcut:
            return float(rho)
        raise SlowConvergence("the series does not converge at rho = +-1; use the endpoint shortcut")
    if rho == 0.0:
        return 0.0
    coeff = 2.0 / k * gamma_ratio_squared(k)
    return coeff * rho * gauss_2f1(0.5, 0.5, k / 2.0 + 1.0, rho * rho)


def f_star_derivative(k: int, rho: float) -> float:
    """d/drho F*(k, rho), from the term-wise derivative of the series."""
    z = rho * rho
    c = k / 2.0 + 1.0
    inner = rho * rho * gauss_2f1(1.5, 1.5, c + 1.0, z) / (2.0 * c) + gauss_2f1(0.5, 0.5, c, z)
    return 2.0 / k * gamma_ratio_squared(k) * inner


# kind -> (rounding rank or None for per-call k, numerator coeff, denominator a, denominator b)
KINDS = ("1MC", "2MC", "3MC", "BOV", "kMC", "GP")


def _resolve(kind: str, k: int | None) -> tuple[int, float, float, float, float]:
    """Return (rank, num_a, num_b, den_a, den_b) for ratio (num_a - num_b F*)/(den_a - den_b rho)."""
    kind = kind.upper() if kind.lower() != "kmc" else "kMC"
    if kind in ("1MC", "GW"):
        return 1, 0.5, 0.5, 0.5, 0.5
    if kind == "2MC":
        return 2, 0.5, 0.5, 0.5, 0.5
    if kind in ("3MC", "BOV"):
        return 3, 0.5, 0.5, 0.5, 0.5
    if kind.endswith("MC") and kind[:-2].isdigit():
        return int(kind[:-2]), 0.5, 0.5, 0.5, 0.5
    if kind == "kMC":
        if k is None or k < 1:
            raise DomainError("kMC needs k >= 1")
        return k, 0.5, 0.5, 0.5, 0.5
    if kind == "GP":
        return 3, 0.25, 0.25, 0.25, 0.75
    raise DomainError(f"unknown ratio kind {kind!r}")


def ratio(kind: str, k: int | None, rho: float) -> float:
    """Rounded-to-SDP value ratio of a single edge whose SDP vectors have inner product rho."""
    rank, na, nb, da, db = _resolve(kind, k)
    den = da - db * rho
    if den <= 0:
        raise DomainError(f"ratio {kind} undefined at rho={rho} (denominator {den:.3g} <= 0)")
    return (na - nb * f_star(rank, rho)) / den


def rho_upper_bound(kind: str) -> float:
    _, _, _, da, db = _resolve(kind, 1)
    return min(1.0, da / db)


@dataclass
class RatioReport:
    kind: str
    k: int
    grid: list[tuple[float, float]]
    alpha: float
    rho_star: float
    refine_tol: float
    evaluations: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self, include_grid: bool = False) -> dict:
        d = {"kind": self.kind, "k": self.k, "alpha": self.alpha, "rho_star": self.rho_star,
             "refine_tol": self.refine_tol}
        if include_grid:
            d["grid"] = [list(p) for p in self.grid]
        return d


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(fn, lo: float, hi: float, tol: float) -> tuple[float, float, int]:
    """Minimize a unimodal fn on [lo, hi] down to bracket width tol."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    evals = 2
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
        evals += 1
    x = 0.5 * (a + b)
    return x, fn(x), evals + 1


def find_alpha_rho(kind: str, k: int | None = None, grid_step: float = 1e-3,
                   refine_tol: float = 1e-8) -> RatioReport:
    """Worst-case ratio over rho: coarse grid on [-1, bound), then golden section."""
    rank = _resolve(kind, k)[0]
    bound = rho_upper_bound(kind)
    count = int(round((bound + 1.0) / grid_step))
    rhos = -1.0 + grid_step * np.arange(count)
    rhos = rhos[rhos < bound - 1e-12]
    values = np.array([ratio(kind, k, float(r)) for r in rhos])
    i = int(np.argmin(values))
    lo = float(rhos[max(i - 1, 0)])
    hi = float(rhos[min(i + 1, len(rhos) - 1)])
    x, fx, evals = golden_section_min(lambda r: ratio(kind, k, r), lo, hi, refine_tol)
    if values[i] < fx:
        x, fx = float(rhos[i]), float(values[i])
    name = kind if kind.lower() != "kmc" else f"{rank}MC"
    return RatioReport(kind=name, k=rank, grid=list(zip(rhos.tolist(), values.tolist())),
                       alpha=fx, rho_star=x, refine_tol=refine_tol, evaluations=len(rhos) + evals)


def all_constants(grid_step: float = 1e-3, refine_tol: float = 1e-8) -> list[RatioReport]:
    """The five shipped constants: GW (1MC), 2MC, BOV (3MC), GP, plus 5MC."""
    out = [find_alpha_rho("1MC", grid_step=grid_step, refine_tol=refine_tol),
           find_alpha_rho("2MC", grid_step=grid_step, refine_tol=refine_tol),
           find_alpha_rho("BOV", grid_step=grid_step, refine_tol=refine_tol),
           find_alpha_rho("GP", grid_step=grid_step, refine_tol=refine_tol),
           find_alpha_rho("kMC", 5, grid_step=grid_step, refine_tol=refine_tol)]
    out[0].kind = "GW"
    return out
