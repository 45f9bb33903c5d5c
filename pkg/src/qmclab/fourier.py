"""Walsh-Fourier analysis of functions {-1,1}^n -> R^k.

Points of the cube are table rows indexed by a bitmask: bit i set means
x_{i+1} = -1.  Subsets S are bitmasks too, so chi_S(x) = (-1)^popcount(S & x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooLarge, DomainError
from .instances import hypercube_points

MAX_BITS = 20


def wht(table: np.ndarray) -> np.ndarray:
    """Coefficients f^(S) = E_x f(x) chi_S(x) by the fast butterfly (rows are points)."""
    a = np.array(table, dtype=float, copy=True)
    if a.ndim == 1:
        a = a[:, None]
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError("table length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(size // (2 * h), 2, h, -1)
        x, y = a[:, 0].copy(), a[:, 1].copy()
        a[:, 0], a[:, 1] = x + y, x - y
        a = a.reshape(size, -1)
        h *= 2
    return a / size


def inverse_wht(coeffs: np.ndarray) -> np.ndarray:
    """f(x) = sum_S f^(S) chi_S(x)."""
    c = np.asarray(coeffs, dtype=float)
    return wht(c) * c.shape[0]


def popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)


@dataclass(eq=False)
class BooleanVectorFunction:
    """Table of values on {-1,1}^n with cached Walsh coefficients."""
    n: int
    table: np.ndarray
    range_constrained: bool = True
    name: str = "f"
    _coeffs: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n > MAX_BITS:
            raise DimensionTooLarge(f"n={self.n} exceeds {MAX_BITS}")
        t = np.asarray(self.table, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        if t.shape[0] != 1 << self.n:
            raise ValueError(f"table needs 2^{self.n} rows")
        if self.range_constrained:
            norms = np.linalg.norm(t, axis=1)
            if np.any(norms > 1 + 1e-12):
                raise ValueError(f"values leave the unit ball (max norm {norms.max():.6g})")
        self.table = t

    @classmethod
    def from_coeffs(cls, n: int, coeffs: np.ndarray, range_constrained: bool = True, name: str = "f"):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        f = cls(n, inverse_wht(c), range_constrained, name)
        f._coeffs = c.copy()
        return f

    @property
    def k(self) -> int:
        return self.table.shape[1]

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            self._coeffs = wht(self.table)
        return self._coeffs

    def coefficient(self, subset) -> np.ndarray:
        """f^(S) for S given as 1-based coordinates."""
        return self.coeffs[subset_mask(subset)]

    def weights(self) -> np.ndarray:
        """|f^(S)|^2 for every mask S."""
        return np.sum(self.coeffs ** 2, axis=1)


def subset_mask(subset) -> int:
    mask = 0
    for i in subset:
        mask |= 1 << (int(i) - 1)
    return mask


def mean_square(f: BooleanVectorFunction) -> float:
    return float(np.mean(np.sum(f.table ** 2, axis=1)))


def variance(f: BooleanVectorFunction) -> float:
    w = f.weights()
    return float(w[1:].sum())


def influence(f: BooleanVectorFunction, i: int, m: int | None = None) -> float:
    """Inf_i^{<=m}: coefficient mass on sets of size <= m containing i (1-based)."""
    if not 1 <= i <= f.n:
        raise DomainError(f"coordinate {i} outside 1..{f.n}")
    masks = np.arange(1 << f.n)
    sel = (masks >> (i - 1)) & 1 == 1
    if m is not None:
        sel &= popcounts(f.n) <= m
    return float(f.weights()[sel].sum())


def influences(f: BooleanVectorFunction, m: int | None = None) -> np.ndarray:
    w = f.weights()
    if m is not None:
        w = np.where(popcounts(f.n) <= m, w, 0.0)
    masks = np.arange(1 << f.n)
    return np.array([w[(masks >> i) & 1 == 1].sum() for i in range(f.n)])


def high_degree_variance(f: BooleanVectorFunction, m: int) -> float:
    """Coefficient mass on sets of size > m."""
    return float(f.weights()[popcounts(f.n) > m].sum())


def noise_operator(f: BooleanVectorFunction, rho: float) -> BooleanVectorFunction:
    """T_rho: scale f^(S) by rho^|S|."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError("rho must lie in [-1, 1]")
    scale = rho ** popcounts(f.n).astype(float)
    return BooleanVectorFunction.from_coeffs(f.n, f.coeffs * scale[:, None], f.range_constrained,
                                             f"T{rho}({f.name})")


def stab(f: BooleanVectorFunction, rho: float) -> float:
    """Stab_rho[f] = sum_S rho^|S| |f^(S)|^2."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError("rho must lie in [-1, 1]")
    return float(np.dot(rho ** popcounts(f.n).astype(float), f.weights()))


def stab_by_enumeration(f: BooleanVectorFunction, rho: float) -> float:
    """E<f(x), f(y)> summed over all 2^{2n} rho-correlated pairs."""
    if f.n > 10:
        raise DimensionTooLarge("enumeration is limited to n <= 10")
    n = f.n
    idx = np.arange(1 << n)
    dist = np.bitwise_count((idx[:, None] ^ idx[None, :]).astype(np.uint32)).astype(float)
    prob = ((1 + rho) / 2) ** (n - dist) * ((1 - rho) / 2) ** dist / (1 << n)
    gram = f.table @ f.table.T
    return float(np.sum(prob * gram))


def stab_by_sampling(f: BooleanVectorFunction, rho: float, samples: int = 100_000,
                     seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate and standard error from rho-correlated pairs."""
    rng = np.random.default_rng(seed)
    n = f.n
    x = rng.integers(0, 1 << n, size=samples)
    # each bit of y disagrees with x with probability (1 - rho)/2
    flips = rng.random((samples, n)) < (1 - rho) / 2
    y = x ^ (flips.astype(np.int64) << np.arange(n)).sum(axis=1)
    vals = np.einsum("ij,ij->i", f.table[x], f.table[y])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def odd_part(f: BooleanVectorFunction) -> BooleanVectorFunction:
    """(f(x) - f(-x))/2, which keeps only odd-size coefficients."""
    full = (1 << f.n) - 1
    idx = np.arange(1 << f.n)
    return BooleanVectorFunction(f.n, 0.5 * (f.table - f.table[full ^ idx]), f.range_constrained,
                                 f"odd({f.name})")


def notable_coordinates(f: BooleanVectorFunction, m: int, delta: float) -> set[int]:
    """Coordinates with Inf^{<=m} >= delta; there are at most m/delta of them."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    infl = influences(f, m)
    out = {int(i) + 1 for i in np.flatnonzero(infl >= delta)}
    if f.range_constrained and mean_square(f) <= 1 + 1e-9:
        assert len(out) <= m / delta + 1e-9, "notable coordinates exceed m/delta"
    return out


# ---- explicit functions -----------------------------------------------------

def dictator(n: int, i: int) -> BooleanVectorFunction:
    return embedded_dictator(n, 1, i)


def embedded_dictator(n: int, k: int, i: int) -> BooleanVectorFunction:
    """x -> x_i e_1 in R^k."""
    if not 1 <= i <= n:
        raise DomainError(f"coordinate {i} outside 1..{n}")
    t = np.zeros((1 << n, k))
    t[:, 0] = hypercube_points(n)[:, i - 1]
    return BooleanVectorFunction(n, t, True, f"dict{i}")


def majority(n: int, k: int = 1) -> BooleanVectorFunction:
    if n % 2 == 0:
        raise DomainError("majority needs an odd number of bits")
    t = np.zeros((1 << n, k))
    t[:, 0] = np.sign(hypercube_points(n).sum(axis=1))
    return BooleanVectorFunction(n, t, True, f"maj{n}")


def constant(n: int, c) -> BooleanVectorFunction:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    return BooleanVectorFunction(n, np.tile(c, (1 << n, 1)), True, "const")


def random_function(n: int, k: int, rng: np.random.Generator) -> BooleanVectorFunction:
    """Independent values uniform in the unit ball B^k."""
    g = rng.standard_normal((1 << n, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= rng.random((1 << n, 1)) ** (1.0 / k)
    return BooleanVectorFunction(n, g, True, "random")


def hypercube_value(f: BooleanVectorFunction, rho: float) -> float:
    """Product-state value 1/4 - Stab_rho[f]/4 on the noisy hypercube with loops kept."""
    return 0.25 - 0.25 * stab(f, rho)


@dataclass(frozen=True)
class DictatorTestParameters:
    gamma: float
    delta: float
    m: float
    log2_inv_delta: float

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "delta": self.delta, "m": self.m,
                "log2_inv_delta": self.log2_inv_delta}


def dictator_test_parameters(eps: float, rho: float, k: int = 3, c_k: float = 1.0) -> DictatorTestParameters:
    """Noise, influence threshold and degree cap used in the soundness argument.

    gamma = (1 + rho) eps / 6, delta = (eps / (12 k C_k))^(18 ln 2 / gamma),
    m = log2(1/delta) / 18.  delta underflows for small eps, so its base-2
    logarithm is reported too.
    """
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if not -1 < rho < 1:
        raise DomainError("rho must lie in (-1, 1)")
    gamma = (1 + rho) * eps / 6.0
    log2_inv_delta = (18.0 * math.log(2.0) / gamma) * math.log2(12.0 * k * c_k / eps)
    delta = 2.0 ** (-log2_inv_delta)
    return DictatorTestParameters(gamma, delta, log2_inv_delta / 18.0, log2_inv_delta)
