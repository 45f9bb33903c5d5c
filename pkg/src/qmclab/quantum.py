"""Quantum Max-Cut Hamiltonians, exact maximum energy, and product-state values.

Basis convention: vertex i of the graph is qubit i, stored in bit (n-1-i) of a
computational-basis index, so the first vertex is the most significant bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .errors import NoConvergence, TooManyQubits
from .graph import WeightedGraph
from .sdp import PROD, SdpSolution, UnitVectorAssignment, graph_value, solve_vector_program

MAX_DENSE_QUBITS = 12
MAX_SPARSE_QUBITS = 24

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        if not self.factors:
            raise ValueError("use Hamiltonian.identity for scalar terms")
        for q, p in self.factors:
            if p not in "XYZ" or len(p) != 1:
                raise ValueError(f"unknown Pauli {p!r}")


def pauli_term(coefficient: float, factors: dict[int, str]) -> PauliTerm:
    return PauliTerm(float(coefficient), tuple(sorted(factors.items())))


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    qubit_count: int
    terms: tuple[PauliTerm, ...]
    identity: float = 0.0
    labels: tuple[str, ...] = field(default=())

    def _masks(self, term: PauliTerm):
        n = self.qubit_count
        flip = sign = 0
        ny = 0
        for q, p in term.factors:
            bit = 1 << (n - 1 - q)
            if p in "XY":
                flip |= bit
            if p in "YZ":
                sign |= bit
            ny += p == "Y"
        return flip, sign, ny

    def is_real(self) -> bool:
        return all(self._masks(t)[2] % 2 == 0 for t in self.terms)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """H psi via bit manipulation: X flips, Z signs, Y = i X Z."""
        psi = np.asarray(psi)
        dim = 1 << self.qubit_count
        idx = np.arange(dim, dtype=np.int64)
        real = self.is_real() and not np.iscomplexobj(psi)
        out = self.identity * psi.astype(float if real else complex, copy=True)
        for t in self.terms:
            flip, sign, ny = self._masks(t)
            phase = 1j**ny
            if real:
                phase = phase.real
            par = np.bitwise_count(idx & sign) & 1
            factor = t.coefficient * phase * (1 - 2 * par.astype(float))
            # (P psi)[i ^ flip] = factor[i] psi[i]
            out[idx ^ flip] += factor * psi
        return out

    def dense(self) -> np.ndarray:
        if self.qubit_count > MAX_DENSE_QUBITS:
            raise TooManyQubits(f"dense mode supports at most {MAX_DENSE_QUBITS} qubits")
        dim = 1 << self.qubit_count
        real = self.is_real()
        H = np.zeros((dim, dim), dtype=float if real else complex)
        H[np.diag_indices(dim)] = self.identity
        idx = np.arange(dim, dtype=np.int64)
        for t in self.terms:
            flip, sign, ny = self._masks(t)
            phase = 1j**ny
            if real:
                phase = phase.real
            par = np.bitwise_count(idx & sign) & 1
            H[idx ^ flip, idx] += t.coefficient * phase * (1 - 2 * par.astype(float))
        return H

    def diagonal(self) -> np.ndarray:
        """Computational-basis diagonal (only Z-type terms contribute)."""
        dim = 1 << self.qubit_count
        idx = np.arange(dim, dtype=np.int64)
        d = np.full(dim, self.identity, dtype=float)
        for t in self.terms:
            flip, sign, ny = self._masks(t)
            if flip == 0:
                par = np.bitwise_count(idx & sign) & 1
                d += t.coefficient * (1 - 2 * par.astype(float))
        return d

    def expectation(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi)
        return float(np.real(np.vdot(psi, self.apply(psi))) / np.real(np.vdot(psi, psi)))

    def linear_operator(self) -> spla.LinearOperator:
        dim = 1 << self.qubit_count
        dtype = float if self.is_real() else complex
        return spla.LinearOperator((dim, dim), matvec=self.apply, dtype=dtype)


def build_hamiltonian(g: WeightedGraph) -> Hamiltonian:
    """H_G = sum_e w_e (I - XX - YY - ZZ)/4."""
    if g.has_loops():
        raise ValueError("Quantum Max-Cut needs a loop-free graph")
    if g.n > MAX_SPARSE_QUBITS:
        raise TooManyQubits(f"at most {MAX_SPARSE_QUBITS} qubits supported")
    terms = []
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        for p in "XYZ":
            terms.append(pauli_term(-w / 4.0, {a: p, b: p}))
    return Hamiltonian(g.n, tuple(terms), identity=g.total_weight() / 4.0, labels=g.vertices)


def max_energy(h: Hamiltonian, method: str = "dense", tol: float = 1e-9, seed: int = 0,
               max_restarts: int = 3) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of h and a unit eigenvector."""
    n = h.qubit_count
    if method == "dense":
        if n > MAX_DENSE_QUBITS:
            raise TooManyQubits(f"dense mode supports at most {MAX_DENSE_QUBITS} qubits")
        evals, evecs = np.linalg.eigh(h.dense())
        return float(evals[-1]), evecs[:, -1]
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if n > MAX_SPARSE_QUBITS:
        raise TooManyQubits(f"iterative mode supports at most {MAX_SPARSE_QUBITS} qubits")
    dim = 1 << n
    if dim <= 16:
        return max_energy(h, "dense")
    op = h.linear_operator()
    rng = np.random.default_rng(seed)
    total_iter = 0
    residual = np.inf
    for _ in range(max_restarts):
        v0 = rng.standard_normal(dim)
        maxiter = 20 * dim if dim < 4096 else 5000
        try:
            evals, evecs = spla.eigsh(op, k=1, which="LA", v0=v0, tol=tol * 1e-2, maxiter=maxiter)
        except spla.ArpackNoConvergence:
            total_iter += maxiter
            continue
        lam, psi = float(evals[0]), evecs[:, 0]
        psi = psi / np.linalg.norm(psi)
        residual = float(np.linalg.norm(h.apply(psi) - lam * psi))
        if residual < tol:
            return lam, psi
    raise NoConvergence(f"Lanczos did not reach residual {tol} (last {residual:.3g})", total_iter)


def energy_of_bloch(g: WeightedGraph, f: UnitVectorAssignment) -> float:
    """Product-state energy sum_e w_e (1/4 - 1/4 <f(u), f(v)>)."""
    if f.r != 3:
        raise ValueError("Bloch assignments live in R^3")
    return graph_value(g, f.for_graph(g), PROD)


def bloch_to_qubit(c: np.ndarray) -> np.ndarray:
    """Pure qubit state whose Bloch vector is c (unit, in X, Y, Z order)."""
    x, y, z = c
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def product_state_vector(rows: np.ndarray) -> np.ndarray:
    """Tensor product of single-qubit states, first row most significant."""
    psi = np.array([1.0 + 0j])
    for c in rows:
        psi = np.kron(psi, bloch_to_qubit(c))
    return psi


def product_state_value(g: WeightedGraph, restarts: int = 5, tol: float = 1e-12, seed: int = 0,
                        max_iter: int | None = None) -> tuple[float, UnitVectorAssignment]:
    """Best product state found by rank-3 sphere coordinate ascent."""
    sol: SdpSolution = solve_vector_program(g, PROD, r=3, tol=tol, restarts=restarts, seed=seed,
                                            max_iter=max_iter)
    return energy_of_bloch(g, sol.assignment), sol.assignment


def kron_hamiltonian(g: WeightedGraph) -> np.ndarray:
    """Reference dense H_G from explicit Kronecker products; independent of the bit-trick path."""
    n = g.n
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=complex)
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        for p in "XYZ":
            ops = [PAULI["I"]] * n
            ops[a] = PAULI[p]
            ops[b] = PAULI[p]
            m = ops[0]
            for o in ops[1:]:
                m = np.kron(m, o)
            H -= w / 4.0 * m
        H += w / 4.0 * np.eye(dim)
    return H
