import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmclab.errors import TooManyQubits
from qmclab.graph import WeightedGraph
from qmclab.instances import random_graph, standard_graph
from qmclab.quantum import (Hamiltonian, build_hamiltonian, energy_of_bloch, kron_hamiltonian, max_energy,
                            pauli_term, product_state_value, product_state_vector)
from qmclab.sdp import QMC, UnitVectorAssignment, solve_vector_program

SINGLET = np.array([0, 1, -1, 0]) / math.sqrt(2)


def test_single_edge_is_singlet_projector():
    H = build_hamiltonian(standard_graph("single_edge")).dense()
    assert np.abs(H - np.outer(SINGLET, SINGLET)).max() < 1e-14
    value, psi = max_energy(build_hamiltonian(standard_graph("single_edge")))
    assert value == pytest.approx(1.0, abs=1e-12)
    assert min(np.abs(psi - SINGLET).max(), np.abs(psi + SINGLET).max()) < 1e-10


def test_dense_matches_kronecker_reference(rng):
    for _ in range(4):
        g = random_graph(int(rng.integers(2, 6)), 0.6, rng)
        h = build_hamiltonian(g)
        D = h.dense()
        assert np.isrealobj(D)
        assert np.abs(D - kron_hamiltonian(g)).max() < 1e-14
        assert np.abs(np.imag(kron_hamiltonian(g))).max() < 1e-14
        assert np.trace(D) == pytest.approx(2**g.n / 4, abs=1e-12)


def test_complex_terms_apply_correctly(rng):
    h = Hamiltonian(2, (pauli_term(0.7, {0: "Y"}), pauli_term(-0.2, {1: "X", 0: "Z"})), identity=0.1)
    Y = np.array([[0, -1j], [1j, 0]])
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    ref = 0.7 * np.kron(Y, np.eye(2)) - 0.2 * np.kron(Z, X) + 0.1 * np.eye(4)
    assert np.abs(h.dense() - ref).max() < 1e-15
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert np.allclose(h.apply(psi), ref @ psi)
    with pytest.raises(ValueError):
        pauli_term(1.0, {0: "W"})


@pytest.mark.parametrize("graph,expected", [("single_edge", 1.0), ("k3", 0.5), ("two_edges", 1.0)])
def test_max_energy_examples(graph, expected):
    g = {"single_edge": standard_graph("single_edge"), "k3": standard_graph("complete", 3),
         "two_edges": WeightedGraph.from_edges([("a", "b", 0.5), ("c", "d", 0.5)])}[graph]
    assert max_energy(build_hamiltonian(g))[0] == pytest.approx(expected, abs=1e-12)


def test_k3_diagonal_part():
    h = build_hamiltonian(standard_graph("complete", 3))
    assert h.diagonal().max() == pytest.approx(1 / 3, abs=1e-14)
    assert np.allclose(h.diagonal(), np.diag(h.dense()))


def test_dense_and_iterative_agree(rng):
    for n in (5, 8, 10):
        g = random_graph(n, 0.5, rng)
        h = build_hamiltonian(g)
        lam_d, _ = max_energy(h, "dense")
        lam_i, psi = max_energy(h, "iterative", seed=1)
        assert abs(lam_d - lam_i) <= 1e-8
        assert np.linalg.norm(h.apply(psi) - lam_i * psi) < 1e-9


def test_qubit_limits():
    g = random_graph(13, 0.3, np.random.default_rng(0))
    with pytest.raises(TooManyQubits):
        max_energy(build_hamiltonian(g), "dense")
    with pytest.raises(TooManyQubits):
        build_hamiltonian(random_graph(25, 0.1, np.random.default_rng(0)))


def test_energy_of_bloch_examples():
    g = standard_graph("single_edge")
    anti = UnitVectorAssignment(("a", "b"), np.array([[0, 0, 1.0], [0, 0, -1.0]]))
    assert energy_of_bloch(g, anti) == pytest.approx(0.5)
    k3 = standard_graph("complete", 3)
    same = UnitVectorAssignment(k3.vertices, np.tile([1.0, 0, 0], (3, 1)))
    assert energy_of_bloch(k3, same) == 0.0
    ang = 2 * np.pi * np.arange(3) / 3
    planar = UnitVectorAssignment(k3.vertices, np.c_[np.cos(ang), np.sin(ang), np.zeros(3)])
    assert energy_of_bloch(k3, planar) == pytest.approx(0.375, abs=1e-15)


@given(st.integers(0, 2**32 - 1))
def test_bloch_energy_equals_state_expectation(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(4, 0.6, rng)
    rows = rng.standard_normal((4, 3))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    f = UnitVectorAssignment(g.vertices, rows)
    psi = product_state_vector(rows)
    assert build_hamiltonian(g).expectation(psi) == pytest.approx(energy_of_bloch(g, f), abs=1e-12)


def test_product_state_values():
    v, f = product_state_value(standard_graph("single_edge"))
    assert v == pytest.approx(0.5, abs=1e-12)
    k3 = standard_graph("complete", 3)
    v, f = product_state_value(k3, restarts=5)
    assert v == pytest.approx(0.375, abs=1e-6)
    assert v == pytest.approx(energy_of_bloch(k3, f), abs=1e-12)


def test_k3_symmetric_ansatz_scan():
    # Bloch vectors at equal pairwise angle: inner product c in [-1/2, 1]
    k3 = standard_graph("complete", 3)
    best = max(0.25 - 0.25 * c for c in np.linspace(-0.5, 1.0, 3001))
    assert best == pytest.approx(product_state_value(k3)[0], abs=1e-6)


def test_relaxation_chain(rng):
    for _ in range(10):
        g = random_graph(int(rng.integers(3, 9)), 0.5, rng)
        prod, _ = product_state_value(g, restarts=3)
        lam, _ = max_energy(build_hamiltonian(g))
        sdp = solve_vector_program(g, QMC).value
        assert prod <= lam + 1e-8 <= sdp + 2e-8
        assert prod <= 0.5 + 1e-12


def test_energy_is_linear_in_graph(rng):
    g1 = random_graph(4, 0.7, rng)
    g2 = random_graph(4, 0.7, rng)
    t = 0.3
    mix = WeightedGraph.from_edges([(a, b, t * w) for a, b, w in g1.edges] +
                                   [(a, b, (1 - t) * w) for a, b, w in g2.edges], vertices=g1.vertices)
    psi = rng.standard_normal(16)
    e = lambda g: build_hamiltonian(g).expectation(psi)
    assert e(mix) == pytest.approx(t * e(g1) + (1 - t) * e(g2), abs=1e-12)


def test_bh_bound_holds_on_split_graph():
    from qmclab.graph import bh_error_bound, bh_stats, remove_self_loops, split_vertices
    g, _ = remove_self_loops(split_vertices(standard_graph("complete", 3), 3))
    lam, _ = max_energy(build_hamiltonian(g), "iterative")
    prod, _ = product_state_value(g)
    assert lam - prod <= bh_error_bound(bh_stats(g))
