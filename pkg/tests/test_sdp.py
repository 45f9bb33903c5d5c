import math

import numpy as np
import pytest

from qmclab.errors import MissingVertex
from qmclab.graph import WeightedGraph
from qmclab.instances import random_graph, standard_graph
from qmclab.quantum import build_hamiltonian, max_energy
from qmclab.sdp import (MC, PROD, QMC, Objective, UnitVectorAssignment, evaluate_assignment, fast_rank, objective,
                        sdp_identities, solve_vector_program)

PLANAR = np.array([[1.0, 0.0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]])


def test_objective_table():
    assert (MC.a, MC.b, PROD.a, PROD.b, QMC.a, QMC.b) == (0.5, 0.5, 0.25, 0.25, 0.25, 0.75)
    assert objective("qmc") is QMC
    with pytest.raises(ValueError):
        Objective(0.5, 0.0)
    with pytest.raises(ValueError):
        objective("nope")


def test_evaluate_examples():
    g = standard_graph("single_edge")
    f = UnitVectorAssignment(("a", "b"), np.array([[1.0, 0], [-1.0, 0]]))
    assert evaluate_assignment(g, f, QMC) == 1.0
    k3 = standard_graph("complete", 3)
    const = UnitVectorAssignment(k3.vertices, np.tile([0.0, 1.0], (3, 1)))
    assert evaluate_assignment(k3, const, MC) == 0.0
    planar = UnitVectorAssignment(k3.vertices, PLANAR)
    assert evaluate_assignment(k3, planar, MC) == pytest.approx(0.75, abs=1e-15)


def test_assignment_validation_and_json():
    with pytest.raises(ValueError):
        UnitVectorAssignment(("a",), np.array([[1.0, 1.0]]))
    f = UnitVectorAssignment(("b", "a"), np.array([[0.0, 1.0], [1.0, 0.0]]))
    g = standard_graph("single_edge")
    assert np.array_equal(f.for_graph(g), [[1.0, 0.0], [0.0, 1.0]])
    back = UnitVectorAssignment.from_json(f.to_json())
    assert back.labels == f.labels and np.array_equal(back.vectors, f.vectors)
    assert set(f.to_dict()) == {"labels", "r", "rows"}
    with pytest.raises(MissingVertex):
        UnitVectorAssignment(("a",), np.array([[1.0]])).for_graph(g)


def test_solver_small_optima():
    assert solve_vector_program(standard_graph("single_edge"), MC, r=1).value == pytest.approx(1.0)
    k3 = standard_graph("complete", 3)
    assert solve_vector_program(k3, MC, r=3, restarts=5).value == pytest.approx(0.75, abs=1e-6)
    assert solve_vector_program(k3, QMC, restarts=5).value == pytest.approx(0.625, abs=1e-6)


def test_sdp_identities():
    assert sdp_identities(1.0) == (0.5, 1.0)
    assert sdp_identities(0.75) == (0.375, 0.625)
    assert sdp_identities(0.5) == (0.25, 0.25)
    with pytest.raises(ValueError):
        sdp_identities(1.5)


def test_ascent_is_monotone(rng):
    g = random_graph(9, 0.5, rng)
    sol = solve_vector_program(g, QMC, restarts=1, track=True, seed=3)
    h = np.array(sol.history)
    assert np.all(np.diff(h) >= -1e-12)
    assert sol.value == pytest.approx(h[-1], abs=1e-10)


def test_solution_value_matches_evaluation(rng):
    g = random_graph(7, 0.6, rng)
    sol = solve_vector_program(g, MC)
    assert sol.value == pytest.approx(evaluate_assignment(g, sol.assignment, MC), abs=1e-10)
    assert sol.residual < 1e-3


def test_rank_monotone(rng):
    g = random_graph(8, 0.5, rng)
    vals = [solve_vector_program(g, MC, r=r, restarts=5, seed=1).value for r in (1, 2, 3, 8)]
    assert all(b >= a - 1e-8 for a, b in zip(vals, vals[1:]))


def test_sdp_dominates_max_energy(rng):
    for _ in range(6):
        g = random_graph(int(rng.integers(3, 9)), 0.5, rng)
        lam, _ = max_energy(build_hamiltonian(g))
        assert solve_vector_program(g, QMC).value >= lam - 5e-4


def test_zero_neighbour_sum_keeps_vector():
    # an isolated vertex has no neighbours and must keep its starting row
    g = WeightedGraph.from_edges([("a", "b", 1.0)], vertices=["a", "b", "c"])
    init = np.eye(3)
    sol = solve_vector_program(g, MC, r=3, restarts=1, init=init)
    assert np.allclose(sol.assignment.vectors[2], init[2])
    assert fast_rank(50) == 10
