import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bleaq.qp import INFEASIBLE, NONCONVEX, solve_qp


def test_unconstrained_minimum():
    H = np.array([[3.0, 1.0], [1.0, 2.0]])
    g = np.array([-1.0, 4.0])
    res = solve_qp(H, g)
    assert res.ok
    assert np.allclose(res.x, np.linalg.solve(H, -g))


def test_box_only_clamps_separable():
    res = solve_qp(np.eye(2), np.array([-5.0, 5.0]), lo=np.array([-1.0, -1.0]), hi=np.array([1.0, 1.0]))
    assert np.allclose(res.x, [1.0, -1.0])


def test_single_active_constraint():
    # x2 = 3 x1 on the active constraint x1 + x2 <= 0.5 with multiplier 0.5625
    res = solve_qp(np.array([[2.0, 0.5], [0.5, 1.0]]), np.array([-1.0, -1.0]),
                   np.array([[1.0, 1.0]]), np.array([0.5]), np.zeros(2), np.ones(2))
    assert res.ok
    assert np.allclose(res.x, [0.125, 0.375], atol=1e-10)


def test_mixed_constraints_three_dims():
    # frozen from an SLSQP solve of the same program
    H = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 2.0]])
    g = np.array([-8.0, 3.0, -3.0])
    A = np.array([[1.0, 1.0, 1.0], [-1.0, 2.0, 0.0]])
    b = np.array([1.0, 0.5])
    res = solve_qp(H, g, A, b, -2 * np.ones(3), 2 * np.ones(3))
    assert res.ok
    assert np.allclose(res.x, [2.0, -2.0, 1.0], atol=1e-9)


def test_infeasible_start_recovers():
    res = solve_qp(np.eye(2), np.zeros(2), np.array([[-1.0, 0.0]]), np.array([-3.0]),
                   x0=np.array([0.0, 0.0]))
    assert res.ok
    assert np.allclose(res.x, [3.0, 0.0])


def test_empty_region():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b = np.array([-1.0, -1.0])  # x1 <= -1 and x1 >= 1
    res = solve_qp(np.eye(2), np.zeros(2), A, b)
    assert res.status == INFEASIBLE and not res.ok


def test_indefinite_is_rejected():
    res = solve_qp(np.array([[1.0, 0.0], [0.0, -1.0]]), np.zeros(2))
    assert res.status == NONCONVEX and res.x is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 3))
def test_kkt_conditions(seed, n, J):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    H = M @ M.T + 0.1 * np.eye(n)
    g = rng.normal(size=n) * 3
    A = rng.normal(size=(J, n))
    b = np.abs(rng.normal(size=J)) + 0.1  # x = 0 is strictly feasible
    lo, hi = -2 * np.ones(n), 2 * np.ones(n)
    res = solve_qp(H, g, A, b, lo, hi, max_iter=200)
    assert res.ok
    x = res.x
    assert np.all(A @ x <= b + 1e-8) and np.all(x >= lo - 1e-12) and np.all(x <= hi + 1e-12)
    # no feasible descent: the objective cannot drop along small moves toward random feasible points
    f = lambda z: 0.5 * z @ H @ z + g @ z
    for _ in range(50):
        y = lo + rng.random(n) * (hi - lo)
        if np.all(A @ y <= b):
            for t in (1e-3, 1e-1, 1.0):
                assert f(x + t * (y - x)) >= f(x) - 1e-9
