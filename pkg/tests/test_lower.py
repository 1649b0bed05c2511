import math

import numpy as np
import pytest

from bleaq.lower import LowerParams, alpha_variance, ea_path, qp_path, solve_lower, variance_ratio
from bleaq.problem import EvalCounters, evaluate_lower
from bleaq.testbed import get_problem, make_ex1, make_tp


def test_alpha_identical_population():
    pop = np.random.default_rng(0).random((10, 3))
    assert alpha_variance(pop, pop) == pytest.approx(3.0)


def test_alpha_collapsed_population():
    init = np.random.default_rng(0).random((10, 2))
    assert alpha_variance(np.tile(init[0], (10, 1)), init) == pytest.approx(0.0, abs=1e-20)


def test_alpha_arithmetic():
    assert variance_ratio(np.array([0.5, 1.0]), np.array([1.0, 4.0])) == pytest.approx(0.75)


def test_alpha_frozen_initial_coordinate():
    assert variance_ratio(np.array([0.0, 2.0]), np.array([0.0, 4.0])) == pytest.approx(0.5)
    assert variance_ratio(np.array([0.1, 2.0]), np.array([0.0, 4.0])) == pytest.approx(1.5)


def test_alpha_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        alpha_variance(np.zeros((3, 2)), np.zeros((3, 3)))


def test_ex1_lower_solve(rng):
    problem, _ = make_ex1()
    c = EvalCounters()
    res = solve_lower(problem, np.array([0.5]), None, LowerParams(), c, rng)
    assert res.x_l[0] == pytest.approx(math.exp(0.5), abs=1e-3)
    assert res.method == "ea"
    assert c.ll_calls == 1 and c.ll_fe > 50


def test_smd2_lower_at_optimum():
    problem, oracle = get_problem("SMD2")
    x_u = np.zeros(problem.n_upper)
    res = solve_lower(problem, x_u, None, LowerParams(), EvalCounters(), np.random.default_rng(1))
    assert np.allclose(res.x_l, oracle.psi_exact(x_u), atol=2e-2)


def _median_mapping_error(k):
    problem, oracle = get_problem(f"SMD{k}")
    x_u = np.zeros(problem.n_upper)
    target = oracle.psi_exact(x_u)
    q = problem.dims["q"]
    errors = []
    for seed in range(11):
        res = solve_lower(problem, x_u, None, LowerParams(), EvalCounters(), np.random.default_rng(seed))
        if k == 6:
            # optimal along equal pairs: compare the determined parts and the pair differences
            tail = res.x_l[q:q + problem.dims["s"]]
            err = max(np.max(np.abs(res.x_l[:q])), np.max(np.abs(tail[1::2] - tail[0::2])),
                      np.max(np.abs(res.x_l[-problem.dims["r"]:] - target[-problem.dims["r"]:])))
        else:
            err = np.max(np.abs(res.x_l - target))
        errors.append(err)
    return sorted(errors)[5]


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_cold_solve_matches_mapping_at_optimum(k):
    assert _median_mapping_error(k) <= 1e-2


@pytest.mark.xfail(strict=True, reason="the banana valley is not resolved to 1e-2 within the generation cap")
def test_cold_solve_matches_mapping_at_optimum_smd5():
    assert _median_mapping_error(5) <= 1e-2


def test_qp_accepts_at_optimum_of_quadratic_lower_level(rng):
    problem = make_tp(1)
    x_u = np.array([20.0, 5.0])
    c = EvalCounters()
    res = solve_lower(problem, x_u, np.array([10.0, 5.0]), LowerParams(), c, rng)
    assert res.method == "qp"
    assert np.allclose(res.x_l, [10.0, 5.0], atol=1e-6)
    assert c.ll_calls == 1
    assert c.ll_fe == 2 + 6 + 1  # basis points plus m, then the candidate


@pytest.mark.parametrize("k", [1, 2, 8])
def test_qp_path_convex_lower_levels(k):
    # lower levels of these problems are convex quadratics with linear constraints
    problem = make_tp(k)
    rng = np.random.default_rng(k)
    lo, hi = problem.lower_lo, problem.lower_hi
    accepted = 0
    for _ in range(10):
        x_u = problem.known_optimum.x_u
        warm = lo + rng.random(problem.n_lower) * (hi - lo)
        out = qp_path(problem, x_u, warm, LowerParams(), EvalCounters(), rng)
        if out is not None and out.accepted:
            accepted += 1
            assert np.allclose(out.x_l, problem.known_optimum.x_l, atol=1e-3)
    assert accepted == 10


def test_qp_path_rejects_rastrigin_far_start(rng):
    problem, _ = get_problem("SMD3")
    x_u = np.zeros(problem.n_upper)
    c = EvalCounters()
    out = qp_path(problem, x_u, np.full(problem.n_lower, 0.4), LowerParams(), c, rng)
    if out is not None:
        f_true, _ = evaluate_lower(problem, x_u, out.x_l, EvalCounters())
        assert abs(out.model_value - f_true) >= 1e-4
        assert not out.accepted


def test_qp_delta_boundary_is_strict():
    # a mismatch equal to delta_min must be rejected; use delta_min = 0 with an exact model
    problem = make_tp(1)
    out = qp_path(problem, np.array([20.0, 5.0]), np.array([10.0, 5.0]), LowerParams(delta_min=0.0),
                  EvalCounters(), np.random.default_rng(0))
    assert out is not None and not out.accepted


def test_ea_zero_variance_population_stops_immediately(rng):
    problem, _ = make_ex1()
    params = LowerParams(pop_size=6)
    seed = np.array([1.0])
    # a population made only of seeds has zero initial variance in every coordinate
    res = ea_path(problem, np.array([0.0]), [seed] * 6, params, EvalCounters(), rng)
    assert res.converged and res.generations == 0


def test_ea_seed_at_optimum_is_kept(rng):
    problem, _ = make_ex1()
    res = ea_path(problem, np.array([0.0]), [np.array([1.0])], LowerParams(max_generations=50),
                  EvalCounters(), rng)
    assert res.f == 0.0


def test_solve_lower_counts_one_call_per_invocation(rng):
    problem, _ = get_problem("SMD1", None)
    c = EvalCounters()
    params = LowerParams(max_generations=20)
    for i in range(3):
        solve_lower(problem, np.zeros(problem.n_upper), None if i == 0 else np.zeros(problem.n_lower),
                    params, c, rng)
        assert c.ll_calls == i + 1


def test_smd4_lower_escapes_rastrigin_in_median():
    problem, oracle = get_problem("SMD4")
    x_u = np.zeros(problem.n_upper)
    fs = []
    for seed in range(11):
        res = solve_lower(problem, x_u, None, LowerParams(), EvalCounters(), np.random.default_rng(seed))
        fs.append(res.f)
    assert sorted(fs)[5] <= 1e-2


def test_qp_rejects_candidate_worse_than_a_sample():
    # EX1's lower objective is V-shaped around e^{x_u}; a quadratic fit can match a wrong point
    problem, _ = make_ex1()
    x_u = np.array([-0.02962593])
    x_star = math.exp(x_u[0])
    # these sample draws give a fit that matches f0 at a wrong point
    out = qp_path(problem, x_u, np.array([0.97080862]), LowerParams(), EvalCounters(), np.random.default_rng(645))
    assert out is not None and abs(out.x_l[0] - x_star) > 1e-2
    assert abs(out.model_value - out.f) < 1e-4
    assert not out.accepted
