"""Lower-level solver: a local quadratic-programming attempt around a warm start,
falling back to a steady-state evolutionary algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import psi
from .operators import EvoParams, make_offspring, polynomial_mutation, replacement_plan, tournament_select
from .problem import BilevelProblem, EvalCounters, domination_key, evaluate_lower, evaluate_lower_full, violation
from .qp import solve_qp


@dataclass(frozen=True)
class LowerParams:
    pop_size: int = 50
    alpha_stop: float = 1e-5
    max_generations: int = 1000
    delta_min: float = 1e-4
    qp_max_iter: int = 50
    qp_eta_m: float = 20.0
    evo: EvoParams = field(default_factory=EvoParams)


@dataclass
class LowerSolveResult:
    x_l: np.ndarray
    f: float
    cv: float
    method: str  # "qp", "ea" or "qp_then_ea"
    converged: bool
    generations: int = 0

    @property
    def feasible(self) -> bool:
        return self.cv == 0.0


@dataclass
class QPOutcome:
    x_l: np.ndarray
    f: float
    cv: float
    model_value: float
    accepted: bool


def variance_ratio(var_now: np.ndarray, var_init: np.ndarray) -> float:
    """Sum over coordinates of ``var_now / var_init``; a frozen initial coordinate adds 0 or 1."""
    live = var_init > 0.0
    total = float(np.sum(var_now[live] / var_init[live]))
    total += float(np.count_nonzero(var_now[~live] > 0.0))
    return total


def alpha_variance(current, initial) -> float:
    """Variance-based termination statistic between two populations (rows are members)."""
    current = np.atleast_2d(np.asarray(current, dtype=float))
    initial = np.atleast_2d(np.asarray(initial, dtype=float))
    if current.size == 0 or initial.size == 0 or current.shape[1] != initial.shape[1]:
        raise ValueError("populations must be non-empty with equal dimension")
    return variance_ratio(current.var(axis=0), initial.var(axis=0))


def qp_path(
    problem: BilevelProblem,
    x_u: np.ndarray,
    x_center: np.ndarray,
    params: LowerParams,
    counters: EvalCounters,
    rng: np.random.Generator,
) -> Optional[QPOutcome]:
    """Fit a quadratic model of f0 and linear models of the constraints around
    ``x_center``, minimise it, and check the model against the true objective.

    Returns None when no candidate could be produced (non-convex model, empty
    linearised region, solver failure); otherwise the candidate with ``accepted``
    set iff the model/true mismatch is below ``delta_min``, the point is feasible and
    it is no worse (within ``delta_min``) than the best feasible model sample.
    """
    m = problem.n_lower
    lo, hi = problem.lower_lo, problem.lower_hi
    n_points = psi.basis_size(m) + m
    X = np.empty((n_points, m))
    fs = np.empty(n_points)
    G = np.empty((n_points, len(problem.lower_constraints)))
    for k in range(n_points):
        X[k] = polynomial_mutation(x_center, lo, hi, 1.0, params.qp_eta_m, rng)
        fs[k], gs = evaluate_lower_full(problem, x_u, X[k], counters)
        if not math.isfinite(fs[k]):
            return None
        G[k] = gs
    Phi = psi.quadratic_features(X)
    c0, g, H = psi.quadratic_parts(psi.least_squares(Phi, fs), m)
    A = b = None
    if G.shape[1]:
        lin = psi.least_squares(Phi[:, : m + 1], G)
        A = lin[1:].T
        b = -lin[0]
        b = b - 1e-9 * (1.0 + np.abs(b))
    res = solve_qp(H, g, A, b, lo, hi, x_center, params.qp_max_iter)
    if not res.ok:
        return None
    x = res.x
    f_true, gs = evaluate_lower_full(problem, x_u, x, counters)
    if not math.isfinite(f_true):
        return None
    cv = violation(gs)
    model_value = c0 + g @ x + 0.5 * x @ H @ x
    accepted = abs(model_value - f_true) < params.delta_min and cv == 0.0
    # a candidate worse than a feasible sample it was fitted on is not the minimiser
    feasible = np.all(G <= 0.0, axis=1)
    if accepted and feasible.any():
        accepted = f_true <= float(fs[feasible].min()) + params.delta_min
    return QPOutcome(x, f_true, cv, float(model_value), accepted)


def ea_path(
    problem: BilevelProblem,
    x_u: np.ndarray,
    seeds: Sequence[np.ndarray],
    params: LowerParams,
    counters: EvalCounters,
    rng: np.random.Generator,
) -> LowerSolveResult:
    """Steady-state EA over ``x_l`` with ``x_u`` frozen; seeds join the random initial population."""
    n, m = params.pop_size, problem.n_lower
    lo, hi = problem.lower_lo, problem.lower_hi
    evo = params.evo
    X = np.empty((n, m))
    k = min(len(seeds), n)
    for i in range(k):
        X[i] = np.minimum(np.maximum(seeds[i], lo), hi)
    X[k:] = lo + rng.random((n - k, m)) * (hi - lo)
    f = np.empty(n)
    cv = np.empty(n)
    for i in range(n):
        f[i], cv[i] = evaluate_lower(problem, x_u, X[i], counters)
    keys = [domination_key(cv[i], f[i]) for i in range(n)]
    var0 = X.var(axis=0)
    converged = variance_ratio(var0, var0) < params.alpha_stop  # collapsed from the start
    gen = 0
    while not converged and gen < params.max_generations:
        gen += 1
        parents = tournament_select(cv, f, evo.mu, rng)
        parents.sort(key=keys.__getitem__)
        index, others = X[parents[0]], [X[parents[1]], X[parents[2]]]
        children = [make_offspring(index, others, lo, hi, evo, rng) for _ in range(evo.lam)]
        results = [evaluate_lower(problem, x_u, c, counters) for c in children]
        off_keys = [domination_key(c, v) for v, c in results]
        changed = False
        for slot, source in replacement_plan(keys, off_keys, evo.r, rng):
            if source < 0:
                j = -source - 1
                X[slot] = children[j]
                f[slot], cv[slot] = results[j]
                keys[slot] = off_keys[j]
                changed = True
        # an unchanged population cannot newly cross the threshold
        if changed and variance_ratio(X.var(axis=0), var0) < params.alpha_stop:
            converged = True
            break
    best = min(range(n), key=keys.__getitem__)
    return LowerSolveResult(X[best].copy(), float(f[best]), float(cv[best]), "ea", converged, gen)


def solve_lower(
    problem: BilevelProblem,
    x_u: np.ndarray,
    warm_start: Optional[np.ndarray],
    params: LowerParams,
    counters: EvalCounters,
    rng: np.random.Generator,
    use_qp: bool = True,
) -> LowerSolveResult:
    """One lower-level call: QP path from ``warm_start`` when given, EA otherwise or on rejection."""
    counters.ll_calls += 1
    seeds = []
    method = "ea"
    if warm_start is not None and use_qp:
        method = "qp_then_ea"
        outcome = qp_path(problem, x_u, warm_start, params, counters, rng)
        if outcome is not None:
            if outcome.accepted:
                return LowerSolveResult(outcome.x_l, outcome.f, outcome.cv, "qp", True)
            seeds.append(outcome.x_l)
    if warm_start is not None:
        seeds.append(np.asarray(warm_start, dtype=float))
    result = ea_path(problem, x_u, seeds, params, counters, rng)
    result.method = method
    return result
