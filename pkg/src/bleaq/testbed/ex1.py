"""One-variable-per-level example whose lower-level optimum is ``x_l = exp(x_u)``."""

from __future__ import annotations

import numpy as np

from ..problem import BilevelProblem, KnownOptimum
from .smd import ExactOracle


def make_ex1() -> tuple[BilevelProblem, ExactOracle]:
    def F(x_u, x_l):
        return np.abs(x_u[..., 0]) + x_l[..., 0] - 1.0

    def f(x_u, x_l):
        return x_u[..., 0] ** 2 + np.abs(x_l[..., 0] - np.exp(x_u[..., 0]))

    def psi(x_u):
        return np.exp(np.asarray(x_u, dtype=float))

    x_u_star = np.zeros(1)
    problem = BilevelProblem(
        "EX1", F, f,
        upper_bounds=[(-2.0, 2.0)],
        lower_bounds=[(0.0, 10.0)],
        known_optimum=KnownOptimum(0.0, 0.0, x_u_star, np.ones(1)),
    )
    return problem, ExactOracle(psi, x_u_star, 0.0, 0.0)
