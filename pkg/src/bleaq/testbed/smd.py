"""Scalable SMD test problems with closed-form lower-level optimal mappings.

Objectives slice variables with ``[..., a:b]`` so a 2-D stack of lower-level
vectors can be evaluated in one call (used by the oracle checks).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..problem import BilevelProblem, KnownOptimum

EPS = 1e-6  # inward shrink at open interval endpoints
HALF_PI = np.pi / 2.0


@dataclass(frozen=True)
class SmdDims:
    p: int = 1
    q: int = 2
    r: int = 1
    s: int = 0

    def validate(self, k: int) -> None:
        if min(self.p, self.q, self.r) < 1:
            raise ValueError("p, q and r must be >= 1")
        if k == 5 and self.q < 2:
            raise ValueError("SMD5 needs q >= 2 for its chained banana term")
        if k == 6 and (self.s < 2 or self.s % 2):
            raise ValueError("SMD6 needs an even s >= 2")


@dataclass(frozen=True)
class ExactOracle:
    psi_exact: Callable[[np.ndarray], np.ndarray]
    x_u_star: np.ndarray
    F_star: float
    f_star: float


def _sq(v):
    return (v * v).sum(axis=-1)


def _banana(x, squared: bool):
    step = x[..., 1:] - x[..., :-1] ** 2
    if squared:
        step = step * step
    return (step + (x[..., :-1] - 1.0) ** 2).sum(axis=-1)


def make_smd(k: int, dims: SmdDims = SmdDims(), squared_banana: bool = True) -> tuple[BilevelProblem, ExactOracle]:
    """Build SMD``k`` for the given dimensions.

    Upper variables are ``(x_u1[p], x_u2[r])``; lower variables are
    ``(x_l1[q (+s for SMD6)], x_l2[r])``.  ``squared_banana=False`` selects the
    unsquared first term for SMD5 (a sensitivity variant whose lower level is
    unbounded below in ``x_l1``).
    """
    if k not in range(1, 7):
        raise ValueError(f"unknown SMD problem {k}")
    dims.validate(k)
    p, q, r = dims.p, dims.q, dims.r
    s = dims.s if k == 6 else 0
    ql = q + s

    def split(x_u, x_l):
        return x_u[..., :p], x_u[..., p:], x_l[..., :ql], x_l[..., ql:]

    wide = (-5.0, 10.0)
    u2_range = {1: wide, 2: (-5.0, 1.0), 3: wide, 4: (-1.0, 1.0), 5: wide, 6: wide}[k]
    l2_range = {
        1: (-HALF_PI + EPS, HALF_PI - EPS),
        2: (EPS, np.e),
        3: (-HALF_PI + EPS, HALF_PI - EPS),
        4: (0.0, np.e),
        5: wide,
        6: wide,
    }[k]
    upper_bounds = [wide] * p + [u2_range] * r
    lower_bounds = [wide] * ql + [l2_range] * r

    if k == 1:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) + _sq(l1) + _sq(u2) + _sq(u2 - np.tan(l2))

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) + _sq(l1) + _sq(u2 - np.tan(l2))

        def psi(x_u):
            return np.concatenate([np.zeros(ql), np.arctan(x_u[p:])])
    elif k == 2:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) - _sq(l1) + _sq(u2) - _sq(u2 - np.log(l2))

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) + _sq(l1) + _sq(u2 - np.log(l2))

        def psi(x_u):
            return np.concatenate([np.zeros(ql), np.exp(x_u[p:])])
    elif k == 3:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) + _sq(l1) + _sq(u2) + _sq(u2 * u2 - np.tan(l2))

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            rastrigin = q + (l1 * l1 - np.cos(2.0 * np.pi * l1)).sum(axis=-1)
            return _sq(u1) + rastrigin + _sq(u2 * u2 - np.tan(l2))

        def psi(x_u):
            return np.concatenate([np.zeros(ql), np.arctan(x_u[p:] ** 2)])
    elif k == 4:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) - _sq(l1) + _sq(u2) - _sq(np.abs(u2) - np.log1p(l2))

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            rastrigin = q + (l1 * l1 - np.cos(2.0 * np.pi * l1)).sum(axis=-1)
            return _sq(u1) + rastrigin + _sq(np.abs(u2) - np.log1p(l2))

        def psi(x_u):
            return np.concatenate([np.zeros(ql), np.expm1(np.abs(x_u[p:]))])
    elif k == 5:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) - _banana(l1, squared_banana) + _sq(u2) - _sq(np.abs(u2) - l2 * l2)

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) + _banana(l1, squared_banana) + _sq(np.abs(u2) - l2 * l2)

        def psi(x_u):
            return np.concatenate([np.ones(ql), np.sqrt(np.abs(x_u[p:]))])
    else:
        def F(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            return _sq(u1) - _sq(l1[..., :q]) + _sq(l1[..., q:]) + _sq(u2) - _sq(u2 - l2)

        def f(x_u, x_l):
            u1, u2, l1, l2 = split(x_u, x_l)
            tail = l1[..., q:]
            pairs = tail[..., 1::2] - tail[..., 0::2]
            return _sq(u1) + _sq(l1[..., :q]) + _sq(pairs) + _sq(u2 - l2)

        def psi(x_u):
            # the lower level is degenerate along equal pairs; zero pairs are best for the upper level
            return np.concatenate([np.zeros(ql), np.asarray(x_u[p:], dtype=float)])

    x_u_star = np.zeros(p + r)
    problem = BilevelProblem(
        name=f"SMD{k}",
        upper_objective=F,
        lower_objective=f,
        upper_bounds=upper_bounds,
        lower_bounds=lower_bounds,
        known_optimum=KnownOptimum(0.0, 0.0, x_u_star, psi(x_u_star)),
        dims={"p": p, "q": q, "r": r, "s": s},
    )
    return problem, ExactOracle(psi, x_u_star, 0.0, 0.0)
