"""Standard constrained bilevel test problems TP1-TP10.

Constraints are written as ``g(x_u, x_l) <= 0``.  Upper-level boxes that the
formulations leave open are closed at values that contain the best-known
solutions with a margin.
"""

from __future__ import annotations

import math

import numpy as np

from ..problem import BilevelProblem, KnownOptimum

TP5_H = np.array([[1.0, 3.0], [3.0, 10.0]])
TP5_B = np.array([[-1.0, 2.0], [3.0, -3.0]])
TP5_R = 0.1
_SQRT_I = np.sqrt(np.arange(1, 11, dtype=float))


def _tp1() -> BilevelProblem:
    def F(u, l):
        return (u[0] - 30.0) ** 2 + (u[1] - 20.0) ** 2 - 20.0 * l[0] + 20.0 * l[1]

    def f(u, l):
        return (u[0] - l[0]) ** 2 + (u[1] - l[1]) ** 2

    return BilevelProblem(
        "TP1", F, f,
        upper_bounds=[(0.0, 30.0), (0.0, 30.0)],
        lower_bounds=[(0.0, 10.0), (0.0, 10.0)],
        upper_constraints=(
            lambda u, l: 30.0 - u[0] - 2.0 * u[1],
            lambda u, l: u[0] + u[1] - 25.0,
            lambda u, l: u[1] - 15.0,
        ),
        known_optimum=KnownOptimum(225.0, 100.0, np.array([20.0, 5.0]), np.array([10.0, 5.0])),
    )


def _tp2_family(name: str, absolute: bool) -> BilevelProblem:
    def F(u, l):
        v = 2.0 * u[0] + 2.0 * u[1] - 3.0 * l[0] - 3.0 * l[1] - 60.0
        return abs(v) if absolute else v

    def f(u, l):
        return (l[0] - u[0] + 20.0) ** 2 + (l[1] - u[1] + 20.0) ** 2

    return BilevelProblem(
        name, F, f,
        upper_bounds=[(0.0, 50.0), (0.0, 50.0)],
        lower_bounds=[(-10.0, 20.0), (-10.0, 20.0)],
        upper_constraints=(lambda u, l: u[0] + u[1] + l[0] - 2.0 * l[1] - 40.0,),
        lower_constraints=(
            lambda u, l: 2.0 * l[0] - u[0] + 10.0,
            lambda u, l: 2.0 * l[1] - u[1] + 10.0,
        ),
        known_optimum=KnownOptimum(0.0, 100.0, np.array([0.0, 30.0]), np.array([-10.0, 10.0])),
    )


def _tp3() -> BilevelProblem:
    def F(u, l):
        return -u[0] ** 2 - 3.0 * u[1] ** 2 - 4.0 * l[0] + l[1] ** 2

    def f(u, l):
        return 2.0 * u[0] ** 2 + l[0] ** 2 - 5.0 * l[1]

    return BilevelProblem(
        "TP3", F, f,
        upper_bounds=[(0.0, 10.0), (0.0, 10.0)],
        lower_bounds=[(0.0, 10.0), (0.0, 10.0)],
        upper_constraints=(lambda u, l: u[0] ** 2 + 2.0 * u[1] - 4.0,),
        lower_constraints=(
            lambda u, l: -3.0 - (u[0] ** 2 - 2.0 * u[0] + u[1] ** 2 - 2.0 * l[0] + l[1]),
            lambda u, l: 4.0 - (u[1] + 3.0 * l[0] - 4.0 * l[1]),
        ),
        known_optimum=KnownOptimum(-18.6787, -1.0156, np.array([0.0, 2.0]), np.array([1.875, 0.90625])),
    )


def _tp4() -> BilevelProblem:
    def F(u, l):
        return -8.0 * u[0] - 4.0 * u[1] + 4.0 * l[0] - 40.0 * l[1] - 4.0 * l[2]

    def f(u, l):
        return u[0] + 2.0 * u[1] + l[0] + l[1] + 2.0 * l[2]

    return BilevelProblem(
        "TP4", F, f,
        upper_bounds=[(0.0, 2.0), (0.0, 2.0)],
        lower_bounds=[(0.0, 10.0)] * 3,
        lower_constraints=(
            lambda u, l: l[1] + l[2] - l[0] - 1.0,
            lambda u, l: 2.0 * u[0] - l[0] + 2.0 * l[1] - 0.5 * l[2] - 1.0,
            lambda u, l: 2.0 * u[1] + 2.0 * l[0] - l[1] - 0.5 * l[2] - 1.0,
        ),
        known_optimum=KnownOptimum(-29.2, 3.2, np.array([0.0, 0.9]), np.array([0.0, 0.6, 0.4])),
    )


def _tp5(printed_sign: bool) -> BilevelProblem:
    sign = -1.0 if printed_sign else 1.0

    def F(u, l):
        return TP5_R * float(u @ u) - 3.0 * l[0] - 4.0 * l[1] + 0.5 * float(l @ l)

    def f(u, l):
        return 0.5 * float(l @ TP5_H @ l) + sign * float((TP5_B @ u) @ l)

    return BilevelProblem(
        "TP5", F, f,
        upper_bounds=[(0.0, 10.0), (0.0, 10.0)],
        lower_bounds=[(0.0, 10.0), (0.0, 10.0)],
        lower_constraints=(
            lambda u, l: -0.333 * l[0] + l[1] - 2.0,
            lambda u, l: l[0] - 0.333 * l[1] - 2.0,
        ),
        known_optimum=KnownOptimum(-3.6, -2.0, np.array([2.0, 0.0]), np.array([2.0, 0.0])),
    )


def _tp6() -> BilevelProblem:
    def F(u, l):
        return (u[0] - 1.0) ** 2 + 2.0 * l[0] - 2.0 * u[0]

    def f(u, l):
        return (2.0 * l[0] - 4.0) ** 2 + (2.0 * l[1] - 1.0) ** 2 + u[0] * l[0]

    return BilevelProblem(
        "TP6", F, f,
        upper_bounds=[(0.0, 10.0)],
        lower_bounds=[(0.0, 10.0), (0.0, 10.0)],
        lower_constraints=(
            lambda u, l: 4.0 * u[0] + 5.0 * l[0] + 4.0 * l[1] - 12.0,
            lambda u, l: 4.0 * l[1] - 4.0 * u[0] - 5.0 * l[0] + 4.0,
            lambda u, l: 4.0 * u[0] - 4.0 * l[0] + 5.0 * l[1] - 4.0,
            lambda u, l: 4.0 * l[0] - 4.0 * u[0] + 5.0 * l[1] - 4.0,
        ),
        known_optimum=KnownOptimum(-1.2091, 7.6145, np.array([1.8884]), np.array([(12.0 - 4.0 * 1.8884) / 5.0, 0.0])),
    )


def _tp7() -> BilevelProblem:
    def ratio(u, l):
        return (u[0] + l[0]) * (u[1] + l[1]) / (1.0 + u[0] * l[0] + u[1] * l[1])

    def F(u, l):
        return -ratio(u, l)

    a = 5.0 * math.sqrt(2.0)
    return BilevelProblem(
        "TP7", F, ratio,
        upper_bounds=[(0.0, 10.0), (0.0, 10.0)],
        lower_bounds=[(0.0, 10.0), (0.0, 10.0)],
        upper_constraints=(
            lambda u, l: u[0] ** 2 + u[1] ** 2 - 100.0,
            lambda u, l: u[0] - u[1],
        ),
        lower_constraints=(
            lambda u, l: l[0] - u[0],
            lambda u, l: l[1] - u[1],
        ),
        known_optimum=KnownOptimum(-1.96, 1.96, np.array([a, a]), np.array([a, 0.0])),
    )


def _griewank_core(z):
    return 1.0 + float(z @ z) / 4000.0 - float(np.prod(np.cos(z / _SQRT_I)))


def _tp9_family(name: str, scaled: bool) -> BilevelProblem:
    def F(u, l):
        return float(np.sum(np.abs(u - 1.0)) + np.sum(np.abs(l)))

    if scaled:
        def f(u, l):
            return math.exp(_griewank_core(u * l))
    else:
        def f(u, l):
            return math.exp(_griewank_core(l) * float(u @ u))

    box = [(-math.pi, math.pi)] * 10
    return BilevelProblem(
        name, F, f,
        upper_bounds=box,
        lower_bounds=box,
        known_optimum=KnownOptimum(0.0, 1.0, np.ones(10), np.zeros(10)),
    )


def make_tp(k: int, tp5_printed_sign: bool = False) -> BilevelProblem:
    """Build TP``k``.

    ``tp5_printed_sign=True`` uses ``-b(x_u).x_l`` in the TP5 lower objective; the
    default ``+b(x_u).x_l`` is the sign under which the best-known TP5 solution is
    lower-level optimal.
    """
    builders = {
        1: _tp1,
        2: lambda: _tp2_family("TP2", absolute=False),
        3: _tp3,
        4: _tp4,
        5: lambda: _tp5(tp5_printed_sign),
        6: _tp6,
        7: _tp7,
        8: lambda: _tp2_family("TP8", absolute=True),
        9: lambda: _tp9_family("TP9", scaled=False),
        10: lambda: _tp9_family("TP10", scaled=True),
    }
    if k not in builders:
        raise ValueError(f"unknown TP problem {k}")
    return builders[k]()
