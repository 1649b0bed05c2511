"""Bilevel problem definition, solution records and evaluation accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

Objective = Callable[[np.ndarray, np.ndarray], float]
Constraint = Callable[[np.ndarray, np.ndarray], float]


class InvalidProblemError(ValueError):
    pass


@dataclass(frozen=True)
class KnownOptimum:
    """Reference solution, used only for accuracy reporting."""

    F: float
    f: float
    x_u: Optional[np.ndarray] = None
    x_l: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class BilevelProblem:
    """Upper/lower objectives, inequality constraints (feasible when <= 0) and boxes.

    ``upper_bounds`` and ``lower_bounds`` are ``(dim, 2)`` arrays of closed
    intervals.  Constraints at either level receive ``(x_u, x_l)``.
    """

    name: str
    upper_objective: Objective
    lower_objective: Objective
    upper_bounds: np.ndarray
    lower_bounds: np.ndarray
    upper_constraints: tuple = ()
    lower_constraints: tuple = ()
    known_optimum: Optional[KnownOptimum] = None
    dims: dict = field(default_factory=dict)

    def __post_init__(self):
        ub = np.asarray(self.upper_bounds, dtype=float).reshape(-1, 2)
        lb = np.asarray(self.lower_bounds, dtype=float).reshape(-1, 2)
        if len(ub) < 1 or len(lb) < 1:
            raise InvalidProblemError(f"{self.name}: both levels need at least one variable")
        if np.any(ub[:, 0] >= ub[:, 1]) or np.any(lb[:, 0] >= lb[:, 1]):
            raise InvalidProblemError(f"{self.name}: every bound needs lo < hi")
        ub.flags.writeable = False
        lb.flags.writeable = False
        object.__setattr__(self, "upper_bounds", ub)
        object.__setattr__(self, "lower_bounds", lb)
        object.__setattr__(self, "upper_constraints", tuple(self.upper_constraints))
        object.__setattr__(self, "lower_constraints", tuple(self.lower_constraints))

    @property
    def n_upper(self) -> int:
        return len(self.upper_bounds)

    @property
    def n_lower(self) -> int:
        return len(self.lower_bounds)

    @property
    def upper_lo(self) -> np.ndarray:
        return self.upper_bounds[:, 0]

    @property
    def upper_hi(self) -> np.ndarray:
        return self.upper_bounds[:, 1]

    @property
    def lower_lo(self) -> np.ndarray:
        return self.lower_bounds[:, 0]

    @property
    def lower_hi(self) -> np.ndarray:
        return self.lower_bounds[:, 1]

    def describe(self) -> dict:
        opt = self.known_optimum
        return {
            "id": self.name,
            "dims": dict(self.dims),
            "n_upper": self.n_upper,
            "n_lower": self.n_lower,
            "upper_bounds": self.upper_bounds.tolist(),
            "lower_bounds": self.lower_bounds.tolist(),
            "n_upper_constraints": len(self.upper_constraints),
            "n_lower_constraints": len(self.lower_constraints),
            "known_optimum": None if opt is None else {"F": opt.F, "f": opt.f},
        }


@dataclass
class EvalCounters:
    ul_fe: int = 0
    ll_fe: int = 0
    ll_calls: int = 0

    def as_dict(self) -> dict:
        return {"ul_fe": self.ul_fe, "ll_fe": self.ll_fe, "ll_calls": self.ll_calls}


@dataclass
class Individual:
    """An upper-level member: ``tag`` is 1 iff ``x_l`` came from an actual lower-level solve
    (or a trusted mapping prediction)."""

    x_u: np.ndarray
    x_l: np.ndarray
    tag: int
    F: float = math.inf
    f: float = math.inf
    cv_upper: float = math.inf
    cv_lower: float = math.inf
    solved: bool = False  # x_l came from a lower-level solve rather than a prediction

    @property
    def upper_key(self) -> tuple:
        return domination_key(self.cv_upper, self.F)

    @property
    def lower_key(self) -> tuple:
        return domination_key(self.cv_lower, self.f)


def domination_key(cv: float, obj: float) -> tuple:
    """Sort key realising constraint domination: feasible by objective, then infeasible by cv."""
    if cv > 0.0:
        return (1, cv)
    return (0, obj)


def violation(values: Sequence[float]) -> float:
    total = 0.0
    for g in values:
        if g > 0.0:
            total += g
    return total


def _checked(value: float, constraint_values: Sequence[float]) -> tuple[float, float]:
    if not math.isfinite(value) or not all(math.isfinite(g) for g in constraint_values):
        return math.inf, math.inf
    return value, violation(constraint_values)


def lower_constraint_values(problem: BilevelProblem, x_u, x_l) -> list[float]:
    return [float(c(x_u, x_l)) for c in problem.lower_constraints]


def evaluate_upper(problem: BilevelProblem, x_u, x_l, counters: EvalCounters) -> tuple[float, float]:
    """Upper objective and violation of upper *and* lower constraints; one UL FE."""
    counters.ul_fe += 1
    value = float(problem.upper_objective(x_u, x_l))
    gs = [float(c(x_u, x_l)) for c in problem.upper_constraints]
    gs.extend(lower_constraint_values(problem, x_u, x_l))
    return _checked(value, gs)


def evaluate_lower_full(problem: BilevelProblem, x_u, x_l, counters: EvalCounters) -> tuple[float, list[float]]:
    """Lower objective and the raw lower constraint values; one LL FE.

    Non-finite results come back as ``inf`` objective and ``inf`` constraint values.
    """
    counters.ll_fe += 1
    value = float(problem.lower_objective(x_u, x_l))
    gs = lower_constraint_values(problem, x_u, x_l)
    if not math.isfinite(value) or not all(math.isfinite(g) for g in gs):
        return math.inf, [math.inf] * max(1, len(gs))
    return value, gs


def evaluate_lower(problem: BilevelProblem, x_u, x_l, counters: EvalCounters) -> tuple[float, float]:
    value, gs = evaluate_lower_full(problem, x_u, x_l, counters)
    if not math.isfinite(value):
        return math.inf, math.inf
    return value, violation(gs)
