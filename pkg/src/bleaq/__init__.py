"""Bilevel evolutionary optimisation with quadratic approximation of the lower-level optimum."""

from .algorithm import BleaqConfig, GenerationTrace, RunReport, run
from .lower import LowerParams, LowerSolveResult, alpha_variance, solve_lower
from .nested import run_nested
from .operators import EvoParams
from .problem import BilevelProblem, EvalCounters, Individual, KnownOptimum
from .testbed import SmdDims, get_problem, make_smd, make_tp, problem_ids

__all__ = [
    "BilevelProblem",
    "BleaqConfig",
    "EvalCounters",
    "EvoParams",
    "GenerationTrace",
    "Individual",
    "KnownOptimum",
    "LowerParams",
    "LowerSolveResult",
    "RunReport",
    "SmdDims",
    "alpha_variance",
    "get_problem",
    "make_smd",
    "make_tp",
    "problem_ids",
    "run",
    "run_nested",
    "solve_lower",
]
