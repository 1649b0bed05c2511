"""Sampling checks that a closed-form lower-level mapping really is optimal."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..problem import BilevelProblem, lower_constraint_values, violation
from .smd import ExactOracle


@dataclass
class OracleReport:
    problem: str
    probes: int
    failures: list[str] = field(default_factory=list)
    worst_margin: float = np.inf  # min over probes of (best sampled f0 - f0 on the mapping)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_oracle(
    problem: BilevelProblem,
    oracle: ExactOracle,
    n_probe: int,
    rng: np.random.Generator,
    n_samples: int = 10_000,
    tol: float = 1e-9,
    optimum_tol: float = 1e-10,
) -> OracleReport:
    """Probe random ``x_u``: the mapped ``x_l`` must be in bounds, lower-feasible and
    no worse (beyond ``tol``) than ``n_samples`` uniform lower-level samples.

    Objectives must accept a stack of lower-level rows, as the SMD and EX1 ones do.
    """
    report = OracleReport(problem.name, n_probe)
    lo_u, hi_u = problem.upper_lo, problem.upper_hi
    lo_l, hi_l = problem.lower_lo, problem.lower_hi
    for _ in range(n_probe):
        x_u = lo_u + rng.random(problem.n_upper) * (hi_u - lo_u)
        x_l = oracle.psi_exact(x_u)
        tag = np.array2string(x_u, precision=4)
        if np.any(x_l < lo_l) or np.any(x_l > hi_l):
            report.failures.append(f"mapping leaves the lower box at x_u={tag}")
            continue
        if violation(lower_constraint_values(problem, x_u, x_l)) > 0.0:
            report.failures.append(f"mapping infeasible at x_u={tag}")
            continue
        on_map = float(problem.lower_objective(x_u, x_l))
        samples = lo_l + rng.random((n_samples, problem.n_lower)) * (hi_l - lo_l)
        sampled = np.asarray(problem.lower_objective(x_u, samples), dtype=float)
        margin = float(np.min(sampled)) - on_map
        report.worst_margin = min(report.worst_margin, margin)
        if margin < -tol:
            report.failures.append(f"sample beats mapping by {-margin:.3g} at x_u={tag}")
    x_star = oracle.x_u_star
    l_star = oracle.psi_exact(x_star)
    F = float(problem.upper_objective(x_star, l_star))
    f = float(problem.lower_objective(x_star, l_star))
    if abs(F - oracle.F_star) > optimum_tol or abs(f - oracle.f_star) > optimum_tol:
        report.failures.append(f"optimum mismatch: F={F:.3g}, f={f:.3g}")
    return report
