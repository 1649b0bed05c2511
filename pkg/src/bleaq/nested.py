"""Nested baseline: the same upper-level search, with a full lower-level EA for every new member."""

from __future__ import annotations

from .algorithm import BleaqConfig, RunReport, _evolve
from .problem import BilevelProblem


def run_nested(problem: BilevelProblem, config: BleaqConfig = BleaqConfig()) -> RunReport:
    """Every offspring gets a warm-started evolutionary lower-level solve; no mapping model, no QP."""
    return _evolve(problem, config, nested=True)
