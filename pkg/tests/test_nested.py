import numpy as np
import pytest

from bleaq.algorithm import BleaqConfig, initialize, run
from bleaq.nested import run_nested
from bleaq.problem import EvalCounters
from bleaq.testbed import SmdDims, make_ex1, make_smd

FAST = BleaqConfig(pop_size=12, max_generations=30, lower_pop_size=20, lower_max_generations=150)


@pytest.fixture(scope="module")
def nested_report():
    problem, _ = make_smd(1, SmdDims(1, 1, 1))
    return run_nested(problem, FAST.with_overrides(seed=2))


def test_one_lower_call_per_member(nested_report):
    cfg = FAST
    assert nested_report.counters["ll_calls"] == cfg.pop_size + cfg.evo.lam * nested_report.generations


def test_never_uses_mapping(nested_report):
    assert nested_report.psi_model is None
    assert {row["branch"] for row in nested_report.trace[1:]} == {"solve"}
    assert nested_report.algorithm == "nested"


def test_schema_matches_bleaq(nested_report):
    problem, _ = make_smd(1, SmdDims(1, 1, 1))
    other = run(problem, FAST.with_overrides(seed=2, max_generations=5))
    assert set(other.to_dict()) == set(nested_report.to_dict())
    assert set(other.trace[0]) == set(nested_report.trace[0])


def test_nested_population_all_tagged():
    problem, _ = make_ex1()
    pop = initialize(problem, FAST, EvalCounters(), np.random.default_rng(0), use_qp=False)
    assert all(p.tag == 1 for p in pop)


def test_nested_ex1_reaches_optimum():
    problem, _ = make_ex1()
    report = run_nested(problem, BleaqConfig(seed=1))
    assert abs(report.solution["x_u"][0]) < 1e-2
    assert abs(report.solution["x_l"][0] - 1.0) < 1e-2
