from .catalog import DEFAULT_SMD_DIMS, UnknownProblemError, get_problem, parse_dims, problem_ids
from .ex1 import make_ex1
from .oracle import OracleReport, verify_oracle
from .smd import ExactOracle, SmdDims, make_smd
from .tp import make_tp

__all__ = [
    "DEFAULT_SMD_DIMS",
    "ExactOracle",
    "OracleReport",
    "SmdDims",
    "UnknownProblemError",
    "get_problem",
    "make_ex1",
    "make_smd",
    "make_tp",
    "parse_dims",
    "problem_ids",
    "verify_oracle",
]
