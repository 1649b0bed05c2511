"""Lookup of test problems by identifier (``EX1``, ``SMD1``..``SMD6``, ``TP1``..``TP10``)."""

from __future__ import annotations

import re
from dataclasses import replace
from typing import Optional

from ..problem import BilevelProblem
from .ex1 import make_ex1
from .smd import ExactOracle, SmdDims, make_smd
from .tp import make_tp

# ten-variable settings used for the SMD benchmarks
DEFAULT_SMD_DIMS = {k: SmdDims(3, 3, 2, 0) for k in range(1, 6)}
DEFAULT_SMD_DIMS[6] = SmdDims(3, 1, 2, 2)


class UnknownProblemError(KeyError):
    pass


def problem_ids() -> list[str]:
    return ["EX1"] + [f"SMD{k}" for k in range(1, 7)] + [f"TP{k}" for k in range(1, 11)]


def parse_dims(text: str) -> SmdDims:
    """``"p,q,r"`` or ``"p,q,r,s"`` into :class:`SmdDims`."""
    parts = [int(v) for v in text.split(",")]
    if len(parts) not in (3, 4):
        raise ValueError("dims must be p,q,r or p,q,r,s")
    return SmdDims(*parts)


def get_problem(
    pid: str,
    dims: Optional[SmdDims] = None,
    smd5_squared: bool = True,
    tp5_printed_sign: bool = False,
) -> tuple[BilevelProblem, Optional[ExactOracle]]:
    """Problem and (when available) its closed-form oracle."""
    key = pid.strip().upper()
    m = re.fullmatch(r"(EX|SMD|TP)(\d+)", key)
    if not m:
        raise UnknownProblemError(pid)
    family, k = m.group(1), int(m.group(2))
    if family == "EX" and k == 1:
        return make_ex1()
    if family == "SMD" and 1 <= k <= 6:
        dims = dims or DEFAULT_SMD_DIMS[k]
        if k == 6 and dims.s == 0:
            dims = replace(dims, s=2)  # s only exists for SMD6, so "p,q,r" applies to the whole family
        return make_smd(k, dims, squared_banana=smd5_squared)
    if family == "TP" and 1 <= k <= 10:
        return make_tp(k, tp5_printed_sign=tp5_printed_sign), None
    raise UnknownProblemError(pid)
