"""Primal active-set solver for small convex quadratic programs.

    minimize    0.5 * x.H.x + g.x
    subject to  A x <= b,  lo <= x <= hi

``H`` may be positive semidefinite (including zero, i.e. an LP).  A feasible start
is found with an elastic phase-1 LP solved by the same routine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NONCONVEX = "nonconvex"
MAX_ITER = "max_iter"


@dataclass
class QPResult:
    x: Optional[np.ndarray]
    status: str
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def is_convex(H: np.ndarray, rtol: float = 1e-8) -> bool:
    if H.size == 0:
        return True
    eig = np.linalg.eigvalsh(0.5 * (H + H.T))
    return eig[0] >= -rtol * max(1.0, float(np.abs(eig).max()))


def _null_space(M: np.ndarray, n: int) -> np.ndarray:
    if M.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size else 0
    return vt[rank:].T


def _active_set(H, g, C, d, x, max_iter):
    n = x.shape[0]
    row_norm = np.maximum(np.linalg.norm(C, axis=1), 1e-300)
    feas_tol = 1e-9 * (1.0 + np.abs(d))
    W: list[int] = []
    resid = C @ x - d
    for i in np.argsort(-resid):
        if resid[i] < -feas_tol[i] or len(W) == n:
            break
        trial = C[W + [int(i)]]
        if np.linalg.matrix_rank(trial, tol=1e-10 * np.abs(trial).max()) == len(W) + 1:
            W.append(int(i))
    for it in range(1, max_iter + 1):
        grad = H @ x + g
        gscale = 1.0 + float(np.linalg.norm(grad))
        Z = _null_space(C[W], n)
        ray = False
        if Z.shape[1]:
            lam, Q = np.linalg.eigh(Z.T @ H @ Z)
            gr = Z.T @ grad
            flat = lam <= 1e-10 * max(1.0, float(np.abs(lam).max()))
            gz = Q[:, flat].T @ gr
            if flat.any() and np.linalg.norm(gz) > 1e-10 * gscale:
                p = -Z @ (Q[:, flat] @ gz)
                ray = True
            else:
                pos = ~flat
                p = -Z @ (Q[:, pos] @ ((Q[:, pos].T @ gr) / lam[pos]))
        else:
            p = np.zeros(n)
        if np.linalg.norm(p) <= 1e-12 * (1.0 + np.linalg.norm(x)):
            if not W:
                return QPResult(x, OPTIMAL, it)
            mult = np.linalg.lstsq(C[W].T, -grad, rcond=None)[0]
            j = int(np.argmin(mult / row_norm[W]))
            if mult[j] / row_norm[W[j]] >= -1e-9 * gscale:
                return QPResult(x, OPTIMAL, it)
            W.pop(j)
            continue
        Cp = C @ p
        slack = np.maximum(d - C @ x, 0.0)
        alpha, block = (np.inf if ray else 1.0), None
        in_w = np.zeros(len(d), dtype=bool)
        in_w[W] = True
        cand = np.flatnonzero(~in_w & (Cp > 1e-12 * row_norm * np.linalg.norm(p)))
        if cand.size:
            steps = slack[cand] / Cp[cand]
            k = int(np.argmin(steps))
            if steps[k] < alpha:
                alpha, block = float(steps[k]), int(cand[k])
        if not np.isfinite(alpha):
            return QPResult(x, UNBOUNDED, it)
        x = x + alpha * p
        if block is not None:
            W.append(block)
    return QPResult(x, MAX_ITER, max_iter)


def solve_qp(
    H: np.ndarray,
    g: np.ndarray,
    A: Optional[np.ndarray] = None,
    b: Optional[np.ndarray] = None,
    lo: Optional[np.ndarray] = None,
    hi: Optional[np.ndarray] = None,
    x0: Optional[np.ndarray] = None,
    max_iter: int = 50,
) -> QPResult:
    H = 0.5 * (np.asarray(H, dtype=float) + np.asarray(H, dtype=float).T)
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if not is_convex(H):
        return QPResult(None, NONCONVEX)
    A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
    lo = np.full(n, -np.inf) if lo is None else np.asarray(lo, dtype=float)
    hi = np.full(n, np.inf) if hi is None else np.asarray(hi, dtype=float)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    x = np.minimum(np.maximum(x, lo), hi)
    x[~np.isfinite(x)] = 0.0

    eye = np.eye(n)
    fin_hi, fin_lo = np.isfinite(hi), np.isfinite(lo)
    C = np.vstack([A, eye[fin_hi], -eye[fin_lo]])
    d = np.concatenate([b, hi[fin_hi], -lo[fin_lo]])

    J = A.shape[0]
    excess = A @ x - b if J else np.zeros(0)
    if J and np.any(excess > 1e-9 * (1.0 + np.abs(b))):
        # phase 1: minimise total elastic slack s >= A x - b, s >= 0
        s0 = np.maximum(excess, 0.0)
        z0 = np.concatenate([x, s0])
        Cz = np.vstack([
            np.hstack([A, -np.eye(J)]),
            np.hstack([np.zeros((J, n)), -np.eye(J)]),
            np.hstack([eye[fin_hi], np.zeros((int(fin_hi.sum()), J))]),
            np.hstack([-eye[fin_lo], np.zeros((int(fin_lo.sum()), J))]),
        ])
        dz = np.concatenate([b, np.zeros(J), hi[fin_hi], -lo[fin_lo]])
        gz = np.concatenate([np.zeros(n), np.ones(J)])
        res = _active_set(np.zeros((n + J, n + J)), gz, Cz, dz, z0, max(50, 5 * (n + J)))
        if res.status != OPTIMAL:
            return QPResult(None, INFEASIBLE, res.iterations)
        x = res.x[:n]
        if np.any(A @ x - b > 1e-7 * (1.0 + np.abs(b))):
            return QPResult(None, INFEASIBLE, res.iterations)
        x = np.minimum(np.maximum(x, lo), hi)
    return _active_set(H, g, C, d, x, max_iter)
