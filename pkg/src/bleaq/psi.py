"""Quadratic regression of lower-level optima on upper-level variables.

The basis for ``n`` inputs is ``[1, x_1..x_n, x_i*x_j (i <= j)]``, i.e.
``(n + 1)(n + 2) / 2`` columns.  The same regression backs the lower-level
quadratic model used by the QP path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

RIDGE = 1e-8
MAX_CONDITION = 1e12


def basis_size(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def required_points(n_upper: int) -> int:
    """Minimum training size before a mapping is fitted: basis size plus ``n``."""
    if n_upper < 1:
        raise ValueError("n_upper must be >= 1")
    return basis_size(n_upper) + n_upper


_PAIRS: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _PAIRS:
        _PAIRS[n] = np.triu_indices(n)
    return _PAIRS[n]


def quadratic_features(X: np.ndarray) -> np.ndarray:
    """Design matrix for rows of ``X``; a 1-D input is treated as one row."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    i, j = _pairs(X.shape[1])
    return np.hstack([np.ones((X.shape[0], 1)), X, X[:, i] * X[:, j]])


def least_squares(Phi: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Coefficients minimising ``||Phi @ C - Y||^2``; column 0 of ``Phi`` must be the constant.

    Non-constant columns are standardised, the normal equations are solved by
    Cholesky, and a ridge of ``1e-8 * trace / p`` is added when the system is
    singular or badly conditioned.  Coefficients are returned for the raw columns.
    """
    Y = np.asarray(Y, dtype=float)
    vector = Y.ndim == 1
    Y2 = Y[:, None] if vector else Y
    k, p = Phi.shape
    mu = Phi[:, 1:].mean(axis=0)
    sd = Phi[:, 1:].std(axis=0)
    live = sd > 1e-12 * np.maximum(1.0, np.abs(mu))
    Z = np.zeros((k, p - 1))
    Z[:, live] = (Phi[:, 1:][:, live] - mu[live]) / sd[live]
    y_mean = Y2.mean(axis=0)
    Yc = Y2 - y_mean
    A = Z.T @ Z
    rhs = Z.T @ Yc
    beta = _solve_normal(A, rhs)
    coef = np.zeros((p, Y2.shape[1]))
    scale = np.where(live, sd, 1.0)
    coef[1:] = np.where(live[:, None], beta / scale[:, None], 0.0)
    coef[0] = y_mean - mu @ coef[1:]
    return coef[:, 0] if vector else coef


def _solve_normal(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    p = A.shape[0]
    if p == 0:
        return np.zeros((0, rhs.shape[1]))
    diag = np.diag(A)
    tr = float(diag.sum())
    well_posed = diag.min() > 0.0
    if well_posed:
        try:
            L = np.linalg.cholesky(A)
            d = np.diag(L)
            well_posed = (d.max() / d.min()) ** 2 < MAX_CONDITION
        except np.linalg.LinAlgError:
            well_posed = False
    if not well_posed:
        L = np.linalg.cholesky(A + (RIDGE * max(tr, 1e-300) / p) * np.eye(p))
    return np.linalg.solve(L.T, np.linalg.solve(L, rhs))


@dataclass(frozen=True)
class PsiModel:
    """Per-lower-variable quadratic in the upper variables.

    ``coeffs`` has shape ``(basis_size(n), m)``; column ``i`` predicts lower variable ``i``.
    ``mse`` is the mean over training samples of the squared Euclidean prediction error.
    """

    coeffs: np.ndarray
    mse: float
    n_train: int
    n_upper: int

    @property
    def n_lower(self) -> int:
        return self.coeffs.shape[1]

    def to_dict(self) -> dict:
        return {
            "n_upper": self.n_upper,
            "n_lower": self.n_lower,
            "coeffs": self.coeffs.tolist(),
            "mse": self.mse,
            "n_train": self.n_train,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PsiModel":
        return cls(np.asarray(data["coeffs"], dtype=float), float(data["mse"]), int(data["n_train"]),
                   int(data["n_upper"]))


def fit(X_u: np.ndarray, X_l: np.ndarray, min_points: Optional[int] = None) -> PsiModel:
    """Fit one quadratic per lower variable over samples of ``(x_u, x_l)`` pairs."""
    X_u = np.atleast_2d(np.asarray(X_u, dtype=float))
    X_l = np.asarray(X_l, dtype=float)
    if X_l.ndim == 1:
        X_l = X_l[:, None]
    n = X_u.shape[1]
    needed = required_points(n) if min_points is None else min_points
    if X_u.shape[0] < needed:
        raise ValueError(f"need at least {needed} samples, got {X_u.shape[0]}")
    Phi = quadratic_features(X_u)
    coeffs = least_squares(Phi, X_l)
    resid = Phi @ coeffs - X_l
    mse = float(np.mean(np.sum(resid * resid, axis=1)))
    return PsiModel(coeffs, mse, X_u.shape[0], n)


def predict(model: PsiModel, x_u: np.ndarray, lo: Optional[np.ndarray] = None,
            hi: Optional[np.ndarray] = None) -> np.ndarray:
    """Predicted lower-level optimum at ``x_u``, clamped into ``[lo, hi]`` when given."""
    x_l = (quadratic_features(x_u) @ model.coeffs)[0]
    if lo is not None:
        x_l = np.minimum(np.maximum(x_l, lo), hi)
    return x_l


def is_good(model: PsiModel, e0: float = 1e-3) -> bool:
    return model.mse < e0


def quadratic_parts(coef: np.ndarray, n: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Split scalar-output basis coefficients into ``(c, g, H)`` with ``q(x) = c + g.x + x.H.x / 2``."""
    i, j = _pairs(n)
    quad = coef[1 + n:]
    H = np.zeros((n, n))
    H[i, j] += quad
    H[j, i] += quad
    return float(coef[0]), np.array(coef[1:1 + n]), H
