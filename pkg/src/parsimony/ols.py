"""Least-squares fit and the residual/coefficient split of ||y - X beta||^2."""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .design import DesignMatrix
from .errors import DimensionMismatch

# A residual this small relative to ||y|| counts as an exact interpolation.
PERFECT_FIT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class FitResult:
    beta_hat: np.ndarray
    y_hat: np.ndarray
    residual_norm: float
    n: int
    m: int
    y: np.ndarray

    @property
    def is_perfect(self):
        ynorm = float(np.linalg.norm(self.y))
        return self.residual_norm <= PERFECT_FIT_RTOL * ynorm or self.residual_norm == 0.0


def _as_design(X):
    return X if isinstance(X, DesignMatrix) else DesignMatrix.from_array(X)


def _check_y(X, y):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != X.n:
        raise DimensionMismatch(f"y has shape {y.shape}, design matrix has {X.n} rows")
    return y


def fit(X, y):
    """Ordinary least squares.

    The solve uses a Householder QR of X rather than the normal equations;
    the residual is then formed directly as ``y - X beta_hat``.
    """
    X = _as_design(X)
    y = _check_y(X, y)
    if X.m == 0:
        beta = np.empty(0)
    else:
        Q, R = linalg.qr(X.entries, mode="economic")
        beta = linalg.solve_triangular(R, Q.T @ y)
    y_hat = X.entries @ beta
    r = float(np.linalg.norm(y - y_hat))
    for a in (beta, y_hat, y):
        a.setflags(write=False)
    return FitResult(beta, y_hat, r, X.n, X.m, y)


def decompose_quadratic(X, y, beta):
    """Split ||y - X beta||^2 into (||y - y_hat||^2, (beta - beta_hat)^T X^T X (beta - beta_hat)).

    Returns
    -------
    tuple of float
        ``(residual_part, coefficient_part)``; both are non-negative.
    """
    X = _as_design(X)
    y = _check_y(X, y)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (X.m,):
        raise DimensionMismatch(f"beta has shape {beta.shape}, expected ({X.m},)")
    f = fit(X, y)
    residual_part = f.residual_norm ** 2
    coefficient_part = float(np.sum((X.entries @ (beta - f.beta_hat)) ** 2))
    return residual_part, coefficient_part
