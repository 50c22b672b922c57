"""Datasets, model specifications and design-matrix algebra.

A model is an ordered list of basis terms over the columns of a
:class:`Dataset`.  :func:`build_design_matrix` turns it into a
:class:`DesignMatrix`, which caches the Cholesky factor of X^T X together
with ln|X^T X|; every evidence and posterior formula downstream works from
those cached quantities.
"""
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np
from scipy import linalg

from .errors import NonFinite, RankDeficient, SpecError, UnknownColumn

# X is rank-deficient when lambda_min(X^T X) < RANK_RTOL * lambda_max(X^T X).
RANK_RTOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    columns: Mapping[str, np.ndarray]
    n_rows: int

    def __post_init__(self):
        if self.n_rows < 1:
            raise SpecError("dataset needs at least one row")
        cols = {}
        for name, values in self.columns.items():
            v = _frozen(values)
            if v.ndim != 1 or v.shape[0] != self.n_rows:
                raise SpecError(f"column {name!r} has {v.size} entries, expected {self.n_rows}")
            if not np.all(np.isfinite(v)):
                raise NonFinite(f"column {name!r} contains non-finite values")
            cols[name] = v
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_columns(cls, **columns):
        if not columns:
            raise SpecError("dataset needs at least one column")
        n = len(next(iter(columns.values())))
        return cls(columns=columns, n_rows=n)

    def __getitem__(self, name):
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumn(f"unknown column {name!r}") from None

    @property
    def names(self):
        return list(self.columns)


# ---------------------------------------------------------------------------
# Basis terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Intercept:
    def columns(self, data):
        return [np.ones(data.n_rows)]

    def names(self):
        return ["intercept"]

    def validate(self, data):
        pass


@dataclass(frozen=True)
class Raw:
    column: str

    def columns(self, data):
        return [np.array(data[self.column])]

    def names(self):
        return [self.column]

    def validate(self, data):
        data[self.column]


@dataclass(frozen=True)
class Polynomial:
    """A single power column ``x**degree``."""
    column: str
    degree: int

    def columns(self, data):
        return [data[self.column] ** self.degree]

    def names(self):
        return [f"{self.column}^{self.degree}"]

    def validate(self, data):
        data[self.column]
        if int(self.degree) != self.degree or self.degree < 1:
            raise SpecError(f"polynomial degree must be a positive integer, got {self.degree!r}")


@dataclass(frozen=True)
class TruncatedPowerSpline:
    """One column ``max(x - t, 0)**degree`` per knot ``t``."""
    column: str
    degree: int
    knots: tuple

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(t) for t in self.knots))

    def columns(self, data):
        x = data[self.column]
        return [np.maximum(x - t, 0.0) ** self.degree for t in self.knots]

    def names(self):
        return [f"({self.column}-{t:g})_+^{self.degree}" for t in self.knots]

    def validate(self, data):
        x = data[self.column]
        if int(self.degree) != self.degree or self.degree < 1:
            raise SpecError(f"spline degree must be a positive integer, got {self.degree!r}")
        if not self.knots:
            raise SpecError("spline term needs at least one knot")
        k = np.asarray(self.knots)
        if not np.all(np.isfinite(k)):
            raise NonFinite("spline knots must be finite")
        if np.any(np.diff(k) <= 0):
            raise SpecError(f"spline knots must be strictly increasing: {list(self.knots)}")
        lo, hi = float(x.min()), float(x.max())
        if k[0] < lo or k[-1] > hi:
            raise SpecError(
                f"spline knots {list(self.knots)} outside observed range "
                f"[{lo:g}, {hi:g}] of column {self.column!r}")


Term = Union[Intercept, Raw, Polynomial, TruncatedPowerSpline]


@dataclass(frozen=True)
class ModelSpec:
    response: str
    terms: Sequence[Term]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise SpecError(f"model {self.label!r} has no terms")

    def validate(self, data):
        try:
            data[self.response]
            for term in self.terms:
                term.validate(data)
        except SpecError as exc:
            raise type(exc)(f"model {self.label!r}: {exc}") from None

    @property
    def column_names(self):
        return [name for t in self.terms for name in t.names()]


# ---------------------------------------------------------------------------
# Design matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DesignMatrix:
    entries: np.ndarray
    gram_logdet: float
    rank: int
    column_norms: np.ndarray
    chol: np.ndarray = field(repr=False)
    names: tuple = ()

    @property
    def m(self):
        return self.entries.shape[1]

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def gram(self):
        return self.entries.T @ self.entries

    @classmethod
    def from_array(cls, X, names=None):
        """Validate ``X`` and cache its Gram factorization.

        Raises
        ------
        RankDeficient
            If X^T X fails the eigenvalue-ratio rank test or its Cholesky
            factorization breaks down.
        """
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise SpecError("design matrix must be two-dimensional")
        if not np.all(np.isfinite(X)):
            raise NonFinite("design matrix contains non-finite entries")
        n, m = X.shape
        names = tuple(names) if names is not None else tuple(f"x{j}" for j in range(m))
        if m == 0:
            return cls(_frozen(X), 0.0, 0, _frozen(np.empty(0)), _frozen(np.empty((0, 0))), names)
        if n < m:
            raise RankDeficient(f"{n} rows cannot support {m} independent columns")
        gram = X.T @ X
        eig = linalg.eigvalsh(gram)
        rank = int(np.sum(eig >= RANK_RTOL * eig[-1])) if eig[-1] > 0 else 0
        if rank < m:
            raise RankDeficient(f"X^T X has rank {rank} < {m} (tolerance {RANK_RTOL:g})")
        try:
            L = linalg.cholesky(gram, lower=True)
        except linalg.LinAlgError:
            raise RankDeficient("Cholesky factorization of X^T X failed") from None
        logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
        if not np.isfinite(logdet):
            raise RankDeficient("ln|X^T X| is not finite")
        return cls(_frozen(X), logdet, rank, _frozen(np.linalg.norm(X, axis=0)), _frozen(L), names)

    def quad_form(self, delta):
        """delta^T X^T X delta, evaluated as ||L^T delta||^2 (rows of a 2-D array)."""
        delta = np.asarray(delta, dtype=np.float64)
        z = delta @ self.chol
        return np.sum(z * z, axis=-1)


def build_design_matrix(data, spec):
    spec.validate(data)
    cols = [c for term in spec.terms for c in term.columns(data)]
    X = np.column_stack(cols)
    try:
        return DesignMatrix.from_array(X, names=spec.column_names)
    except RankDeficient as exc:
        raise RankDeficient(f"model {spec.label!r}: {exc}") from None


def gram_logdet(X):
    """ln|X^T X| from the cached Cholesky factor; the determinant itself is never formed."""
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix.from_array(X)
    return X.gram_logdet


def gram_schmidt(X):
    """Orthogonalize the columns of ``X`` without normalizing them.

    Modified Gram-Schmidt with one re-orthogonalization pass, so the
    returned columns are orthogonal to working precision.  The norms of
    the returned columns multiply to |X^T X|^{1/2}.
    """
    A = X.entries if isinstance(X, DesignMatrix) else np.asarray(X, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    Q = np.array(A, dtype=np.float64, copy=True)
    m = Q.shape[1]
    scale = np.linalg.norm(A, axis=0)
    for j in range(m):
        v = Q[:, j]
        for _ in range(2):
            for i in range(j):
                qi = Q[:, i]
                v -= (qi @ v) / (qi @ qi) * qi
        if np.linalg.norm(v) <= np.sqrt(RANK_RTOL) * scale[j]:
            raise RankDeficient(f"column {j} is (numerically) in the span of the preceding columns")
        Q[:, j] = v
    return Q
