"""Coefficient posteriors.

Known sigma gives a multivariate normal centred on beta_hat with precision
X^T X / sigma^2; the prior height cancels and plays no role here.  With
sigma marginalized against the Jeffreys prior the coefficient posterior is
the multivariate Student-t

    Gamma((N+m)/2) |X^T X|^{1/2} ||r||^N
    ------------------------------------------------------------
    Gamma(N/2) pi^{m/2} [||r||^2 + (b - b_hat)^T X^T X (b - b_hat)]^{(N+m)/2}

with r = y - y_hat.  Only density evaluation is provided.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._special import lgamma, log_gamma_ratio
from .design import DesignMatrix
from .errors import DimensionMismatch, NonPositiveSigma, PerfectFit

LNPI = math.log(math.pi)


def _as_design(X):
    return X if isinstance(X, DesignMatrix) else DesignMatrix.from_array(X)


def _deltas(beta, center):
    b = np.asarray(beta, dtype=np.float64)
    m = center.shape[0]
    if b.shape[-1:] != (m,) or b.ndim > 2:
        raise DimensionMismatch(f"beta has shape {b.shape}, expected (..., {m})")
    return b - center


def _check_perfect(fit):
    if fit.is_perfect:
        raise PerfectFit("zero residual: the unknown-sigma posterior is degenerate")


@dataclass(frozen=True, eq=False)
class NormalPosterior:
    mean: np.ndarray
    precision_logdet: float
    sigma: float
    gram: DesignMatrix

    @property
    def m(self):
        return self.mean.shape[0]

    def logpdf(self, beta):
        q = self.gram.quad_form(_deltas(beta, self.mean))
        out = (0.5 * self.gram.gram_logdet - 0.5 * self.m * math.log(2.0 * math.pi * self.sigma ** 2)
               - q / (2.0 * self.sigma ** 2))
        return float(out) if np.ndim(out) == 0 else out

    def pdf(self, beta):
        return np.exp(self.logpdf(beta))

    def covariance(self):
        inv = np.linalg.inv(self.gram.gram)
        return self.sigma ** 2 * inv


@dataclass(frozen=True, eq=False)
class StudentTPosterior:
    center: np.ndarray
    scale_gram: DesignMatrix
    residual_norm: float
    n: int
    m: int

    def logpdf(self, beta):
        return marginal_posterior_logdensity(beta, self)

    def pdf(self, beta):
        return marginal_posterior_density(beta, self)


def posterior_known_sigma(fit, X, nm):
    X = _as_design(X)
    if nm.n != fit.n or X.m != fit.m:
        raise DimensionMismatch("fit, design matrix and noise model disagree on N or m")
    logdet = X.gram_logdet - X.m * math.log(nm.sigma ** 2)
    return NormalPosterior(fit.beta_hat, logdet, nm.sigma, X)


def student_t_posterior(fit, X):
    X = _as_design(X)
    if X.m != fit.m or X.n != fit.n:
        raise DimensionMismatch("fit and design matrix disagree on N or m")
    _check_perfect(fit)
    return StudentTPosterior(fit.beta_hat, X, fit.residual_norm, fit.n, fit.m)


def log_joint_posterior_unknown_sigma(beta, sigma, fit, X):
    """ln p(sigma, beta | y) for the Jeffreys-prior model (A drops out)."""
    X = _as_design(X)
    _check_perfect(fit)
    if not (np.all(np.asarray(sigma) > 0)):
        raise NonPositiveSigma("sigma must be positive")
    n, m, r = fit.n, fit.m, fit.residual_norm
    q = X.quad_form(_deltas(beta, fit.beta_hat))
    s2 = np.asarray(sigma, dtype=np.float64) ** 2
    out = (n * math.log(r) - 0.5 * np.log(s2) + math.log(2.0) + 0.5 * n * LNPI - lgamma(0.5 * n)
           + 0.5 * X.gram_logdet - 0.5 * (n + m) * np.log(2.0 * math.pi * s2)
           - (r * r + q) / (2.0 * s2))
    return float(out) if np.ndim(out) == 0 else out


def marginal_posterior_logdensity(beta, post):
    if not (post.residual_norm > 0):
        raise PerfectFit("zero residual: the Student-t posterior is degenerate")
    n, m, r = post.n, post.m, post.residual_norm
    q = post.scale_gram.quad_form(_deltas(beta, post.center))
    # [r^2 + q]^{(N+m)/2} = r^{N+m} (1 + q/r^2)^{(N+m)/2}
    out = (log_gamma_ratio(0.5 * (n + m), 0.5 * n) + 0.5 * post.scale_gram.gram_logdet
           - 0.5 * m * LNPI - m * math.log(r) - 0.5 * (n + m) * np.log1p(q / (r * r)))
    return float(out) if np.ndim(out) == 0 else out


def marginal_posterior_density(beta, post):
    return np.exp(marginal_posterior_logdensity(beta, post))


def credible_quadratic_level(post, beta):
    """(beta - beta_hat)^T X^T X (beta - beta_hat) / ||y - y_hat||^2."""
    if not (post.residual_norm > 0):
        raise PerfectFit("zero residual: the quadratic level is undefined")
    q = post.scale_gram.quad_form(_deltas(beta, post.center))
    out = q / post.residual_norm ** 2
    return float(out) if np.ndim(out) == 0 else out
