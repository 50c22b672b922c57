"""Distribution of the error-vector length ||e|| for e ~ N(0, sigma^2 I_N).

||e|| / sigma is chi-distributed with N degrees of freedom.  The functions
here give its density, raw moments, mean/variance (exact, or the large-N
approximations sqrt(N-1) sigma and sigma^2) and the k-sigma upper bound
used to size the coefficient prior.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._special import lgamma, log_gamma_ratio
from .errors import ApproximationInvalid, NegativeRadius, NonPositiveSigma

EXACT = "exact"
APPROXIMATE = "approximate"
BOUND_MODES = (EXACT, APPROXIMATE)
DEFAULT_K = 6.0


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise NonPositiveSigma(f"sigma must be finite and positive, got {self.sigma!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"sample size must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class ErrorBound:
    k: float
    mode: str
    value: float


def _check_mode(mode):
    if mode not in BOUND_MODES:
        raise ValueError(f"bound mode must be one of {BOUND_MODES}, got {mode!r}")


def error_norm_logpdf(r, nm):
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise NegativeRadius("||e|| cannot be negative")
    n, s2 = nm.n, nm.sigma ** 2
    log_norm = math.log(2.0) - 0.5 * n * math.log(2.0 * s2) - lgamma(0.5 * n)
    with np.errstate(divide="ignore"):
        out = log_norm + (n - 1) * np.log(r) - r * r / (2.0 * s2) if n > 1 \
            else log_norm - r * r / (2.0 * s2)
    return float(out) if out.ndim == 0 else out


def error_norm_pdf(r, nm):
    """Density of ||e|| at ``r`` (scalar or array), evaluated in log space."""
    return np.exp(error_norm_logpdf(r, nm))


def log_error_norm_moment(r_order, nm):
    n = nm.n
    return (0.5 * r_order * math.log(2.0) + log_gamma_ratio(0.5 * (n + r_order), 0.5 * n)
            + r_order * math.log(nm.sigma))


def error_norm_moment(r_order, nm):
    """E(||e||^r) = 2^{r/2} Gamma((N+r)/2) / Gamma(N/2) sigma^r."""
    if int(r_order) != r_order or r_order < 1:
        raise ValueError(f"moment order must be a positive integer, got {r_order!r}")
    return math.exp(log_error_norm_moment(int(r_order), nm))


def _mean_factor(n):
    # sqrt(2) Gamma((N+1)/2) / Gamma(N/2)
    return math.exp(0.5 * math.log(2.0) + log_gamma_ratio(0.5 * (n + 1), 0.5 * n))


def error_norm_mean_var(nm, mode=EXACT):
    _check_mode(mode)
    n, s = nm.n, nm.sigma
    if mode == APPROXIMATE:
        if n < 2:
            raise ApproximationInvalid("the sqrt(N-1) approximation needs N >= 2")
        return math.sqrt(n - 1) * s, s * s
    c = _mean_factor(n)
    return c * s, (n - c * c) * s * s


def max_error_norm(nm, k=DEFAULT_K, mode=EXACT):
    """k-sigma upper bound on ||e||: mean + k * sqrt(variance)."""
    if not (math.isfinite(k) and k >= 0):
        raise ValueError(f"k must be finite and non-negative, got {k!r}")
    mean, var = error_norm_mean_var(nm, mode)
    if mode == APPROXIMATE:
        value = (math.sqrt(nm.n - 1) + k) * nm.sigma
    else:
        value = mean + k * math.sqrt(var)
    return ErrorBound(float(k), mode, value)
