"""The parsimonious uniform coefficient prior.

Coefficient vectors reachable from error vectors with ||e|| <= max||e||
fill an m-dimensional ellipsoid centred on beta_hat,

    V = pi^{m/2} / Gamma((m+2)/2) * max||e||^m / |X^T X|^{1/2},

and the prior is the uniform density 1/V over it.  Everything is kept in
log scale because V overflows for spline models with hundreds of columns.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._special import lgamma
from .design import DesignMatrix
from .errornorm import BOUND_MODES, DEFAULT_K, EXACT, max_error_norm
from .errors import NonPositiveBound, NonPositiveSigma, NotUnivariate, SigmaModeError

KNOWN = "known"
JEFFREYS = "jeffreys"


@dataclass(frozen=True)
class PriorSpec:
    """Prior configuration.

    ``sigma=None`` selects the Jeffreys prior A/sigma on the noise spread;
    a number fixes sigma.
    """
    k: float = DEFAULT_K
    bound_mode: str = EXACT
    sigma: Optional[float] = None
    jeffreys_a: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ValueError(f"k must be finite and non-negative, got {self.k!r}")
        if self.bound_mode not in BOUND_MODES:
            raise ValueError(f"bound mode must be one of {BOUND_MODES}, got {self.bound_mode!r}")
        if self.sigma is not None and not (math.isfinite(self.sigma) and self.sigma > 0):
            raise NonPositiveSigma(f"sigma must be finite and positive, got {self.sigma!r}")
        if not (math.isfinite(self.jeffreys_a) and self.jeffreys_a > 0):
            raise ValueError(f"Jeffreys constant A must be positive, got {self.jeffreys_a!r}")

    @property
    def sigma_mode(self):
        return JEFFREYS if self.sigma is None else KNOWN


@dataclass(frozen=True, eq=False)
class PriorDensity:
    log_height: float
    log_volume: float
    center: Optional[np.ndarray]
    m: int


def ellipsoid_log_volume(m, max_e, gram_logdet):
    if m < 0 or int(m) != m:
        raise ValueError(f"dimension must be a non-negative integer, got {m!r}")
    if not (max_e > 0):
        raise NonPositiveBound(f"max||e|| must be positive, got {max_e!r}")
    return 0.5 * m * math.log(math.pi) - lgamma(0.5 * (m + 2)) + m * math.log(max_e) - 0.5 * gram_logdet


def prior_log_height(m, max_e, gram_logdet):
    return -ellipsoid_log_volume(m, max_e, gram_logdet)


def parsimonious_prior(X, nm, spec, center=None):
    """Uniform prior over the k-sigma coefficient ellipsoid for known sigma.

    Parameters
    ----------
    X : DesignMatrix
    nm : NoiseModel
        Supplies sigma and N.
    spec : PriorSpec
        Supplies k and the bound mode; must be in known-sigma mode.
    center : array, optional
        beta_hat, recorded on the returned density.
    """
    if spec.sigma_mode != KNOWN:
        raise SigmaModeError("the parsimonious prior is conditional on a known sigma")
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix.from_array(X)
    bound = max_error_norm(nm, spec.k, spec.bound_mode)
    log_volume = ellipsoid_log_volume(X.m, bound.value, X.gram_logdet)
    if center is not None:
        center = np.asarray(center, dtype=np.float64)
    return PriorDensity(-log_volume, log_volume, center, X.m)


def scalar_beta_bounds(fit, x_norm, max_e):
    """Interval beta_hat -/+ max||e|| / ||x|| for a single-column model."""
    if fit.m != 1:
        raise NotUnivariate(f"scalar bounds need m = 1, got m = {fit.m}")
    if not (x_norm > 0):
        raise ValueError("||x|| must be positive")
    if not (max_e > 0):
        raise NonPositiveBound(f"max||e|| must be positive, got {max_e!r}")
    b = float(fit.beta_hat[0])
    half = max_e / x_norm
    return b - half, b + half
