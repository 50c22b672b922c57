"""Log-evidence under the parsimonious prior and posterior model probabilities.

Known sigma::

    ln p(y|sigma) = (m/2) ln 2 + ln Gamma((m+2)/2) - m ln(max||e||/sigma)
                    - (N/2) ln(2 pi sigma^2) - ||y - y_hat||^2 / (2 sigma^2)

Unknown sigma (Jeffreys prior A/sigma, large-N bound (sqrt(N-1)+k) sigma)::

    ln p(y) = (m/2) ln 2 + ln Gamma((m+2)/2) - m ln(sqrt(N-1)+k)     Occam
              - N ln ||y - y_hat||                                   goodness of fit
              + ln A + ln Gamma(N/2) - ln 2 - (N/2) ln pi            common

The known-sigma evidence is reported with the same three-way split:
Occam factor, -||y - y_hat||^2/(2 sigma^2) and -(N/2) ln(2 pi sigma^2).
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import logsumexp

from ._special import lgamma
from .design import DesignMatrix
from .errornorm import APPROXIMATE, NoiseModel, max_error_norm
from .errors import (ApproximationInvalid, DimensionMismatch, DuplicateLabel,
                     EmptyModelSet, InvalidPriors, PerfectFit, SigmaModeError)
from .prior import JEFFREYS, KNOWN

LN2 = math.log(2.0)
LNPI = math.log(math.pi)


@dataclass(frozen=True)
class EvidenceReport:
    log_evidence: float
    log_occam: float
    log_gof: float
    log_common: float
    sigma_mode: str
    n: int
    m: int
    k: float
    residual_norm: float
    bound_mode: str
    sigma: Optional[float] = None
    jeffreys_a: Optional[float] = None

    @property
    def log_relative(self):
        """Occam plus goodness-of-fit: the model-dependent part of the evidence."""
        return self.log_occam + self.log_gof


def _log_occam(m, bound_ratio):
    return 0.5 * m * LN2 + lgamma(0.5 * (m + 2)) - m * math.log(bound_ratio)


def log_occam_factor(n, m, k):
    """ln of 2^{m/2} Gamma((m+2)/2) / (sqrt(N-1) + k)^m."""
    if n < 2:
        raise ApproximationInvalid("the Occam factor uses sqrt(N-1) and needs N >= 2")
    if m < 0 or k < 0:
        raise ValueError("m and k must be non-negative")
    return _log_occam(m, math.sqrt(n - 1) + k)


def log_goodness_of_fit(residual_norm, n):
    if not (residual_norm > 0):
        raise PerfectFit("goodness-of-fit factor diverges for a zero residual")
    return -n * math.log(residual_norm)


def log_common_factor(n, jeffreys_a=1.0):
    """ln of A Gamma(N/2) / (2 pi^{N/2})."""
    return math.log(jeffreys_a) + lgamma(0.5 * n) - LN2 - 0.5 * n * LNPI


def _check_dims(fit, X):
    if fit.n != X.n or fit.m != X.m:
        raise DimensionMismatch(f"fit is {fit.n}x{fit.m}, design matrix is {X.n}x{X.m}")


def log_evidence_known_sigma(fit, X, nm, spec):
    if spec.sigma_mode != KNOWN:
        raise SigmaModeError("known-sigma evidence needs a spec with sigma set")
    if spec.sigma != nm.sigma:
        raise SigmaModeError(f"spec sigma {spec.sigma} differs from noise model sigma {nm.sigma}")
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix.from_array(X)
    _check_dims(fit, X)
    if nm.n != fit.n:
        raise DimensionMismatch(f"noise model has N={nm.n}, fit has N={fit.n}")
    n, m, s, r = fit.n, fit.m, nm.sigma, fit.residual_norm
    # max||e|| / sigma does not depend on sigma
    ratio = max_error_norm(NoiseModel(1.0, n), spec.k, spec.bound_mode).value
    log_occam = _log_occam(m, ratio)
    log_gof = -r * r / (2.0 * s * s)
    log_common = -0.5 * n * math.log(2.0 * math.pi * s * s)
    log_ev = (0.5 * m * LN2 + lgamma(0.5 * (m + 2)) - m * math.log(ratio)
              - 0.5 * n * math.log(2.0 * math.pi * s * s) - r * r / (2.0 * s * s))
    return EvidenceReport(log_ev, log_occam, log_gof, log_common, KNOWN, n, m, float(spec.k), r,
                          spec.bound_mode, sigma=s)


def log_evidence_unknown_sigma(fit, X, spec):
    """Evidence with sigma integrated out against the Jeffreys prior.

    Always uses the large-N bound (sqrt(N-1) + k) sigma, whatever
    ``spec.bound_mode`` says; the reported ``bound_mode`` records this.
    """
    if spec.sigma_mode != JEFFREYS:
        raise SigmaModeError("unknown-sigma evidence needs a Jeffreys spec (sigma=None)")
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix.from_array(X)
    _check_dims(fit, X)
    n, m, k, r, a = fit.n, fit.m, spec.k, fit.residual_norm, spec.jeffreys_a
    if n < 2:
        raise ApproximationInvalid("unknown-sigma evidence needs N >= 2")
    if fit.is_perfect:
        raise PerfectFit(f"residual norm {r:g} is zero: the model interpolates the data "
                         "and the unknown-sigma evidence diverges")
    b = math.sqrt(n - 1) + k
    log_occam = log_occam_factor(n, m, k)
    log_gof = log_goodness_of_fit(r, n)
    log_common = log_common_factor(n, a)
    log_ev = (0.5 * m * LN2 + lgamma(0.5 * (m + 2)) - m * math.log(b) - n * math.log(r)
              + math.log(a) + lgamma(0.5 * n) - LN2 - 0.5 * n * LNPI)
    return EvidenceReport(log_ev, log_occam, log_gof, log_common, JEFFREYS, n, m, float(k), r,
                          APPROXIMATE, jeffreys_a=a)


def log_evidence(fit, X, spec):
    """Dispatch on ``spec.sigma_mode``."""
    if spec.sigma_mode == KNOWN:
        return log_evidence_known_sigma(fit, X, NoiseModel(spec.sigma, fit.n), spec)
    return log_evidence_unknown_sigma(fit, X, spec)


# ---------------------------------------------------------------------------
# Posterior model probabilities
# ---------------------------------------------------------------------------

class RankEntry(NamedTuple):
    label: str
    log_evidence: float
    posterior_prob: float


@dataclass(frozen=True)
class ModelRanking:
    entries: tuple
    prior_probs: Optional[tuple] = None

    def prob(self, label):
        for e in self.entries:
            if e.label == label:
                return e.posterior_prob
        raise KeyError(label)

    @property
    def best(self):
        return self.entries[0]


def model_posterior_probs(evidences, priors=None):
    """Posterior probabilities of competing models.

    Parameters
    ----------
    evidences : sequence of (label, log_evidence)
        ``log_evidence`` is a float or an :class:`EvidenceReport`.  When
        every item is a report and all share the same common factor, the
        probabilities are computed from the Occam and goodness-of-fit parts
        only, so the common factor (and the Jeffreys constant A) cancels
        exactly rather than up to rounding.
    priors : sequence of float, optional
        Prior model probabilities aligned with ``evidences``; equal priors
        when omitted.

    Returns
    -------
    ModelRanking
        Entries sorted by posterior probability (descending), ties broken
        by label.
    """
    items = list(evidences)
    if not items:
        raise EmptyModelSet("no models to rank")
    labels = [str(lab) for lab, _ in items]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"duplicate model labels in {labels}")
    values = [ev for _, ev in items]
    reports = all(isinstance(v, EvidenceReport) for v in values)
    if reports and len({v.log_common for v in values}) == 1:
        weights = np.array([v.log_relative for v in values], dtype=np.float64)
    else:
        weights = np.array([v.log_evidence if isinstance(v, EvidenceReport) else v
                            for v in values], dtype=np.float64)
    log_ev = np.array([v.log_evidence if isinstance(v, EvidenceReport) else v
                       for v in values], dtype=np.float64)
    if np.any(np.isnan(weights)):
        raise ValueError("log-evidence values must not be NaN")

    prior_tuple = None
    if priors is not None:
        p = np.asarray(priors, dtype=np.float64)
        if p.shape != (len(items),):
            raise InvalidPriors(f"{p.size} priors given for {len(items)} models")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise InvalidPriors("prior probabilities must be finite and non-negative")
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise InvalidPriors(f"prior probabilities sum to {p.sum()!r}, not 1")
        with np.errstate(divide="ignore"):
            weights = weights + np.log(p)
        prior_tuple = tuple(float(v) for v in p)

    if not np.any(np.isfinite(weights)) or np.any(weights == np.inf):
        raise InvalidPriors("no model has finite positive posterior weight")
    probs = np.exp(weights - logsumexp(weights))
    order = sorted(range(len(items)), key=lambda i: (-probs[i], labels[i]))
    entries = tuple(RankEntry(labels[i], float(log_ev[i]), float(probs[i])) for i in order)
    return ModelRanking(entries, prior_tuple)
