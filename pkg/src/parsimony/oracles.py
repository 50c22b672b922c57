"""Independent numerical checks of the closed forms.

Each oracle recomputes its integrand from primitives (direct residuals,
LU determinants, ``math.lgamma``) and compares the result of a Monte Carlo
average or an adaptive quadrature against the analytic value from the
module it certifies.  Quadrature comparisons are made on log values, so a
tolerance of 1e-6 is a relative tolerance of about 1e-6.

Random streams come from a Philox generator keyed by (seed, check name):
adding a check never perturbs the draws of another.
"""
import math
import zlib
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .design import (Dataset, DesignMatrix, Intercept, ModelSpec, Raw, TruncatedPowerSpline,
                     build_design_matrix)
from .errornorm import APPROXIMATE, NoiseModel, error_norm_mean_var, error_norm_moment, error_norm_pdf
from .errors import DimensionTooLarge, PerfectFit
from .evidence import log_evidence_known_sigma, log_evidence_unknown_sigma
from .ols import fit as ols_fit
from .posterior import (log_joint_posterior_unknown_sigma, marginal_posterior_logdensity,
                        student_t_posterior)
from .prior import PriorSpec

_CHUNK = 10_000_000  # normal variates per MC batch


@dataclass(frozen=True)
class OracleConfig:
    rng_seed: int = 0
    mc_samples: int = 10 ** 6
    quad_rel_tol: float = 1e-8
    mc_se_multiple: float = 4.0
    check_rel_tol: float = 1e-6
    box_half_width: float = 12.0
    sigma_half_width: float = 30.0  # half-width of the u = ln(sigma) window

    def __post_init__(self):
        if self.mc_samples < 1000:
            raise ValueError("mc_samples must be at least 1000")
        if not (0 < self.quad_rel_tol <= 1e-2):
            raise ValueError("quad_rel_tol must lie in (0, 1e-2]")
        if self.rng_seed < 0 or self.rng_seed >= 2 ** 64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")
        if not (self.mc_se_multiple > 0 and self.check_rel_tol > 0 and self.box_half_width > 0):
            raise ValueError("tolerances and widths must be positive")

    def rng(self, check_name):
        key = np.random.SeedSequence([self.rng_seed, zlib.crc32(check_name.encode("utf-8"))])
        return np.random.Generator(np.random.Philox(key))


@dataclass(frozen=True)
class ValidationOutcome:
    check_name: str
    analytic: float
    numeric: float
    tolerance: float
    standard_error: Optional[float] = None
    passed: bool = False

    @classmethod
    def compare(cls, name, analytic, numeric, tolerance, standard_error=None):
        ok = bool(abs(analytic - numeric) <= tolerance)
        return cls(name, float(analytic), float(numeric), float(tolerance),
                   None if standard_error is None else float(standard_error), ok)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


# ---------------------------------------------------------------------------
# ||e|| distribution
# ---------------------------------------------------------------------------

def _sample_error_norms(rng, nm, count):
    rows = max(1, _CHUNK // nm.n)
    out = np.empty(count)
    done = 0
    while done < count:
        b = min(rows, count - done)
        e = rng.standard_normal((b, nm.n))
        out[done:done + b] = nm.sigma * np.sqrt(np.einsum("ij,ij->i", e, e))
        done += b
    return out


def mc_error_norm_moments(nm, cfg):
    """Monte Carlo check of the mean, variance and raw moments 1-4 of ||e||."""
    prefix = f"mc.error_norm.N={nm.n}.sigma={nm.sigma:g}"
    norms = _sample_error_norms(cfg.rng(prefix), nm, cfg.mc_samples)
    count = norms.size
    k = cfg.mc_se_multiple
    outcomes = []

    mean, var = error_norm_mean_var(nm)
    mu = norms.mean()
    dev = norms - mu
    s2 = dev @ dev / (count - 1)
    se_mean = math.sqrt(s2 / count)
    outcomes.append(ValidationOutcome.compare(prefix + ".mean", mean, mu, k * se_mean, se_mean))
    m4 = np.mean(dev ** 4)
    se_var = math.sqrt(max(m4 - s2 * s2, 0.0) / count)
    outcomes.append(ValidationOutcome.compare(prefix + ".variance", var, s2, k * se_var, se_var))

    for r in (1, 2, 3, 4):
        powered = norms ** r
        est = powered.mean()
        se = powered.std(ddof=1) / math.sqrt(count)
        outcomes.append(ValidationOutcome.compare(
            f"{prefix}.moment{r}", error_norm_moment(r, nm), est, k * se, se))
    return outcomes


def second_moment_identity(nm, rel_tol=1e-12):
    target = nm.n * nm.sigma ** 2
    return ValidationOutcome.compare(
        f"identity.second_moment.N={nm.n}.sigma={nm.sigma:g}",
        error_norm_moment(2, nm), target, rel_tol * target)


def quad_error_norm_normalization(nm, cfg, tol=1e-8):
    mode = nm.sigma * math.sqrt(max(nm.n - 1, 0))
    upper = nm.sigma * (math.sqrt(nm.n) + 40.0)
    pts = [mode] if 0 < mode < upper else None
    mass, _ = integrate.quad(lambda r: error_norm_pdf(r, nm), 0.0, upper, points=pts,
                             epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=500)
    return ValidationOutcome.compare(f"quad.error_norm_pdf_mass.N={nm.n}", 1.0, mass, tol)


# ---------------------------------------------------------------------------
# Evidence integrals
# ---------------------------------------------------------------------------

def _oracle_bound_ratio(n, k, mode):
    """max||e|| / sigma recomputed from math.lgamma."""
    if mode == APPROXIMATE:
        return math.sqrt(n - 1) + k
    c = math.sqrt(2.0) * math.exp(math.lgamma((n + 1) / 2.0) - math.lgamma(n / 2.0))
    return c + k * math.sqrt(max(n - c * c, 0.0))


def _residual_norm(X, y):
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(np.linalg.norm(y - X @ beta)), beta


def quad_evidence_known_sigma(fit, X, nm, spec, cfg, name=None):
    """Integrate prior height x Gaussian likelihood over a box around beta_hat."""
    m = X.m
    if m > 2:
        raise DimensionTooLarge(f"coefficient quadrature handles m <= 2, got m = {m}")
    name = name or f"quad.evidence_known_sigma.N={fit.n}.m={m}.{spec.bound_mode}"
    A = np.asarray(X.entries)
    y = np.asarray(fit.y)
    n, s2 = fit.n, nm.sigma ** 2
    analytic = log_evidence_known_sigma(fit, X, nm, spec).log_evidence

    max_e = _oracle_bound_ratio(n, spec.k, spec.bound_mode) * nm.sigma
    gram = A.T @ A
    det = float(np.linalg.det(gram)) if m else 1.0
    log_height = math.lgamma((m + 2) / 2.0) - 0.5 * m * math.log(math.pi) + 0.5 * math.log(det) \
        - m * math.log(max_e)
    _, center = _residual_norm(A, y) if m else (None, np.empty(0))

    def log_lik(beta):
        res = y - A @ beta
        return -0.5 * n * math.log(2.0 * math.pi * s2) - (res @ res) / (2.0 * s2)

    shift = log_lik(center)
    if m == 0:
        return ValidationOutcome.compare(name, analytic, shift + log_height, cfg.check_rel_tol)
    sd = np.sqrt(s2 * np.diag(np.linalg.inv(gram)))
    lo = center - cfg.box_half_width * sd
    hi = center + cfg.box_half_width * sd
    opts = dict(epsabs=0.0, epsrel=cfg.quad_rel_tol)
    if m == 1:
        val, _ = integrate.quad(lambda b: math.exp(log_lik(np.array([b])) - shift), lo[0], hi[0],
                                points=[center[0]], limit=200, **opts)
    else:
        def inner(b0):
            v, _ = integrate.quad(lambda b1: math.exp(log_lik(np.array([b0, b1])) - shift),
                                  lo[1], hi[1], points=[center[1]], limit=200, **opts)
            return v
        val, _ = integrate.quad(inner, lo[0], hi[0], points=[center[0]], limit=200, **opts)
    numeric = math.log(val) + shift + log_height
    return ValidationOutcome.compare(name, analytic, numeric, cfg.check_rel_tol)


def quad_evidence_unknown_sigma(fit, X, spec, cfg, name=None):
    """Integrate A/sigma x known-sigma evidence over u = ln sigma."""
    name = name or f"quad.evidence_unknown_sigma.N={fit.n}.m={fit.m}"
    A = np.asarray(X.entries)
    y = np.asarray(fit.y)
    r, _ = _residual_norm(A, y) if X.m else (float(np.linalg.norm(y)), None)
    if r == 0.0 or fit.is_perfect:
        raise PerfectFit("zero residual: the sigma integral diverges")
    analytic = log_evidence_unknown_sigma(fit, X, spec).log_evidence
    n, m, k = fit.n, fit.m, spec.k
    log_occam = 0.5 * m * math.log(2.0) + math.lgamma((m + 2) / 2.0) - m * math.log(math.sqrt(n - 1) + k)

    def log_f(u):
        # A/sigma * p(y|sigma) * dsigma/du, with dsigma/du = sigma
        s = math.exp(u)
        return (math.log(spec.jeffreys_a) + log_occam - 0.5 * n * math.log(2.0 * math.pi * s * s)
                - r * r / (2.0 * s * s))

    u_star = math.log(r / math.sqrt(n))
    shift = log_f(u_star)
    w = cfg.sigma_half_width
    val, _ = integrate.quad(lambda u: math.exp(log_f(u) - shift), u_star - w, u_star + w,
                            points=[u_star], epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=500)
    return ValidationOutcome.compare(name, analytic, math.log(val) + shift, cfg.check_rel_tol)


# ---------------------------------------------------------------------------
# Student-t posterior
# ---------------------------------------------------------------------------

def quad_student_t_normalization(post, cfg, name=None):
    """Mass of the m = 1 Student-t posterior under beta = beta_hat + r tan(u) / ||x||."""
    if post.m != 1:
        raise DimensionTooLarge(f"Student-t normalization check handles m = 1, got m = {post.m}")
    name = name or f"quad.student_t_mass.N={post.n}"
    x_norm = math.sqrt(float(post.scale_gram.gram[0, 0]))
    r, c = post.residual_norm, float(post.center[0])
    scale = r / x_norm

    def integrand(u):
        t = math.tan(u)
        lp = marginal_posterior_logdensity(np.array([c + scale * t]), post)
        return math.exp(lp) * scale * (1.0 + t * t)

    half = math.pi / 2.0
    mass, _ = integrate.quad(integrand, -half, half, points=[0.0], epsabs=0.0,
                             epsrel=cfg.quad_rel_tol, limit=500)
    return ValidationOutcome.compare(name, 1.0, mass, cfg.check_rel_tol)


def quad_joint_marginalization(beta, fit, X, cfg, name=None):
    """Integrate the joint (sigma, beta) posterior over u = ln sigma at fixed beta."""
    beta = np.asarray(beta, dtype=np.float64)
    name = name or f"quad.joint_to_marginal.N={fit.n}.m={fit.m}"
    post = student_t_posterior(fit, X)
    analytic = marginal_posterior_logdensity(beta, post)
    A = np.asarray(X.entries)
    res = np.asarray(fit.y) - A @ beta
    q_total = float(res @ res)
    u_star = 0.5 * math.log(q_total / (fit.n + fit.m))

    def log_g(u):
        return log_joint_posterior_unknown_sigma(beta, math.exp(u), fit, X) + u

    shift = log_g(u_star)
    w = cfg.sigma_half_width
    val, _ = integrate.quad(lambda u: math.exp(log_g(u) - shift), u_star - w, u_star + w,
                            points=[u_star], epsabs=0.0, epsrel=cfg.quad_rel_tol, limit=500)
    return ValidationOutcome.compare(name, analytic, math.log(val) + shift, cfg.check_rel_tol)


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

def random_problem(rng, n, m, noise=1.0):
    X = rng.standard_normal((n, m))
    beta = rng.normal(0.0, 2.0, m)
    y = X @ beta + noise * rng.standard_normal(n)
    return X, y


def _spline_problem(rng, n=20):
    x = np.sort(rng.uniform(0.0, 10.0, n))
    y = np.sin(x) + 0.3 * rng.standard_normal(n)
    data = Dataset.from_columns(x=x, y=y)
    spec = ModelSpec("y", [Intercept(), Raw("x"), TruncatedPowerSpline("x", 1, (2.5, 5.0, 7.5))],
                     label="spline")
    X = build_design_matrix(data, spec)
    return X, y


def run_suite(cfg=None):
    """Run every oracle with its default instances; outcomes sorted by name."""
    cfg = cfg or OracleConfig()
    out = []
    for n in (1, 3, 10, 100):
        out.extend(mc_error_norm_moments(NoiseModel(1.0, n), cfg))
    out.extend(mc_error_norm_moments(NoiseModel(2.5, 3), cfg))
    for n in (1, 2, 3, 10, 100, 1000, 10000):
        out.append(second_moment_identity(NoiseModel(1.0, n)))
    for n in (1, 2, 3, 10, 50):
        out.append(quad_error_norm_normalization(NoiseModel(1.0, n), cfg))

    for n, m, mode in ((5, 1, "exact"), (5, 1, "approximate"), (8, 2, "exact"), (6, 2, "approximate")):
        name = f"quad.evidence_known_sigma.N={n}.m={m}.{mode}"
        rng = cfg.rng(name)
        A, y = random_problem(rng, n, m)
        sigma = float(rng.uniform(0.5, 2.0))
        X = DesignMatrix.from_array(A)
        f = ols_fit(X, y)
        spec = PriorSpec(k=6.0, bound_mode=mode, sigma=sigma)
        out.append(quad_evidence_known_sigma(f, X, NoiseModel(sigma, n), spec, cfg, name=name))

    # N=2, m=1, k=1, unit residual
    X = DesignMatrix.from_array([[1.0], [0.0]])
    f = ols_fit(X, np.array([0.7, 1.0]))
    out.append(quad_evidence_unknown_sigma(f, X, PriorSpec(k=1.0), cfg,
                                           name="quad.evidence_unknown_sigma.N=2.m=1.k=1.unit_residual"))
    name = "quad.evidence_unknown_sigma.N=20.spline"
    X, y = _spline_problem(cfg.rng(name))
    out.append(quad_evidence_unknown_sigma(ols_fit(X, y), X, PriorSpec(k=6.0), cfg, name=name))
    for n, m in ((10, 3), (15, 2)):
        name = f"quad.evidence_unknown_sigma.N={n}.m={m}"
        A, y = random_problem(cfg.rng(name), n, m)
        X = DesignMatrix.from_array(A)
        out.append(quad_evidence_unknown_sigma(ols_fit(X, y), X, PriorSpec(k=6.0), cfg, name=name))

    for n in (2, 5, 50):
        name = f"quad.student_t_mass.N={n}"
        A, y = random_problem(cfg.rng(name), n, 1)
        X = DesignMatrix.from_array(A)
        out.append(quad_student_t_normalization(student_t_posterior(ols_fit(X, y), X), cfg, name=name))

    for n, m in ((6, 1), (10, 2)):
        name = f"quad.joint_to_marginal.N={n}.m={m}"
        rng = cfg.rng(name)
        A, y = random_problem(rng, n, m)
        X = DesignMatrix.from_array(A)
        f = ols_fit(X, y)
        for i in range(3):
            beta = f.beta_hat + rng.normal(0.0, 0.5, m)
            out.append(quad_joint_marginalization(beta, f, X, cfg, name=f"{name}.point{i}"))

    return sorted(out, key=lambda o: o.check_name)
