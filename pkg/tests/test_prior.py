import math

import numpy as np
import pytest

from parsimony.design import DesignMatrix, gram_logdet, gram_schmidt
from parsimony.errornorm import NoiseModel, max_error_norm
from parsimony.errors import NonPositiveBound, NotUnivariate, SigmaModeError
from parsimony.ols import fit
from parsimony.prior import (PriorSpec, ellipsoid_log_volume, parsimonious_prior, prior_log_height,
                             scalar_beta_bounds)

# 30-digit mpmath: ln(16 pi / 3) and ln(1 / (256 pi))
LN_16PI_3 = 2.81870631942107172
LN_HEIGHT_M2 = -6.68990733032896265


def _mc_volume(rng, m, max_e, gram, samples=400_000):
    """Hit-or-miss estimate of vol{b : b^T G b <= max_e^2} inside its bounding box."""
    half = max_e * np.sqrt(np.diag(np.linalg.inv(gram)))
    pts = rng.uniform(-half, half, size=(samples, m))
    inside = np.einsum("ij,jk,ik->i", pts, gram, pts) <= max_e ** 2
    box = float(np.prod(2 * half))
    p = inside.mean()
    return box * p, box * math.sqrt(p * (1 - p) / samples)


class TestEllipsoidVolume:
    def test_line_piece(self):
        assert ellipsoid_log_volume(1, 1.0, 0.0) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_unit_disc(self):
        assert ellipsoid_log_volume(2, 1.0, 0.0) == pytest.approx(math.log(math.pi), rel=1e-15)

    def test_m3(self, rng):
        assert ellipsoid_log_volume(3, 2.0, math.log(4.0)) == pytest.approx(LN_16PI_3, rel=1e-14)
        gram = np.diag([4.0, 1.0, 1.0])
        vol, se = _mc_volume(rng, 3, 2.0, gram)
        assert abs(vol - math.exp(LN_16PI_3)) <= 4 * se

    @pytest.mark.parametrize("m", [2, 3])
    def test_random_gram_monte_carlo(self, rng, m):
        A = rng.standard_normal((m + 4, m))
        gram = A.T @ A
        vol, se = _mc_volume(rng, m, 1.7, gram)
        analytic = math.exp(ellipsoid_log_volume(m, 1.7, gram_logdet(A)))
        assert abs(vol - analytic) <= 4 * se

    def test_bad_bound(self):
        with pytest.raises(NonPositiveBound):
            ellipsoid_log_volume(2, 0.0, 0.0)

    def test_huge_m_finite(self):
        assert math.isfinite(ellipsoid_log_volume(500, 1e3, 4000.0))


class TestPriorHeight:
    def test_half(self):
        assert prior_log_height(1, 1.0, 0.0) == pytest.approx(math.log(0.5), rel=1e-15)

    def test_line_piece_formula(self):
        # 16 = sqrt(100) + 6 for N = 101, k = 6
        assert prior_log_height(1, 16.0, 0.0) == pytest.approx(math.log(1 / 32), rel=1e-15)

    def test_inverse_of_volume(self, rng):
        X = rng.standard_normal((9, 4))
        lg = gram_logdet(X)
        assert math.exp(prior_log_height(4, 3.3, lg) + ellipsoid_log_volume(4, 3.3, lg)) == \
            pytest.approx(1.0, abs=1e-12)

    def test_gram_schmidt_route(self, rng):
        # orthogonalized column norms give the same height as the determinant route
        X = rng.standard_normal((7, 3))
        norms = np.linalg.norm(gram_schmidt(X), axis=0)
        via_gs = math.lgamma(2.5) - 1.5 * math.log(math.pi) + float(np.sum(np.log(norms))) - 3 * math.log(2.0)
        assert prior_log_height(3, 2.0, gram_logdet(X)) == pytest.approx(via_gs, rel=1e-10)

    def test_sigma_doubling(self, rng):
        X = DesignMatrix.from_array(rng.standard_normal((12, 3)))
        spec1 = PriorSpec(k=6.0, sigma=1.0)
        spec2 = PriorSpec(k=6.0, sigma=2.0)
        h1 = parsimonious_prior(X, NoiseModel(1.0, 12), spec1).log_height
        h2 = parsimonious_prior(X, NoiseModel(2.0, 12), spec2).log_height
        assert h1 - h2 == pytest.approx(3 * math.log(2.0), rel=1e-13)


class TestParsimoniousPrior:
    def test_m1_approximate(self):
        X = np.zeros((101, 1))
        X[0, 0] = 1.0
        p = parsimonious_prior(X, NoiseModel(1.0, 101), PriorSpec(6.0, "approximate", sigma=1.0))
        assert p.log_height == pytest.approx(math.log(1 / 32), rel=1e-15)
        assert p.m == 1

    def test_m2_identity(self):
        X = np.zeros((101, 2))
        X[0, 0] = X[1, 1] = 1.0
        p = parsimonious_prior(X, NoiseModel(1.0, 101), PriorSpec(6.0, "approximate", sigma=1.0))
        assert p.log_height == pytest.approx(LN_HEIGHT_M2, rel=1e-14)
        assert p.log_height == pytest.approx(-math.log(math.pi * 256), rel=1e-14)

    def test_needs_known_sigma(self):
        with pytest.raises(SigmaModeError):
            parsimonious_prior(np.eye(3)[:, :1], NoiseModel(1.0, 3), PriorSpec())

    def test_center_recorded(self, rng):
        A = rng.standard_normal((6, 2))
        p = parsimonious_prior(A, NoiseModel(1.0, 6), PriorSpec(sigma=1.0), center=[1.0, 2.0])
        np.testing.assert_array_equal(p.center, [1.0, 2.0])


class TestScalarBounds:
    def test_example(self):
        f = fit(np.array([[1.0], [0.0]]), np.array([2.0, 5.0]))
        assert scalar_beta_bounds(f, 1.0, 3.0) == (-1.0, 5.0)

    def test_collapse(self):
        f = fit(np.array([[1.0], [0.0]]), np.array([2.0, 5.0]))
        lo, hi = scalar_beta_bounds(f, 1.0, 1e-300)
        assert lo == hi == 2.0

    def test_not_univariate(self, rng):
        f = fit(rng.standard_normal((5, 2)), rng.standard_normal(5))
        with pytest.raises(NotUnivariate):
            scalar_beta_bounds(f, 1.0, 1.0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_truncated_errors_stay_in_ellipsoid(rng, m):
    """Any y = X b_hat + e with ||e|| <= max||e|| refits to a point inside the ellipsoid."""
    n = 12
    X = DesignMatrix.from_array(rng.standard_normal((n, m)))
    y = X.entries @ rng.normal(size=m) + rng.standard_normal(n)
    f = fit(X, y)
    max_e = max_error_norm(NoiseModel(1.0, n), 6.0).value
    e = rng.standard_normal((4000, n))
    e *= (max_e * rng.uniform(0, 1, (4000, 1)) ** (1 / n)) / np.linalg.norm(e, axis=1, keepdims=True)
    beta = np.linalg.lstsq(X.entries, (f.y_hat[:, None] + e.T), rcond=None)[0].T
    q = X.quad_form(beta - f.beta_hat)
    assert np.all(q <= max_e ** 2 * (1 + 1e-9))
