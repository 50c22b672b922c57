import math

import pytest
from hypothesis import given, settings, strategies as st

from parsimony._special import log_gamma_ratio

mpmath = pytest.importorskip("mpmath")


def _reference(a, b):
    with mpmath.workdps(40):
        return float(mpmath.loggamma(mpmath.mpf(a)) - mpmath.loggamma(mpmath.mpf(b)))


@pytest.mark.parametrize("a, b", [
    (1.5, 1.0), (3.0, 1.0), (0.5, 2.5), (51.0, 50.0), (50.5, 50.0), (5000.5, 5000.0),
    (1e6 + 0.5, 1e6), (12.25, 10.0), (103.0, 100.5), (7.0, 0.3), (200.0, 100.0),
])
def test_matches_mpmath(a, b):
    assert log_gamma_ratio(a, b) == pytest.approx(_reference(a, b), rel=1e-13, abs=1e-15)


def test_equal_arguments():
    assert log_gamma_ratio(4.2, 4.2) == 0.0


def test_antisymmetric():
    assert log_gamma_ratio(3.5, 12.0) == -log_gamma_ratio(12.0, 3.5)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, -2.0)])
def test_domain(a, b):
    with pytest.raises(ValueError):
        log_gamma_ratio(a, b)


@settings(max_examples=200, deadline=None)
@given(b=st.floats(0.5, 1e5), d=st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0, 0.25, 7.5]))
def test_recurrence_consistency(b, d):
    # Gamma(b + d + 1) / Gamma(b) = (b + d) Gamma(b + d) / Gamma(b)
    lhs = log_gamma_ratio(b + d + 1.0, b)
    rhs = math.log(b + d) + log_gamma_ratio(b + d, b)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-13)
