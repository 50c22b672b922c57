"""Log-gamma helpers.

``math.lgamma`` is accurate to a few ulp of its *result*, so differences of
two large log-gammas lose digits once N reaches the thousands.  The ratio
helper below avoids that cancellation.
"""
import math

# Bernoulli-number coefficients B_2n / (2n (2n-1)) of the Stirling series.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
_STIRLING_MIN = 10.0


def lgamma(x):
    return math.lgamma(x)


def _stirling_tail(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    power = inv
    for c in _STIRLING:
        acc += c * power
        power *= inv2
    return acc


def log_gamma_ratio(a, b):
    """Return ln Gamma(a) - ln Gamma(b) for a, b > 0.

    Integer offsets use the recurrence; large arguments use the difference
    of two Stirling expansions written in terms of ``log1p``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("log_gamma_ratio needs positive arguments")
    d = a - b
    if d == 0:
        return 0.0
    if d < 0:
        return -log_gamma_ratio(b, a)
    if d == int(d) and d <= 64:
        return math.fsum(math.log(b + i) for i in range(int(d)))
    if b >= _STIRLING_MIN:
        return ((b - 0.5) * math.log1p(d / b) + d * math.log(a) - d
                + _stirling_tail(a) - _stirling_tail(b))
    return math.lgamma(a) - math.lgamma(b)
