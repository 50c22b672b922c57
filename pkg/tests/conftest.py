"""Shared fixtures and slow-but-obvious reference computations."""
import itertools
import math

import numpy as np
import pytest


def cofactor_det(A):
    """Determinant by Laplace expansion along the first row."""
    A = [list(map(float, row)) for row in A]
    n = len(A)
    if n == 0:
        return 1.0
    if n == 1:
        return A[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        total += (-1) ** j * A[0][j] * cofactor_det(minor)
    return total


def cofactor_inverse(A):
    """Adjugate over determinant."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    det = cofactor_det(A)
    adj = np.empty_like(A)
    for i, j in itertools.product(range(n), range(n)):
        minor = np.delete(np.delete(A, i, axis=0), j, axis=1)
        adj[j, i] = (-1) ** (i + j) * cofactor_det(minor)
    return adj / det


def random_problem(rng, n, m, noise=1.0):
    X = rng.standard_normal((n, m))
    y = X @ rng.normal(0.0, 2.0, m) + noise * rng.standard_normal(n)
    return X, y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Acceptance-criterion reporting
# ---------------------------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


class Criterion:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.result = None

    def record(self, ok, detail, elapsed):
        within = elapsed < self.budget
        self.result = (bool(ok) and within,
                       f"{detail}; {elapsed:.2f} s of {self.budget:g} s" + ("" if within else " (over budget)"))
        return self.result[0]


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    c = Criterion(*marker.args)
    yield c
    ok, detail = c.result or (False, "raised before reporting")
    request.config.stash.setdefault(_ACCEPTANCE, []).append((c.number, c.title, ok, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, budget): acceptance criterion")


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, ok, detail in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}")
