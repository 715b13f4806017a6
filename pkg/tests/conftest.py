import math

import numpy as np
import pytest

from tantheta.linalg import OrthonormalFrame, orthonormalize, validate_hermitian


def random_hermitian(rng, n, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return validate_hermitian(scale * (z + z.conj().T) / 2)


def random_frame(rng, n, k):
    return orthonormalize(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_by_two():
    """A = [[2, 0.1], [0.1, 0]] with Q1 = e1."""
    return validate_hermitian([[2.0, 0.1], [0.1, 0.0]]), OrthonormalFrame.coordinate(2, [0])


# 2x2 closed forms for A = [[2, eps], [eps, 0]]: eigenvalues 1 +- sqrt(1 + eps^2),
# the top eigenvector makes angle arctan(eps)/2 with e1.
def exact_tan_2x2(eps):
    return math.tan(0.5 * math.atan(eps))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(RESULTS):
        ok, detail = RESULTS[cid]
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
