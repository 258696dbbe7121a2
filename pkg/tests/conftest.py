import numpy as np
import pytest

from displab.experiments import depierro_sets
from displab.operators import compose


def grid_project_hyperbola(p):
    """Brute-force nearest point on ``{(t, 1/t) : t > 0}`` by a log-t grid.

    Coarse pass at step 1e-3 in log t over [1e-3, 50], then a fine pass at
    step 1e-5 around the coarse winner.  Points already in the set map to
    themselves.
    """
    a, b = float(p[0]), float(p[1])
    if a > 0 and b >= 1.0 / a:
        return np.array([a, b])

    def best(log_t):
        t = np.exp(log_t)
        d = (t - a) ** 2 + (1.0 / t - b) ** 2
        return log_t[np.argmin(d)]

    coarse = best(np.arange(np.log(1e-3), np.log(50.0), 1e-3))
    fine = best(np.arange(coarse - 2e-3, coarse + 2e-3, 1e-5))
    t = np.exp(fine)
    return np.array([t, 1.0 / t])


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def depierro():
    return depierro_sets()


@pytest.fixture
def depierro_cyclic(depierro):
    p1, p2, p3 = depierro
    return compose([p1, p2, p3])


@pytest.fixture
def depierro_noncyclic(depierro):
    p1, p2, p3 = depierro
    return compose([p2, p1, p3])


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
