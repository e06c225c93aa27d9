"""Shared independent oracles for the test suite.

These stay deliberately naive (exhaustive enumeration, bisection, finite
differences) and never call the code paths they are used to check.
"""

import numpy as np
import pytest
from scipy.special import logsumexp


def brute_force_log_pmf(h_values, beta):
    """Exhaustive 2^n enumeration of the Gibbs law of the total magnetization."""
    h = np.asarray(h_values, dtype=float)
    n = h.size
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    sigma = 2 * bits - 1
    s_tot = sigma.sum(axis=1)
    log_w = beta * s_tot**2 / (2.0 * n) + beta * (sigma @ h)
    log_z = logsumexp(log_w)
    s_lattice = np.arange(-n, n + 1, 2)
    log_p = np.array(
        [logsumexp(log_w[s_tot == s]) - log_z for s in s_lattice]
    )
    return s_lattice, log_p, float(log_z)


def bisect_root(f, lo, hi, iters=200):
    """Plain bisection; assumes a sign change on [lo, hi]."""
    flo = f(lo)
    assert flo * f(hi) < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
        if hi - lo < 1e-16 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def cw_beta2_minimum():
    """Fixed point m = tanh(2m) of the zero-field model at beta = 2."""
    return bisect_root(lambda m: m - np.tanh(2.0 * m), 0.5, 1.0)
