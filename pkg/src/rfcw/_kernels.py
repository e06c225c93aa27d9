"""Hot numeric kernels: log-space spin DP and the Glauber update loop.

Each kernel has a numba ``@njit`` build and a pure numpy/Python fallback.
The active path is chosen at import time: set ``RFCW_DISABLE_NUMBA=1`` in the
environment (or run without numba installed) to force the fallback.
``benchmarks/bench_kernels.py`` times both paths side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np

DISABLE_ENV = "RFCW_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


if _env_disabled():
    numba = None
else:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None

NUMBA_ENABLED = numba is not None


# ---------------------------------------------------------------------------
# Magnetization-resolved log weights.
#
# For fields h and scaled couplings bh_j = beta*h_j, the DP computes
#   logC(s) = log sum over spin configs with sum sigma_i = s of exp(sum_j bh_j sigma_j)
# on the lattice s = -n, -n+2, ..., n (index i <-> s = -n + 2i).  Two rolling
# rows, O(n) memory, O(n^2) logaddexp evaluations.
# ---------------------------------------------------------------------------


def dp_log_weights_numpy(bh: np.ndarray) -> np.ndarray:
    n = bh.shape[0]
    prev = np.array([-bh[0], bh[0]])
    for j in range(1, n):
        a = bh[j]
        cur = np.empty(j + 2)
        cur[0] = prev[0] - a
        cur[j + 1] = prev[j] + a
        np.logaddexp(prev[:-1] + a, prev[1:] - a, out=cur[1 : j + 1])
        prev = cur
    return prev


# ---------------------------------------------------------------------------
# Glauber heat-bath chain.
#
# One call consumes pre-drawn site indices and uniforms (so the random stream
# is owned by the caller and identical for both paths), updates the spin
# vector in place, and appends the running total magnetization to ``out``
# every ``thin`` single-site updates.  ``counter`` carries the thinning phase
# across chunked calls.  The conditional update resamples sigma_i to +1 with
# probability sigmoid(2*beta*(S_wo/n + h_i)); the i=j self-interaction term of
# the Hamiltonian cancels in the conditional, which is why S_wo (the total
# without site i) appears.
# ---------------------------------------------------------------------------


def glauber_chunk_numpy(spins, s_tot, bh2, cbn, sites, u, thin, counter, out, out_pos):
    # Plain-Python loop on lists; kept as the no-JIT fallback path.
    sp = spins.tolist()
    b2 = bh2.tolist()
    st = sites.tolist()
    uu = u.tolist()
    exp = math.exp
    cap = out.shape[0]
    s_tot = int(s_tot)
    for t in range(len(st)):
        i = st[t]
        cur = sp[i]
        arg = cbn * (s_tot - cur) + b2[i]
        if arg > 0.0:
            p_up = 1.0 / (1.0 + exp(-arg)) if arg < 745.0 else 1.0
        else:
            p_up = 1.0 / (1.0 + exp(-arg)) if arg > -745.0 else 0.0
        new = 1 if uu[t] < p_up else -1
        s_tot += new - cur
        sp[i] = new
        counter += 1
        if counter == thin:
            counter = 0
            if out_pos < cap:
                out[out_pos] = s_tot
                out_pos += 1
    spins[:] = sp
    return s_tot, counter, out_pos


if NUMBA_ENABLED:
    from numba import njit

    @njit(cache=True)
    def _logaddexp(a: float, b: float) -> float:
        if a < b:
            a, b = b, a
        if a == -np.inf:
            return -np.inf
        d = b - a
        if d < -745.0:
            return a
        return a + math.log1p(math.exp(d))

    @njit(cache=True)
    def dp_log_weights_numba(bh: np.ndarray) -> np.ndarray:
        n = bh.shape[0]
        prev = np.empty(n + 1)
        cur = np.empty(n + 1)
        prev[0] = -bh[0]
        prev[1] = bh[0]
        for j in range(1, n):
            a = bh[j]
            cur[0] = prev[0] - a
            for i in range(1, j + 1):
                cur[i] = _logaddexp(prev[i - 1] + a, prev[i] - a)
            cur[j + 1] = prev[j] + a
            tmp = prev
            prev = cur
            cur = tmp
        return prev.copy()

    @njit(cache=True, nogil=True)
    def glauber_chunk_numba(spins, s_tot, bh2, cbn, sites, u, thin, counter, out, out_pos):
        for t in range(sites.shape[0]):
            i = sites[t]
            s_wo = s_tot - spins[i]
            arg = cbn * s_wo + bh2[i]
            if arg > 0.0:
                p_up = 1.0 / (1.0 + math.exp(-arg)) if arg < 745.0 else 1.0
            else:
                p_up = 1.0 / (1.0 + math.exp(-arg)) if arg > -745.0 else 0.0
            if u[t] < p_up:
                new = 1
            else:
                new = -1
            s_tot += new - spins[i]
            spins[i] = new
            counter += 1
            if counter == thin:
                counter = 0
                if out_pos < out.shape[0]:
                    out[out_pos] = s_tot
                    out_pos += 1
        return s_tot, counter, out_pos

else:  # pragma: no cover - exercised via RFCW_DISABLE_NUMBA runs
    dp_log_weights_numba = None
    glauber_chunk_numba = None


dp_log_weights = dp_log_weights_numba if NUMBA_ENABLED else dp_log_weights_numpy
glauber_chunk = glauber_chunk_numba if NUMBA_ENABLED else glauber_chunk_numpy
