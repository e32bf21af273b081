"""Optional numba kernel for the partial-INR combination enumeration.

Semantics match ``scheduler._enumerate_subset`` exactly: per combination,
beams in index order get the highest-rate user (first max wins ties) and a
repeat winner terminates the combination.  Import failure leaves
``HAVE_NUMBA`` false and the numpy path is used instead.
"""

from __future__ import annotations

import math

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def best_combo_for_size(inr, combos, c_over, eligible):
    """Best (mu, n) over all combinations of one size.

    inr: (U, M) float64; combos: (n, s) intp; c_over = s / P;
    eligible: (U, M) uint8 mask (all ones when unused).
    """
    n_users = inr.shape[0]
    n_combos, s = combos.shape
    best_mu = -1.0
    best_n = -1
    winners = [0] * s  # reused scratch
    totals = [0.0] * n_users
    inv_log2 = 1.0 / math.log(2.0)
    for n in range(n_combos):
        for u in range(n_users):
            total = 0.0
            for j in range(s):
                total += inr[u, combos[n, j]]
            totals[u] = total
        mu = 0.0
        count = 0
        for i in range(s):
            q = combos[n, i]
            best_gamma = -1.0
            best_u = 0
            for u in range(n_users):
                if eligible[u, q]:
                    gamma = inr[u, q] / (c_over + totals[u] - inr[u, q])
                else:
                    gamma = 0.0
                if gamma > best_gamma:
                    best_gamma = gamma
                    best_u = u
            dup = False
            for j in range(count):
                if winners[j] == best_u:
                    dup = True
                    break
            if dup:
                break
            winners[count] = best_u
            count += 1
            mu += math.log(1.0 + best_gamma) * inv_log2
        if mu > best_mu:
            best_mu = mu
            best_n = n
    return best_mu, best_n
