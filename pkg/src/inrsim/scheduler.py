"""User-selection algorithms and SINR reconstruction from INR feedback.

Schedulers implemented:

* ``schedule_dft_sinr``    -- limited scheduling from best-beam SINR reports
* ``schedule_partial_inr`` -- flexible scheduling over one unitary subset,
  enumerating every (subset, size, combination) with the greedy per-beam
  user assignment that stops on a repeat-user conflict
* ``schedule_full_inr``    -- flexible scheduling over the whole codebook,
  exhaustive (optimal assignment, small instances) or greedy
* ``schedule_one_bit_inr`` -- partial-INR scheduling on reconstructed
  {0, SNR, +inf}-style INR vectors from one-bit reports
* ``schedule_rbf``         -- opportunistic max-SINR user per random beam
* ``schedule_zfbf_sus``    -- zero-forcing with semi-orthogonal user selection

Ties break deterministically everywhere: smallest user index, then smallest
flat beam index, then lexicographically smallest (t, s, n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from inrsim import _fastpath
from inrsim.channel import ChannelRealization
from inrsim.codebook import BeamIndex, Codebook
from inrsim.errors import ConfigurationError
from inrsim.feedback import FullInrReport, OneBitInrReport, PartialInrReport, SinrReport

# Exhaustive full-INR search allowed while sum_s C(MT, s) stays below this.
FULL_ENUM_CAP = 10**6
# Partial-INR enumeration allowed while T * 2^M stays below this (covers M=16, T=2).
PARTIAL_ENUM_CAP = 2**20

# Stand-in for an infinite INR when scheduling one-bit reports: any beam
# flagged '1' effectively excludes combinations containing it.
ONE_BIT_BLOCK_INR = 1e12


@dataclass(frozen=True)
class ScheduleDecision:
    """Selected users, their beams/precoders, powers, and predicted SINRs."""

    scheme: str
    users: tuple[int, ...]
    precoders: np.ndarray  # (M, S) unit-norm columns, aligned with users
    powers: np.ndarray  # (S,)
    predicted_sinrs: np.ndarray  # (S,) linear, consistent with the transmission
    predicted_sum_rate: float  # sum log2(1 + predicted_sinrs)
    beams: tuple[BeamIndex, ...] | None = None  # None for non-codebook precoding
    subset_t: int | None = None  # common subset for partial-INR decisions
    objective: float = field(default=float("nan"))  # scheduler's internal maximand

    @property
    def num_selected(self) -> int:
        return len(self.users)

    def validate(self, total_power: float) -> None:
        s = len(self.users)
        if self.precoders.shape[1] != s or len(self.powers) != s or len(self.predicted_sinrs) != s:
            raise AssertionError("decision field lengths disagree")
        if len(set(self.users)) != s:
            raise AssertionError("user selected twice")
        if self.beams is not None and len(set(self.beams)) != s:
            raise AssertionError("beam assigned twice")
        if self.powers.sum() > total_power + 1e-9:
            raise AssertionError("power budget exceeded")
        if self.subset_t is not None and self.beams is not None:
            if any(b.subset_t != self.subset_t for b in self.beams):
                raise AssertionError("beams leave the decision's subset")


@dataclass(frozen=True)
class PilotGrouping:
    """Pilot-sharing partition of the scheduled users and its symbol cost."""

    groups: tuple[tuple[int, ...], ...]
    symbols_used: int


def sinr_from_inrs(inrs, serving_beam: int, active_set, power: float, s: int | None = None) -> float:
    """SINR = INR_q / (s/P + sum of the other active INRs).

    ``inrs`` maps beam index -> linear INR (an array or dict); ``active_set``
    is the set of simultaneously transmitted beams, of size ``s``.
    """
    active = list(active_set)
    if serving_beam not in active:
        raise ValueError("serving beam not in the active set")
    if s is None:
        s = len(active)
    if s < 1 or power <= 0:
        raise ValueError("need s >= 1 and power > 0")
    interference = sum(inrs[j] for j in active if j != serving_beam)
    return float(inrs[serving_beam] / (s / power + interference))


# ---------------------------------------------------------------------------
# DFT-SINR (limited scheduling)
# ---------------------------------------------------------------------------


def schedule_dft_sinr(
    reports: dict[int, SinrReport], codebook: Codebook, power: float
) -> ScheduleDecision:
    """Per-beam best user within each subset, then the best subset by sum rate.

    Powers stay at P/M per beam (the assumption under which users reported);
    predicted SINRs are the reported values, which lower-bound the realized
    SINRs when fewer than M beams end up scheduled.
    """
    m, t_count = codebook.num_antennas, codebook.num_subsets
    if not reports:
        return _empty_decision("dft_sinr", m)
    best_per_beam: dict[tuple[int, int], tuple[int, float]] = {}
    for user in sorted(reports):
        rep = reports[user]
        key = (rep.beam.subset_t, rep.beam.within_m)
        if key not in best_per_beam or rep.sinr > best_per_beam[key][1]:
            best_per_beam[key] = (user, rep.sinr)
    best_t, best_rate = None, -1.0
    for t in range(t_count):
        rate = sum(
            np.log2(1.0 + best_per_beam[(t, b)][1]) for b in range(m) if (t, b) in best_per_beam
        )
        if rate > best_rate:
            best_t, best_rate = t, rate
    users, beams, sinrs = [], [], []
    for b in range(m):
        if (best_t, b) in best_per_beam:
            user, sinr = best_per_beam[(best_t, b)]
            users.append(user)
            beams.append(BeamIndex(subset_t=best_t, within_m=b))
            sinrs.append(sinr)
    s = len(users)
    return ScheduleDecision(
        scheme="dft_sinr",
        users=tuple(users),
        beams=tuple(beams),
        subset_t=best_t,
        precoders=np.stack([codebook.beam(b) for b in beams], axis=1),
        powers=np.full(s, power / m),
        predicted_sinrs=np.asarray(sinrs),
        predicted_sum_rate=float(best_rate),
        objective=float(best_rate),
    )


# ---------------------------------------------------------------------------
# Flexible scheduling from partial INR feedback
# ---------------------------------------------------------------------------

_COMBO_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _combos(m: int, s: int) -> np.ndarray:
    """All s-combinations of range(m) in lexicographic order, shape (C(m,s), s)."""
    key = (m, s)
    if key not in _COMBO_CACHE:
        _COMBO_CACHE[key] = np.array(list(itertools.combinations(range(m), s)), dtype=np.intp)
    return _COMBO_CACHE[key]


def _greedy_single(inr: np.ndarray, combo: np.ndarray, power: float, eligible=None):
    """The per-combination greedy loop for one combination (reference path)."""
    s = len(combo)
    totals = inr[:, combo].sum(axis=1)
    winners = np.zeros(s, dtype=np.intp)
    alive = np.zeros(s, dtype=bool)
    rates = np.zeros(s)
    mu = 0.0
    chosen: set[int] = set()
    for i, q in enumerate(combo):
        gamma = inr[:, q] / (s / power + totals - inr[:, q])
        if eligible is not None:
            gamma = np.where(eligible[:, q], gamma, 0.0)
        u = int(np.argmax(gamma))
        if u in chosen:
            break
        chosen.add(u)
        winners[i] = u
        alive[i] = True
        rates[i] = float(np.log2(1.0 + gamma[u]))
        mu += rates[i]
    return mu, winners, alive, rates


def _enumerate_subset(inr: np.ndarray, power: float, eligible: np.ndarray | None = None):
    """Dispatch to the compiled kernel when numba is available."""
    if _fastpath.HAVE_NUMBA:
        return _enumerate_subset_fast(inr, power, eligible)
    return _enumerate_subset_numpy(inr, power, eligible)


def _enumerate_subset_fast(inr: np.ndarray, power: float, eligible: np.ndarray | None = None):
    n_users, m = inr.shape
    mask = (
        np.ones((n_users, m), dtype=np.uint8)
        if eligible is None
        else eligible.astype(np.uint8)
    )
    inr = np.ascontiguousarray(inr, dtype=np.float64)
    best = None  # (mu, s, n)
    for s in range(1, m + 1):
        combos = _combos(m, s)
        mu, n = _fastpath.best_combo_for_size(inr, combos, s / power, mask)
        if best is None or mu > best[0]:
            best = (mu, s, n)
    mu, s, n = best
    combo = _combos(m, s)[n]
    mu_ref, winners, alive, rates = _greedy_single(inr, combo, power, eligible)
    return (mu_ref, s, combo, winners, alive, rates)


def _enumerate_subset_numpy(inr: np.ndarray, power: float, eligible: np.ndarray | None = None):
    """Greedy per-beam assignment over every (s, n) of one subset, vectorized.

    ``inr``: (U, M) INRs of the users that reported this subset.  Returns
    (mu, s, beams, user_rows, winner_rates) of the best combination, where
    ``user_rows`` are row indices into ``inr``.  The per-combination loop
    assigns, beam by beam in index order, the user with the highest rate; a
    repeat winner terminates that combination's loop (no alternative user is
    sought), so fewer than s beams may be assigned.
    """
    n_users, m = inr.shape
    best = None  # (mu, s, combo_row, winners_row, alive_row, rates_row)
    for s in range(1, m + 1):
        combos = _combos(m, s)
        numer = inr[:, combos]  # (U, n, s)
        denom = s / power + numer.sum(axis=2, keepdims=True) - numer
        gamma = numer / denom
        if eligible is not None:
            gamma = np.where(eligible[:, combos], gamma, 0.0)
        winners = np.argmax(gamma, axis=0)  # (n, s), first max = smallest user row
        wgamma = np.take_along_axis(gamma, winners[None, :, :], axis=0)[0]
        rates = np.log2(1.0 + wgamma)
        alive = np.ones_like(winners, dtype=bool)
        for i in range(1, s):
            dup = (winners[:, i : i + 1] == winners[:, :i]).any(axis=1)
            alive[:, i] = alive[:, i - 1] & ~dup
        mu = (rates * alive).sum(axis=1)
        n_best = int(np.argmax(mu))
        if best is None or mu[n_best] > best[0]:
            best = (
                float(mu[n_best]),
                s,
                combos[n_best],
                winners[n_best],
                alive[n_best],
                rates[n_best],
            )
    return best


def _enumerate_subset_alternative(inr: np.ndarray, power: float, eligible=None):
    """Variant of the enumeration that tries the next-best user on a conflict.

    Off by default; plain Python loop, intended for small instances only.
    """
    n_users, m = inr.shape
    best = None
    for s in range(1, m + 1):
        for combo in itertools.combinations(range(m), s):
            chosen: list[int] = []
            alive = []
            rates = []
            total = inr[:, list(combo)].sum(axis=1)
            for q in combo:
                gamma = inr[:, q] / (s / power + total - inr[:, q])
                if eligible is not None:
                    gamma = np.where(eligible[:, q], gamma, 0.0)
                order = np.argsort(-gamma, kind="stable")
                pick = next((int(u) for u in order if int(u) not in chosen), None)
                if pick is None:
                    alive.append(False)
                    rates.append(0.0)
                    continue
                chosen.append(pick)
                alive.append(True)
                rates.append(float(np.log2(1.0 + gamma[pick])))
            mu = sum(r for r, a in zip(rates, alive) if a)
            if best is None or mu > best[0]:
                winners = np.zeros(s, dtype=np.intp)
                filled = iter(chosen)
                for i, a in enumerate(alive):
                    winners[i] = next(filled) if a else 0
                best = (
                    mu,
                    s,
                    np.array(combo, dtype=np.intp),
                    winners,
                    np.array(alive),
                    np.array(rates),
                )
    return best


def _partial_decision_from_best(
    scheme: str,
    best_t: int,
    best,
    user_ids: list[int],
    inr: np.ndarray,
    codebook: Codebook,
    power: float,
    drop_zero_rate: bool = False,
) -> ScheduleDecision:
    mu, s_star, combo, winners, alive, _rates = best
    beams, users, rows = [], [], []
    for i in range(s_star):
        if not alive[i]:
            continue
        beams.append(int(combo[i]))
        users.append(user_ids[int(winners[i])])
        rows.append(int(winners[i]))
    # Predicted SINRs consistent with what is actually transmitted: power P/s*
    # per beam, interference only from the assigned beams.
    kept_b, kept_u, sinrs = [], [], []
    for b, u, r in zip(beams, users, rows):
        interference = sum(inr[r, j] for j in beams if j != b)
        gamma = inr[r, b] / (s_star / power + interference)
        if drop_zero_rate and gamma <= 1e-12:
            continue
        kept_b.append(b)
        kept_u.append(u)
        sinrs.append(float(gamma))
    beam_idx = tuple(BeamIndex(subset_t=best_t, within_m=b) for b in kept_b)
    sinr_arr = np.asarray(sinrs)
    return ScheduleDecision(
        scheme=scheme,
        users=tuple(kept_u),
        beams=beam_idx,
        subset_t=best_t,
        precoders=(
            np.stack([codebook.beam(b) for b in beam_idx], axis=1)
            if beam_idx
            else np.zeros((codebook.num_antennas, 0), dtype=complex)
        ),
        powers=np.full(len(kept_u), power / s_star),
        predicted_sinrs=sinr_arr,
        predicted_sum_rate=float(np.log2(1.0 + sinr_arr).sum()),
        objective=float(mu),
    )


def schedule_partial_inr(
    reports: dict[int, PartialInrReport],
    codebook: Codebook,
    power: float,
    alternative_user_on_conflict: bool = False,
) -> ScheduleDecision:
    """Flexible scheduling over every (t, s, n) from partial INR reports.

    For each subset t, each size s, and each s-combination n of the subset's
    beams (in index order), a greedy loop assigns the best user per beam among
    users that reported t, terminating on a repeat-user conflict.  The global
    (t*, s*, n*) maximizer of the accumulated sum rate wins; powers are P/s*.
    """
    m, t_count = codebook.num_antennas, codebook.num_subsets
    if t_count * 2**m > PARTIAL_ENUM_CAP:
        raise ConfigurationError(
            f"partial-INR enumeration T*2^M = {t_count * 2**m} exceeds cap {PARTIAL_ENUM_CAP}"
        )
    if not reports:
        return _empty_decision("partial_inr", m)
    enumerate_fn = (
        _enumerate_subset_alternative if alternative_user_on_conflict else _enumerate_subset
    )
    overall = None  # (mu, t, best_tuple, user_ids, inr)
    for t in range(t_count):
        user_ids = [k for k in sorted(reports) if reports[k].subset_t == t]
        if not user_ids:
            continue
        inr = np.stack([reports[k].inrs for k in user_ids])
        best = enumerate_fn(inr, power)
        if overall is None or best[0] > overall[0]:
            overall = (best[0], t, best, user_ids, inr)
    if overall is None:
        return _empty_decision("partial_inr", m)
    _, t_star, best, user_ids, inr = overall
    return _partial_decision_from_best("partial_inr", t_star, best, user_ids, inr, codebook, power)


def schedule_one_bit_inr(
    reports: dict[int, OneBitInrReport], codebook: Codebook, power: float
) -> ScheduleDecision:
    """Partial-INR scheduling on INR vectors reconstructed from one-bit reports.

    Mapping (our interpretation; the underlying algorithm leaves it open): the
    selected beam carries the reported SNR, bit-0 beams count as zero INR, and
    bit-1 beams as effectively infinite INR so combinations containing them
    are excluded.  Users are only eligible to be served on their own reported
    beam.
    """
    m, t_count = codebook.num_antennas, codebook.num_subsets
    if not reports:
        return _empty_decision("one_bit_inr", m)
    overall = None
    for t in range(t_count):
        user_ids = [k for k in sorted(reports) if reports[k].beam.subset_t == t]
        if not user_ids:
            continue
        inr = np.zeros((len(user_ids), m))
        eligible = np.zeros((len(user_ids), m), dtype=bool)
        for row, k in enumerate(user_ids):
            rep = reports[k]
            others = [j for j in range(m) if j != rep.beam.within_m]
            inr[row, rep.beam.within_m] = rep.snr
            inr[row, others] = np.where(rep.bits == 1, ONE_BIT_BLOCK_INR, 0.0)
            eligible[row, rep.beam.within_m] = True
        best = _enumerate_subset(inr, power, eligible=eligible)
        if overall is None or best[0] > overall[0]:
            overall = (best[0], t, best, user_ids, inr)
    _, t_star, best, user_ids, inr = overall
    return _partial_decision_from_best(
        "one_bit_inr", t_star, best, user_ids, inr, codebook, power, drop_zero_rate=True
    )


# ---------------------------------------------------------------------------
# Flexible scheduling from full INR feedback
# ---------------------------------------------------------------------------


def schedule_full_inr(
    reports: dict[int, FullInrReport],
    codebook: Codebook,
    power: float,
    mode: str = "greedy",
) -> ScheduleDecision:
    """Flexible scheduling over beam subsets of the whole codebook.

    ``mode="exhaustive"`` searches every beam subset of every size s <= M with
    an optimal distinct-user assignment (small instances only; the state count
    is capped).  ``mode="greedy"`` repeatedly adds the (user, beam) pair that
    most improves the equal-power sum rate, recomputing every scheduled SINR,
    and stops when no addition helps.
    """
    m = codebook.num_antennas
    if not reports:
        return _empty_decision("full_inr", m)
    if mode == "exhaustive":
        return _full_inr_exhaustive(reports, codebook, power)
    if mode == "greedy":
        return _full_inr_greedy(reports, codebook, power)
    raise ConfigurationError(f"unknown full-INR mode {mode!r}")


def _full_decision(scheme, users, flat_beams, sinrs, codebook, power, s_tx, objective):
    beams = tuple(BeamIndex.from_flat(b, codebook.num_subsets) for b in flat_beams)
    sinr_arr = np.asarray(sinrs, dtype=float)
    return ScheduleDecision(
        scheme=scheme,
        users=tuple(users),
        beams=beams,
        subset_t=None,
        precoders=(
            np.stack([codebook.beam(b) for b in flat_beams], axis=1)
            if flat_beams
            else np.zeros((codebook.num_antennas, 0), dtype=complex)
        ),
        powers=np.full(len(users), power / s_tx) if users else np.zeros(0),
        predicted_sinrs=sinr_arr,
        predicted_sum_rate=float(np.log2(1.0 + sinr_arr).sum()),
        objective=objective,
    )


def _full_inr_exhaustive(reports, codebook, power):
    from scipy.optimize import linear_sum_assignment

    m, size = codebook.num_antennas, codebook.size
    user_ids = sorted(reports)
    inr = np.stack([reports[k].inrs for k in user_ids])  # (K, MT)
    max_s = min(m, len(user_ids))
    states = sum(comb(size, s) for s in range(1, max_s + 1))
    if states > FULL_ENUM_CAP:
        raise ConfigurationError(
            f"exhaustive full-INR search needs {states} states (cap {FULL_ENUM_CAP}); "
            "use mode='greedy'"
        )
    best = None  # (rate, users, beams, sinrs)
    for s in range(1, max_s + 1):
        for combo in itertools.combinations(range(size), s):
            total = inr[:, list(combo)].sum(axis=1)
            gamma = np.empty((len(user_ids), s))
            for i, q in enumerate(combo):
                gamma[:, i] = inr[:, q] / (s / power + total - inr[:, q])
            rate = np.log2(1.0 + gamma)
            rows, cols = linear_sum_assignment(rate, maximize=True)
            val = float(rate[rows, cols].sum())
            if best is None or val > best[0]:
                order = np.argsort(cols)
                best = (
                    val,
                    [user_ids[r] for r in rows[order]],
                    [combo[c] for c in cols[order]],
                    [float(gamma[r, c]) for r, c in zip(rows[order], cols[order])],
                )
    rate, users, flat_beams, sinrs = best
    return _full_decision("full_inr", users, flat_beams, sinrs, codebook, power, len(users), rate)


def _full_inr_greedy(reports, codebook, power):
    size = codebook.size
    user_ids = sorted(reports)
    inr = np.stack([reports[k].inrs for k in user_ids])  # (K, MT)
    chosen_users: list[int] = []  # row indices
    chosen_beams: list[int] = []
    current_rate = 0.0
    max_s = min(codebook.num_antennas, len(user_ids))
    while len(chosen_beams) < max_s:
        s_new = len(chosen_beams) + 1
        free_users = [r for r in range(len(user_ids)) if r not in chosen_users]
        free_beams = [b for b in range(size) if b not in chosen_beams]
        best_add = None  # (rate, user_row, beam)
        for r in free_users:  # user-major order fixes the tie-break
            for b in free_beams:
                beams = chosen_beams + [b]
                rows = chosen_users + [r]
                total = inr[rows][:, beams].sum(axis=1)
                own = inr[rows, beams]
                rate = float(np.log2(1.0 + own / (s_new / power + total - own)).sum())
                if best_add is None or rate > best_add[0]:
                    best_add = (rate, r, b)
        if best_add is None or best_add[0] <= current_rate:
            break
        current_rate, r, b = best_add
        chosen_users.append(r)
        chosen_beams.append(b)
    s_tx = len(chosen_beams)
    total = inr[chosen_users][:, chosen_beams].sum(axis=1)
    own = inr[chosen_users, chosen_beams]
    sinrs = own / (s_tx / power + total - own) if s_tx else np.zeros(0)
    return _full_decision(
        "full_inr",
        [user_ids[r] for r in chosen_users],
        chosen_beams,
        sinrs,
        codebook,
        power,
        max(s_tx, 1),
        current_rate,
    )


# ---------------------------------------------------------------------------
# Random beamforming
# ---------------------------------------------------------------------------


def schedule_rbf(channel: ChannelRealization, beams: np.ndarray, power: float) -> ScheduleDecision:
    """Max-SINR user per random beam, all M beams at power P/M.

    A user winning several beams keeps its best one; the losing beams fall to
    the next-best remaining user, or are dropped when no user is left.
    """
    m = beams.shape[1]
    h = channel.csit
    proj = np.abs(beams.conj().T @ h) ** 2  # (M, K)
    sigma2 = channel.noise_power[None, :]
    gamma = proj / ((m / power) * sigma2 + proj.sum(axis=0, keepdims=True) - proj)
    assigned: dict[int, int] = {}  # beam -> user
    free_users = set(range(channel.num_users))
    free_beams = set(range(m))
    while free_beams and free_users:
        winners: dict[int, list[int]] = {}
        for b in sorted(free_beams):
            cands = sorted(free_users)
            best = max(cands, key=lambda k: (gamma[b, k], -k))
            winners.setdefault(best, []).append(b)
        for user, won in winners.items():
            keep = max(won, key=lambda b: (gamma[b, user], -b))
            assigned[keep] = user
            free_beams.discard(keep)
            free_users.discard(user)
    beams_sel = sorted(assigned)
    users = [assigned[b] for b in beams_sel]
    sinrs = np.array([gamma[b, assigned[b]] for b in beams_sel])
    return ScheduleDecision(
        scheme="rbf",
        users=tuple(users),
        beams=None,
        subset_t=None,
        precoders=beams[:, beams_sel],
        powers=np.full(len(users), power / m),
        predicted_sinrs=sinrs,
        predicted_sum_rate=float(np.log2(1.0 + sinrs).sum()),
        objective=float(np.log2(1.0 + sinrs).sum()),
    )


# ---------------------------------------------------------------------------
# ZFBF with semi-orthogonal user selection
# ---------------------------------------------------------------------------


def _zf_precoders(h_sel: np.ndarray) -> np.ndarray:
    """Unit-norm zero-forcing precoders for the selected channel columns."""
    w = np.linalg.pinv(h_sel.conj().T)  # (M, S), h_j^H w_k = delta_jk before scaling
    return w / np.linalg.norm(w, axis=0, keepdims=True)


def _zf_sum_rate(h_sel: np.ndarray, sigma2: np.ndarray, power: float):
    s = h_sel.shape[1]
    w = _zf_precoders(h_sel)
    p = power / s
    cross = np.abs(h_sel.conj().T @ w) ** 2  # (S, S), row k = user k over precoders
    signal = p * np.diag(cross)
    interference = p * (cross.sum(axis=1) - np.diag(cross))
    sinrs = signal / (sigma2 + interference)
    return float(np.log2(1.0 + sinrs).sum()), sinrs, w


def schedule_zfbf_sus(
    channel: ChannelRealization, power: float, eps_sus: float = 0.3
) -> ScheduleDecision:
    """Greedy semi-orthogonal user selection with zero-forcing precoding.

    Selection and predicted SINRs use the CSIT copy of the channel; realized
    rates are evaluated on the true channel by the metrics module.  Candidates
    must keep their normalized inner product with every selected user's
    channel below ``eps_sus``; among those, the largest residual norm (the
    component orthogonal to the span of selected channels) wins.  Selection
    stops at M users or as soon as adding the best candidate lowers the
    predicted ZF sum rate.
    """
    h = channel.csit
    m, n_users = h.shape
    norms = np.linalg.norm(h, axis=0)
    first = int(np.argmax(norms))
    selected = [first]
    best_rate, sinrs, w = _zf_sum_rate(h[:, selected], channel.noise_power[selected], power)
    while len(selected) < min(m, n_users):
        h_sel = h[:, selected]
        # Residual of each candidate against the span of the selected channels.
        q, _ = np.linalg.qr(h_sel)
        residual = h - q @ (q.conj().T @ h)
        res_norm = np.linalg.norm(residual, axis=0)
        ok = np.ones(n_users, dtype=bool)
        ok[selected] = False
        for j in selected:
            coh = np.abs(h.conj().T @ h[:, j]) / np.maximum(norms * norms[j], 1e-300)
            ok &= coh < eps_sus
        if not ok.any():
            break
        cand = int(np.argmax(np.where(ok, res_norm, -1.0)))
        trial = selected + [cand]
        rate, trial_sinrs, trial_w = _zf_sum_rate(
            h[:, trial], channel.noise_power[trial], power
        )
        if rate <= best_rate:
            break
        selected, best_rate, sinrs, w = trial, rate, trial_sinrs, trial_w
    s = len(selected)
    return ScheduleDecision(
        scheme="zfbf_sus",
        users=tuple(selected),
        beams=None,
        subset_t=None,
        precoders=w,
        powers=np.full(s, power / s),
        predicted_sinrs=np.asarray(sinrs),
        predicted_sum_rate=float(best_rate),
        objective=float(best_rate),
    )


# ---------------------------------------------------------------------------
# Pilot grouping
# ---------------------------------------------------------------------------


def pilot_grouping(
    decision: ScheduleDecision,
    inr_table: dict[int, dict[BeamIndex, float]],
    sharing_threshold_db: float = -20.0,
) -> PilotGrouping:
    """First-fit grouping of scheduled users whose mutual interference is low.

    ``inr_table[user][beam]`` gives user's INR toward each scheduled beam.
    Two users conflict when either one's INR toward the other's beam, relative
    to its own serving-beam INR, reaches the threshold.  One pilot symbol
    carries two groups (2 ports per symbol).
    """
    if decision.beams is None:
        raise ValueError("pilot grouping needs codebook beam indices")
    users = list(decision.users)
    serving = dict(zip(users, decision.beams))
    for u in users:
        if u not in inr_table or any(serving[v] not in inr_table[u] for v in users):
            raise ValueError(f"inr_table incomplete for user {u}")
    threshold = 10.0 ** (sharing_threshold_db / 10.0)

    def conflict(a: int, b: int) -> bool:
        ra = inr_table[a][serving[b]] / max(inr_table[a][serving[a]], 1e-300)
        rb = inr_table[b][serving[a]] / max(inr_table[b][serving[b]], 1e-300)
        return ra >= threshold or rb >= threshold

    groups: list[list[int]] = []
    for u in users:
        for g in groups:
            if all(not conflict(u, v) for v in g):
                g.append(u)
                break
        else:
            groups.append([u])
    symbols = -(-len(groups) // 2)
    return PilotGrouping(groups=tuple(tuple(g) for g in groups), symbols_used=symbols)


def _empty_decision(scheme: str, m: int) -> ScheduleDecision:
    return ScheduleDecision(
        scheme=scheme,
        users=(),
        beams=(),
        subset_t=None,
        precoders=np.zeros((m, 0), dtype=complex),
        powers=np.zeros(0),
        predicted_sinrs=np.zeros(0),
        predicted_sum_rate=0.0,
        objective=0.0,
    )
