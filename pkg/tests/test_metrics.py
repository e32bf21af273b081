import numpy as np
import pytest

from inrsim import feedback, metrics, scheduler
from inrsim.channel import complex_gaussian, gen_channel
from inrsim.codebook import BeamIndex, build_dft_codebook
from inrsim.scheduler import PilotGrouping, ScheduleDecision


def _decision(scheme, users, precoders, powers, sinrs, beams=None, subset_t=None):
    sinrs = np.asarray(sinrs, dtype=float)
    return ScheduleDecision(
        scheme=scheme,
        users=tuple(users),
        beams=beams,
        subset_t=subset_t,
        precoders=precoders,
        powers=np.asarray(powers, dtype=float),
        predicted_sinrs=sinrs,
        predicted_sum_rate=float(np.log2(1.0 + sinrs).sum()),
    )


class TestExactSinr:
    def test_mrt_single_user(self):
        rng = np.random.default_rng(0)
        h = complex_gaussian(rng, 4)[:, None]
        w = (h[:, 0] / np.linalg.norm(h))[:, None]
        dec = _decision("zfbf_sus", [0], w, [10.0], [0.0])
        got = metrics.exact_sinr(dec, h, np.array([0.5]))
        assert got[0] == pytest.approx(10.0 * np.linalg.norm(h) ** 2 / 0.5, rel=1e-12)

    def test_orthogonal_beams_zero_interference(self):
        h = np.eye(2, dtype=complex)
        dec = _decision("rbf", [0, 1], h.copy(), [3.0, 4.0], [0.0, 0.0])
        got = metrics.exact_sinr(dec, h, np.array([1.0, 2.0]))
        np.testing.assert_allclose(got, [3.0 / 1.0, 4.0 / 2.0], rtol=1e-12)

    def test_matches_direct_recomputation(self):
        rng = np.random.default_rng(1)
        m, s = 4, 3
        h = complex_gaussian(rng, (m, 5))
        w = complex_gaussian(rng, (m, s))
        w /= np.linalg.norm(w, axis=0, keepdims=True)
        p = rng.uniform(0.5, 3.0, s)
        users = [0, 2, 4]
        sigma2 = rng.uniform(0.5, 2.0, 5)
        dec = _decision("full_inr", users, w, p, np.zeros(s))
        got = metrics.exact_sinr(dec, h, sigma2)
        for i, u in enumerate(users):
            sig = p[i] * np.abs(np.vdot(w[:, i], h[:, u])) ** 2
            interf = sum(
                p[j] * np.abs(np.vdot(w[:, j], h[:, u])) ** 2 for j in range(s) if j != i
            )
            assert got[i] == pytest.approx(sig / (sigma2[u] + interf), rel=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        h = complex_gaussian(rng, (4, 3))
        w = complex_gaussian(rng, (4, 2))
        w /= np.linalg.norm(w, axis=0, keepdims=True)
        dec = _decision("rbf", [0, 2], w, [1.0, 2.0], [0.0, 0.0])
        sigma2 = np.array([0.5, 0.8, 1.3])
        alpha = 2.5
        a = metrics.exact_sinr(dec, h, sigma2)
        b = metrics.exact_sinr(dec, alpha * h, abs(alpha) ** 2 * sigma2)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_empty_decision(self):
        dec = scheduler._empty_decision("rbf", 4)
        assert metrics.exact_sinr(dec, np.zeros((4, 2), complex), np.ones(2)).size == 0


class TestSumRate:
    def test_values(self):
        assert metrics.sum_rate(np.array([1.0])) == pytest.approx(1.0)
        assert metrics.sum_rate(np.array([])) == 0.0
        assert metrics.sum_rate(np.array([3.0, 15.0])) == pytest.approx(6.0)


class TestOverheadFactor:
    def test_no_inr_small_s(self):
        for s in (1, 2):
            assert metrics.overhead_factor("zfbf_sus", s) == pytest.approx(10.0 / 14.0)

    def test_no_inr_s16(self):
        assert metrics.overhead_factor("rbf", 16) == pytest.approx(3.0 / 14.0)

    def test_inr_fixed(self):
        for s in (1, 4, 16):
            assert metrics.overhead_factor("partial_inr", s) == pytest.approx(10.0 / 14.0)
            assert metrics.overhead_factor("full_inr", s) == pytest.approx(10.0 / 14.0)

    def test_inr_grouping_derived(self):
        g = PilotGrouping(groups=((0, 1), (2,), (3,)), symbols_used=2)
        got = metrics.overhead_factor("partial_inr", 4, grouping=g, use_grouping=True)
        assert got == pytest.approx(9.0 / 14.0)
        # Flag off: grouping ignored.
        assert metrics.overhead_factor("partial_inr", 4, grouping=g) == pytest.approx(10.0 / 14.0)

    def test_monotone_and_bounded(self):
        vals = [metrics.overhead_factor("zfbf_sus", s) for s in range(1, 17)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert min(vals) >= 3.0 / 14.0 - 1e-12
        assert max(vals) <= 10.0 / 14.0 + 1e-12

    def test_invalid_s(self):
        with pytest.raises(ValueError):
            metrics.overhead_factor("rbf", 0)


class TestAdjustedThroughput:
    def test_product(self):
        assert metrics.adjusted_throughput(6.0, 10.0 / 14.0) == pytest.approx(6.0 * 10.0 / 14.0)

    def test_identity_kappa(self):
        assert metrics.adjusted_throughput(3.7, 1.0) == 3.7

    def test_ordering_can_invert(self):
        a = metrics.adjusted_throughput(10.0, 3.0 / 14.0)
        b = metrics.adjusted_throughput(8.0, 10.0 / 14.0)
        assert a < b

    def test_invalid_kappa(self):
        with pytest.raises(ValueError):
            metrics.adjusted_throughput(1.0, 0.0)
        with pytest.raises(ValueError):
            metrics.adjusted_throughput(1.0, 1.5)


class TestEvaluateDrop:
    def test_partial_inr_predicted_equals_realized_with_exact_csit(self):
        cb = build_dft_codebook(8, 2)
        for seed in range(10):
            ch = gen_channel(8, 12, np.random.default_rng(seed))
            reports = {
                k: feedback.compute_partial_inr(ch.csit[:, k], ch.noise_power[k], cb)
                for k in range(12)
            }
            dec = scheduler.schedule_partial_inr(reports, cb, power=10.0)
            res = metrics.evaluate_drop(dec, ch.h_true, ch.noise_power)
            np.testing.assert_allclose(res.realized_sinrs, dec.predicted_sinrs, rtol=1e-9)
            assert res.sum_rate_raw == pytest.approx(dec.predicted_sum_rate, rel=1e-9)
            # No outage when prediction is exact.
            assert res.sum_rate_outage == pytest.approx(dec.predicted_sum_rate, rel=1e-9)

    def test_adjusted_is_kappa_times_raw(self):
        cb = build_dft_codebook(4, 2)
        ch = gen_channel(4, 6, np.random.default_rng(7))
        reports = {
            k: feedback.compute_partial_inr(ch.csit[:, k], ch.noise_power[k], cb)
            for k in range(6)
        }
        dec = scheduler.schedule_partial_inr(reports, cb, power=10.0)
        res = metrics.evaluate_drop(dec, ch.h_true, ch.noise_power)
        assert res.sum_rate_adjusted == pytest.approx(
            res.overhead_factor * res.sum_rate_raw, rel=1e-12
        )

    def test_outage_mode_charges_zero_on_miss(self):
        # Predicted SINR deliberately above realized: outage rate drops to 0.
        h = np.eye(2, dtype=complex)
        w = h.copy()
        dec = ScheduleDecision(
            scheme="dft_sinr",
            users=(0,),
            beams=(BeamIndex(0, 0),),
            subset_t=0,
            precoders=w[:, :1],
            powers=np.array([1.0]),
            predicted_sinrs=np.array([100.0]),
            predicted_sum_rate=float(np.log2(101.0)),
        )
        res = metrics.evaluate_drop(dec, h, np.ones(2))
        assert res.sum_rate_outage == 0.0
        assert res.sum_rate_raw == pytest.approx(1.0)  # realized gamma = 1

    def test_empty_decision_evaluates_cleanly(self):
        dec = scheduler._empty_decision("partial_inr", 4)
        res = metrics.evaluate_drop(dec, np.zeros((4, 3), complex), np.ones(3))
        assert res.sum_rate_raw == 0.0
        assert res.overhead_factor == 1.0
        assert res.sum_rate_adjusted == 0.0
