import math

import numpy as np
import pytest

from gompkit import (
    ConditionViolated,
    EmptySupport,
    SparseSignal,
    gen_instance,
    mar,
    snr,
    snr_threshold,
)


class TestSparseSignal:
    def test_from_dense(self):
        x = SparseSignal.from_dense(np.array([0.0, 3.0, 0.0, -2.0]))
        assert x.support == {2, 4}
        assert x.n == 4

    def test_rejects_undeclared_nonzero(self):
        with pytest.raises(ValueError):
            SparseSignal(values=np.array([1.0, 2.0]), support=frozenset({1}))

    def test_rejects_zero_on_support(self):
        with pytest.raises(ValueError):
            SparseSignal(values=np.array([1.0, 0.0]), support=frozenset({1, 2}))

    def test_all_zero_signal_has_empty_support(self):
        x = SparseSignal.from_dense(np.zeros(3))
        assert x.support == frozenset()


class TestSnr:
    def test_zero_noise_is_infinite(self):
        x = SparseSignal.from_dense(np.array([1.0, 0.0]))
        assert snr(np.eye(2), x, np.zeros(2)) == math.inf

    def test_pythagorean_case(self):
        x = SparseSignal.from_dense(np.array([3.0, 0.0, 0.0, 4.0]))
        v = np.array([0.0, 0.0, 5.0, 0.0])
        assert snr(np.eye(4), x, v) == 1.0

    def test_scales_inversely_with_noise(self):
        rng = np.random.default_rng(53)
        a = rng.standard_normal((5, 5))
        x = SparseSignal.from_dense(np.array([0.0, 1.5, 0.0, 0.0, -0.5]))
        v = rng.standard_normal(5)
        base = snr(a, x, v)
        assert abs(snr(a, x, 2.0 * v) - base / 4.0) <= 1e-12 * base

    def test_calibrated_instance_hits_target(self):
        inst = gen_instance(3, 2, noisy=True, seed=808)
        target_root = 0.01 + snr_threshold(3, 2, inst.claimed_delta.value, mar(inst.signal, 3))
        got = snr(inst.matrix, inst.signal, inst.noise)
        assert abs(got - target_root**2) <= 1e-10 * target_root**2


class TestMar:
    def test_flat_signal_is_one(self):
        x = SparseSignal.from_dense(np.array([1.0, 0.0, -1.0, 1.0]))
        assert abs(mar(x, 3) - 1.0) <= 1e-15

    def test_direct_arithmetic(self):
        x = SparseSignal.from_dense(np.array([1.0, 2.0]))
        assert abs(mar(x, 2) - 0.4) <= 1e-15

    def test_empty_support_rejected(self):
        with pytest.raises(EmptySupport):
            mar(SparseSignal.from_dense(np.zeros(3)), 2)

    def test_sparsity_below_support_rejected(self):
        with pytest.raises(ValueError):
            mar(SparseSignal.from_dense(np.array([1.0, 2.0])), 1)

    def test_range_and_flat_characterization(self):
        rng = np.random.default_rng(59)
        for _ in range(30):
            n, k = 10, int(rng.integers(1, 6))
            values = np.zeros(n)
            sup = rng.permutation(n)[:k]
            values[sup] = rng.standard_normal(k)
            x = SparseSignal.from_dense(values)
            got = mar(x, k)
            # independent recomputation from the definition
            nz = values[sup]
            want = min(nz * nz) / ((values @ values) / k)
            assert abs(got - want) <= 1e-12
            assert 0.0 < got <= 1.0
            mags = np.abs(nz)
            assert (got == 1.0) == bool(np.all(mags == mags[0]))

    def test_scale_invariant(self):
        x = SparseSignal.from_dense(np.array([0.0, 2.0, -1.0]))
        scaled = SparseSignal.from_dense(np.array([0.0, -6.0, 3.0]))
        assert abs(mar(x, 2) - mar(scaled, 2)) <= 1e-15


class TestSnrThreshold:
    def test_unit_case(self):
        assert abs(snr_threshold(1, 1, 0.0, 1.0) - math.sqrt(2.0)) <= 1e-15

    def test_hand_computed_value(self):
        # sqrt(8) * 1.2 / (1 - sqrt(5) * 0.2), frozen from a high-precision
        # evaluation of the formula
        assert abs(snr_threshold(4, 1, 0.2, 1.0) - 6.140007283220313) <= 1e-12

    def test_single_pick_formula_identity(self):
        for k, delta, m in [(3, 0.1, 0.7), (5, 0.2, 1.0), (8, 0.05, 0.3)]:
            direct = math.sqrt(2 * k) * (1 + delta) / ((1 - math.sqrt(k + 1) * delta) * math.sqrt(m))
            assert abs(snr_threshold(k, 1, delta, m) - direct) <= 1e-13

    def test_rejects_delta_at_or_past_limit(self):
        limit = 1.0 / math.sqrt(5.0)
        with pytest.raises(ConditionViolated):
            snr_threshold(4, 1, limit, 1.0)
        with pytest.raises(ConditionViolated):
            snr_threshold(4, 1, 0.9, 1.0)

    def test_monotone_in_delta_and_mar(self):
        deltas = np.linspace(0.0, 0.44, 20)
        values = [snr_threshold(4, 1, d, 0.8) for d in deltas]
        assert all(lo < hi for lo, hi in zip(values, values[1:]))
        mars = np.linspace(0.05, 1.0, 20)
        values = [snr_threshold(4, 1, 0.2, m) for m in mars]
        assert all(lo > hi for lo, hi in zip(values, values[1:]))

    def test_below_prior_single_pick_bound(self):
        # the older sufficient bound 2 sqrt(K)(1+d)/((1-(sqrt K + 1)d) sqrt m)
        # is strictly larger wherever it is defined
        rng = np.random.default_rng(61)
        for _ in range(200):
            k = int(rng.integers(1, 30))
            m = float(rng.uniform(0.05, 1.0))
            d = float(rng.uniform(0.0, 1.0 / (math.sqrt(k) + 1.0) * 0.999))
            prior = 2.0 * math.sqrt(k) * (1.0 + d) / ((1.0 - (math.sqrt(k) + 1.0) * d) * math.sqrt(m))
            assert snr_threshold(k, 1, d, m) < prior
