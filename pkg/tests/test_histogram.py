import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guesswork import (
    EnumerationCapError,
    LogProductHistogram,
    MarkovSource,
    SymbolDistribution,
    guesswork_exact,
    guesswork_from_histogram,
    guesswork_quantified,
    histogram_enumerate,
    histogram_sample,
    load_distribution,
    quantization_interval,
    replicate_estimate,
)
from guesswork.histogram import Z_99

from conftest import distributions, random_instances


def contains(est, value, slack=1e-12):
    lo, hi = est.interval
    return lo - slack <= math.log(value) <= hi + slack


@pytest.fixture(scope="module")
def pair():
    return load_distribution([0.7, 0.3])


class TestEnumerate:
    def test_uniform_single_bin(self):
        h = histogram_enumerate(SymbolDistribution.uniform(4), 3, 8)
        assert h.delta == 0 and h.counts == pytest.approx([64.0], rel=1e-14)

    def test_hand_binning(self, pair):
        h = histogram_enumerate(pair, 2, 2)
        assert h.delta == pytest.approx(0.5 * math.log(7 / 3), rel=1e-14)
        assert h.edges() - h.offset == pytest.approx(h.delta * np.arange(5))
        # ln(7/3) sits on the 2*delta boundary, which goes to the higher bin
        assert h.counts.tolist() == [1.0, 0.0, 2.0, 1.0]

    def test_mass_conservation(self, skewed10):
        h = histogram_enumerate(skewed10, 5, 10)
        assert h.counts.sum() == pytest.approx(1e5, rel=1e-12)
        assert h.counts.size == 50

    @pytest.mark.parametrize("backend", ["convolve", "full"])
    def test_first_order_backends_conserve(self, skewed10, backend):
        h = histogram_enumerate(skewed10, 4, 16, backend)
        assert h.counts.sum() == pytest.approx(1e4, rel=1e-9)

    def test_dp_chain_conserves_with_zero_mass(self, english):
        h = histogram_enumerate(english, 6, 8, "dp-chain")
        assert h.counts.sum() + h.zero_mass == pytest.approx(26.0 ** 6, rel=1e-9)
        assert h.zero_mass > 0

    def test_dp_chain_matches_full_zero_count(self, english):
        full = histogram_enumerate(english, 3, 8, "full")
        dp = histogram_enumerate(english, 3, 8, "dp-chain")
        assert dp.zero_mass == pytest.approx(full.zero_mass, rel=1e-9)

    def test_backend_mismatch(self, skewed10, english):
        with pytest.raises(TypeError):
            histogram_enumerate(skewed10, 3, 4, "dp-chain")
        with pytest.raises(TypeError):
            histogram_enumerate(english, 3, 4, "convolve")
        with pytest.raises(ValueError):
            histogram_enumerate(skewed10, 3, 4, "fft")

    def test_cap(self, skewed10):
        with pytest.raises(EnumerationCapError):
            histogram_enumerate(skewed10, 6, 4, cap=10 ** 5)

    def test_mass_check_on_construction(self):
        with pytest.raises(ValueError):
            LogProductHistogram(1.0, 0.0, [0.0, 0.0], math.log(3.0), 1, 3, 1, 2, "full")


class TestQuantifiedValue:
    def test_uniform_reduces_to_closed_form(self):
        est = guesswork_quantified(SymbolDistribution.uniform(10), 3, 64)
        assert est.value == pytest.approx(500.5, rel=1e-13)

    def test_pair_within_interval(self, pair):
        est = guesswork_quantified(pair, 2, 64)
        assert contains(est, 1.90)

    def test_ten_symbols_within_interval(self, skewed10):
        exact = guesswork_exact(skewed10, 5).value
        est = guesswork_quantified(skewed10, 5, 256)
        assert contains(est, exact)
        assert abs(est.value / exact - 1) < 0.01

    def test_english_pairs_within_interval(self, english):
        exact = guesswork_exact(english, 2).value
        for backend in ("full", "dp-chain"):
            assert contains(guesswork_quantified(english, 2, 32, backend), exact)

    @pytest.mark.parametrize("m", [3, 4])
    def test_english_dp_chain_interval(self, english, m):
        exact = guesswork_exact(english, m).value
        assert contains(guesswork_quantified(english, m, 16, "dp-chain"), exact)

    def test_empty_histogram(self):
        h = LogProductHistogram(1.0, 0.0, [-math.inf, -math.inf], 0.0, 1, 1, 2, 2, "sample",
                                0.0)
        with pytest.raises(ValueError):
            guesswork_from_histogram(h)


class TestInterval:
    def test_uniform(self):
        assert quantization_interval(SymbolDistribution.uniform(5), 3, 10) == 1.0

    @pytest.mark.parametrize("N,expected,tol", [(10, 1.1002, 5e-5), (1000, 1.000956, 5e-7)])
    def test_ten_symbols(self, skewed10, N, expected, tol):
        ratio = 0.185430 / 0.027448
        assert quantization_interval(skewed10, 7, N) == pytest.approx(ratio ** (1 / (2 * N)),
                                                                      rel=1e-13)
        assert quantization_interval(skewed10, 7, N) == pytest.approx(expected, abs=tol)

    def test_second_order_formula(self, english):
        p = english.initial
        P = english.transitions
        nz = P[P > 0]
        m, N = 5, 8
        expected = ((p.max() / p.min()) ** (1 / (2 * m * N))
                    * (nz.max() / nz.min()) ** ((m - 1) / (2 * m * N)))
        assert quantization_interval(english, m, N) == pytest.approx(expected, rel=1e-12)

    def test_factorised_backends_widen_to_power_m(self, skewed10):
        q = quantization_interval(skewed10, 4, 10)
        assert quantization_interval(skewed10, 4, 10, "convolve") == pytest.approx(q ** 4)

    @settings(max_examples=60, deadline=None)
    @given(distributions(max_n=6, min_n=2), st.integers(1, 4), st.sampled_from([2, 8, 32]))
    def test_containment_all_backends(self, d, m, N):
        exact = guesswork_exact(d, m).value
        for backend in ("full", "convolve"):
            assert contains(guesswork_quantified(d, m, N, backend), exact, 1e-10)

    def test_random_chains_contained(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(2, 5))
            P = rng.uniform(size=(n, n)) * (rng.uniform(size=(n, n)) > 0.3)
            P[np.arange(n), rng.integers(0, n, n)] += 0.1
            P /= P.sum(axis=1, keepdims=True)
            src = MarkovSource(P).with_stationary()
            m = int(rng.integers(2, 6))
            exact = guesswork_exact(src, m).value
            for backend in ("full", "dp-chain"):
                assert contains(guesswork_quantified(src, m, 8, backend), exact, 1e-10)

    def test_refinement(self):
        instances = random_instances(50, seed=5, max_n=6, max_m=4, max_words=2000)
        errors = {N: [] for N in (2, 4, 8, 16, 32)}
        for d, m in instances:
            exact = guesswork_exact(d, m).value
            prev = None
            for N in errors:
                est = guesswork_quantified(d, m, N)
                errors[N].append(abs(est.value - exact) / exact)
                if prev is not None:
                    # finer interval overlaps the coarser one
                    assert est.interval[0] <= prev.interval[1] + 1e-12
                    assert est.interval[1] >= prev.interval[0] - 1e-12
                prev = est
        means = [np.mean(v) for v in errors.values()]
        assert all(a >= b for a, b in zip(means, means[1:]))


class TestSample:
    def test_uniform_exact(self):
        h = histogram_sample(SymbolDistribution.uniform(3), 4, 8, 50, seed=0)
        assert h.counts == pytest.approx([81.0], rel=1e-14)

    def test_seed_determinism(self, skewed10):
        a = histogram_sample(skewed10, 6, 16, 1000, seed=3)
        b = histogram_sample(skewed10, 6, 16, 1000, seed=3)
        assert a.log_counts.tobytes() == b.log_counts.tobytes()

    def test_unbiased(self, pair):
        ref = histogram_enumerate(pair, 4, 4).counts
        reps = np.array([histogram_sample(pair, 4, 4, 50, seed=s).counts for s in range(200)])
        se = reps.std(axis=0, ddof=1) / math.sqrt(len(reps))
        assert np.all(np.abs(reps.mean(axis=0) - ref) <= 3 * se + 1e-9)

    def test_scaling(self, skewed10):
        h = histogram_sample(skewed10, 3, 4, 10, seed=1)
        # 30 draws, each worth 1000/30 words
        unit = 1000 / 30
        assert np.allclose(h.counts / unit, np.round(h.counts / unit))

    def test_english_zero_fraction_grows(self, english):
        fracs = []
        for m in (5, 10, 20):
            h = histogram_sample(english, m, 8, 100_000 // m, seed=m)
            fracs.append(h.zero_mass / h.total_weight)
        assert fracs[0] < fracs[1] < fracs[2]

    def test_replicates_uniform_collapse(self):
        s = replicate_estimate(SymbolDistribution.uniform(4), 5, 8, 100, 5, seed=1)
        assert s.rel_std == 0 and s.R == 0
        assert s.ci == pytest.approx(((4 ** 5 + 1) / 2,) * 2, rel=1e-13)

    def test_quantile_constant(self):
        assert Z_99 == 2.58

    def test_replicate_interval_formula(self, skewed10):
        s = replicate_estimate(skewed10, 4, 16, 500, 8, seed=2)
        vals = np.exp(s.log_values)
        mean, sd = vals.mean(), vals.std(ddof=1)
        R = 2.58 * sd / (mean * math.sqrt(8))
        assert s.mean == pytest.approx(mean, rel=1e-12)
        assert s.ci == pytest.approx(((1 - R) * mean, (1 + R) * mean), rel=1e-10)

    def test_replicates_independent_of_threads(self, skewed10):
        a = replicate_estimate(skewed10, 5, 16, 300, 6, seed=9)
        b = replicate_estimate(skewed10, 5, 16, 300, 6, seed=9, n_jobs=3)
        assert a.log_values.tobytes() == b.log_values.tobytes()

    def test_needs_two_replicates(self, skewed10):
        with pytest.raises(ValueError):
            replicate_estimate(skewed10, 3, 4, 10, 1)
