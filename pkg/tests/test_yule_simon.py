"""Law and moment checks for the Yule-Simon distribution and process."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta as beta_fn

from nrlevy.errors import DomainError
from nrlevy.rng import RngStream
from nrlevy.yule_simon import (
    CountingPath,
    MemoryParameter,
    ys_cross_moment,
    ys_joint_values,
    ys_mean,
    ys_pmf,
    ys_process_sample,
    ys_process_values,
    ys_sample,
)


def tv_distance(draws: np.ndarray, rho: float) -> float:
    """Total variation between an empirical law on {1,2,...} and the pmf."""
    counts = np.bincount(draws)
    emp = counts[1:] / draws.size
    k = np.arange(1, counts.size)
    pmf = ys_pmf(k, rho)
    return 0.5 * float(np.abs(emp - pmf).sum()) + 0.5 * float(1.0 - pmf.sum())


class TestPmf:
    def test_exact_value_k1_rho2(self):
        # rho * B(1, rho+1) with B(1, 3) = 1/3
        assert ys_pmf(1, 2.0) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_large_rho_limit(self):
        # B(1, rho+1) = 1/(rho+1), so the mass at 1 tends to 1
        assert ys_pmf(1, 1e9) == pytest.approx(1.0, abs=1e-8)

    def test_tail_asymptotics(self):
        # pmf(k) ~ rho * Gamma(rho+1) k^-(rho+1); at rho=2, k=1e4 the ratio
        # is 1/((1+1/k)(1+2/k)), within 1% of 1.
        k = 10**4
        ratio = ys_pmf(k, 2.0) / (2.0 * math.gamma(3.0) * k**-3.0)
        assert abs(ratio - 1.0) < 0.01
        assert ratio == pytest.approx(1.0 / ((1 + 1 / k) * (1 + 2 / k)), rel=1e-10)

    def test_normalization_with_exact_tail(self):
        # At rho=2 the tail telescopes: sum_{k>K} pmf = 2/((K+1)(K+2)).
        big_k = 10**5
        head = ys_pmf(np.arange(1, big_k + 1), 2.0).sum()
        tail = 2.0 / ((big_k + 1) * (big_k + 2))
        assert abs(head - (1.0 - tail)) < 1e-9

    @settings(max_examples=60, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=500),
        rho=st.floats(min_value=0.2, max_value=12.0),
    )
    def test_matches_beta_function(self, k, rho):
        assert ys_pmf(k, rho) == pytest.approx(rho * beta_fn(k, rho + 1.0), rel=1e-11)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ys_pmf(0, 2.0)
        with pytest.raises(DomainError):
            ys_pmf(1, 0.0)
        with pytest.raises(DomainError):
            ys_pmf(1.5, 2.0)


class TestSampler:
    def test_support_and_law(self):
        draws = ys_sample(2.0, RngStream(101).generator(), size=200_000)
        assert draws.min() >= 1
        assert tv_distance(draws, 2.0) < 0.005

    def test_mean_rho4(self):
        draws = ys_sample(4.0, RngStream(102).generator(), size=500_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        assert abs(draws.mean() - 4.0 / 3.0) < 3 * se

    def test_rejects_rho_at_most_one(self):
        with pytest.raises(DomainError):
            ys_sample(1.0, RngStream(1).generator())

    def test_moment_threshold(self):
        # Moments of order q < rho stabilize; q > rho keeps growing with the
        # sample size (infinite moment). Compare running means over prefixes.
        draws = ys_sample(2.0, RngStream(103).generator(), size=400_000).astype(float)
        sizes = np.array([10_000, 40_000, 160_000, 400_000])
        low = [np.mean(draws[:n] ** 1.5) for n in sizes]
        high = [np.mean(draws[:n] ** 2.5) for n in sizes]
        slope_low = np.polyfit(np.log(sizes), np.log(low), 1)[0]
        slope_high = np.polyfit(np.log(sizes), np.log(high), 1)[0]
        assert abs(slope_low) < 0.08
        assert slope_high > 0.15


class TestCountingPath:
    def test_value_counts_jumps(self):
        path = CountingPath(np.array([0.2, 0.5, 0.9]))
        assert path.value(0.1) == 0
        assert path.value(0.2) == 1
        assert path.value(1.0) == 3
        assert path.value(0.0) == 0

    def test_rejects_bad_jump_times(self):
        with pytest.raises(DomainError):
            CountingPath(np.array([0.5, 0.5]))
        with pytest.raises(DomainError):
            CountingPath(np.array([0.0, 0.5]))
        with pytest.raises(DomainError):
            CountingPath(np.array([0.5, 1.5]))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_monotone_on_sampled_paths(self, seed):
        path = ys_process_sample(2.0, RngStream(seed).generator())
        grid = np.linspace(0.0, 1.0, 23)
        vals = path.value(grid)
        assert np.all(np.diff(vals) >= 0)
        assert vals[0] == 0


class TestProcess:
    def test_single_path_structure(self):
        path = ys_process_sample(3.0, RngStream(104).generator())
        times = path.jump_times
        assert np.all(times > 0) and np.all(times <= 1.0)
        assert np.all(np.diff(times) > 0)

    def test_positivity_probability(self):
        vals = ys_process_values(2.0, [0.3], RngStream(105).generator(), 100_000)
        frac = (vals[:, 0] >= 1).mean()
        se = math.sqrt(0.3 * 0.7 / 100_000)
        assert abs(frac - 0.3) < 3 * se

    def test_conditional_terminal_law(self):
        vals = ys_process_values(2.0, [1.0], RngStream(106).generator(), 100_000)[:, 0]
        assert vals.min() >= 1  # positivity holds surely at t = 1
        assert tv_distance(vals, 2.0) < 0.01

    def test_event_and_bridge_samplers_agree(self):
        times = [0.25, 0.6, 1.0]
        ev = ys_process_values(2.0, times, RngStream(107).generator(), 100_000)
        br = ys_joint_values(2.0, times, RngStream(108).generator(), 100_000)
        for g in range(3):
            # pooled two-sample TV over a common support cut
            kmax = 30
            e = np.bincount(np.minimum(ev[:, g], kmax), minlength=kmax + 1) / ev.shape[0]
            b = np.bincount(np.minimum(br[:, g], kmax), minlength=kmax + 1) / br.shape[0]
            assert 0.5 * np.abs(e - b).sum() < 0.01

    def test_self_similarity(self):
        # Conditionally on Y(t) >= 1, s -> Y(s t) is again the same process:
        # its positivity probability at s is s and its conditional terminal
        # law matches the unconditional one at time 1.
        t, s = 0.8, 0.5
        vals = ys_process_values(2.0, [s * t, t], RngStream(109).generator(), 200_000)
        positive = vals[:, 1] >= 1
        frac = (vals[positive, 0] >= 1).mean()
        se = math.sqrt(s * (1 - s) / positive.sum())
        assert abs(frac - s) < 3.5 * se
        assert tv_distance(vals[positive, 1], 2.0) < 0.01

    def test_conditioned_process_matches_plain_sampler(self):
        # Two-sample chi-square on pooled bins: process values at t given
        # positivity against direct Yule-Simon draws.
        from scipy.stats import chi2_contingency

        gen = RngStream(112).generator()
        vals = ys_process_values(2.0, [0.3, 0.7], gen, 100_000)
        direct = ys_sample(2.0, gen, size=100_000)
        for g in (0, 1):
            conditioned = vals[vals[:, g] >= 1, g]
            kmax = 12
            a = np.bincount(np.minimum(conditioned, kmax), minlength=kmax + 1)[1:]
            b = np.bincount(np.minimum(direct, kmax), minlength=kmax + 1)[1:]
            _, pvalue, _, _ = chi2_contingency(np.stack([a, b]))
            assert pvalue > 0.01

    def test_bridge_marginals_match_pmf(self):
        vals = ys_joint_values(2.0, [0.4, 1.0], RngStream(110).generator(), 100_000)
        frac0 = (vals[:, 0] >= 1).mean()
        assert abs(frac0 - 0.4) < 3 * math.sqrt(0.4 * 0.6 / 100_000)
        assert tv_distance(vals[:, 1], 2.0) < 0.01


class TestMoments:
    def test_mean_values(self):
        assert ys_mean(0.0, 7.0) == 0.0
        assert ys_mean(1.0, 4.0) == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert ys_mean(0.5, 2.0) == pytest.approx(1.0, rel=1e-14)

    def test_cross_moment_values(self):
        assert ys_cross_moment(1.0, 1.0, 4.0) == pytest.approx(8.0 / 3.0, rel=1e-14)
        assert ys_cross_moment(0.0, 0.7, 4.0) == 0.0
        # symmetric in its time arguments (swapped internally)
        assert ys_cross_moment(1.0, 0.5, 4.0) == ys_cross_moment(0.5, 1.0, 4.0)

    def test_cross_moment_monte_carlo(self):
        vals = ys_process_values(4.0, [0.5, 1.0], RngStream(111).generator(), 400_000)
        prod = vals[:, 0].astype(float) * vals[:, 1].astype(float)
        se = prod.std(ddof=1) / math.sqrt(prod.size)
        assert abs(prod.mean() - ys_cross_moment(0.5, 1.0, 4.0)) < 3 * se

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            ys_mean(0.5, 1.0)
        with pytest.raises(DomainError):
            ys_cross_moment(0.2, 0.5, 2.0)


class TestMemoryParameter:
    def test_rho_is_reciprocal(self):
        mp = MemoryParameter(0.25)
        assert mp.rho == 4.0

    @settings(max_examples=30, deadline=None)
    @given(p=st.floats(min_value=1e-6, max_value=1 - 1e-9))
    def test_rho_exceeds_one(self, p):
        assert MemoryParameter(p).rho > 1.0

    def test_rejects_out_of_range(self):
        for bad in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(DomainError):
                MemoryParameter(bad)
