"""Reinforced-process construction, sampling, and characteristic functions."""

import math
import warnings

import numpy as np
import pytest
from scipy.stats import cauchy as cauchy_dist
from scipy.stats import ks_2samp

from nrlevy.diagnostics import empirical_cf, ks_distance
from nrlevy.errors import ConfigError, DomainError, InadmissibleError, UnsupportedFamilyError
from nrlevy.levy_model import FiniteAtomic, LevyTriplet
from nrlevy.noise_reinforced import (
    CfQuery,
    MarkedAtom,
    NrlpConfig,
    check_additivity,
    check_stability,
    default_truncation,
    nrbm_covariance,
    nrbm_sample,
    nrbm_sample_many,
    nrlp_marginals,
    nrlp_sample,
    reinforced_cf,
    reinforced_cf_exact,
    sample_atoms,
    theoretical_cf,
    truncation_budget,
)
from nrlevy.rng import RngStream
from nrlevy.yule_simon import MemoryParameter


class TestNrbm:
    def test_variance_at_one(self):
        vals = nrbm_sample_many(0.25, [1.0], 1, RngStream(401).generator(), 100_000)
        var = vals[:, 0, 0].var()
        se = 2.0 * math.sqrt(2.0 / 100_000)
        assert abs(var - 2.0) < 3 * se

    def test_covariance_grid(self):
        grid = np.array([0.25, 0.5, 0.75, 1.0])
        vals = nrbm_sample_many(0.25, grid, 1, RngStream(402).generator(), 100_000)[:, :, 0]
        emp = np.cov(vals.T)
        theo = nrbm_covariance(0.25, grid)
        for i in range(4):
            for j in range(4):
                se = math.sqrt((theo[i, i] * theo[j, j] + theo[i, j] ** 2) / 100_000)
                assert abs(emp[i, j] - theo[i, j]) < 3.5 * se

    def test_variance_vanishes_at_zero(self):
        vals = nrbm_sample_many(0.3, [1e-6, 1.0], 1, RngStream(403).generator(), 50_000)
        assert vals[:, 0, 0].var() < 1e-5

    def test_small_p_is_brownian(self):
        grid = np.array([0.4, 1.0])
        theo = nrbm_covariance(1e-9, grid)
        np.testing.assert_allclose(theo, np.array([[0.4, 0.4], [0.4, 1.0]]), rtol=1e-6)

    def test_leading_zero_time(self):
        path = nrbm_sample(0.25, [0.0, 0.5, 1.0], 2, RngStream(404).generator())
        np.testing.assert_array_equal(path.values[0], 0.0)

    def test_rejects_large_p(self):
        with pytest.raises(InadmissibleError):
            nrbm_sample(0.5, [1.0], 1, RngStream(1).generator())

    def test_coordinates_independent(self):
        vals = nrbm_sample_many(0.25, [1.0], 2, RngStream(405).generator(), 100_000)
        corr = np.corrcoef(vals[:, 0, 0], vals[:, 0, 1])[0, 1]
        assert abs(corr) < 0.015


class TestConfig:
    def test_rejects_inadmissible(self):
        with pytest.raises(InadmissibleError):
            NrlpConfig(LevyTriplet.brownian(), MemoryParameter(0.6))

    def test_rejects_bad_eps_and_grid(self):
        trip = LevyTriplet.cauchy()
        with pytest.raises(ConfigError):
            NrlpConfig(trip, MemoryParameter(0.5), truncation_eps=0.0)
        with pytest.raises(ConfigError):
            NrlpConfig(trip, MemoryParameter(0.5), grid=np.array([0.5, 0.5]))
        with pytest.raises(ConfigError):
            NrlpConfig(trip, MemoryParameter(0.5), grid=np.array([0.5, 1.5]))

    def test_marked_atom_rejects_zero_jump(self):
        from nrlevy.yule_simon import ZERO_PATH

        with pytest.raises(DomainError):
            MarkedAtom(np.zeros(2), ZERO_PATH)


class TestAtoms:
    def test_atomic_count_matches_mass(self):
        trip = LevyTriplet.compound_poisson([[1.5]], [2.0])
        cfg = NrlpConfig(trip, MemoryParameter(0.5), 0.5, np.array([1.0]))
        gen = RngStream(406).generator()
        counts = [len(sample_atoms(cfg, gen)) for _ in range(3_000)]
        # thinned mass is (1 - p) * 2 = 1
        assert np.mean(counts) == pytest.approx(1.0, abs=3 * np.std(counts) / math.sqrt(3_000))

    def test_thinning_direction(self):
        trip = LevyTriplet.compound_poisson([[1.5]], [2.0])
        gen = RngStream(407).generator()
        means = []
        for p in (0.2, 0.8):
            cfg = NrlpConfig(trip, MemoryParameter(p), 0.5, np.array([1.0]))
            means.append(np.mean([len(sample_atoms(cfg, gen)) for _ in range(2_000)]))
        assert means[0] == pytest.approx(1.6, abs=0.1)
        assert means[1] == pytest.approx(0.4, abs=0.06)

    def test_marks_independent_of_jump_sizes(self):
        cfg = NrlpConfig(LevyTriplet.stable(1.5), MemoryParameter(0.5), 0.05, np.array([1.0]))
        gen = RngStream(408).generator()
        sizes, terminals = [], []
        while len(sizes) < 100_000:
            for atom in sample_atoms(cfg, gen):
                sizes.append(abs(atom.jump[0]))
                terminals.append(atom.mark.terminal)
        # Rank-based to tame the heavy tail of |x|.
        from scipy.stats import spearmanr

        corr = spearmanr(sizes[:100_000], terminals[:100_000]).statistic
        assert abs(corr) < 0.01

    def test_atom_jumps_above_cutoff(self):
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 0.3, np.array([1.0]))
        for atom in sample_atoms(cfg, RngStream(409).generator()):
            assert abs(atom.jump[0]) >= 0.3


class TestNrlpSampling:
    def test_pure_drift_path(self):
        cfg = NrlpConfig(LevyTriplet.pure_drift([2.0]), MemoryParameter(0.5),
                         grid=np.array([0.0, 0.5, 1.0]))
        path = nrlp_sample(cfg, RngStream(410).generator())
        np.testing.assert_allclose(path.values[:, 0], [0.0, 1.0, 2.0])

    def test_zero_time_value(self):
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-2,
                         np.array([0.0, 1.0]))
        vals = nrlp_marginals(cfg, RngStream(411), 200)
        np.testing.assert_array_equal(vals[:, 0, 0], 0.0)

    def test_cauchy_fixed_point_moderate_scale(self):
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-3,
                         np.array([0.5, 1.0]))
        vals = nrlp_marginals(cfg, RngStream(412), 30_000)
        assert ks_distance(vals[:, 0, 0], cauchy_dist(scale=0.5).cdf) < 0.02
        assert ks_distance(vals[:, 1, 0], cauchy_dist(scale=1.0).cdf) < 0.02

    def test_truncation_refinement_stability(self):
        # Admissible configs are Cauchy-stable under cutoff refinement.
        base = dict(grid=np.array([1.0]))
        a = nrlp_marginals(
            NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-3, **base),
            RngStream(413), 30_000,
        )[:, 0, 0]
        b = nrlp_marginals(
            NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-4, **base),
            RngStream(414), 30_000,
        )[:, 0, 0]
        assert ks_2samp(a, b).statistic < 0.015

    def test_compensated_band_is_centered(self):
        # Symmetric measure: the small-jump band has mean zero at every time.
        cfg = NrlpConfig(LevyTriplet.stable(1.5), MemoryParameter(0.5), 1e-2,
                         np.array([0.5, 1.0]))
        vals = nrlp_marginals(cfg, RngStream(415), 50_000)[:, :, 0]
        se = vals.std(axis=0) / math.sqrt(vals.shape[0])
        assert np.all(np.abs(vals.mean(axis=0)) < 3 * se)

    def test_asymmetric_atomic_compensation(self):
        # One-sided small atoms: the compensated sampler still centers the band.
        trip = LevyTriplet.compound_poisson([[0.5]], [4.0])
        cfg = NrlpConfig(trip, MemoryParameter(0.5), 0.1, np.array([0.5, 1.0]))
        vals = nrlp_marginals(cfg, RngStream(416), 50_000)[:, :, 0]
        se = vals.std(axis=0) / math.sqrt(vals.shape[0])
        assert np.all(np.abs(vals.mean(axis=0)) < 3.5 * se)

    def test_single_path_and_batched_routes_agree(self):
        # nrlp_sample builds full event-based marks per atom; nrlp_marginals
        # bridges marks at the grid. Same law, different code paths.
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-2,
                         np.array([1.0]))
        gen = RngStream(430).generator()
        singles = np.array([nrlp_sample(cfg, gen).values[0, 0] for _ in range(3_000)])
        batched = nrlp_marginals(cfg, RngStream(431), 30_000)[:, 0, 0]
        assert ks_2samp(singles, batched).statistic < 0.035

    def test_coordinate_independence(self):
        # Axis-supported jumps plus diagonal Gaussian part: the joint ECF
        # factorizes into the product of marginal ECFs.
        trip = LevyTriplet(
            2,
            np.eye(2),
            None,
            FiniteAtomic(np.array([[1.5, 0.0], [0.0, 1.5], [-1.5, 0.0], [0.0, -1.5]]),
                         np.array([0.4, 0.4, 0.4, 0.4])),
        )
        cfg = NrlpConfig(trip, MemoryParameter(0.3), 0.5, np.array([1.0]))
        vals = nrlp_marginals(cfg, RngStream(417), 100_000)
        th = np.array([0.8, -0.6])
        joint = np.exp(1j * vals[:, 0, :] @ th).mean()
        prod = (np.exp(1j * th[0] * vals[:, 0, 0]).mean()
                * np.exp(1j * th[1] * vals[:, 0, 1]).mean())
        assert abs(joint - prod) < 5 / math.sqrt(100_000)


class TestTheoreticalCf:
    def test_brownian_single_time(self):
        est = reinforced_cf(LevyTriplet.brownian(), 0.25,
                            CfQuery(np.array([1.0]), np.array([1.0])),
                            400_000, RngStream(418).generator())
        assert est.value == pytest.approx(math.exp(-1.0 / (2 * 0.5)), abs=4 * est.value_se + 1e-3)
        assert not est.diverged

    def test_cauchy_modulus(self):
        for t, th in ((1.0, 1.0), (0.5, 2.0)):
            est = reinforced_cf(LevyTriplet.cauchy(), 0.5,
                                CfQuery(np.array([th]), np.array([t])),
                                400_000, RngStream(419).generator())
            assert abs(est.value) == pytest.approx(math.exp(-t * th), abs=0.004)

    def test_zero_query_is_one(self):
        est = reinforced_cf(LevyTriplet.cauchy(), 0.5,
                            CfQuery(np.array([0.0]), np.array([1.0])),
                            1_000, RngStream(420).generator())
        assert est.value == 1.0

    def test_repeated_times_merge(self):
        q_split = CfQuery(np.array([0.4, 0.6]), np.array([1.0, 1.0]))
        q_merged = CfQuery(np.array([1.0]), np.array([1.0]))
        a = reinforced_cf_exact(LevyTriplet.brownian(), 0.25, q_split)
        b = reinforced_cf_exact(LevyTriplet.brownian(), 0.25, q_merged)
        assert a == pytest.approx(b, rel=1e-12)

    def test_divergence_flag_when_supercritical(self):
        est = reinforced_cf(LevyTriplet.stable(1.5), 0.8,
                            CfQuery(np.array([1.0]), np.array([1.0])),
                            400_000, RngStream(421).generator())
        assert est.diverged

    def test_exact_vs_mc(self):
        query = CfQuery(np.array([0.6, 0.8]), np.array([0.5, 1.0]))
        exact = reinforced_cf_exact(LevyTriplet.brownian(), 0.3, query)
        mc = reinforced_cf(LevyTriplet.brownian(), 0.3, query, 2_000_000,
                           RngStream(422).generator())
        # second-moment MC converges slowly (heavy tails); generous band
        assert abs(exact - mc.value) < 10 * mc.value_se + 0.01
        exact_c = reinforced_cf_exact(LevyTriplet.cauchy(), 0.5, query)
        mc_c = reinforced_cf(LevyTriplet.cauchy(), 0.5, query, 2_000_000,
                             RngStream(423).generator())
        assert abs(exact_c - mc_c.value) < 6 * mc_c.value_se + 2e-3

    def test_exact_unsupported_cases(self):
        with pytest.raises(UnsupportedFamilyError):
            reinforced_cf_exact(LevyTriplet.stable(1.5), 0.5,
                                CfQuery(np.array([0.5, 1.0]), np.array([0.5, 1.0])))
        with pytest.raises(UnsupportedFamilyError):
            reinforced_cf_exact(LevyTriplet.compound_poisson([[1.0]], [1.0]), 0.5,
                                CfQuery(np.array([1.0]), np.array([1.0])))

    def test_theoretical_cf_uses_config(self):
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), 1e-3, np.array([1.0]))
        est = theoretical_cf(cfg, CfQuery(np.array([1.0]), np.array([1.0])),
                             200_000, RngStream(424).generator())
        assert abs(est.value) == pytest.approx(math.exp(-1.0), abs=0.005)


class TestProperties:
    def test_additivity_pure_drifts(self):
        # Pure drifts satisfy additivity identically; with independent Monte
        # Carlo runs on each side the discrepancy is pure phase noise.
        rep = check_additivity(
            LevyTriplet.pure_drift([1.0]), LevyTriplet.pure_drift([-0.3]), 0.5,
            CfQuery(np.array([0.9]), np.array([1.0])), RngStream(425), mc_replicas=200_000,
        )
        assert abs(rep.combined.value) == pytest.approx(1.0, abs=1e-12)
        assert rep.discrepancy < 4 * rep.pooled_se
        assert rep.discrepancy < 0.01

    def test_additivity_with_zero_triplet(self):
        rep = check_additivity(
            LevyTriplet.cauchy(), LevyTriplet(1), 0.5,
            CfQuery(np.array([1.0]), np.array([1.0])), RngStream(426), mc_replicas=100_000,
        )
        # the zero part contributes cf 1, so the product is the single cf
        assert rep.parts[1].value == pytest.approx(1.0)
        assert rep.discrepancy < 4 * rep.pooled_se + 1e-3

    def test_additivity_brownian_cauchy(self):
        rep = check_additivity(
            LevyTriplet.brownian(), LevyTriplet.cauchy(), 0.3,
            CfQuery(np.array([0.6, 0.8]), np.array([0.5, 1.0])), RngStream(427),
            mc_replicas=400_000,
        )
        assert rep.discrepancy < 3 * rep.pooled_se + 3e-3

    def test_stability_trivial_scale(self):
        rep = check_stability(1.5, 0.5, CfQuery(np.array([1.0]), np.array([1.0])),
                              RngStream(428), scales=(1.0,), mc_replicas=100_000)
        assert rep.ratios[0] == pytest.approx(1.0, rel=0.05)

    def test_stability_gaussian(self):
        rep = check_stability(2.0, 0.25, CfQuery(np.array([0.5]), np.array([1.0])),
                              RngStream(429), scales=(2.0,), mc_replicas=400_000)
        assert rep.ratios[0] == pytest.approx(4.0, rel=0.05)

    def test_stability_rejects_supercritical(self):
        with pytest.raises(InadmissibleError):
            check_stability(1.5, 0.8, CfQuery(np.array([1.0]), np.array([1.0])),
                            RngStream(1))


class TestBudget:
    def test_budget_monotone_in_cutoff(self):
        trip = LevyTriplet.cauchy()
        budgets = [
            truncation_budget(NrlpConfig(trip, MemoryParameter(0.5), eps, np.array([1.0])))
            for eps in (1e-2, 1e-3, 1e-4)
        ]
        assert budgets[0] > budgets[1] > budgets[2] > 0

    def test_default_truncation_meets_budget(self):
        eps = default_truncation(LevyTriplet.cauchy(), 0.5, budget=1e-2)
        cfg = NrlpConfig(LevyTriplet.cauchy(), MemoryParameter(0.5), eps, np.array([1.0]))
        assert truncation_budget(cfg) <= 1.05e-2

    def test_default_truncation_floors_for_heavy_activity(self):
        with pytest.warns(UserWarning):
            eps = default_truncation(LevyTriplet.stable(1.9), 0.5, budget=1e-3, floor=1e-6)
        assert eps == 1e-6
