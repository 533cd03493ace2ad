"""Monte Carlo simulator: samplers, determinism, oracles, dynamics."""

import math

import numpy as np
import pytest

from ecodiv import SurvivalModel, make_community, simulate, survival_vs_diversity_sweep
from ecodiv.errors import InvalidModelError
from ecodiv.survival import (
    _mc_py,
    _simulate_with_kernel,
    initial_counts,
    kernel_name,
)

try:
    from ecodiv.survival import _mc_cy
except ImportError:
    _mc_cy = None

needs_compiled = pytest.mark.skipif(
    _mc_cy is None, reason="compiled kernel not built"
)


class _StubRng:
    """Feeds predetermined uniforms to the samplers."""

    def __init__(self, *values):
        self.values = list(values)

    def uniform(self):
        return self.values.pop(0)


class TestModelValidation:
    def test_accepts_defaults(self):
        SurvivalModel(population_size=100)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"population_size": 1},
            {"population_size": 100, "shock_rate": -0.1},
            {"population_size": 100, "shock_rate": 1.5},
            {"population_size": 100, "shock_kill_fraction": 2.0},
            {"population_size": 100, "targeting_exponent": -1.0},
            {"population_size": 100, "horizon": 0},
            {"population_size": 100, "trials": 0},
            {"population_size": 100, "seed": -1},
            {"population_size": 100, "seed": 2**64},
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(InvalidModelError):
            SurvivalModel(**kwargs)


class TestInitialCounts:
    def test_exact_quarters(self, community_a):
        counts = initial_counts(community_a, 100)
        assert counts.tolist() == [25, 25, 25, 25]

    def test_largest_remainder_assignment(self):
        c = make_community("r", [("a", 0.405), ("b", 0.404), ("c", 0.191)])
        # 10 * p = (4.05, 4.04, 1.91): floors (4, 4, 1), one leftover goes
        # to the largest fraction, c.
        assert initial_counts(c, 10).tolist() == [4, 4, 2]

    def test_total_preserved_random(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            s = int(rng.integers(1, 30))
            weights = rng.random(s) + 1e-9
            c = make_community("r", [(f"s{i}", w) for i, w in enumerate(weights)],
                               unit="count")
            n = int(rng.integers(2, 10000))
            assert initial_counts(c, n).sum() == n

    def test_zero_share_species_start_extinct(self, community_b):
        assert initial_counts(community_b, 100).tolist() == [25, 75, 0, 0]


class TestBinomialSampler:
    def test_matches_inverse_cdf_oracle(self):
        # scipy's ppf is an independent inverse-CDF implementation
        # (incomplete beta) of the same definition: smallest k with
        # CDF(k) >= u.
        binom = pytest.importorskip("scipy.stats").binom
        rng = np.random.default_rng(77)
        for _ in range(2000):
            n = int(rng.integers(0, 400))
            p = float(rng.random())
            u = float(rng.uniform(1e-12, 1.0))
            mine = _mc_py._binomial(n, p, _StubRng(u))
            ref = int(binom.ppf(u, n, p)) if n > 0 else 0
            assert mine == ref, (n, p, u)

    def test_log_space_prefix_for_large_n(self):
        binom = pytest.importorskip("scipy.stats").binom
        for n, p in [(2000, 0.6), (5000, 0.3), (1200, 0.9)]:
            for u in (1e-12, 0.25, 0.5, 0.75, 0.9999999):
                assert _mc_py._binomial(n, p, _StubRng(u)) == int(binom.ppf(u, n, p))

    def test_degenerate_cases_consume_one_uniform(self):
        rng = _StubRng(0.3, 0.3, 0.3)
        assert _mc_py._binomial(0, 0.5, rng) == 0
        assert _mc_py._binomial(10, 0.0, rng) == 0
        assert _mc_py._binomial(10, 1.0, rng) == 10
        assert rng.values == []


class TestTrajectories:
    def run_trajectory(self, **overrides):
        params = dict(
            counts0=[40, 30, 20, 10],
            n_pop=100,
            shock_rate=0.4,
            kill_fraction=0.5,
            targeting_exponent=2.0,
            horizon=300,
            seed=99,
            trial=0,
        )
        params.update(overrides)
        return _mc_py.trial_count_trajectory(**params)

    def test_conservation_every_step(self):
        for trial in range(20):
            for states in (self.run_trajectory(trial=trial),
                           self.run_trajectory(trial=trial, kill_fraction=0.9)):
                for counts in states:
                    assert sum(counts) == 100

    def test_absorption_is_permanent(self):
        for trial in range(30):
            states = self.run_trajectory(trial=trial, shock_rate=0.6)
            dead = set()
            for counts in states:
                for i in dead:
                    assert counts[i] == 0
                dead |= {i for i, c in enumerate(counts) if c == 0}

    def test_total_kill_of_last_species_is_absorbing(self):
        # kill_fraction 1 on a lone species empties the population; the
        # trial must stay dead rather than resurrect.
        died = 0
        for trial in range(200):
            states = self.run_trajectory(
                counts0=[100], shock_rate=1.0, kill_fraction=1.0,
                targeting_exponent=0.0, horizon=5, trial=trial,
            )
            assert states[1] == (0,)
            assert all(s == (0,) for s in states[1:])
            died += 1
        assert died == 200

    def test_no_dynamics_without_variance(self):
        # A single species with no shocks can never change.
        states = self.run_trajectory(counts0=[100], shock_rate=0.0, horizon=50)
        assert all(s == (100,) for s in states)


class TestDeterminism:
    @pytest.fixture
    def model(self):
        return SurvivalModel(
            population_size=100,
            shock_rate=0.25,
            shock_kill_fraction=0.7,
            targeting_exponent=1.5,
            horizon=120,
            trials=150,
            seed=31415,
        )

    def test_repeat_runs_identical(self, community_c, model):
        assert simulate(community_c, model) == simulate(community_c, model)

    def test_thread_count_is_invisible(self, community_c, model):
        reports = [simulate(community_c, model, threads=t) for t in (1, 2, 7)]
        assert reports[0] == reports[1] == reports[2]

    def test_seed_changes_results(self, community_c, model):
        other = SurvivalModel(
            population_size=100, shock_rate=0.25, shock_kill_fraction=0.7,
            targeting_exponent=1.5, horizon=120, trials=150, seed=31416,
        )
        assert simulate(community_c, model) != simulate(community_c, other)

    @needs_compiled
    def test_kernels_bit_identical_chunks(self):
        counts0 = np.array([40, 30, 20, 10], dtype=np.int64)
        for seed, sr, kf, tau in [
            (1, 0.0, 0.5, 0.0),
            (2, 0.3, 0.5, 2.0),
            (3, 1.0, 1.0, 0.0),
            (4, 0.1, 0.25, 5.0),
        ]:
            outs = []
            for kernel in (_mc_py, _mc_cy):
                ext = np.zeros(4, dtype=np.int64)
                tte = np.zeros(4, dtype=np.int64)
                alive2 = np.zeros(81, dtype=np.int64)
                div = np.zeros(81, dtype=np.float64)
                kernel.run_chunk(counts0, 100, sr, kf, tau, 80, seed, 0, 64,
                                 ext, tte, alive2, div)
                outs.append((ext, tte, alive2, div))
            for a, b in zip(*outs):
                # bit-for-bit, including the float diversity sums
                assert np.array_equal(a, b)

    @needs_compiled
    def test_kernels_identical_reports(self, community_c, model):
        assert _simulate_with_kernel(
            community_c, model, 2, _mc_py
        ) == _simulate_with_kernel(community_c, model, 3, _mc_cy)

    def test_kernel_name_reports_selection(self):
        assert kernel_name() in ("compiled", "python")


class TestReportShape:
    def test_single_species_no_shocks(self):
        solo = make_community("solo", [("only", 1.0)])
        model = SurvivalModel(population_size=50, shock_rate=0.0, horizon=40,
                              trials=100, seed=1)
        report = simulate(solo, model)
        fate = report.per_species[0]
        assert fate.extinction_probability == 0.0
        assert fate.censored
        assert fate.mean_time_to_extinction == 40.0
        # one species can never make an "alive >= 2" ecosystem
        assert all(fraction == 0.0 for _, fraction in report.survival_curve)
        assert all(d == 1.0 for d in report.diversity_trajectory)

    def test_survival_curve_non_increasing(self, community_c):
        model = SurvivalModel(population_size=60, shock_rate=0.3,
                              shock_kill_fraction=0.8, targeting_exponent=1.0,
                              horizon=150, trials=300, seed=5)
        report = simulate(community_c, model)
        fractions = [f for _, f in report.survival_curve]
        assert all(0.0 <= f <= 1.0 for f in fractions)
        for hi, lo in zip(fractions, fractions[1:]):
            assert lo <= hi

    def test_probabilities_and_censoring(self, community_c):
        model = SurvivalModel(population_size=60, shock_rate=0.3,
                              shock_kill_fraction=0.8, targeting_exponent=1.0,
                              horizon=150, trials=300, seed=5)
        report = simulate(community_c, model)
        assert report.trials_run == 300
        assert report.seed == 5
        for fate in report.per_species:
            assert 0.0 <= fate.extinction_probability <= 1.0
            assert 0.0 <= fate.mean_time_to_extinction <= 150.0
            assert fate.censored == (fate.extinction_probability < 1.0)

    def test_zero_share_species_extinct_at_step_zero(self, community_b):
        model = SurvivalModel(population_size=100, shock_rate=0.0, horizon=10,
                              trials=50, seed=9)
        report = simulate(community_b, model)
        for fate in report.per_species[2:]:
            assert fate.extinction_probability == 1.0
            assert fate.mean_time_to_extinction == 0.0
            assert not fate.censored


class TestNeutralDriftOracle:
    def test_fixation_probability_equals_initial_frequency(self):
        # Wright-Fisher drift: the chance a species takes over is its
        # starting frequency, so the 1:3 minority dies in ~75% of trials.
        c = make_community("B", [("s1", 0.25), ("s2", 0.75)])
        model = SurvivalModel(population_size=100, shock_rate=0.0,
                              horizon=1000, trials=2000, seed=271828)
        report = simulate(c, model)
        minority = report.per_species[0].extinction_probability
        majority = report.per_species[1].extinction_probability
        sigma = math.sqrt(0.75 * 0.25 / model.trials)
        assert abs(minority - 0.75) <= 3 * sigma + 1e-3
        assert abs(majority - 0.25) <= 3 * sigma + 1e-3


class TestShockDirectionality:
    def test_uniform_community_outlives_skewed(self):
        # Same shock regime; the monoculture-ish community should lose
        # its ecosystem (>= 2 species alive) much more often.
        uniform4 = make_community("u4", [(f"s{i}", 0.25) for i in range(4)])
        skewed = make_community("skew", [("big", 0.91), ("mid", 0.07),
                                         ("small", 0.02)])
        model = SurvivalModel(population_size=100, shock_rate=0.2,
                              shock_kill_fraction=0.5, targeting_exponent=2.0,
                              horizon=300, trials=10000, seed=11)
        f_uniform = simulate(uniform4, model).ecosystem_survival_probability
        f_skewed = simulate(skewed, model).ecosystem_survival_probability
        sigma = math.sqrt(
            f_uniform * (1 - f_uniform) / model.trials
            + f_skewed * (1 - f_skewed) / model.trials
        )
        assert f_uniform - f_skewed > 3 * sigma


class TestSweep:
    def test_single_community_matches_simulate(self, community_c):
        model = SurvivalModel(population_size=80, shock_rate=0.1,
                              shock_kill_fraction=0.5, horizon=100,
                              trials=200, seed=77)
        pairs = survival_vs_diversity_sweep([community_c], model)
        assert len(pairs) == 1
        report = simulate(community_c, model)
        assert pairs[0][1] == report.ecosystem_survival_probability

    def test_identical_communities_identical_outputs(self, community_c):
        model = SurvivalModel(population_size=80, shock_rate=0.1,
                              shock_kill_fraction=0.5, horizon=100,
                              trials=200, seed=77)
        pairs = survival_vs_diversity_sweep([community_c, community_c], model)
        assert pairs[0] == pairs[1]

    def test_survival_non_decreasing_in_uniform_richness(self):
        model = SurvivalModel(population_size=100, shock_rate=0.1,
                              shock_kill_fraction=0.5, targeting_exponent=1.0,
                              horizon=150, trials=4000, seed=5)
        communities = [
            make_community(f"u{s}", [(f"x{i}", 1.0 / s) for i in range(s)])
            for s in (1, 2, 4, 8)
        ]
        pairs = survival_vs_diversity_sweep(communities, model)
        sigma3 = 3 * math.sqrt(0.25 / model.trials)
        for (d_lo, p_lo), (d_hi, p_hi) in zip(pairs, pairs[1:]):
            assert d_lo < d_hi
            assert p_hi >= p_lo - sigma3

    def test_empty_sweep_rejected(self):
        with pytest.raises(InvalidModelError):
            survival_vs_diversity_sweep([], SurvivalModel(population_size=10))
