import math

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import DegenerateWeights, InvalidArgument, InvalidState
from apps.genmodel.attention import MapRealization
from apps.genmodel.emission import EmissionModel
from apps.genmodel.transition import TransitionModel
from apps.nn.config import NetConfig
from apps.slam.particles import (
    ParticleCache,
    effective_sample_size,
    filter_step,
    importance_weights,
    multinomial_indices,
    normalize_log_weights,
    particle_moments,
    propagate_particles,
    proposal_from_particles,
    systematic_indices,
    systematic_resample,
    weighted_mean_pose,
)
from apps.sim2d.geometry import wrap_angle


def open_space_emission(depth=2, seed=0):
    """Predicts (almost exactly) the maximum range in every direction."""
    emission = EmissionModel.init(depth, np.random.default_rng(seed), NetConfig(hidden_width=4, emission_layers=1))
    params = emission.net.params
    params[-2] = np.zeros_like(params[-2])
    params[-1] = np.full_like(params[-1], 50.0)
    emission.net.set_params(params)
    return emission


class ProposalTests(SimpleTestCase):
    def test_two_point_moments(self):
        mean, var = particle_moments(np.array([[1.0, 0.5, 0.0], [3.0, 0.5, 0.0]]))
        self.assertEqual(mean[0], 2.0)
        self.assertEqual(var[0], 1.0)

    def test_identical_particles_hit_the_floor(self):
        particles = np.tile([0.3, 0.4, 1.0], (5, 1))
        _, raw = particle_moments(particles)
        self.assertTrue(np.allclose(raw, 0.0, atol=1e-15))
        np.testing.assert_allclose(proposal_from_particles(particles).var, 1e-8)

    def test_matches_accumulated_moments(self):
        rng = np.random.default_rng(0)
        particles = np.column_stack([rng.uniform(0, 1, (40, 2)), rng.uniform(-math.pi, math.pi, 40)])
        sx = sy = ss = sc = 0.0
        for x, y, h in particles:
            sx, sy, ss, sc = sx + x, sy + y, ss + math.sin(h), sc + math.cos(h)
        mx, my, mh = sx / 40, sy / 40, math.atan2(ss, sc)
        vx = vy = vh = 0.0
        for x, y, h in particles:
            d = math.remainder(h - mh, 2 * math.pi)
            vx, vy, vh = vx + (x - mx) ** 2, vy + (y - my) ** 2, vh + d * d
        mean, var = particle_moments(particles)
        np.testing.assert_allclose(mean, [mx, my, mh], atol=1e-12)
        np.testing.assert_allclose(var, [vx / 40, vy / 40, vh / 40], atol=1e-12)

    def test_heading_mean_across_the_seam(self):
        particles = np.array([[0.5, 0.5, math.pi - 0.1], [0.5, 0.5, -math.pi + 0.1]])
        mean, var = particle_moments(particles)
        self.assertAlmostEqual(abs(mean[2]), math.pi, places=12)
        self.assertAlmostEqual(var[2], 0.01, places=12)

    def test_needs_two_particles(self):
        with self.assertRaises(InvalidArgument):
            proposal_from_particles(np.array([[0.5, 0.5, 0.0]]))

    def test_samples_stay_in_bounds(self):
        proposal = proposal_from_particles(np.array([[0.0, 1.0, 3.1], [0.02, 0.98, -3.1]]))
        draws = proposal.sample(np.random.default_rng(1), 500)
        self.assertTrue(np.all((draws[:, :2] >= 0) & (draws[:, :2] <= 1)))
        self.assertTrue(np.all(np.abs(draws[:, 2]) <= math.pi))

    def test_weighted_mean_pose(self):
        particles = np.array([[0.2, 0.2, 0.1], [0.4, 0.6, 0.3]])
        np.testing.assert_allclose(weighted_mean_pose(particles, np.array([0.5, 0.5])), [0.3, 0.4, 0.2], atol=1e-12)


class WeightTests(SimpleTestCase):
    def test_equal_likelihoods_give_uniform_weights(self):
        np.testing.assert_allclose(normalize_log_weights(np.full(4, -3.0)), 0.25)

    def test_gap_of_one(self):
        weights = normalize_log_weights(np.array([0.0, -1.0]))
        np.testing.assert_allclose(weights, [math.e / (1 + math.e), 1 / (1 + math.e)], atol=1e-12)

    def test_sum_to_one(self):
        weights = normalize_log_weights(np.random.default_rng(0).normal(scale=50, size=100))
        self.assertAlmostEqual(weights.sum(), 1.0, delta=1e-12)

    def test_all_impossible(self):
        with self.assertRaises(DegenerateWeights):
            normalize_log_weights(np.full(3, -np.inf))

    def test_identical_samples_are_weighted_equally(self):
        emission = EmissionModel.init(2, np.random.default_rng(0), NetConfig(hidden_width=4, emission_layers=1))
        samples = np.tile([0.4, 0.6, 0.2], (6, 1))
        obs = np.random.default_rng(1).uniform(0, 0.53, 20)
        weights = importance_weights(samples, obs, MapRealization(np.random.default_rng(2).normal(size=(4, 4, 2))), emission)
        np.testing.assert_allclose(weights, 1 / 6, atol=1e-12)

    def test_effective_sample_size(self):
        self.assertAlmostEqual(effective_sample_size(np.full(8, 1 / 8)), 8.0)
        self.assertAlmostEqual(effective_sample_size(np.array([1.0, 0.0, 0.0])), 1.0)


class ResamplingTests(SimpleTestCase):
    weights = np.array([0.05, 0.4, 0.1, 0.3, 0.15])

    def multiplicities(self, draw, weights, repeats, seed=0):
        rng = np.random.default_rng(seed)
        return np.stack([np.bincount(draw(weights, rng), minlength=weights.size) for _ in range(repeats)])

    def test_single_certain_sample(self):
        samples = np.arange(6) * 10
        out = systematic_resample(samples, np.eye(6)[3], np.random.default_rng(0))
        np.testing.assert_array_equal(out, np.full(6, 30))

    def test_uniform_weights_resample_uniformly(self):
        uniform = np.full(10, 0.1)
        for draw in (systematic_indices, multinomial_indices):
            counts = self.multiplicities(draw, uniform, 10_000).sum(axis=0)
            expected = counts.sum() / 10
            chi2 = float(np.sum((counts - expected) ** 2 / expected))
            self.assertLess(chi2, 27.9)

    def test_multiplicities_are_unbiased(self):
        for draw in (systematic_indices, multinomial_indices):
            m = self.multiplicities(draw, self.weights, 10_000, seed=1)
            bound = 3.0 * np.sqrt(m.var(axis=0) / 10_000) + 1e-9
            self.assertTrue(np.all(np.abs(m.mean(axis=0) - 5 * self.weights) <= bound))

    def test_systematic_has_lower_variance(self):
        systematic = self.multiplicities(systematic_indices, self.weights, 10_000, seed=2).var(axis=0).sum()
        multinomial = self.multiplicities(multinomial_indices, self.weights, 10_000, seed=3).var(axis=0).sum()
        self.assertLessEqual(systematic, multinomial)

    def test_rows_are_resampled_independently(self):
        weights = np.stack([np.eye(4)[0], np.eye(4)[2]])
        idx = systematic_indices(weights, np.random.default_rng(4))
        np.testing.assert_array_equal(idx, [[0, 0, 0, 0], [2, 2, 2, 2]])


class DiscreteHmmFilterTests(SimpleTestCase):
    """A bootstrap filter built from these weights and resampling matches exact forward filtering."""

    transition = np.array(
        [
            [0.6, 0.3, 0.0, 0.0, 0.1],
            [0.1, 0.6, 0.3, 0.0, 0.0],
            [0.0, 0.1, 0.6, 0.3, 0.0],
            [0.0, 0.0, 0.1, 0.6, 0.3],
            [0.3, 0.0, 0.0, 0.1, 0.6],
        ]
    )
    emission = np.array([[0.8, 0.1, 0.1], [0.2, 0.7, 0.1], [0.1, 0.2, 0.7], [0.1, 0.7, 0.2], [0.7, 0.2, 0.1]])
    observations = [0, 1, 1, 2, 2, 1, 0, 0]

    def exact(self):
        belief = np.full(5, 0.2)
        beliefs = []
        for obs in self.observations:
            belief = (belief @ self.transition) * self.emission[:, obs]
            belief /= belief.sum()
            beliefs.append(belief)
        return beliefs

    def test_total_variation(self):
        rng = np.random.default_rng(0)
        k = 10_000
        particles = rng.integers(0, 5, k)
        cumulative = self.transition.cumsum(axis=1)
        for obs, exact in zip(self.observations, self.exact()):
            u = rng.random(k)
            particles = np.minimum((u[:, None] > cumulative[particles]).sum(axis=1), 4)
            weights = normalize_log_weights(np.log(self.emission[particles, obs]))
            estimate = np.bincount(particles, weights=weights, minlength=5)
            self.assertLess(0.5 * np.abs(estimate - exact).sum(), 0.05)
            particles = systematic_resample(particles, weights, rng)


class ParticleCacheTests(SimpleTestCase):
    def test_start_is_pinned(self):
        cache = ParticleCache.at_start(np.array([0.1, 0.2, 0.3]), 4)
        self.assertTrue(cache.is_fresh(0, now=10_000, period=50))
        np.testing.assert_array_equal(cache.get(0), np.tile([0.1, 0.2, 0.3], (4, 1)))

    def test_staleness(self):
        cache = ParticleCache.at_start(np.zeros(3), 2)
        cache.set(3, np.full((2, 3), 0.5), stamp=10)
        self.assertTrue(cache.is_fresh(3, now=60, period=50))
        self.assertFalse(cache.is_fresh(3, now=61, period=50))
        self.assertFalse(cache.is_fresh(2, now=10, period=50))
        self.assertEqual(cache.latest_fresh(5, now=20, period=50), 3)
        self.assertEqual(cache.latest_fresh(5, now=100, period=50), 0)

    def test_particle_count_is_fixed(self):
        cache = ParticleCache.at_start(np.zeros(3), 2)
        with self.assertRaises(InvalidArgument):
            cache.set(1, np.zeros((3, 3)), stamp=0)
        with self.assertRaises(InvalidState):
            cache.get(4)


class PropagateTests(SimpleTestCase):
    def setUp(self):
        self.emission = open_space_emission()
        self.map = MapRealization(np.random.default_rng(1).normal(size=(4, 4, 2)))
        rng = np.random.default_rng(2)
        self.start = np.column_stack([rng.uniform(0.3, 0.7, (8, 2)), rng.uniform(-3, 3, 8)])

    def cache(self):
        cache = ParticleCache(8)
        cache.set(0, self.start, stamp=0)
        return cache

    def test_zero_controls_keep_particles(self):
        cache = propagate_particles(self.cache(), 0, 3, self.map, TransitionModel(), self.emission, np.zeros((3, 2)), np.random.default_rng(0))
        np.testing.assert_array_equal(cache.get(3), self.start)

    def test_one_step_moves_straight_ahead(self):
        controls = np.array([[0.0, 0.01]])
        cache = propagate_particles(self.cache(), 0, 1, self.map, TransitionModel(), self.emission, controls, np.random.default_rng(0), stamp=7)
        moved = cache.get(1)
        expected = self.start[:, :2] + 0.01 * np.column_stack([np.cos(self.start[:, 2]), np.sin(self.start[:, 2])])
        np.testing.assert_allclose(moved[:, :2], expected, atol=1e-12)
        np.testing.assert_allclose(moved[:, 2], wrap_angle(self.start[:, 2]), atol=1e-12)
        self.assertEqual(cache.stamps[1], 7)

    def test_missing_controls(self):
        with self.assertRaises(InvalidArgument):
            propagate_particles(self.cache(), 0, 4, self.map, TransitionModel(), self.emission, np.zeros((3, 2)), np.random.default_rng(0))

    def test_spread_grows_without_reweighting(self):
        cache = ParticleCache.at_start(np.array([0.5, 0.5, 0.0]), 2000)
        propagate_particles(
            cache, 0, 20, self.map, TransitionModel(), self.emission, np.zeros((20, 2)), np.random.default_rng(3), jitter=(0.05, 0.005)
        )
        spread = [cache.get(t)[:, :2].var(axis=0).sum() for t in (5, 10, 15, 20)]
        self.assertTrue(all(a < b for a, b in zip(spread, spread[1:])))


class FilterStepTests(SimpleTestCase):
    def setUp(self):
        self.emission = open_space_emission()
        self.grid = np.random.default_rng(1).normal(size=(4, 4, 2))
        self.particles = np.tile([0.5, 0.5, 0.0], (50, 1))

    def step(self, obs, **kwargs):
        return filter_step(
            self.particles, [0.0, 0.0], obs, self.grid, TransitionModel(), self.emission, np.random.default_rng(4), **kwargs
        )

    def test_informative_scan_keeps_the_collapsed_set(self):
        estimate, resampled, weights = self.step(np.full(self.emission.net.n_out, 0.5))
        np.testing.assert_allclose(weights, 1 / 50, atol=1e-12)
        np.testing.assert_array_equal(resampled, self.particles)
        np.testing.assert_allclose(estimate, [0.5, 0.5, 0.0], atol=1e-12)

    def test_impossible_scan_reinitialises_with_noise(self):
        estimate, resampled, weights = self.step(np.full(self.emission.net.n_out, np.inf), reinit_noise=0.01)
        np.testing.assert_allclose(weights, 1 / 50, atol=1e-12)
        self.assertTrue(np.all(np.isfinite(resampled)))
        self.assertGreater(len({tuple(p) for p in resampled}), 1)
        self.assertTrue(np.all((resampled[:, :2] >= 0.0) & (resampled[:, :2] <= 1.0)))
        self.assertLess(np.abs(resampled[:, :2] - 0.5).max(), 0.1)
        np.testing.assert_allclose(estimate[:2], [0.5, 0.5], atol=0.01)

    def test_zero_noise_keeps_the_propagated_set(self):
        _, resampled, weights = self.step(np.full(self.emission.net.n_out, np.inf), reinit_noise=0.0)
        np.testing.assert_allclose(weights, 1 / 50, atol=1e-12)
        np.testing.assert_array_equal(resampled, self.particles)

    def test_reinitialisation_is_logged(self):
        with self.assertLogs("apps.slam.particles", level="WARNING") as logs:
            self.step(np.full(self.emission.net.n_out, np.inf), reinit_noise=0.02)
        self.assertIn("reinitialising 50 particles with noise 0.02", logs.output[0])
