import numpy as np
from django.test import SimpleTestCase, tag

from apps.common.exceptions import InvalidArgument
from apps.pema.ars import CURVE_COLUMNS, ars_train, ars_update, evaluate_policy, random_starts
from apps.pema.config import ArsConfig
from apps.pema.policy import PemaPolicy
from apps.sim2d.maze import generate_maze

SMALL = ArsConfig(rollout_steps=30, reward_tiles=10, hidden=8)


class ArsUpdateTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.theta = rng.normal(size=6)
        self.perturbations = 0.05 * rng.normal(size=(3, 6))

    def test_swapping_rewards_negates_the_step(self):
        forth, back = [5.0, 2.0, 7.0], [1.0, 4.0, 3.0]
        ahead = ars_update(self.theta, self.perturbations, forth, back, 0.1) - self.theta
        behind = ars_update(self.theta, self.perturbations, back, forth, 0.1) - self.theta
        np.testing.assert_allclose(ahead, -behind, atol=1e-15)

    def test_identical_rewards_leave_theta(self):
        np.testing.assert_array_equal(ars_update(self.theta, self.perturbations, [4.0] * 3, [4.0] * 3, 0.1), self.theta)

    def test_step_formula(self):
        forth, back = np.array([3.0]), np.array([1.0])
        expected = self.theta + 0.5 / (1 * 1.0) * 2.0 * self.perturbations[0]
        np.testing.assert_allclose(ars_update(self.theta, self.perturbations[:1], forth, back, 0.5), expected)

    def test_reward_count_must_match(self):
        with self.assertRaises(InvalidArgument):
            ars_update(self.theta, self.perturbations, [1.0], [2.0], 0.1)


class ArsTrainTests(SimpleTestCase):
    def setUp(self):
        self.mazes = [generate_maze(0, "simple", 4), generate_maze(1, "simple", 4)]
        self.policy = PemaPolicy.init(np.random.default_rng(0), hidden=8)

    def test_zero_sigma_is_a_fixed_point(self):
        cfg = ArsConfig(sigma=0.0, rollout_steps=30, reward_tiles=10, hidden=8)
        result = ars_train(self.policy, self.mazes, cfg, 3, np.random.default_rng(1))
        np.testing.assert_array_equal(result.policy.flatten(), self.policy.flatten())

    def test_one_iteration_steps_along_the_scaled_perturbation(self):
        cfg = ArsConfig(sigma=0.5, learning_rate=0.2, rollout_steps=30, reward_tiles=10, hidden=8)
        theta = self.policy.flatten()
        rng = np.random.default_rng(6)
        epsilon = cfg.sigma * rng.standard_normal((1, theta.size))
        starts = random_starts(self.mazes, rng)
        forth = evaluate_policy(self.policy.with_params(theta + epsilon[0]), self.mazes, cfg, rng, starts)
        back = evaluate_policy(self.policy.with_params(theta - epsilon[0]), self.mazes, cfg, rng, starts)
        sigma_r = max(float(np.std([forth, back])), 1e-8)
        expected = theta + cfg.learning_rate / sigma_r * (forth - back) * epsilon[0]

        result = ars_train(self.policy, self.mazes, cfg, 1, np.random.default_rng(6))
        np.testing.assert_allclose(result.policy.flatten(), expected, atol=1e-12)

    def test_curve(self):
        result = ars_train(self.policy, self.mazes, SMALL, 4, np.random.default_rng(2))
        self.assertEqual(list(result.curve.columns), CURVE_COLUMNS)
        self.assertEqual(result.curve["iteration"].tolist(), [1, 2, 3, 4])
        self.assertTrue((result.curve["mean_reward"] >= 1).all())
        self.assertTrue((result.curve["mean_reward"] <= 2 * 100).all())

    def test_reproducible(self):
        a = ars_train(self.policy, self.mazes, SMALL, 3, np.random.default_rng(3))
        b = ars_train(self.policy, self.mazes, SMALL, 3, np.random.default_rng(3))
        np.testing.assert_array_equal(a.policy.flatten(), b.policy.flatten())
        self.assertTrue(a.curve.equals(b.curve))

    def test_zero_iterations(self):
        result = ars_train(self.policy, self.mazes, SMALL, 0, np.random.default_rng(4))
        self.assertEqual(len(result.curve), 0)
        np.testing.assert_array_equal(result.policy.flatten(), self.policy.flatten())

    def test_needs_a_maze(self):
        with self.assertRaises(InvalidArgument):
            ars_train(self.policy, [], SMALL, 1, np.random.default_rng(0))

    def test_fixed_starts_give_zero_variance(self):
        starts = random_starts(self.mazes, np.random.default_rng(5))
        rewards = {evaluate_policy(self.policy, self.mazes, SMALL, np.random.default_rng(s), starts) for s in range(5)}
        self.assertEqual(len(rewards), 1)

    def test_random_starts_vary(self):
        rewards = {evaluate_policy(self.policy, self.mazes, SMALL, np.random.default_rng(s)) for s in range(10)}
        self.assertGreater(len(rewards), 1)

    @tag("slow")
    def test_training_does_not_hurt(self):
        """100 desk-scale iterations on 2 simple mazes, paired over 5 seeds on fixed evaluation starts."""
        cfg = ArsConfig()
        gains = []
        for seed in range(5):
            rng = np.random.default_rng(seed)
            policy = PemaPolicy.init(rng, hidden=cfg.hidden)
            starts = [random_starts(self.mazes, np.random.default_rng(100 + k)) for k in range(4)]
            before = sum(evaluate_policy(policy, self.mazes, cfg, rng, s) for s in starts)
            trained = ars_train(policy, self.mazes, cfg, 100, rng).policy
            after = sum(evaluate_policy(trained, self.mazes, cfg, rng, s) for s in starts)
            gains.append(after - before)
        self.assertGreaterEqual(np.median(gains), 0.0)


class ArsConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = ArsConfig()
        self.assertEqual((cfg.perturbations, cfg.sigma, cfg.learning_rate), (1, 0.0075, 0.001))
        self.assertEqual((cfg.rollout_steps, cfg.reward_tiles, cfg.hidden, cfg.worlds), (200, 20, 64, 2))

    def test_full_scale(self):
        cfg = ArsConfig.full_scale()
        self.assertEqual((cfg.rollout_steps, cfg.reward_tiles, cfg.hidden, cfg.worlds), (1000, 100, 256, 10))

    def test_rejects_bad_values(self):
        for kwargs in ({"sigma": -0.1}, {"learning_rate": 0.0}, {"perturbations": 0}, {"reward_tiles": 0}):
            with self.assertRaises(InvalidArgument):
                ArsConfig(**kwargs)
