import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument
from apps.explore.candidates import candidate_loss, generate_candidates, select_best
from apps.explore.config import CandidateConfig, MiConfig
from apps.explore.field import ObstacleField
from apps.nn.gradcheck import numerical_gradient, relative_error
from apps.sim2d.geometry import Pose


def ridge_field(size=64):
    """Obstacle density peaking along the vertical line x = 0.6."""
    centres = (np.arange(size) + 0.5) / size
    column = -13.8 + 13.8 * np.exp(-(((centres - 0.6) / 0.08) ** 2))
    return ObstacleField(np.repeat(column[:, None], size, axis=1))


def path_density(obstacles, start, controls):
    return candidate_loss(obstacles, start, controls, angle_weight=0.0)[0]


class CandidateLossTests(SimpleTestCase):
    def test_gradient_matches_finite_differences(self):
        obstacles = ObstacleField(np.random.default_rng(0).normal(size=(16, 16)))
        start = Pose(0.5, 0.5, 0.3)
        rng = np.random.default_rng(1)
        dtheta = 0.2 * rng.normal(size=8)

        def loss(d):
            return candidate_loss(obstacles, start, np.column_stack([d, np.full(8, 0.01)]))[0]

        _, grad = candidate_loss(obstacles, start, np.column_stack([dtheta, np.full(8, 0.01)]))
        self.assertLess(relative_error(grad, numerical_gradient(loss, dtheta, h=1e-6)), 1e-4)

    def test_straight_line_has_no_turn_penalty(self):
        flat = ObstacleField(np.zeros((8, 8)))
        loss, grad = candidate_loss(flat, Pose(0.2, 0.2, 0.7), np.column_stack([np.zeros(5), np.full(5, 0.01)]))
        self.assertAlmostEqual(loss, 0.0, places=12)
        np.testing.assert_allclose(grad, 0.0, atol=1e-12)


class GenerateCandidatesTests(SimpleTestCase):
    def test_shape_and_fixed_forward(self):
        cfg = MiConfig(horizon=7, candidates=3)
        candidates = generate_candidates(ridge_field(), Pose(0.4, 0.3, 0.4), cfg, np.random.default_rng(0), CandidateConfig(steps=5))
        self.assertEqual(len(candidates), 3)
        for c in candidates:
            self.assertEqual(c.shape, (7, 2))
            np.testing.assert_array_equal(c[:, 1], 0.01)

    def test_single_candidate_is_deterministic(self):
        cfg = MiConfig(horizon=5, candidates=1)
        runs = [
            generate_candidates(ridge_field(), Pose(0.4, 0.3, 0.4), cfg, np.random.default_rng(9), CandidateConfig(steps=20))
            for _ in range(2)
        ]
        np.testing.assert_array_equal(runs[0][0], runs[1][0])

    def test_turn_penalty_alone_straightens_candidates(self):
        cfg, candidate_cfg = MiConfig(horizon=10, candidates=4), CandidateConfig()
        flat, start = ObstacleField(np.zeros((16, 16))), Pose(0.5, 0.5, 0.0)
        inits = candidate_cfg.init_std * np.random.default_rng(5).normal(size=(4, 10))
        candidates = generate_candidates(flat, start, cfg, np.random.default_rng(5), candidate_cfg)
        for init, candidate in zip(inits, candidates):
            before = candidate_loss(flat, start, np.column_stack([init, candidate[:, 1]]))[0]
            after = candidate_loss(flat, start, candidate)[0]
            self.assertLess(after, 0.5 * before)

    def test_candidates_move_away_from_the_ridge(self):
        obstacles, start = ridge_field(), Pose(0.4, 0.3, 0.4)
        cfg, candidate_cfg = MiConfig(horizon=25, candidates=10), CandidateConfig(init_std=0.05)
        inits = candidate_cfg.init_std * np.random.default_rng(6).normal(size=(10, 25))
        candidates = generate_candidates(obstacles, start, cfg, np.random.default_rng(6), candidate_cfg)
        improved = 0
        for init, candidate in zip(inits, candidates):
            initial = np.column_stack([init, candidate[:, 1]])
            self.assertLess(candidate_loss(obstacles, start, candidate)[0], candidate_loss(obstacles, start, initial)[0])
            improved += path_density(obstacles, start, candidate) < path_density(obstacles, start, initial)
        self.assertGreaterEqual(improved, 8)


class SelectBestTests(SimpleTestCase):
    def setUp(self):
        self.candidates = [np.full((2, 2), float(i)) for i in range(3)]

    def test_highest_score(self):
        index, best = select_best(self.candidates, [1.0, 3.0, 2.0])
        self.assertEqual(index, 1)
        np.testing.assert_array_equal(best, self.candidates[1])

    def test_ties_keep_the_first(self):
        self.assertEqual(select_best(self.candidates, [2.0, 2.0, 2.0])[0], 0)

    def test_positive_rescaling(self):
        scores = np.array([-0.4, 0.7, 0.1])
        self.assertEqual(select_best(self.candidates, scores)[0], select_best(self.candidates, 5.0 * scores + 2.0)[0])

    def test_empty_and_mismatched(self):
        with self.assertRaises(InvalidArgument):
            select_best([], [])
        with self.assertRaises(InvalidArgument):
            select_best(self.candidates, [1.0, 2.0])
