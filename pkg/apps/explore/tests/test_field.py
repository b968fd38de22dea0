import math

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument
from apps.explore.field import (
    ExplorationDataset,
    ObstacleField,
    build_obstacle_field,
    field_from_endpoints,
    obstacle_loss,
    project_endpoints,
)
from apps.genmodel.attention import MapRealization
from apps.genmodel.emission import EmissionModel
from apps.genmodel.transition import TransitionModel
from apps.genmodel.world_model import WorldModel
from apps.nn.config import NetConfig
from apps.nn.gradcheck import numerical_gradient
from apps.slam.posterior import LatentMapPosterior


def open_space_model():
    emission = EmissionModel.init(2, np.random.default_rng(0), NetConfig(hidden_width=4, emission_layers=1))
    params = emission.net.params
    params[-2] = np.zeros_like(params[-2])
    params[-1] = np.full_like(params[-1], 50.0)
    emission.net.set_params(params)
    return WorldModel(MapRealization.zeros(4, 4, 2), emission, TransitionModel())


class ProjectionTests(SimpleTestCase):
    def test_single_reading_ahead(self):
        scan = np.full(20, 0.53)
        scan[0] = 0.2
        endpoints = project_endpoints(np.array([[0.5, 0.5, 0.0]]), scan)
        np.testing.assert_allclose(endpoints, [[0.7, 0.5]], atol=1e-12)
        obstacles = field_from_endpoints(endpoints, n_scans=1)
        self.assertAlmostEqual(obstacles.log_density[44, 32], math.log(1 / 20), places=12)
        others = np.delete(obstacles.log_density.ravel(), 44 * 64 + 32)
        np.testing.assert_allclose(others, math.log(1e-6))

    def test_saturated_readings_are_skipped(self):
        scan = np.full(20, 0.53)
        scan[5] = 0.1
        self.assertEqual(project_endpoints(np.array([[0.5, 0.5, 1.0]]), scan).shape, (1, 2))

    def test_mass_matches_binned_endpoints(self):
        rng = np.random.default_rng(0)
        poses = np.column_stack([rng.uniform(0.2, 0.8, (10, 2)), rng.uniform(-3, 3, 10)])
        scans = rng.uniform(0.0, 0.6, (10, 20))
        endpoints = project_endpoints(poses, np.minimum(scans, 0.53))
        mass = np.exp(field_from_endpoints(endpoints, n_scans=10, floor=1e-300).log_density).sum()
        self.assertLessEqual(mass, 1.0 + 1e-12)
        self.assertAlmostEqual(mass, endpoints.shape[0] / 200.0, places=12)


class BuildFieldTests(SimpleTestCase):
    def test_nothing_seen_gives_the_floor(self):
        dataset = ExplorationDataset()
        for x in (0.2, 0.5, 0.8):
            dataset.append(np.full(20, 0.53), [x, 0.5, 0.0])
        obstacles = build_obstacle_field(dataset, LatentMapPosterior.prior(4, 4, 2), open_space_model())
        np.testing.assert_array_equal(obstacles.log_density, np.full((64, 64), math.log(1e-6)))

    def test_empty_dataset(self):
        with self.assertRaises(InvalidArgument):
            build_obstacle_field(ExplorationDataset(), LatentMapPosterior.prior(4, 4, 2), open_space_model())

    def test_inconsistent_dataset(self):
        with self.assertRaises(InvalidArgument):
            ExplorationDataset(observations=[np.zeros(20)], pose_estimates=[])


class ObstacleLossTests(SimpleTestCase):
    def setUp(self):
        self.obstacles = ObstacleField(np.random.default_rng(1).normal(size=(16, 16)))

    def test_uniform_field_is_flat(self):
        flat = ObstacleField(np.full((8, 8), -3.0))
        for position in ((0.1, 0.2), (0.5, 0.5), (0.93, 0.41)):
            value, grad = obstacle_loss(flat, position)
            self.assertAlmostEqual(value, -3.0, places=12)
            np.testing.assert_allclose(grad, [0.0, 0.0], atol=1e-12)

    def test_node_value(self):
        value, _ = obstacle_loss(self.obstacles, ((3 + 0.5) / 16, (11 + 0.5) / 16))
        self.assertEqual(value, self.obstacles.log_density[3, 11])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            cell = rng.integers(1, 14, 2)
            position = (cell + 0.5 + rng.uniform(0.1, 0.9, 2)) / 16
            _, grad = obstacle_loss(self.obstacles, position)
            numeric = numerical_gradient(lambda p: obstacle_loss(self.obstacles, p)[0], position, h=1e-7)
            np.testing.assert_allclose(grad, numeric, atol=1e-5)

    def test_out_of_bounds_is_clamped_and_reported(self):
        with self.assertLogs("apps.explore.field", level="WARNING"):
            value, grad = obstacle_loss(self.obstacles, (1.2, 0.5))
        self.assertEqual(value, obstacle_loss(self.obstacles, (1.0, 0.5))[0])
        np.testing.assert_array_equal(grad, [0.0, 0.0])
