import math

import numpy as np
from django.test import SimpleTestCase
from scipy.spatial.distance import cdist

from apps.common.exceptions import InvalidArgument
from apps.explore.config import EntropyConfig
from apps.explore.entropy import kth_neighbour_distances, knn_entropy, log_unit_ball_volume


class KnnEntropyTests(SimpleTestCase):
    def test_standard_normal(self):
        samples = np.random.default_rng(0).normal(size=(5000, 2))
        self.assertLess(abs(knn_entropy(samples, EntropyConfig(k=5)) - math.log(2 * math.pi * math.e)), 0.1)

    def test_unit_square(self):
        samples = np.random.default_rng(1).uniform(size=(5000, 2))
        self.assertLess(abs(knn_entropy(samples, EntropyConfig(k=5))), 0.1)

    def test_scale_law(self):
        rng = np.random.default_rng(2)
        for d in (4, 30):
            samples = rng.normal(size=(200, d))
            shifted = knn_entropy(2.5 * samples) - knn_entropy(samples)
            self.assertAlmostEqual(shifted, d * math.log(2.5), delta=1e-9)

    def test_translation_invariance(self):
        rng = np.random.default_rng(3)
        for d in (3, 25):
            samples = rng.normal(size=(100, d))
            self.assertAlmostEqual(knn_entropy(samples + 0.75), knn_entropy(samples), delta=1e-9)

    def test_too_few_samples(self):
        with self.assertRaises(InvalidArgument):
            knn_entropy(np.zeros((3, 2)), EntropyConfig(k=3))

    def test_duplicates_stay_finite(self):
        samples = np.vstack([np.zeros((5, 2)), np.random.default_rng(4).normal(size=(20, 2))])
        self.assertTrue(math.isfinite(knn_entropy(samples)))

    def test_one_dimensional_input(self):
        samples = np.random.default_rng(5).normal(size=400)
        self.assertAlmostEqual(knn_entropy(samples), knn_entropy(samples[:, None]), places=12)


class NeighbourDistanceTests(SimpleTestCase):
    def test_tree_and_brute_force_agree(self):
        rng = np.random.default_rng(6)
        for d in (3, 40):
            samples = rng.normal(size=(50, d))
            pairwise = cdist(samples, samples)
            expected = np.sort(pairwise, axis=1)[:, 3]
            np.testing.assert_allclose(kth_neighbour_distances(samples, 3), expected, rtol=1e-12)

    def test_unit_ball_volumes(self):
        self.assertAlmostEqual(log_unit_ball_volume(1), math.log(2.0), places=12)
        self.assertAlmostEqual(log_unit_ball_volume(2), math.log(math.pi), places=12)
        self.assertAlmostEqual(log_unit_ball_volume(3), math.log(4 * math.pi / 3), places=12)
