import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument
from apps.genmodel.attention import MapRealization, attend_batch
from apps.genmodel.emission import EmissionModel
from apps.genmodel.sampling import ancestral_rollout, ancestral_sample
from apps.genmodel.transition import TransitionModel
from apps.nn.config import NetConfig
from apps.sim2d.geometry import Control, Pose

SMALL = NetConfig(hidden_width=8, emission_layers=2)


class AncestralSampleTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.map = MapRealization(rng.normal(size=(6, 6, 3)))
        self.emission = EmissionModel.init(3, rng, SMALL)
        self.controls = [Control(0.1, 0.01)] * 5

    def test_noiseless_sampling_is_the_mean_rollout(self):
        noiseless = EmissionModel(self.emission.net, sigma_e=0.0)
        a = ancestral_sample(self.map, Pose(0.3, 0.3), self.controls, TransitionModel(), noiseless, np.random.default_rng(1))
        b = ancestral_sample(self.map, Pose(0.3, 0.3), self.controls, TransitionModel(), noiseless, np.random.default_rng(2))
        self.assertEqual(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
        self.assertEqual(a[1].shape, (100,))

    def test_same_seed_same_samples(self):
        transition = TransitionModel(sigma_t=0.001)
        a = ancestral_sample(self.map, Pose(0.3, 0.3), self.controls, transition, self.emission, np.random.default_rng(4))
        b = ancestral_sample(self.map, Pose(0.3, 0.3), self.controls, transition, self.emission, np.random.default_rng(4))
        np.testing.assert_array_equal(a[1], b[1])

    def test_observation_mean_converges(self):
        n = 10000
        starts = np.tile([0.4, 0.6, 0.5], (n, 1))
        _, obs = ancestral_rollout(
            self.map.grid, starts, [[0.0, 0.0]], TransitionModel(), self.emission, np.random.default_rng(5)
        )
        charts, _ = attend_batch(self.map.grid, starts[:1, :2])
        mean = self.emission.mean(charts, [0.5])[0]
        bound = 4 * self.emission.sigma_e / np.sqrt(n)
        self.assertTrue(np.all(np.abs(obs.mean(axis=0) - mean) < bound))

    def test_empty_horizon(self):
        with self.assertRaises(InvalidArgument):
            ancestral_sample(self.map, Pose(0.3, 0.3), [], TransitionModel(), self.emission, np.random.default_rng(0))
