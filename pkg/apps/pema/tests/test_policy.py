import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument
from apps.nn.dense import DenseNet
from apps.nn.lstm import LstmCellParams
from apps.pema.policy import PemaPolicy
from apps.sim2d.geometry import N_BEAMS, LidarScan


def scans(n, seed=0):
    rng = np.random.default_rng(seed)
    return [LidarScan(rng.uniform(0.0, 0.53, N_BEAMS)) for _ in range(n)]


class PemaPolicyTests(SimpleTestCase):
    def test_zero_policy_goes_straight(self):
        policy = PemaPolicy.zeros(hidden=8)
        for scan in scans(5):
            control = policy.act(scan)
            self.assertEqual(control.dtheta, 0.0)
            self.assertEqual(control.forward, 0.01)

    def test_forward_offset_is_constant(self):
        policy = PemaPolicy.init(np.random.default_rng(0), hidden=16, forward=0.02)
        controls = [policy.act(scan) for scan in scans(20)]
        self.assertEqual({c.forward for c in controls}, {0.02})
        self.assertTrue(all(np.isfinite(c.dtheta) for c in controls))

    def test_reset_restarts_the_recurrence(self):
        policy = PemaPolicy.init(np.random.default_rng(1), hidden=16)
        first = [policy.act(scan).dtheta for scan in scans(10)]
        policy.reset()
        second = [policy.act(scan).dtheta for scan in scans(10)]
        self.assertEqual(first, second)

    def test_controller_signature_ignores_rng(self):
        policy = PemaPolicy.init(np.random.default_rng(2), hidden=8)
        scan = scans(1)[0]
        a = policy(np.random.default_rng(0), scan)
        policy.reset()
        b = policy(np.random.default_rng(99), scan)
        self.assertEqual(a, b)

    def test_flat_parameters_rebuild_the_same_policy(self):
        policy = PemaPolicy.init(np.random.default_rng(3), hidden=8)
        rebuilt = policy.with_params(policy.flatten())
        self.assertEqual(policy.flatten().size, policy.n_params)
        for scan in scans(5):
            self.assertEqual(policy.act(scan), rebuilt.act(scan))

    def test_with_params_leaves_the_original_untouched(self):
        policy = PemaPolicy.init(np.random.default_rng(4), hidden=8)
        before = policy.flatten()
        policy.with_params(np.zeros(policy.n_params))
        np.testing.assert_array_equal(policy.flatten(), before)

    def test_wrong_vector_length(self):
        with self.assertRaises(InvalidArgument):
            PemaPolicy.zeros(hidden=8).with_params(np.zeros(3))

    def test_mismatched_head(self):
        with self.assertRaises(InvalidArgument):
            PemaPolicy(LstmCellParams.zeros(N_BEAMS, 8), DenseNet([4, 1]))
        with self.assertRaises(InvalidArgument):
            PemaPolicy(LstmCellParams.zeros(5, 8), DenseNet([8, 1]))
