import numpy as np
from django.test import SimpleTestCase, tag

from apps.common.exceptions import InvalidArgument, UnsupportedOperation
from apps.genmodel.training import TransitionDataset, make_transition_dataset, train_transition
from apps.genmodel.transition import TransitionModel
from apps.nn.config import NetConfig
from apps.sim2d.geometry import Pose
from apps.sim2d.maze import MazeSpec, generate_maze
from apps.sim2d.world import World

SMALL = NetConfig(hidden_width=16, transition_layers=2)


class DatasetTests(SimpleTestCase):
    def test_shapes_and_consistency(self):
        world = World(generate_maze(0, "simple", 3), Pose(0.1, 0.1, 0.0))
        data = make_transition_dataset(world, 40, np.random.default_rng(0))
        self.assertEqual(len(data), 40)
        self.assertEqual(data.scans.shape, (40, 20))
        np.testing.assert_array_equal(data.poses[1:], data.next_poses[:-1])


class TrainTransitionTests(SimpleTestCase):
    def identity_dataset(self, n=200):
        rng = np.random.default_rng(1)
        poses = np.column_stack([rng.uniform(0.1, 0.9, (n, 2)), rng.uniform(-3, 3, n)])
        return TransitionDataset(poses, np.zeros((n, 2)), rng.uniform(0, 0.53, (n, 20)), poses.copy())

    def test_identity_transitions_are_learned(self):
        model = TransitionModel.learned(np.random.default_rng(2), SMALL)
        report = train_transition(model, self.identity_dataset(), np.random.default_rng(3), epochs=100, batch_size=64)
        self.assertLess(report.heldout_error, 1e-3)

    def test_loss_trend_is_downwards(self):
        world = World(MazeSpec.empty(), Pose(0.5, 0.5, 0.0))
        data = make_transition_dataset(world, 600, np.random.default_rng(4))
        model = TransitionModel.learned(np.random.default_rng(5), SMALL)
        report = train_transition(model, data, np.random.default_rng(6), epochs=40, batch_size=64)
        slope = np.polyfit(np.arange(len(report.epoch_losses)), report.epoch_losses, 1)[0]
        self.assertLessEqual(slope, 0.0)
        self.assertLess(report.epoch_losses[-1], report.epoch_losses[0])

    def test_empty_dataset(self):
        empty = TransitionDataset(np.zeros((0, 3)), np.zeros((0, 2)), np.zeros((0, 20)), np.zeros((0, 3)))
        with self.assertRaises(InvalidArgument):
            train_transition(TransitionModel.learned(np.random.default_rng(0), SMALL), empty, np.random.default_rng(0))

    def test_engineered_has_nothing_to_train(self):
        with self.assertRaises(UnsupportedOperation):
            train_transition(TransitionModel(), self.identity_dataset(), np.random.default_rng(0))


@tag("slow")
class PretrainingAcceptanceTests(SimpleTestCase):
    def test_heldout_error_after_pretraining(self):
        world = World(generate_maze(100, "simple", 4), Pose(0.1, 0.1, 0.0))
        data = make_transition_dataset(world, 20000, np.random.default_rng(0))
        model = TransitionModel.learned(np.random.default_rng(1), NetConfig(hidden_width=64, transition_layers=3))
        report = train_transition(model, data, np.random.default_rng(2), epochs=30)
        self.assertLess(report.heldout_error, 0.005)
