# apps/genmodel/training.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.common.exceptions import InvalidArgument, UnsupportedOperation
from apps.nn.adam import AdamState, adam_step
from apps.sim2d.geometry import wrap_angle
from apps.sim2d.policies import RandomWalkPolicy
from apps.sim2d.world import World
from .transition import TransitionModel

logger = logging.getLogger(__name__)


@dataclass
class TransitionDataset:
    """Row n: pose, control, scan observed at the pose, pose after the control."""
    poses: np.ndarray  # (N, 3)
    controls: np.ndarray  # (N, 2)
    scans: np.ndarray  # (N, 20)
    next_poses: np.ndarray  # (N, 3)

    def __len__(self) -> int:
        return self.poses.shape[0]

    def subset(self, index: np.ndarray) -> "TransitionDataset":
        return TransitionDataset(self.poses[index], self.controls[index], self.scans[index], self.next_poses[index])

    def targets(self, delta_scale: float) -> np.ndarray:
        delta = np.column_stack(
            [
                self.next_poses[:, :2] - self.poses[:, :2],
                wrap_angle(self.next_poses[:, 2] - self.poses[:, 2]),
            ]
        )
        return delta / delta_scale


def make_transition_dataset(
    world: World, steps: int, rng: np.random.Generator, policy: RandomWalkPolicy | None = None
) -> TransitionDataset:
    """Random-walk rollout in a (pretraining) world."""
    policy = policy if policy is not None else RandomWalkPolicy()
    poses, controls, scans, next_poses = [], [], [], []
    scan = world.observe()
    for _ in range(steps):
        control = policy(rng, scan)
        poses.append(world.pose.as_array())
        controls.append(control.as_array())
        scans.append(scan.readings)
        pose, scan = world.step(control)
        next_poses.append(pose.as_array())
    return TransitionDataset(
        np.array(poses).reshape(-1, 3),
        np.array(controls).reshape(-1, 2),
        np.array(scans).reshape(-1, 20),
        np.array(next_poses).reshape(-1, 3),
    )


@dataclass
class TransitionTrainingReport:
    epoch_losses: list[float] = field(default_factory=list)
    heldout_error: float = float("nan")


def heldout_position_error(model: TransitionModel, data: TransitionDataset) -> float:
    predicted = model.mean(data.poses, data.controls, data.scans)
    return float(np.mean(np.linalg.norm(predicted[:, :2] - data.next_poses[:, :2], axis=1)))


def train_transition(
    model: TransitionModel,
    dataset: TransitionDataset,
    rng: np.random.Generator,
    epochs: int = 30,
    batch_size: int = 256,
    lr: float = 1e-3,
    holdout: float = 0.1,
) -> TransitionTrainingReport:
    """
    Supervised pretraining of the learned transition on scaled pose deltas.
    Trains `model.net` in place and reports the mean held-out position error.
    """
    if not model.is_learned:
        raise UnsupportedOperation("Only the learned transition has parameters to train")
    if len(dataset) == 0:
        raise InvalidArgument("Cannot train the transition on an empty dataset")

    order = rng.permutation(len(dataset))
    n_held = int(round(holdout * len(dataset))) if len(dataset) > 1 else 0
    held = dataset.subset(order[:n_held]) if n_held else dataset
    train = dataset.subset(order[n_held:])

    net = model.net
    features = model.features(train.poses, train.controls, train.scans)
    targets = train.targets(model.delta_scale)
    state = AdamState.for_params(net.params, lr)
    report = TransitionTrainingReport()

    for epoch in range(epochs):
        batches = np.array_split(rng.permutation(len(train)), max(1, int(np.ceil(len(train) / batch_size))))
        total = 0.0
        for batch in batches:
            out, tape = net.forward(features[batch])
            residual = out - targets[batch]
            total += float(np.sum(residual ** 2))
            _, grads = net.backward(tape, 2.0 * residual / residual.size)
            params, state = adam_step(net.params, grads, state)
            net.set_params(params)
        report.epoch_losses.append(total / targets.size)
        if epoch % 10 == 0 or epoch == epochs - 1:
            logger.info(f"transition epoch {epoch}: loss={report.epoch_losses[-1]:.6f}")

    report.heldout_error = heldout_position_error(model, held)
    logger.info(f"transition pretraining done: held-out position error={report.heldout_error:.5f}")
    return report
