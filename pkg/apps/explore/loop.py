# apps/explore/loop.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.world_model import WorldModel
from apps.sim2d.geometry import Control, LidarScan, Pose
from apps.sim2d.policies import RandomWalkPolicy
from apps.sim2d.world import World
from apps.slam.engine import SlamEngine
from apps.slam.posterior import LatentMapPosterior
from .candidates import generate_candidates, select_best
from .config import CandidateConfig, EntropyConfig, MiConfig, Strategy
from .field import ExplorationDataset, build_obstacle_field
from .metrics import exploration_ratio, infogain_metric
from .mi import estimate_mi

logger = logging.getLogger(__name__)

Controller = Callable[[np.random.Generator, LidarScan], Control]


@dataclass
class ExplorationTrace:
    records: list[dict] = field(default_factory=list)
    true_poses: list[Pose] = field(default_factory=list)
    dataset: ExplorationDataset = field(default_factory=ExplorationDataset)

    @property
    def cycles(self) -> int:
        return len(self.records)


def plan_cycle(
    engine: SlamEngine,
    dataset: ExplorationDataset,
    estimate: Pose,
    rng: np.random.Generator,
    mi_cfg: MiConfig,
    candidate_cfg: CandidateConfig,
    entropy_cfg: EntropyConfig,
) -> tuple[np.ndarray, list[float], int]:
    """Candidates from the obstacle field, scored by MI against a frozen snapshot of the model."""
    posterior = LatentMapPosterior(engine.posterior.mu.copy(), engine.posterior.log_sigma2.copy())
    model = WorldModel(posterior.mean_map(), engine.emission, engine.transition).snapshot()
    obstacles = build_obstacle_field(dataset, posterior, model, candidate_cfg.field_size, candidate_cfg.density_floor)
    candidates = generate_candidates(obstacles, estimate, mi_cfg, rng, candidate_cfg)
    scores = [estimate_mi(model, posterior, estimate, c, mi_cfg, rng, entropy_cfg) for c in candidates]
    best, plan = select_best(candidates, scores)
    return plan, scores, best


def explore_loop(
    world: World,
    engine: SlamEngine,
    budget: int,
    rng: np.random.Generator,
    strategy: str = Strategy.MI,
    mi_cfg: MiConfig | None = None,
    candidate_cfg: CandidateConfig | None = None,
    entropy_cfg: EntropyConfig | None = None,
    tiles: int = 3,
    controller: Controller | None = None,
    on_cycle: Callable[[dict], None] | None = None,
) -> ExplorationTrace:
    """
    Plan T controls, execute them in `world`, filter every new scan, then train
    the map for `train_steps` minibatches; repeat while a whole horizon still
    fits in the step budget. Reactive strategies pick each control from the
    latest scan instead of planning.
    """
    mi_cfg = mi_cfg or MiConfig()
    candidate_cfg = candidate_cfg or CandidateConfig()
    entropy_cfg = entropy_cfg or EntropyConfig()
    if strategy not in Strategy.values:
        raise InvalidArgument(f"Unknown strategy '{strategy}'. Allowed: {', '.join(Strategy.values)}")
    if strategy == Strategy.RANDOM and controller is None:
        controller = RandomWalkPolicy()
    if strategy == Strategy.PEMA and controller is None:
        raise InvalidArgument("PEMA exploration needs a trained policy")

    trace = ExplorationTrace(true_poses=[world.pose])
    scan = world.observe()
    if engine.horizon == 0:
        engine.append(scan)
    estimate = engine.filter_latest(rng)
    trace.dataset.append(scan.readings, estimate)

    steps = 0
    while steps + mi_cfg.horizon <= budget:
        selected_mi, scores, plan = None, [], None
        if strategy == Strategy.MI:
            plan, scores, best = plan_cycle(
                engine, trace.dataset, Pose.from_array(estimate), rng, mi_cfg, candidate_cfg, entropy_cfg
            )
            selected_mi = scores[best]

        for t in range(mi_cfg.horizon):
            control = Control.from_array(plan[t]) if plan is not None else controller(rng, scan)
            pose, scan = world.step(control)
            engine.add_control(control)
            engine.append(scan)
            estimate = engine.filter_latest(rng)
            trace.dataset.append(scan.readings, estimate, control.as_array())
            trace.true_poses.append(pose)
        steps += mi_cfg.horizon

        for _ in range(mi_cfg.train_steps):
            engine.train_minibatch(engine.sample_batch(rng), rng)

        record = {
            "cycle": trace.cycles,
            "steps_executed": steps,
            "infogain": infogain_metric(engine.posterior),
            "exploration_ratio": exploration_ratio(trace.true_poses, tiles),
            "selected_mi": selected_mi,
            "candidate_mis": [float(s) for s in scores],
        }
        trace.records.append(record)
        logger.info(
            f"Exploration cycle {record['cycle']} ({strategy}): {steps} steps, "
            f"infogain {record['infogain']:.3f}, ratio {record['exploration_ratio']:.3f}"
        )
        if on_cycle is not None:
            on_cycle(record)
    return trace
