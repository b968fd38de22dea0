"""Start/goal pair sweeps: plan in a model, execute in the true simulator."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument, NoPathFound, NoPoseFound
from apps.genmodel.world_model import WorldModel
from apps.sim2d.geometry import AGENT_RADIUS, Pose
from apps.sim2d.maze import MazeSpec
from apps.sim2d.world import World, raycast, wall_clearance
from .config import PlannerConfig, PoseSearchConfig, SafetyParams, TargetKind
from .execute import execute_plan
from .planner import HybridAStar
from .pose_search import fit_pose_from_observation
from .simulator import MotionModel

logger = logging.getLogger(__name__)


def grid_positions(n: int = 5, maze: MazeSpec | None = None) -> list[tuple[float, float]]:
    """
    Centres of an n x n lattice. With a maze, centres closer than the agent
    radius to a wall are dropped: an agent placed there cannot move off it.
    """
    centres = [(i + 0.5) / n for i in range(n)]
    positions = [(x, y) for x in centres for y in centres]
    if maze is None:
        return positions
    free = wall_clearance(maze, positions) > AGENT_RADIUS
    return [p for p, ok in zip(positions, free) if ok]


def grid_pairs(
    n: int = 5,
    limit: int | None = None,
    rng: np.random.Generator | None = None,
    maze: MazeSpec | None = None,
) -> list[tuple]:
    """Ordered (start, goal) pairs of distinct free lattice points, or a random subset of `limit` of them."""
    pairs = [(s, g) for s, g in itertools.product(grid_positions(n, maze), repeat=2) if s != g]
    if limit is not None and limit < len(pairs):
        rng = rng if rng is not None else np.random.default_rng(0)
        pairs = [pairs[i] for i in sorted(rng.choice(len(pairs), size=limit, replace=False))]
    return pairs


@dataclass
class NavigationRun:
    maze: MazeSpec
    model: MotionModel
    planner_cfg: PlannerConfig
    safety: SafetyParams
    target: str = TargetKind.POSE
    pose_cfg: PoseSearchConfig | None = None

    def __post_init__(self):
        if self.target == TargetKind.OBSERVATION and not isinstance(self.model, WorldModel):
            raise InvalidArgument("Observation targets need a learned world model")

    def attempt(self, start: tuple[float, float], goal: tuple[float, float], rng: np.random.Generator) -> dict:
        start_pose = Pose(start[0], start[1], 0.0)
        record = {
            "start": [start[0], start[1]],
            "goal": [goal[0], goal[1]],
            "success": False,
            "final_error": None,
            "cost": None,
            "expanded_nodes": 0,
            "controls": 0,
            "inferred_goal": None,
            "error": None,
        }
        planned_goal = goal
        try:
            if self.target == TargetKind.OBSERVATION:
                fit = fit_pose_from_observation(raycast(self.maze, Pose(goal[0], goal[1], 0.0)), self.model, cfg=self.pose_cfg)
                planned_goal = fit.pose.position
                record["inferred_goal"] = [planned_goal[0], planned_goal[1]]
            plan = HybridAStar(self.model, self.planner_cfg, self.safety).plan(start_pose, planned_goal, rng)
        except (NoPathFound, NoPoseFound) as exc:
            logger.error(f"Navigation {start} -> {goal} failed", exc_info=True)
            record["error"] = str(exc)
            record["expanded_nodes"] = getattr(exc, "expanded_nodes", 0)
            return record

        final, _ = execute_plan(World(self.maze, start_pose), plan, self.planner_cfg.success_radius)
        error = final.distance_to(goal)
        record.update(
            success=error <= self.planner_cfg.success_radius,
            final_error=error,
            cost=plan.cost,
            expanded_nodes=plan.expanded_nodes,
            controls=len(plan),
        )
        return record


def navigate_pairs(run: NavigationRun, pairs, rng: np.random.Generator) -> list[dict]:
    records = [run.attempt(start, goal, rng) for start, goal in pairs]
    successes = sum(r["success"] for r in records)
    logger.info(f"Navigation: {successes}/{len(records)} pairs reached their goal")
    return records


def success_fraction(records: list[dict]) -> float:
    return sum(r["success"] for r in records) / len(records) if records else 0.0
