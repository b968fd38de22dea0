# apps/navigate/planner.py
from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from apps.common.exceptions import InvalidArgument, NoPathFound
from apps.genmodel.attention import MapRealization
from apps.genmodel.world_model import WorldModel
from apps.sim2d.geometry import Control, Pose, in_bounds
from .config import PlannerConfig, SafetyParams
from .primitives import Primitives, RandomPrimitives
from .safety import safety_penalties
from .simulator import MotionModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Plan:
    """Controls, the model's predicted pose after each of them and the accumulated cost."""
    start: Pose
    goal: tuple[float, float]
    controls: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    poses: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    cost: float = 0.0
    expanded_nodes: int = 0

    def __len__(self) -> int:
        return int(self.controls.shape[0])

    @property
    def control_list(self) -> list[Control]:
        return [Control.from_array(c) for c in self.controls]

    @property
    def endpoint(self) -> Pose:
        return Pose.from_array(self.poses[-1]) if len(self) else self.start


@dataclass
class _Anchor:
    pose: np.ndarray
    cost: float
    parent: tuple[int, int] | None = None
    controls: np.ndarray | None = None


def replay_plan(model: MotionModel, start: Pose, controls) -> np.ndarray:
    """Predicted poses (T, 3) after each control under the model's mean transition."""
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    pose = start.as_array()[None, :]
    poses = []
    for control in controls:
        pose = model.step_means(pose, control[None, :])
        poses.append(pose[0])
    return np.asarray(poses, dtype=float).reshape(-1, 3)


def rollout_primitives(model: MotionModel, pose: np.ndarray, primitives: np.ndarray) -> np.ndarray:
    """(E, K, 3) predicted poses for E primitives of K steps from one pose."""
    current = np.tile(np.asarray(pose, dtype=float), (primitives.shape[0], 1))
    steps = []
    for k in range(primitives.shape[1]):
        current = model.step_means(current, primitives[:, k])
        steps.append(current)
    return np.stack(steps, axis=1)


class HybridAStar:
    """
    A* over square cells whose anchors are continuous poses. Expanding a cell rolls
    every primitive through the model from the anchor; an edge costs its travel
    distance plus the safety penalty of the predicted scan where it ends. A cell
    keeps the continuous pose of its first arrival; a cheaper arrival before the
    cell is expanded takes over its cost and parent edge and is queued again.
    Closed cells are frozen.
    """

    def __init__(
        self,
        model: MotionModel,
        config: PlannerConfig | None = None,
        safety: SafetyParams | None = None,
        primitives: Primitives | None = None,
        on_expand: Callable[[tuple[int, int], float, float], None] | None = None,
    ):
        self.model = model
        self.config = config or PlannerConfig()
        self.safety = safety or SafetyParams()
        self.primitives = primitives or RandomPrimitives.from_config(self.config)
        self.on_expand = on_expand
        self.side = max(1, int(math.ceil(1.0 / self.config.cell_size - 1e-9)))

    def cell_of(self, position) -> tuple[int, int]:
        i = min(max(int(math.floor(position[0] / self.config.cell_size)), 0), self.side - 1)
        j = min(max(int(math.floor(position[1] / self.config.cell_size)), 0), self.side - 1)
        return i, j

    def heuristic(self, position, goal: np.ndarray) -> float:
        return max(float(np.hypot(*(np.asarray(position[:2]) - goal))) - self.config.goal_tolerance, 0.0)

    def edge_costs(self, anchor: np.ndarray, poses: np.ndarray) -> np.ndarray:
        """Travel distance along every primitive plus its weighted safety penalty."""
        path = np.concatenate([np.broadcast_to(anchor[:2], (poses.shape[0], 1, 2)), poses[:, :, :2]], axis=1)
        travel = np.linalg.norm(np.diff(path, axis=1), axis=2).sum(axis=1)
        if self.config.safety_weight == 0.0:
            return travel
        if self.config.safety_along_path:
            flat = poses.reshape(-1, 3)
            safety = safety_penalties(self.model.predict_scans(flat), self.safety).reshape(poses.shape[:2]).sum(axis=1)
        else:
            safety = safety_penalties(self.model.predict_scans(poses[:, -1]), self.safety)
        return travel + self.config.safety_weight * safety

    def plan(self, start: Pose, goal, rng: np.random.Generator | None = None) -> Plan:
        rng = rng if rng is not None else np.random.default_rng(0)
        goal = np.asarray(goal, dtype=float).reshape(-1)[:2]
        if not in_bounds(start.x, start.y) or not in_bounds(goal[0], goal[1]):
            raise InvalidArgument(f"Start {start.position} and goal {tuple(goal)} must lie in the unit square")
        goal_xy = (float(goal[0]), float(goal[1]))
        if float(np.hypot(start.x - goal[0], start.y - goal[1])) <= self.config.goal_tolerance:
            return Plan(start, goal_xy)

        start_cell = self.cell_of(start.position)
        anchors = {start_cell: _Anchor(start.as_array(), 0.0)}
        closed: set[tuple[int, int]] = set()
        counter = itertools.count()
        heap = [(self.heuristic(start.position, goal), next(counter), start_cell)]
        expanded = 0

        while heap:
            f, _, cell = heapq.heappop(heap)
            if cell in closed:
                continue
            anchor = anchors[cell]
            if f > anchor.cost + self.heuristic(anchor.pose, goal) + 1e-12:
                continue  # superseded entry
            closed.add(cell)
            expanded += 1
            if self.on_expand is not None:
                self.on_expand(cell, anchor.cost, f)
            if float(np.hypot(*(anchor.pose[:2] - goal))) <= self.config.goal_tolerance:
                plan = self._backtrack(start, goal_xy, anchors, cell, expanded)
                logger.info(f"Planned {len(plan)} controls, cost {plan.cost:.4f}, {expanded} nodes expanded")
                return plan
            if expanded >= self.config.max_nodes:
                raise NoPathFound(f"Node budget of {self.config.max_nodes} exhausted", expanded)

            primitives = np.asarray(self.primitives(anchor.pose, rng), dtype=float)
            poses = rollout_primitives(self.model, anchor.pose, primitives)
            costs = anchor.cost + self.edge_costs(anchor.pose, poses)
            for e in range(primitives.shape[0]):
                nxt = self.cell_of(poses[e, -1, :2])
                if nxt == cell or nxt in closed:
                    continue
                known = anchors.get(nxt)
                if known is None:
                    known = anchors[nxt] = _Anchor(poses[e, -1].copy(), float(costs[e]), cell, primitives[e])
                elif known.cost > costs[e]:
                    known.cost, known.parent, known.controls = float(costs[e]), cell, primitives[e]
                else:
                    continue
                heapq.heappush(heap, (known.cost + self.heuristic(known.pose, goal), next(counter), nxt))

        raise NoPathFound(f"Open set exhausted after {expanded} expansions", expanded)

    def _backtrack(self, start, goal, anchors, cell, expanded) -> Plan:
        """Chain the parent edges back to the start; poses are the model's replay of those controls."""
        controls = []
        cost = anchors[cell].cost
        while anchors[cell].parent is not None:
            controls.append(anchors[cell].controls)
            cell = anchors[cell].parent
        if not controls:
            return Plan(start, goal, cost=cost, expanded_nodes=expanded)
        controls = np.concatenate(controls[::-1], axis=0)
        return Plan(start, goal, controls, replay_plan(self.model, start, controls), cost, expanded)


def hybrid_astar(
    model: MotionModel,
    map_: MapRealization | None,
    start: Pose,
    goal,
    config: PlannerConfig | None = None,
    rng: np.random.Generator | None = None,
    safety: SafetyParams | None = None,
    primitives: Primitives | None = None,
) -> Plan:
    """
    Plan from `start` to within the goal tolerance of `goal` in `model`, a
    WorldModel snapshot or a SimulatorModel. A map given for a WorldModel
    replaces the snapshot's own (usually the posterior mean).
    """
    if map_ is not None and isinstance(model, WorldModel):
        model = replace(model, map=map_)
    return HybridAStar(model, config, safety, primitives).plan(start, goal, rng)
