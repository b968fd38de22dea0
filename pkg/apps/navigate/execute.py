from __future__ import annotations

import logging

from apps.sim2d.geometry import Pose
from apps.sim2d.world import World
from .planner import Plan

logger = logging.getLogger(__name__)

SUCCESS_RADIUS = 0.05


def execute_plan(world: World, plan: Plan, radius: float = SUCCESS_RADIUS) -> tuple[Pose, bool]:
    """Replay the plan's controls in the true simulator; success means ending within `radius` of the goal."""
    if len(plan):
        world.execute(plan.control_list)
    final = world.pose
    success = final.distance_to(plan.goal) <= radius
    logger.debug(f"Executed {len(plan)} controls, final error {final.distance_to(plan.goal):.4f}")
    return final, success
