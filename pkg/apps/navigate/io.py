from __future__ import annotations

from pathlib import Path

import numpy as np

from apps.common.io import dump_json, load_json
from apps.sim2d.geometry import Pose
from .planner import Plan
from .serializers import NavigationReportSerializer, PlanSerializer


def plan_to_dict(plan: Plan) -> dict:
    return {
        "start": plan.start.as_array(),
        "goal": list(plan.goal),
        "controls": plan.controls,
        "predicted_poses": plan.poses,
        "cost": plan.cost,
        "expanded_nodes": plan.expanded_nodes,
    }


def write_plan(path: str | Path, plan: Plan) -> Path:
    return dump_json(path, plan_to_dict(plan))


def read_plan(path: str | Path) -> Plan:
    data = load_json(path, PlanSerializer)
    return Plan(
        start=Pose.from_array(data["start"]),
        goal=(data["goal"][0], data["goal"][1]),
        controls=np.asarray(data["controls"], dtype=float).reshape(-1, 2),
        poses=np.asarray(data["predicted_poses"], dtype=float).reshape(-1, 3),
        cost=data["cost"],
        expanded_nodes=data["expanded_nodes"],
    )


def write_navigation_report(path: str | Path, report: dict) -> Path:
    return dump_json(path, report)


def read_navigation_report(path: str | Path) -> dict:
    return load_json(path, NavigationReportSerializer)
