"""
The model snapshot handed to exploration and navigation: map (usually the
posterior mean), emission and transition. Snapshots are read-only; training
publishes a new one instead of mutating a shared instance.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from apps.common.io import dump_json, load_json
from apps.nn.checkpoint import net_from_dict, net_to_dict
from apps.sim2d.geometry import Control, LidarScan, Pose
from .attention import MapRealization, attend_batch
from .emission import EmissionModel
from .serializers import WorldModelSerializer
from .transition import TransitionModel


def map_to_dict(grid: np.ndarray) -> dict:
    w, h, d = grid.shape
    return {"w": w, "h": h, "d": d, "cells": np.asarray(grid, dtype=float).ravel().tolist()}


def map_from_dict(data: dict) -> np.ndarray:
    return np.asarray(data["cells"], dtype=float).reshape(data["w"], data["h"], data["d"])


@dataclass
class WorldModel:
    map: MapRealization
    emission: EmissionModel
    transition: TransitionModel

    def snapshot(self) -> "WorldModel":
        return copy.deepcopy(self)

    def predict_scans(self, poses: np.ndarray) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        charts, _ = attend_batch(self.map.grid, poses[:, :2])
        return self.emission.mean(charts, poses[:, 2])

    def predict_scan(self, pose: Pose) -> LidarScan:
        return LidarScan(self.predict_scans(pose.as_array())[0])

    def step_means(self, poses: np.ndarray, controls) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        return self.transition.mean(poses, controls, self.predict_scans(poses))

    def step_mean(self, pose: Pose, control: Control) -> Pose:
        return Pose.from_array(self.step_means(pose.as_array(), control.as_array())[0])

    # -----------------------------
    # Checkpoint
    # -----------------------------
    def to_dict(self) -> dict:
        t = self.transition
        return {
            "map": map_to_dict(self.map.grid),
            "emission": {"sigma_e": self.emission.sigma_e, "net": net_to_dict(self.emission.net)},
            "transition": {
                "variant": str(t.variant),
                "sigma_t": t.sigma_t,
                "margin": t.margin,
                "delta_scale": t.delta_scale,
                "net": net_to_dict(t.net) if t.net is not None else None,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorldModel":
        t = data["transition"]
        transition = TransitionModel(
            variant=t["variant"],
            net=net_from_dict(t["net"]) if t.get("net") else None,
            sigma_t=t["sigma_t"],
            margin=t["margin"],
            delta_scale=t["delta_scale"],
        )
        emission = EmissionModel(net_from_dict(data["emission"]["net"]), data["emission"]["sigma_e"])
        return cls(MapRealization(map_from_dict(data["map"])), emission, transition)


def save_world_model(path: str | Path, model: WorldModel) -> Path:
    return dump_json(path, model.to_dict())


def load_world_model(path: str | Path) -> WorldModel:
    return WorldModel.from_dict(load_json(path, WorldModelSerializer))
