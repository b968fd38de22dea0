from dataclasses import replace

import numpy as np

from apps.cli.management.base import LatmapCommand
from apps.cli.runner import run_seeds, seed_list
from apps.common.exceptions import InvalidArgument
from apps.genmodel.world_model import WorldModel, save_world_model
from apps.sim2d.io import read_maze, read_trajectory
from apps.sim2d.world import World
from apps.slam.drivers import offline_slam, online_slam
from apps.slam.engine import SlamEngine
from apps.slam.io import slam_result, write_slam_result
from apps.slam.metrics import dead_reckoning
from apps.slam.posterior import save_posterior


class Command(LatmapCommand):
    help = (
        "Replay a logged trajectory with hidden actuation noise and run online or offline SLAM on it. "
        "Writes the result, the posterior and the learned world model per seed."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--maze", required=True)
        parser.add_argument("--trajectory", required=True)
        parser.add_argument("--mode", choices=["online", "offline"], default="online")
        parser.add_argument(
            "--control-noise", type=float, default=1.0,
            help="Scale on the [sim2d] actuation noise stds; 0 replays the commanded controls exactly",
        )
        parser.add_argument("--seeds", type=int, default=1, help="Run this many consecutive seeds")
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--out-dir", default=None)

    def run(self, **options):
        cfg = self.config
        maze = read_maze(options["maze"])
        trajectory = read_trajectory(options["trajectory"])
        mode = options["mode"]
        scale = options["control_noise"]
        if scale < 0:
            raise InvalidArgument("--control-noise must be >= 0")
        noise = (scale * cfg.world.noise_dtheta, scale * cfg.world.noise_forward)
        slam_cfg = cfg.slam
        if scale > 0 and slam_cfg.jitter == (0.0, 0.0):
            slam_cfg = replace(slam_cfg, jitter_dtheta=noise[0], jitter_forward=noise[1])
        out_dir = self.output_path(options["out_dir"], "")
        start = trajectory.poses[0]

        def one_seed(seed: int) -> dict:
            world_rng, engine_rng, run_rng = self.rngs(seed, 3)
            world = World(maze, start, world_rng, control_noise=noise, max_step=cfg.world.max_step)
            poses, scans = world.execute(trajectory.controls)
            truth = np.array([p.as_array() for p in [start, *poses]])
            scans = [trajectory.scans[0], *scans]

            engine = SlamEngine.create(start, engine_rng, cfg.model, slam_cfg, cfg.net)
            if mode == "online":
                run = online_slam(zip(scans, [*trajectory.controls, None]), engine, run_rng)
            else:
                run = offline_slam(np.array([s.readings for s in scans]), trajectory.control_array, engine, run_rng)

            reckoned = dead_reckoning(start, trajectory.control_array)
            payload = slam_result(
                run.estimates, truth, mode=mode, seed=seed,
                dead_reckoning_err=float(np.linalg.norm(reckoned[-1, :2] - truth[-1, :2])),
            )
            write_slam_result(out_dir / f"slam_{mode}_seed{seed}.json", payload)
            save_posterior(out_dir / f"posterior_{mode}_seed{seed}.json", run.posterior)
            save_world_model(
                out_dir / f"model_{mode}_seed{seed}.json",
                WorldModel(run.posterior.mean_map(), engine.emission, engine.transition),
            )
            return payload

        seeds = seed_list(options["seed"], options["seeds"])
        for seed, payload in zip(seeds, run_seeds(one_seed, seeds, options["workers"])):
            relative = payload["relative_err"]
            self.success(
                f"seed {seed} ({mode}): final error {payload['final_abs_err']:.4f}, "
                f"relative {'n/a' if relative is None else f'{relative:.4f}'}, "
                f"dead reckoning {payload['dead_reckoning_err']:.4f}"
            )
