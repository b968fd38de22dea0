from apps.cli.management.base import LatmapCommand
from apps.common.exceptions import InvalidArgument
from apps.sim2d.io import collect_trajectory, read_maze, write_trajectory
from apps.sim2d.policies import RandomWalkPolicy
from apps.sim2d.world import World, random_free_pose


class Command(LatmapCommand):
    help = "Drive the wall-avoiding random walk through a maze and log the trajectory as CSV"

    def add_command_arguments(self, parser):
        parser.add_argument("--maze", required=True)
        parser.add_argument("--steps", type=int, default=None)
        parser.add_argument("--out", default=None)

    def run(self, **options):
        cfg = self.config.world
        maze = read_maze(options["maze"])
        steps = options["steps"] if options["steps"] is not None else cfg.steps
        if steps < 0:
            raise InvalidArgument(f"--steps must be >= 0, got {steps}")
        start_rng, walk_rng = self.rngs(options["seed"], 2)
        world = World(maze, random_free_pose(maze, start_rng), max_step=cfg.max_step)
        trajectory = collect_trajectory(world, steps, walk_rng, RandomWalkPolicy(cfg))
        path = write_trajectory(self.output_path(options["out"], "trajectory.csv"), trajectory)
        self.success(f"Wrote {len(trajectory)} poses to {path}")
