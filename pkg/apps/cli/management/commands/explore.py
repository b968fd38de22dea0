from apps.cli.management.base import LatmapCommand
from apps.cli.runner import run_seeds, seed_list
from apps.common.exceptions import InvalidArgument
from apps.explore.config import Strategy
from apps.explore.io import write_trace
from apps.explore.loop import explore_loop
from apps.pema.io import load_policy
from apps.sim2d.io import read_maze
from apps.sim2d.maze import preset_for
from apps.sim2d.world import World, random_free_pose
from apps.slam.engine import SlamEngine

DEFAULT_BUDGET = 1500
DEFAULT_TILES = 3


class Command(LatmapCommand):
    help = "Explore a maze with the MI agent, the random walk or a trained PEMA policy; writes a JSON-lines trace per seed"

    def add_command_arguments(self, parser):
        parser.add_argument("--maze", required=True)
        parser.add_argument("--policy", choices=Strategy.values, default=Strategy.MI)
        parser.add_argument("--budget", type=int, default=None, help="Total environment steps (default: maze preset)")
        parser.add_argument("--checkpoint", default=None, help="PEMA policy checkpoint (required for --policy pema)")
        parser.add_argument("--tiles", type=int, default=None, help="Exploration grid cells per side (default: maze preset)")
        parser.add_argument("--seeds", type=int, default=1)
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--out-dir", default=None)

    def run(self, **options):
        cfg = self.config
        policy = options["policy"]
        if policy == Strategy.PEMA and not options["checkpoint"]:
            raise InvalidArgument("--policy pema needs --checkpoint")
        maze = read_maze(options["maze"])
        preset = preset_for(maze)
        budget = options["budget"] if options["budget"] is not None else (preset.steps if preset else DEFAULT_BUDGET)
        tiles = options["tiles"] if options["tiles"] is not None else (preset.tiles if preset else DEFAULT_TILES)
        out_dir = self.output_path(options["out_dir"], "")

        def one_seed(seed: int) -> list[dict]:
            # start and world streams depend on the seed only, so policies compared at one seed share a start
            start_rng, world_rng, engine_rng, loop_rng = self.rngs(seed, 4)
            start = random_free_pose(maze, start_rng)
            world = World(maze, start, world_rng, max_step=cfg.world.max_step)
            engine = SlamEngine.create(start, engine_rng, cfg.model.exploration(), cfg.slam.exploration(), cfg.net)
            controller = load_policy(options["checkpoint"]) if policy == Strategy.PEMA else None
            trace = explore_loop(
                world, engine, budget, loop_rng, policy,
                cfg.mi, cfg.candidates, cfg.entropy, tiles, controller,
            )
            write_trace(out_dir / f"explore_{policy}_seed{seed}.jsonl", trace.records)
            return trace.records

        seeds = seed_list(options["seed"], options["seeds"])
        for seed, records in zip(seeds, run_seeds(one_seed, seeds, options["workers"])):
            if not records:
                self.warning(f"seed {seed}: budget {budget} is shorter than one horizon; nothing explored")
                continue
            last = records[-1]
            self.success(
                f"seed {seed} ({policy}): {last['cycle'] + 1} cycles, exploration ratio {last['exploration_ratio']:.3f}, "
                f"infogain {last['infogain']:.2f}"
            )
