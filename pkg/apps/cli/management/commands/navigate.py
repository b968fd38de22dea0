import re

from apps.cli.management.base import LatmapCommand, parse_floats
from apps.common.exceptions import InvalidArgument
from apps.genmodel.world_model import load_world_model
from apps.navigate.config import ModelSource, TargetKind
from apps.navigate.evaluate import NavigationRun, grid_pairs, navigate_pairs, success_fraction
from apps.navigate.execute import execute_plan
from apps.navigate.io import write_navigation_report, write_plan
from apps.navigate.planner import HybridAStar
from apps.navigate.simulator import SimulatorModel
from apps.sim2d.geometry import Pose
from apps.sim2d.io import read_maze
from apps.sim2d.world import World


class Command(LatmapCommand):
    help = (
        "Plan with hybrid A* in a learned world model (or the simulator) and execute in the simulator. "
        "Either one --start/--goal pair or a --pairs gridN sweep."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--maze", required=True)
        parser.add_argument("--model", default=None, help="World model JSON written by the slam command")
        parser.add_argument("--model-source", choices=ModelSource.values, default=ModelSource.LEARNED)
        parser.add_argument("--start", default=None, help="x,y,heading")
        parser.add_argument("--goal", default=None, help="x,y")
        parser.add_argument("--pairs", default=None, help="gridN: every ordered pair of distinct free points of an N x N lattice")
        parser.add_argument("--limit", type=int, default=None, help="Random subset of this many pairs")
        parser.add_argument("--target-obs", action="store_true", help="Infer each goal from its scan first")
        parser.add_argument("--out", default=None)

    def run(self, **options):
        cfg = self.config
        maze = read_maze(options["maze"])
        if options["model_source"] == ModelSource.LEARNED:
            if not options["model"]:
                raise InvalidArgument("--model-source learned needs --model")
            model = load_world_model(options["model"])
        else:
            model = SimulatorModel(maze)
        target = TargetKind.OBSERVATION if options["target_obs"] else TargetKind.POSE
        run = NavigationRun(maze, model, cfg.planner, cfg.safety, target, cfg.pose_search)
        (rng,) = self.rngs(options["seed"], 1)

        if options["pairs"]:
            match = re.fullmatch(r"grid(\d+)", options["pairs"])
            if not match or int(match.group(1)) < 1:
                raise InvalidArgument(f"--pairs expects gridN, got '{options['pairs']}'")
            pairs = grid_pairs(int(match.group(1)), options["limit"], rng, maze)
            if not pairs:
                raise InvalidArgument(f"{options['pairs']} leaves no distinct free start/goal pairs in this maze")
            records = navigate_pairs(run, pairs, rng)
            fraction = success_fraction(records)
            report = {
                "model_source": options["model_source"],
                "target": target,
                "seed": options["seed"],
                "success_fraction": fraction,
                "pairs": records,
            }
            path = write_navigation_report(self.output_path(options["out"], "navigation.json"), report)
            self.success(f"{sum(r['success'] for r in records)}/{len(records)} pairs succeeded ({fraction:.3f}); report at {path}")
            return

        if not (options["start"] and options["goal"]):
            raise InvalidArgument("Give --start and --goal, or --pairs gridN")
        start = Pose(*parse_floats(options["start"], 3, "--start"))
        goal = parse_floats(options["goal"], 2, "--goal")
        if target == TargetKind.OBSERVATION:
            record = run.attempt(start.position, goal, rng)
            self.success(f"Observation target: success {record['success']}, inferred goal {record['inferred_goal']}")
            return
        plan = HybridAStar(model, cfg.planner, cfg.safety).plan(start, goal, rng)
        path = write_plan(self.output_path(options["out"], "plan.json"), plan)
        final, success = execute_plan(World(maze, start), plan, cfg.planner.success_radius)
        message = f"{len(plan)} controls, {plan.expanded_nodes} nodes expanded; final error {final.distance_to(goal):.4f}; plan at {path}"
        (self.success if success else self.warning)(message)
