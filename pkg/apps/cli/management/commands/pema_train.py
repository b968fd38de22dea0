from apps.cli.management.base import LatmapCommand
from apps.pema.ars import ars_train
from apps.pema.io import save_policy, write_curve
from apps.pema.policy import PemaPolicy
from apps.sim2d.io import read_maze
from apps.sim2d.maze import generate_maze


class Command(LatmapCommand):
    help = "Train the PEMA exploration baseline with Augmented Random Search"

    def add_command_arguments(self, parser):
        parser.add_argument("--mazes", nargs="+", default=None, help="Training maze files (default: generated)")
        parser.add_argument("--iterations", type=int, default=None)
        parser.add_argument("--out", default=None, help="Policy checkpoint path")
        parser.add_argument("--curve", default=None, help="Training curve CSV path")

    def run(self, **options):
        cfg = self.config
        ars = cfg.ars
        if options["mazes"]:
            mazes = [read_maze(path) for path in options["mazes"]]
        else:
            first = cfg.run.world_seed
            mazes = [generate_maze(first + k, cfg.world.complexity, cfg.world.side_cells) for k in range(ars.worlds)]
        init_rng, train_rng = self.rngs(options["seed"], 2)
        policy = PemaPolicy.init(init_rng, hidden=ars.hidden, forward=ars.forward)
        result = ars_train(policy, mazes, ars, options["iterations"], train_rng)

        checkpoint = save_policy(self.output_path(options["out"], "pema_policy.json"), result.policy)
        curve = write_curve(self.output_path(options["curve"], "pema_curve.csv"), result.curve)
        if len(result.curve):
            self.success(f"Final mean reward {result.curve['mean_reward'].iloc[-1]:.2f} after {len(result.curve)} iterations")
        self.success(f"Policy at {checkpoint}, curve at {curve}")
