from apps.cli.management.base import LatmapCommand
from apps.sim2d.io import write_maze
from apps.sim2d.maze import Complexity, generate_maze


class Command(LatmapCommand):
    help = "Generate a maze and write it as JSON"

    def add_command_arguments(self, parser):
        parser.add_argument("--complexity", choices=Complexity.values, default=None)
        parser.add_argument("--cells", type=int, default=None, help="Cells per side")
        parser.add_argument("--out", default=None)

    def run(self, **options):
        world = self.config.world
        maze = generate_maze(
            options["seed"],
            options["complexity"] or world.complexity,
            options["cells"] if options["cells"] is not None else world.side_cells,
        )
        path = write_maze(self.output_path(options["out"], "maze.json"), maze)
        self.success(f"Wrote {len(maze.walls)}-wall maze to {path}")
