from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument
from apps.sim2d.maze import (
    MAZE_PRESETS,
    MazeSpec,
    boundary_walls,
    flood_fill,
    generate_maze,
    is_connected,
    preset_for,
)


class GenerateMazeTests(SimpleTestCase):
    def test_two_cell_maze_is_connected(self):
        maze = generate_maze(7, "simple", 2)
        self.assertEqual(len(flood_fill(maze)), 4)

    def test_generation_is_deterministic(self):
        self.assertEqual(generate_maze(7, "simple", 4).walls, generate_maze(7, "simple", 4).walls)

    def test_seed_changes_walls(self):
        self.assertNotEqual(generate_maze(7, "simple", 4).walls, generate_maze(8, "simple", 4).walls)

    def test_boundary_walls_always_present(self):
        maze = generate_maze(3, "complex", 6)
        self.assertEqual(list(maze.walls[:4]), boundary_walls())

    def test_every_complexity_is_connected(self):
        for complexity in ("simple", "moderate", "complex"):
            for seed in range(5):
                with self.subTest(complexity=complexity, seed=seed):
                    self.assertTrue(is_connected(generate_maze(seed, complexity, 5)))

    def test_complex_mazes_keep_more_walls(self):
        simple = sum(len(generate_maze(s, "simple", 8).walls) for s in range(5))
        complex_ = sum(len(generate_maze(s, "complex", 8).walls) for s in range(5))
        self.assertLess(simple, complex_)

    def test_walls_stay_inside_unit_square(self):
        for wall in generate_maze(11, "moderate", 7).walls:
            self.assertTrue(all(0.0 <= v <= 1.0 for v in wall))

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidArgument):
            generate_maze(7, "simple", 1)
        with self.assertRaises(InvalidArgument):
            generate_maze(7, "labyrinthine", 4)
        with self.assertRaises(InvalidArgument):
            MazeSpec(walls=((0.0, 0.0, 1.5, 0.0),))


class PresetTests(SimpleTestCase):
    def test_simple_presets(self):
        small = MAZE_PRESETS[("simple", "small")]
        self.assertEqual((small.map_cells, small.map_depth, small.steps, small.tiles), (7, 20, 1500, 3))
        medium = MAZE_PRESETS[("simple", "medium")]
        self.assertEqual((medium.map_cells, medium.steps, medium.tiles), (12, 3000, 6))

    def test_preset_lookup(self):
        self.assertEqual(preset_for(generate_maze(0, "simple", 2)).steps, 1500)
        self.assertEqual(preset_for(generate_maze(0, "moderate", 4)).tiles, 6)
        self.assertIsNone(preset_for(generate_maze(0, "simple", 3)))
