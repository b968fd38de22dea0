from collections import deque

import numpy as np
from django.test import SimpleTestCase

from apps.common.exceptions import InvalidArgument, NoPathFound
from apps.genmodel.attention import MapRealization
from apps.genmodel.emission import EmissionModel
from apps.genmodel.transition import TransitionModel
from apps.genmodel.world_model import WorldModel
from apps.navigate.config import PlannerConfig
from apps.navigate.execute import execute_plan
from apps.navigate.planner import HybridAStar, hybrid_astar, replay_plan
from apps.navigate.primitives import GridPrimitives, RandomPrimitives
from apps.navigate.simulator import SimulatorModel
from apps.nn.config import NetConfig
from apps.sim2d.geometry import Pose
from apps.sim2d.maze import MazeSpec, boundary_walls, crosses_wall, generate_maze
from apps.sim2d.world import World


def constant_emission(bias):
    """Predicts the same reading for every beam: ~0.53 for bias 50, ~0 for bias -50."""
    emission = EmissionModel.init(2, np.random.default_rng(0), NetConfig(hidden_width=4, emission_layers=1))
    params = emission.net.params
    params[-2] = np.zeros_like(params[-2])
    params[-1] = np.full_like(params[-1], bias)
    emission.net.set_params(params)
    return emission


def learned_model(bias=50.0):
    return WorldModel(MapRealization.zeros(4, 4, 2), constant_emission(bias), TransitionModel())


def bfs_moves(maze, n, start, goal):
    """Shortest number of 4-neighbour moves between cells of an n x n lattice, walls respected."""
    def centre(cell):
        return ((cell[0] + 0.5) / n, (cell[1] + 0.5) / n)

    dist = {start: 0}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (cell[0] + di, cell[1] + dj)
            if not (0 <= nxt[0] < n and 0 <= nxt[1] < n) or nxt in dist:
                continue
            if crosses_wall(maze, centre(cell), centre(nxt)):
                continue
            dist[nxt] = dist[cell] + 1
            queue.append(nxt)
    return dist[goal]


# every primitive drives straight ahead, so all arrivals in a cell coincide
STRAIGHT = PlannerConfig(turn=0.0, turn_jitter=0.0)


class HybridAStarTests(SimpleTestCase):
    def test_goal_at_the_start(self):
        plan = hybrid_astar(SimulatorModel(MazeSpec.empty()), None, Pose(0.4, 0.4), (0.41, 0.4))
        self.assertEqual(len(plan), 0)
        self.assertEqual(plan.cost, 0.0)
        self.assertEqual(plan.endpoint, Pose(0.4, 0.4))

    def test_free_corridor(self):
        model, start = SimulatorModel(MazeSpec.empty()), Pose(0.2, 0.5, 0.0)
        plan = hybrid_astar(model, None, start, (0.5, 0.5), STRAIGHT, rng=np.random.default_rng(0))
        self.assertGreater(len(plan), 0)
        self.assertEqual(len(plan) % 3, 0)
        self.assertLessEqual(plan.endpoint.distance_to((0.5, 0.5)), 0.02)
        np.testing.assert_allclose(replay_plan(model, start, plan.controls), plan.poses, atol=1e-9)
        final, success = execute_plan(World(MazeSpec.empty(), start), plan)
        self.assertTrue(success)
        self.assertLessEqual(final.distance_to((0.5, 0.5)), 0.02 + 1e-9)

    def test_learned_model_replay(self):
        model, start = learned_model(), Pose(0.3, 0.3, 1.0)
        plan = hybrid_astar(model, None, start, (0.6, 0.5), rng=np.random.default_rng(1))
        np.testing.assert_allclose(replay_plan(model, start, plan.controls), plan.poses, atol=1e-9)
        self.assertGreater(len(plan), 0)
        self.assertEqual(len(plan) % 3, 0)

    def test_map_argument_replaces_the_snapshot_map(self):
        model = learned_model()
        plan = hybrid_astar(
            model, MapRealization(np.ones((4, 4, 2))), Pose(0.3, 0.3), (0.4, 0.3), STRAIGHT, rng=np.random.default_rng(2)
        )
        self.assertLessEqual(plan.endpoint.distance_to((0.4, 0.3)), 0.02)
        np.testing.assert_array_equal(model.map.grid, np.zeros((4, 4, 2)))

    def test_cheaper_arrival_keeps_the_first_anchor_pose(self):
        # both primitives end in cell (6, 5): the detour lands at x=0.62 first, the straight one at x=0.65 cheaper
        detour = [(0.0, 0.06), (0.0, -0.03), (0.0, 0.09)]
        straight = [(0.0, 0.05)] * 3

        def primitives(pose, rng):
            return np.array([detour, straight])

        expansions = []
        planner = HybridAStar(
            SimulatorModel(MazeSpec.empty()),
            PlannerConfig(cell_size=0.1, safety_weight=0.0, goal_tolerance=0.005, max_nodes=2),
            primitives=primitives,
            on_expand=lambda cell, g, f: expansions.append((cell, g)),
        )
        plan = planner.plan(Pose(0.5, 0.5, 0.0), (0.62, 0.5))
        self.assertEqual([cell for cell, _ in expansions], [(5, 5), (6, 5)])
        self.assertAlmostEqual(expansions[1][1], 0.15, places=9)
        self.assertAlmostEqual(plan.cost, 0.15, places=9)
        np.testing.assert_allclose(plan.controls, straight)
        self.assertAlmostEqual(plan.endpoint.x, 0.65, places=9)

    def test_plan_is_logged(self):
        with self.assertLogs("apps.navigate.planner", level="INFO") as logs:
            plan = hybrid_astar(SimulatorModel(MazeSpec.empty()), None, Pose(0.2, 0.5, 0.0), (0.3, 0.5), STRAIGHT)
        self.assertIn(f"Planned {len(plan)} controls, cost {plan.cost:.4f}, {plan.expanded_nodes} nodes expanded", logs.output[-1])

    def test_model_that_never_moves(self):
        with self.assertRaises(NoPathFound) as ctx:
            hybrid_astar(learned_model(bias=-50.0), None, Pose(0.2, 0.2), (0.7, 0.7))
        self.assertEqual(ctx.exception.expanded_nodes, 1)

    def test_walled_off_goal(self):
        box = [(0.6, 0.6, 0.9, 0.6), (0.9, 0.6, 0.9, 0.9), (0.9, 0.9, 0.6, 0.9), (0.6, 0.9, 0.6, 0.6)]
        maze = MazeSpec(walls=tuple(boundary_walls()) + tuple(box))
        config = PlannerConfig(max_nodes=200)
        with self.assertRaises(NoPathFound) as ctx:
            hybrid_astar(SimulatorModel(maze), None, Pose(0.2, 0.2), (0.75, 0.75), config)
        self.assertEqual(ctx.exception.expanded_nodes, 200)

    def test_goal_outside_the_square(self):
        with self.assertRaises(InvalidArgument):
            hybrid_astar(SimulatorModel(MazeSpec.empty()), None, Pose(0.2, 0.2), (1.2, 0.5))

    def test_random_primitives_shape(self):
        primitives = RandomPrimitives.from_config(PlannerConfig())(np.zeros(3), np.random.default_rng(0))
        self.assertEqual(primitives.shape, (8, 3, 2))
        self.assertTrue(np.all(np.abs(primitives[..., 0]) <= 0.5))
        np.testing.assert_array_equal(primitives[..., 1], 0.01)


class GridOracleTests(SimpleTestCase):
    """Zero safety cost and unit grid moves turn the planner into plain A* on the cell lattice."""

    def test_matches_breadth_first_search(self):
        n = 8
        config = PlannerConfig(cell_size=1.0 / n, safety_weight=0.0, goal_tolerance=0.02)
        for seed in range(5):
            maze = generate_maze(seed, "simple", 4)
            rng = np.random.default_rng(seed)
            start_cell, goal_cell = tuple(rng.integers(0, n, 2)), tuple(rng.integers(0, n, 2))
            start = Pose((start_cell[0] + 0.5) / n, (start_cell[1] + 0.5) / n, 0.0)
            goal = ((goal_cell[0] + 0.5) / n, (goal_cell[1] + 0.5) / n)
            popped = []
            planner = HybridAStar(
                SimulatorModel(maze), config, primitives=GridPrimitives(1.0 / n),
                on_expand=lambda cell, g, f: popped.append(f),
            )
            plan = planner.plan(start, goal, rng)
            expected = bfs_moves(maze, n, start_cell, goal_cell)
            self.assertEqual(len(plan), expected)
            self.assertAlmostEqual(plan.cost, expected / n, places=9)
            self.assertTrue(all(b >= a - 1e-12 for a, b in zip(popped, popped[1:])))
