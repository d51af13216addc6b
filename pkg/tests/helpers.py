import math

import numpy as np

from ponyexpress.model import Instance, Point, Robot

SQ2 = math.sqrt(2)
TIGHT_INSTANCE = Instance(
    Point(0.0, 0.0),
    Point(1.0, 0.0),
    (Robot(Point(0.0, 0.0), 1 / (1 + SQ2)), Robot(Point(SQ2, 0.0), 1.0)),
)
TIGHT_RATIO = (5 + 4 * SQ2) / 7


def random_point(rng, box=5.0):
    return Point(*(float(c) for c in rng.uniform(-box, box, 2)))


def random_two(rng, box=5.0):
    """(L, K, S, D, v) with slow speed 1."""
    L, K, S, D = (random_point(rng, box) for _ in range(4))
    v = float(rng.uniform(1.05, 10.0))
    return L, K, S, D, v


def two_instance(L, K, S, D, v):
    return Instance(S, D, (Robot(L, 1.0), Robot(K, v)))


def random_multi(rng, n, box=2.0, speeds=(1.0, 5.0)):
    S, D = random_point(rng, box), random_point(rng, box)
    robots = tuple(Robot(random_point(rng, box), float(rng.uniform(*speeds))) for _ in range(n))
    return Instance(S, D, robots)


def grid_graph_problem(grid):
    from ponyexpress.offline_multi import GraphDeliveryProblem

    edges = []
    for j in range(grid.rows):
        for i in range(grid.cols):
            v = j * grid.cols + i
            if i + 1 < grid.cols:
                edges.append((v, v + 1, grid.epsilon))
            if j + 1 < grid.rows:
                edges.append((v, v + grid.cols, grid.epsilon))
    agents = list(zip(grid.snapped_starts, grid.speeds))
    return GraphDeliveryProblem(
        grid.rows * grid.cols, edges, agents, grid.source_vertex, grid.dest_vertex, [grid.release_time] * len(agents)
    )


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def uniform_angles(n):
    return np.linspace(0, 2 * np.pi, n, endpoint=False)
