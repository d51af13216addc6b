import math

import numpy as np
import pytest

from helpers import TIGHT_INSTANCE, SQ2, random_two, rel, two_instance
from ponyexpress.errors import CoincidentPoints, DegenerateSpeed
from ponyexpress.geometry import distance, reflect_across_line, unsigned_angle
from ponyexpress.model import Instance, Point, Robot, check_plan
from ponyexpress.offline_two import (
    Case,
    optimal_time_constraint_residual,
    solve_two,
    solve_two_at_source,
    solve_two_general,
)
from ponyexpress.oracle import OracleConfig, oracle_two_robot

O = Point(0.0, 0.0)


def test_tight_instance_at_source():
    # normalised: slow speed 1 at S, fast speed 1+sqrt2 at (sqrt2, 0)
    sol = solve_two_at_source(Point(SQ2, 0), O, Point(1, 0), 1 + SQ2)
    assert sol.case == Case.HANDOVER
    x = 1 / (1 + SQ2)
    assert sol.meeting_point.close_to(Point(x, 0), 1e-12)
    # real time = normalised time * (1 + sqrt2) in the unscaled instance
    assert sol.total_time * (1 + SQ2) == pytest.approx(2 - x, abs=1e-12)


def test_tight_instance_instance():
    sol = solve_two(TIGHT_INSTANCE)
    assert sol.total_time == pytest.approx(2 - 1 / (1 + SQ2), abs=1e-12)
    check_plan(sol.plan, TIGHT_INSTANCE)


def test_at_source_slow_solo_far_fast_robot():
    sol = solve_two_at_source(Point(1e6, 0), O, Point(1, 0), 2)
    assert sol.case == Case.SLOW_SOLO and sol.total_time == 1


def test_at_source_coincident_rejected():
    with pytest.raises(CoincidentPoints):
        solve_two_at_source(O, O, Point(1, 0), 2)


def test_degenerate_speed_rejected():
    with pytest.raises(DegenerateSpeed):
        solve_two_at_source(Point(3, 0), O, Point(1, 0), 1.0)
    with pytest.raises(DegenerateSpeed):
        solve_two_general(O, Point(3, 0), O, Point(1, 0), 1 + 1e-10)


def test_at_source_bisector_case_frozen():
    sol = solve_two_at_source(Point(3, 0), O, Point(-1, 4), 2)
    assert sol.case == Case.HANDOVER
    # tangency at 45 degrees about the centre (-1, 0): |KM| = |MD|
    assert sol.total_time == pytest.approx(math.sqrt(20 - 8 * SQ2), rel=1e-12)
    # independent grid oracle, 2000x2000 plus zoom refinement
    assert rel(sol.total_time, 2.9472515165641116) <= 1e-6


def test_tangency_threshold_branches_agree():
    # D placed so that sin(SKD) = 1/v exactly: the straight ray from K is tangent
    v = 2.0
    K = Point(3, 0)
    beta = math.asin(1 / v)
    D = Point(3 - 6 * math.cos(beta), 6 * math.sin(beta))
    sol = solve_two_at_source(K, O, D, v)
    D2 = Point(3 - 6 * math.cos(beta + 1e-7), 6 * math.sin(beta + 1e-7))
    sol2 = solve_two_at_source(K, O, D2, v)
    assert sol.total_time == pytest.approx(sol2.total_time, abs=1e-6)


def test_general_reduces_to_at_source():
    K, D = Point(3, 0), Point(-1, 4)
    a = solve_two_general(O, K, O, D, 2)
    b = solve_two_at_source(K, O, D, 2)
    assert a.total_time == b.total_time


def test_general_case_thresholds():
    sol = solve_two_general(Point(0, -1), Point(0.1, 0), O, Point(1, 0), 2)
    assert sol.case == Case.FAST_SOLO and sol.total_time == pytest.approx(0.55, abs=1e-15)
    sol = solve_two_general(Point(-0.1, 0), Point(5, 0), O, Point(1, 0), 1.5)
    assert sol.case == Case.SLOW_SOLO and sol.total_time == pytest.approx(1.1, abs=1e-15)


def test_general_frozen_oracle_value():
    L, K, D = Point(-1, -0.5), Point(4, 1), Point(-2, 3)
    sol = solve_two_general(L, K, O, D, 2.5)
    assert sol.case == Case.HANDOVER
    # 2000x2000 grid oracle with zoom refinement
    assert rel(sol.total_time, 2.8949345628685004) <= 1e-6


def test_residual_examples():
    L, K = Point(0, -1), Point(2, 0)
    # M = S is itself a simultaneous meeting point here (|KS|/v = |LS|)
    assert optimal_time_constraint_residual(O, L, K, O, 2) == 0.0
    # hand-computed: (5/16 - 1/2 - 1/2)^2 - 1
    assert optimal_time_constraint_residual(Point(1, 0), L, K, O, 2) == pytest.approx(-0.234375, abs=1e-15)
    c = 3.7
    r1 = optimal_time_constraint_residual(Point(1, 0.5), L, K, O, 2)
    r2 = optimal_time_constraint_residual(Point(c, 0.5 * c), L * c, K * c, O, 2)
    assert r2 == pytest.approx(c * c * r1, rel=1e-12)


def test_equal_speeds_pick_better_solo():
    inst = Instance(O, Point(1, 0), (Robot(Point(3, 0), 2.0), Robot(Point(0, 0.5), 2.0)))
    sol = solve_two(inst)
    assert sol.total_time == pytest.approx((0.5 + 1) / 2)
    check_plan(sol.plan, inst)


def test_source_equals_destination():
    inst = Instance(Point(1, 1), Point(1, 1), (Robot(Point(0, 1), 1.0), Robot(Point(5, 1), 2.0)))
    assert solve_two(inst).total_time == pytest.approx(1.0)


def test_oracle_equivalence_sample(rng):
    for _ in range(15):
        L, K, S, D, v = random_two(rng)
        sol = solve_two_general(L, K, S, D, v)
        o = oracle_two_robot(L, K, S, D, v, OracleConfig(grid_resolution=600))
        assert rel(sol.total_time, o) <= 1e-5


def test_invariants_on_random_instances(rng):
    for _ in range(150):
        L, K, S, D, v = random_two(rng)
        sol = solve_two_general(L, K, S, D, v)
        inst = two_instance(L, K, S, D, v)
        check_plan(sol.plan, inst)
        a, sd = distance(L, S), distance(S, D)
        assert sol.total_time <= min(a + sd, (distance(K, S) + sd) / v) + 1e-9
        if sol.case == Case.HANDOVER:
            M, Q = sol.meeting_point, sol.detour_point
            slow_arrival = a + distance(S, M)
            fast_arrival = (distance(K, Q) + distance(Q, M)) / v
            assert rel(slow_arrival, fast_arrival) <= 1e-7
            if distance(K, Q) > 1e-9 and distance(Q, M) > 1e-9:
                assert unsigned_angle(Q - K, M - Q) <= 1e-6
            r = optimal_time_constraint_residual(M, L, K, S, v) if a > 0 else 0.0
            assert abs(r) <= 1e-6 * (1 + distance(S, M) ** 2)


def test_reflection_and_scaling(rng):
    for _ in range(60):
        L, K, S, D, v = random_two(rng)
        t = solve_two_general(L, K, S, D, v).total_time
        if S.close_to(D):
            continue
        m = [reflect_across_line(p, S, D) for p in (L, K, S, D)]
        assert solve_two_general(*m, v).total_time == pytest.approx(t, rel=1e-9, abs=1e-9)
        c = float(rng.uniform(0.1, 10))
        scaled = [p * c for p in (L, K, S, D)]
        assert solve_two_general(*scaled, v).total_time == pytest.approx(c * t, rel=1e-9)
        inst = two_instance(L, K, S, D, v)
        faster = Instance(S, D, tuple(Robot(r.start, r.speed * c) for r in inst.robots))
        assert solve_two(faster).total_time == pytest.approx(t / c, rel=1e-9)


def test_monotone_in_fast_speed(rng):
    for _ in range(100):
        L, K, S, D, v = random_two(rng)
        t1 = solve_two_general(L, K, S, D, v).total_time
        t2 = solve_two_general(L, K, S, D, 1.1 * v).total_time
        assert t2 <= t1 + 1e-9 * max(1.0, t1)


def test_arbitrary_slow_speed_and_order(rng):
    for _ in range(20):
        L, K, S, D, v = random_two(rng)
        u = float(rng.uniform(0.2, 3))
        base = solve_two_general(L, K, S, D, v).total_time
        inst = Instance(S, D, (Robot(K, v * u), Robot(L, u)))
        sol = solve_two(inst)
        assert sol.total_time == pytest.approx(base / u, rel=1e-12)
        check_plan(sol.plan, inst)


def test_deterministic(rng):
    L, K, S, D, v = random_two(rng)
    a = solve_two_general(L, K, S, D, v)
    b = solve_two_general(L, K, S, D, v)
    assert a.total_time == b.total_time and a.plan == b.plan


def test_oracle_equivalence_handover_instances(rng):
    # uniform instances are mostly solo; sample until the relay branch is hit
    seen = 0
    while seen < 40:
        L, K, S, D, v = random_two(rng)
        L = S + (L - S) * 0.15
        sol = solve_two_general(L, K, S, D, v)
        if sol.case != Case.HANDOVER:
            continue
        seen += 1
        o = oracle_two_robot(L, K, S, D, v, OracleConfig(grid_resolution=800))
        assert rel(sol.total_time, o) <= 1e-5
        assert sol.total_time <= o + 1e-9 * o
