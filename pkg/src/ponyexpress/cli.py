"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 solver error, 4 grid too large.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import errors
from .io import InputError, dumps, instance_to_dict, parse_instance, parse_plan, plan_to_dict, serialize_plan
from .model import Instance


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _solve(instance: Instance, mode: str, eps_prime: float):
    from .offline_multi import solve_multi
    from .offline_two import solve_two

    if mode == "two":
        if len(instance.robots) != 2:
            raise InputError("mode two requires exactly 2 robots")
        return solve_two(instance).plan
    return solve_multi(instance, eps_prime)


def cmd_solve(args) -> int:
    instance = parse_instance(_read(args.file))
    plan = _solve(instance, args.mode, args.eps_prime)
    sys.stdout.write(serialize_plan(plan))
    if args.figure:
        from .figures import plot_plan

        plot_plan(instance, plan, args.figure)
    return 0


def cmd_online(args) -> int:
    from .offline_multi import solve_multi
    from .offline_two import solve_two
    from .online import run_online

    instance = parse_instance(_read(args.file))
    outcome = run_online(instance)
    report = {
        "online_time": outcome.delivery_time,
        "winning_robot": outcome.winning_robot,
        "solo_times": outcome.per_robot_solo_time,
    }
    n = len(instance.robots)
    if n <= 2:
        offline = outcome.delivery_time if n == 1 else solve_two(instance).total_time
        report["offline_time"] = offline
        report["ratio"] = 1.0 if offline == 0 else outcome.delivery_time / offline
    else:
        grid = solve_multi(instance, args.eps_prime).total_time
        low = max(grid / math.sqrt(2) - args.eps_prime, 0.0)
        report["offline_bracket"] = [low, grid]
        report["ratio_bracket"] = [outcome.delivery_time / grid, outcome.delivery_time / low if low > 0 else None]
    sys.stdout.write(dumps(report))
    return 0


def cmd_adversary(args) -> int:
    from .online import build_relay_construction

    rc = build_relay_construction(args.n)
    sys.stdout.write(dumps(instance_to_dict(rc.instance)))
    return 0


def cmd_lowerbound(args) -> int:
    from .online import lb_position_search, lb_speed_search, position_landscape, speed_landscape

    res = args.res
    if res < 64:
        raise InputError("resolution must be at least 64")
    if args.kind == "speed":
        bound, cfg = lb_speed_search(res, res, res)
        report = {"kind": "speed", "bound": bound, "argmax": {"v": cfg.v, "alpha": cfg.alpha, "beta": cfg.beta}}
        point = (cfg.v, cfg.alpha)
    else:
        bound, (v, alpha) = lb_position_search(res, res)
        report = {"kind": "position", "bound": bound, "argmax": {"v": v, "alpha": alpha}}
        point = (v, alpha)
    sys.stdout.write(dumps(report))
    if args.figure:
        from .figures import plot_landscape

        if args.kind == "speed":
            vs, alphas, values, _ = speed_landscape(64, 64, 128)
        else:
            vs, alphas, values = position_landscape(128, 128)
        plot_landscape(vs, alphas, values, point, args.figure, f"{args.kind} lower bound {bound:.5f}")
    return 0


def cmd_plot(args) -> int:
    from .svg import render_svg

    instance = parse_instance(_read(args.file))
    plan = parse_plan(_read(args.plan))
    if len(plan.trajectories) != len(instance.robots):
        raise InputError("plan does not match the instance's robots")
    sys.stdout.write(render_svg(instance, plan))
    return 0


def cmd_oracle(args) -> int:
    from .offline_two import solve_two
    from .oracle import OracleConfig, oracle_two_robot

    instance = parse_instance(_read(args.file))
    if len(instance.robots) != 2:
        raise InputError("oracle requires exactly 2 robots")
    r0, r1 = instance.robots
    slow, fast = (r0, r1) if r0.speed <= r1.speed else (r1, r0)
    v = fast.speed / slow.speed
    if v <= 1 + 1e-9:
        raise errors.DegenerateSpeed("oracle needs distinct speeds")
    value = oracle_two_robot(slow.start, fast.start, instance.source, instance.destination, v, OracleConfig(grid_resolution=args.res)) / slow.speed
    solver = solve_two(instance).total_time
    sys.stdout.write(dumps({"oracle_time": value, "solver_time": solver, "relative_gap": abs(solver - value) / value if value else 0.0}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ponyexpress", description="Message delivery planning for robots of different speeds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute an offline delivery plan")
    p.add_argument("--mode", choices=["two", "multi"], default="two")
    p.add_argument("--eps-prime", type=float, default=0.05)
    p.add_argument("--figure", help="also render the plan to this image file")
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("online", help="compare the online strategy with the offline optimum")
    p.add_argument("--eps-prime", type=float, default=0.05)
    p.add_argument("file")
    p.set_defaults(func=cmd_online)

    p = sub.add_parser("adversary", help="emit the collinear relay deployment")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("lowerbound", help="search a lower-bound construction")
    p.add_argument("--kind", choices=["speed", "position"], required=True)
    p.add_argument("--res", type=int, default=256)
    p.add_argument("--figure", help="also render the search landscape to this image file")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("plot", help="render a plan as SVG")
    p.add_argument("file")
    p.add_argument("plan")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("oracle", help="brute-force cross-check of the two-robot solver")
    p.add_argument("--res", type=int, default=1500)
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "eps_prime", 1.0) is not None and getattr(args, "eps_prime", 1.0) <= 0:
        print("error: --eps-prime must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except errors.GridTooLarge as exc:
        print(f"GridTooLarge: {exc}; smallest admissible --eps-prime is about {exc.min_eps_prime:.6g}", file=sys.stderr)
        return 4
    except errors.PonyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
