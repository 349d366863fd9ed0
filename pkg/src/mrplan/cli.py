"""Command-line interface: plan, validate, render and bench subcommands.

Exit codes: 0 success, 1 I/O or schema error, 2 planner found no plan,
3 plan validation found violations.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

from .facts import compute_facts
from .mip import compile_model
from .plans import Plan, PlanError, dumps_plan, load_plan
from .render import render_svg
from .scene import Scene, SceneError, load_scene
from .search import NoPlan, PlannerConfig
from .search import plan as search_plan
from .taskgraph import build_cmtg
from .validator import validate_plan


def _load_scene_or_die(path: str) -> Scene:
    try:
        return load_scene(path)
    except (OSError, SceneError) as e:
        print(f"error: {e}", file=sys.stderr)
        raise SystemExit(1)


def _config_from_args(args) -> PlannerConfig:
    return PlannerConfig(
        c=args.c, alpha=args.alpha, t_max=args.t_max, k_max=args.k_max,
        max_iterations=args.max_iters, time_budget=args.time_budget,
        seed=args.seed, exhaust=args.exhaust)


def cmd_plan(args) -> int:
    scene = _load_scene_or_die(args.scene)
    try:
        cfg = _config_from_args(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.dump_facts or args.dump_cmtg or args.dump_mip:
        facts = compute_facts(scene)
        if args.dump_facts:
            Path(args.dump_facts).write_text(facts.dumps())
        if args.dump_cmtg or args.dump_mip:
            graph = build_cmtg(set(scene.goal_objects()), facts, scene)
            if args.dump_cmtg:
                Path(args.dump_cmtg).write_text(graph.dumps())
            if args.dump_mip:
                model = compile_model(graph, cfg.t_max)
                Path(args.dump_mip).write_text(model.dumps_lp())
    trace: list[str] = []
    result = search_plan(scene, cfg, trace=trace)
    if args.trace:
        Path(args.trace).write_text("\n".join(trace) + ("\n" if trace else ""))
    if isinstance(result, NoPlan):
        print(json.dumps(result.to_doc(), sort_keys=True), file=sys.stderr)
        return 2
    text = dumps_plan(result, sorted(scene.robots))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    scene = _load_scene_or_die(args.scene)
    try:
        plan = load_plan(args.plan)
        report = validate_plan(scene, plan)
    except (OSError, PlanError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(json.dumps(report.to_doc(), indent=2, sort_keys=True))
    return 0 if report.ok else 3


def cmd_render(args) -> int:
    scene = _load_scene_or_die(args.scene)
    plan = None
    if args.plan:
        try:
            plan = load_plan(args.plan)
        except (OSError, PlanError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
    try:
        Path(args.svg).write_text(render_svg(scene, plan))
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def _aggregate(values):
    if not values:
        return {"mean": None, "std": None}
    mean = statistics.fmean(values)
    std = statistics.pstdev(values) if len(values) > 1 else 0.0
    return {"mean": mean, "std": std}


def cmd_bench(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return 1
    scenarios = sorted(directory.glob("*.json"))
    report = {"trials": args.trials, "seed_base": args.seed_base, "scenarios": {}}
    header = (f"{'scenario':30s} {'success':>8s} {'time_s':>8s} "
              f"{'makespan':>9s} {'cost':>6s} {'iters':>6s}")
    print(header)
    print("-" * len(header))
    for path in scenarios:
        name = path.stem
        trials = []
        try:
            scene = load_scene(path)
        except (OSError, SceneError) as e:
            report["scenarios"][name] = {"error": str(e)}
            print(f"{name:30s} {'ERROR':>8s}  {e}")
            continue
        for k in range(args.trials):
            cfg = PlannerConfig(seed=args.seed_base + k,
                                time_budget=args.time_budget)
            trace: list[str] = []
            t0 = time.perf_counter()
            try:
                result = search_plan(scene, cfg, trace=trace)
            except Exception as e:  # record, keep benching
                trials.append({"success": False, "error": str(e),
                               "planning_time": time.perf_counter() - t0})
                continue
            dt = time.perf_counter() - t0
            if isinstance(result, NoPlan):
                trials.append({"success": False, "planning_time": dt,
                               "reason": result.reason,
                               "iterations": result.iterations})
                continue
            ok = validate_plan(scene, result).ok
            trials.append({"success": ok, "planning_time": dt,
                           "makespan": result.makespan,
                           "motion_cost": result.motion_cost,
                           "iterations": len(trace)})
        succ = [t for t in trials if t.get("success")]
        entry = {
            "trials": trials,
            "success_rate": len(succ) / len(trials) if trials else 0.0,
            "planning_time": _aggregate([t["planning_time"] for t in trials]),
            # plan quality is reported over successful trials only
            "makespan": _aggregate([t["makespan"] for t in succ]),
            "motion_cost": _aggregate([t["motion_cost"] for t in succ]),
            "iterations": _aggregate([t["iterations"] for t in succ]),
        }
        report["scenarios"][name] = entry

        def show(agg):
            return "-" if agg["mean"] is None else f"{agg['mean']:.2f}"

        print(f"{name:30s} {entry['success_rate'] * 100:7.0f}% "
              f"{show(entry['planning_time']):>8s} {show(entry['makespan']):>9s} "
              f"{show(entry['motion_cost']):>6s} {show(entry['iterations']):>6s}")
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrplan",
        description="Multi-robot geometric task-and-motion planner over a 2D world.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="search for a plan on a scene")
    p.add_argument("scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--time-budget", type=float, default=60.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t-max", type=int, default=4)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--out", help="plan output path (default: stdout)")
    p.add_argument("--dump-facts", help="write computed facts as sorted JSON")
    p.add_argument("--dump-cmtg", help="write the goal task graph, line-oriented")
    p.add_argument("--dump-mip", help="write the compiled model in LP format")
    p.add_argument("--trace", help="write the per-iteration search trace")
    p.add_argument("--exhaust", action="store_true",
                   help="search the whole budget and return the best plan")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="check a plan against a scene")
    p.add_argument("scene")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="render a scene (and plan) to SVG")
    p.add_argument("scene")
    p.add_argument("plan", nargs="?")
    p.add_argument("--svg", required=True, help="output SVG path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="run the benchmark harness on a directory")
    p.add_argument("dir")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--time-budget", type=float, default=60.0)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
