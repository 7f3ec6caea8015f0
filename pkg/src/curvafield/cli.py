"""Command-line front end: plan, trace, compare, render, validate."""

import argparse
import concurrent.futures
import os
import sys
import time

import numpy as np

from . import bench, bundle_io
from .envs import BUNDLED, resolve_environment
from .errors import (
    CurvafieldError,
    GoalInObstacle,
    GoalOutsideComplex,
    InvalidPolygon,
    ParseError,
    StartOutsideDomain,
    StartUnreachable,
)
from .mesh import load_triangle_mesh, triangulate, validate_complex
from .metrics import METRIC_NAMES, trajectory_metrics
from .svg import render_svg
from .trajectory import IntegrationParams, export_samples, integrate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_INPUT_ERRORS = (
    ParseError,
    InvalidPolygon,
    GoalInObstacle,
    GoalOutsideComplex,
    StartOutsideDomain,
    StartUnreachable,
    FileNotFoundError,
    ValueError,
)


def _parse_point(text):
    try:
        x, y = (float(v) for v in text.split(","))
    except Exception as exc:
        raise ValueError(f"expected X,Y — got {text!r}") from exc
    return np.array([x, y])


def _load_inputs(args):
    """(complex, environment-or-None, goal) from --env / --mesh-* / --goal."""
    env = None
    if args.env:
        env = resolve_environment(args.env)
    if args.mesh_node or args.mesh_ele:
        if not (args.mesh_node and args.mesh_ele):
            raise ValueError("--mesh-node and --mesh-ele must be given together")
        with open(args.mesh_node) as nf, open(args.mesh_ele) as ef:
            c = load_triangle_mesh(nf, ef)
    elif env is not None:
        c = triangulate(env)
    else:
        raise ValueError("need --env or --mesh-node/--mesh-ele")
    goal = None
    if args.goal:
        goal = _parse_point(args.goal)
    elif env is not None and env.goal is not None:
        goal = env.goal
    if goal is None:
        raise ValueError("no goal: pass --goal X,Y or an environment with one")
    return c, env, goal


def _params(args):
    return IntegrationParams(
        step=args.step, eps_goal=args.eps_goal, max_steps=args.max_steps
    )


def _write(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_plan(args):
    c, env, goal = _load_inputs(args)
    from .fields import validate_assignment

    t0 = time.perf_counter()
    bundle = bench.make_bundle(c, goal, method=args.method, funnel=args.funnel)
    precompute_ms = (time.perf_counter() - t0) * 1e3
    report = validate_assignment(c, bundle.plan, bundle.assignment)
    name = env.name if env is not None else "imported-mesh"
    doc = bundle_io.bundle_to_doc(bundle, name)
    import json

    _write(args.out, json.dumps(doc, indent=1) + "\n")
    print(f"precompute: {precompute_ms:.3f} ms "
          f"({c.num_triangles} simplexes, method={args.method})", file=sys.stderr)
    print(f"validation: {len(report)} violation(s)", file=sys.stderr)
    for v in report[:20]:
        print(f"  {v}", file=sys.stderr)
    return EXIT_NUMERIC if report else EXIT_OK


def cmd_trace(args):
    if args.bundle:
        bundle = bundle_io.load_bundle(args.bundle)
    else:
        c, _, goal = _load_inputs(args)
        bundle = bench.make_bundle(c, goal, method=args.method, funnel=args.funnel)
    if not args.start:
        raise ValueError("trace needs --start X,Y")
    start = _parse_point(args.start)
    params = _params(args)
    # Warm the compiled kernel so the timing below reflects steady state.
    integrate(bundle, start, IntegrationParams(
        step=params.resolved_step(bundle), eps_goal=params.eps_goal, max_steps=8))
    t0 = time.perf_counter()
    traj = integrate(bundle, start, params)
    elapsed = time.perf_counter() - t0
    n_evals = max(1, 4 * (len(traj.samples) - 1))  # four stage evaluations/step
    h = params.resolved_step(bundle)
    row = trajectory_metrics(traj, bundle.plan.goal_tri, -1, h)
    lines = [export_samples(traj, bundle)]
    lines.append("# metrics: outcome=" + traj.outcome + " " + " ".join(
        f"{m}={getattr(row, m):.12g}" for m in METRIC_NAMES) + "\n")
    _write(args.out, "".join(lines))
    print(f"outcome: {traj.outcome}, {len(traj.samples)} samples, "
          f"arc length {traj.arc_length:.6g}", file=sys.stderr)
    print(f"field evaluation: mean {elapsed / n_evals * 1e3:.5f} ms "
          f"over {n_evals} evaluations", file=sys.stderr)
    return EXIT_OK if traj.converged else EXIT_NUMERIC


def cmd_compare(args):
    c, _, _ = _load_inputs_no_goal(args)
    goals = bench.select_goals(c, args.goals, seed=args.seed)
    methods = ("baseline", "proposed")
    if args.ablation:
        methods = ("proposed_no_funnel", "proposed")
    payloads = [
        (
            np.asarray(c.vertices),
            np.asarray(c.triangles),
            g,
            methods,
            args.funnel,
            args.step,
            args.eps_goal,
            args.max_steps,
        )
        for g in goals
    ]
    results = {}
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(payloads) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as ex:
            for g, out in ex.map(bench.compare_one_goal, payloads):
                results[g] = out
    else:
        for payload in payloads:
            g, out = bench.compare_one_goal(payload)
            results[g] = out
    rows_by_method = {m: [] for m in methods}
    for g in sorted(results):
        for m in methods:
            rows_by_method[m].extend(bench.rows_from_tuples(results[g][m]))
    stats = bench.paired_compare(rows_by_method[methods[0]], rows_by_method[methods[1]])
    _write(args.out, bench.rows_to_csv(rows_by_method))
    print(bench.stats_to_text(stats, methods[0], methods[1]), file=sys.stderr)
    return EXIT_OK


def _load_inputs_no_goal(args):
    """Like _load_inputs but tolerates a missing goal (sweeps supply goals)."""
    env = None
    if args.env:
        env = resolve_environment(args.env)
    if args.mesh_node or args.mesh_ele:
        if not (args.mesh_node and args.mesh_ele):
            raise ValueError("--mesh-node and --mesh-ele must be given together")
        with open(args.mesh_node) as nf, open(args.mesh_ele) as ef:
            c = load_triangle_mesh(nf, ef)
    elif env is not None:
        c = triangulate(env)
    else:
        raise ValueError("need --env or --mesh-node/--mesh-ele")
    return c, env, None


def cmd_render(args):
    c, env, goal = _load_inputs(args)
    bundle = bench.make_bundle(c, goal, method=args.method, funnel=args.funnel)
    trajectories = []
    if args.start:
        trajectories.append(integrate(bundle, _parse_point(args.start), _params(args)))
    _write(args.out, render_svg(bundle, trajectories, environment=env))
    return EXIT_OK


def cmd_validate(args):
    c, _, goal = _load_inputs(args)
    from .fields import validate_assignment

    problems = validate_complex(c)
    bundle = bench.make_bundle(c, goal, method=args.method, funnel=args.funnel)
    problems += [str(v) for v in validate_assignment(c, bundle.plan, bundle.assignment)]
    if problems:
        for p in problems:
            print(p)
        print(f"{len(problems)} violation(s)")
        return EXIT_NUMERIC
    print("ok: complex and assignment pass all checks")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="curvafield",
        description="Smooth feedback vector fields over triangulated free space.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("plan", cmd_plan),
        ("trace", cmd_trace),
        ("compare", cmd_compare),
        ("render", cmd_render),
        ("validate", cmd_validate),
    ):
        sp = sub.add_parser(name)
        sp.set_defaults(fn=fn)
        sp.add_argument("--env", help=f"bundled name ({', '.join(BUNDLED)}) or JSON path")
        sp.add_argument("--mesh-node", help="Triangle .node file")
        sp.add_argument("--mesh-ele", help="Triangle .ele file")
        sp.add_argument("--goal", help="goal point as X,Y")
        sp.add_argument(
            "--method",
            choices=bench.METHODS,
            default="proposed",
        )
        sp.add_argument("--funnel", choices=bench.FUNNEL_MODES, default="plan")
        sp.add_argument("--step", type=float, default=None)
        sp.add_argument("--eps-goal", type=float, default=0.01)
        sp.add_argument("--max-steps", type=int, default=200_000)
        sp.add_argument("--goals", default="all", help="'all' or a subsample size")
        sp.add_argument("--ablation", action="store_true")
        sp.add_argument("--jobs", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        if name in ("trace", "render"):
            sp.add_argument("--start", help="start point as X,Y")
        if name == "trace":
            sp.add_argument("--bundle", help="bundle document from `plan`")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CurvafieldError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
