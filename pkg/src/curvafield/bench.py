"""Benchmark orchestration: bundle construction, sweeps and comparisons.

The paired protocol computes the discrete plan once per goal and evaluates
both field-assignment methods on it, so every observed difference comes
from the assignment, not the plan.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import CurvafieldError
from .field_eval import PlanBundle
from .fields import baseline_assignment, proposed_assignment
from .funnel import MODE_FULL, MODE_PLAN, apply_funnel_overrides, grow_star_chain
from .mesh import SimplicialComplex
from .metrics import METRIC_NAMES, MetricsRow, PairedStats, paired_compare, trajectory_metrics
from .planner import DiscretePlan, build_plan
from .trajectory import IntegrationParams, Trajectory, integrate

METHODS = ("baseline", "proposed", "proposed_no_funnel")

FUNNEL_OFF = "off"
FUNNEL_MODES = (FUNNEL_OFF, "plan", "full")

_MODE_MAP = {"plan": MODE_PLAN, "full": MODE_FULL}


def make_bundle(
    c: SimplicialComplex,
    goal,
    method: str = "proposed",
    funnel: str = "plan",
    plan: DiscretePlan | None = None,
) -> PlanBundle:
    """Plan (unless given), synthesize the field, optionally grow the funnel."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if funnel not in FUNNEL_MODES:
        raise ValueError(f"unknown funnel mode {funnel!r}")
    if plan is None:
        plan = build_plan(c, goal)
    if method == "baseline":
        a = baseline_assignment(c, plan)
        return PlanBundle(c, plan, a, None)
    a = proposed_assignment(c, plan)
    if method == "proposed_no_funnel" or funnel == FUNNEL_OFF:
        return PlanBundle(c, plan, a, None)
    f = grow_star_chain(c, plan, mode=_MODE_MAP[funnel])
    a = apply_funnel_overrides(c, a, f)
    return PlanBundle(c, plan, a, f)


@dataclass
class SweepResult:
    """Per-goal convergence bookkeeping for a whole-complex sweep."""

    goal_tri: int
    outcomes: dict
    funnel_members: set
    violations: list = field(default_factory=list)

    @property
    def all_converged(self):
        return set(self.outcomes.values()) <= {"Converged"}


def _check_samples_inside(c: SimplicialComplex, traj: Trajectory, start_tri: int):
    """Worst barycentric coordinate of every sample against its own simplex.

    The simplex of each sample is reconstructed from the transition log.
    """
    tri_of = np.full(len(traj.samples), start_tri, dtype=np.int64)
    for step, _, to, _ in traj.transitions:
        tri_of[int(step) + 1 :] = int(to)
    v = c.vertices[c.triangles[tri_of]]  # (n, 3, 2)
    d = np.asarray(traj.samples) - v[:, 0]
    e1 = v[:, 1] - v[:, 0]
    e2 = v[:, 2] - v[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    w1 = (d[:, 0] * e2[:, 1] - d[:, 1] * e2[:, 0]) / det
    w2 = (e1[:, 0] * d[:, 1] - e1[:, 1] * d[:, 0]) / det
    w0 = 1.0 - w1 - w2
    return float(min(w0.min(), w1.min(), w2.min(), 0.0))


def _check_exit_discipline(
    plan: DiscretePlan, funnel_members: set, traj: Trajectory, c: SimplicialComplex
):
    """Transitions outside the funnel must use the designated exit face,
    and no simplex may be revisited outside the funnel."""
    problems = []
    seen = set()
    for step, frm, to, face in traj.transitions:
        frm = int(frm)
        to = int(to)
        if frm in funnel_members:
            continue
        if int(face) != plan.exit_face(c, frm) or to != int(plan.successor[frm]):
            problems.append(("wrong-exit", int(step), frm, to))
        if to in seen and to not in funnel_members:
            problems.append(("revisit", int(step), frm, to))
        seen.add(frm)
    return problems


def convergence_sweep(
    c: SimplicialComplex,
    goals=None,
    params: IntegrationParams | None = None,
    method: str = "proposed",
    funnel: str = "plan",
    check_containment: bool = False,
    check_discipline: bool = False,
):
    """Integrate from every other centroid for each goal simplex.

    Yields one SweepResult per goal.  Containment and exit-discipline
    checks append human-readable violation tuples.
    """
    if params is None:
        params = IntegrationParams()
    if goals is None:
        goals = range(c.num_triangles)
    for g in goals:
        g = int(g)
        bundle = make_bundle(c, c.centroids[g], method=method, funnel=funnel)
        members = set() if bundle.funnel is None else bundle.funnel.members
        outcomes = {}
        violations = []
        for s in range(c.num_triangles):
            if s == g or not bundle.plan.reachable[s]:
                continue
            traj = integrate(bundle, c.centroids[s], params)
            outcomes[s] = traj.outcome
            if check_containment:
                worst = _check_samples_inside(c, traj, s)
                if worst < -1e-9:
                    violations.append(("outside", g, s, worst))
            if check_discipline:
                for p in _check_exit_discipline(bundle.plan, members, traj, c):
                    violations.append((p[0], g, s) + p[1:])
        yield SweepResult(
            goal_tri=g, outcomes=outcomes, funnel_members=members, violations=violations
        )


def metrics_for_bundle(
    bundle: PlanBundle, starts, params: IntegrationParams | None = None
):
    """MetricsRow per start centroid (errors recorded as outcome strings)."""
    if params is None:
        params = IntegrationParams()
    c = bundle.complex
    h = params.resolved_step(bundle)
    rows = []
    for s in starts:
        s = int(s)
        try:
            traj = integrate(bundle, c.centroids[s], params)
            rows.append(
                trajectory_metrics(traj, bundle.plan.goal_tri, s, h)
            )
        except CurvafieldError as exc:
            rows.append(
                MetricsRow(
                    goal_tri=int(bundle.plan.goal_tri),
                    start_tri=s,
                    outcome=type(exc).__name__,
                )
            )
    return rows


def compare_goals(
    c: SimplicialComplex,
    goals,
    params: IntegrationParams | None = None,
    methods=("baseline", "proposed"),
    funnel: str = "plan",
):
    """Shared-plan paired benchmark over the given goal simplexes.

    Returns (rows_by_method, stats) where stats pairs the first method
    against the second.
    """
    if params is None:
        params = IntegrationParams()
    rows = {m: [] for m in methods}
    for g in goals:
        g = int(g)
        plan = build_plan(c, c.centroids[g])
        starts = [
            s for s in range(c.num_triangles) if s != g and plan.reachable[s]
        ]
        for m in methods:
            bundle = make_bundle(c, c.centroids[g], method=m, funnel=funnel, plan=plan)
            rows[m].extend(metrics_for_bundle(bundle, starts, params))
    stats = paired_compare(rows[methods[0]], rows[methods[1]])
    return rows, stats


def compare_one_goal(payload):
    """Worker-friendly single-goal compare; all inputs/outputs picklable.

    payload: (vertices, triangles, goal_tri, methods, funnel, step,
    eps_goal, max_steps).  Returns {method: [row tuples]} where a row is
    (goal_tri, start_tri, outcome, *metric values).
    """
    vertices, triangles, g, methods, funnel, step, eps_goal, max_steps = payload
    c = SimplicialComplex(vertices, triangles)
    params = IntegrationParams(step=step, eps_goal=eps_goal, max_steps=max_steps)
    plan = build_plan(c, c.centroids[int(g)])
    starts = [s for s in range(c.num_triangles) if s != int(g) and plan.reachable[s]]
    out = {}
    for m in methods:
        bundle = make_bundle(c, c.centroids[int(g)], method=m, funnel=funnel, plan=plan)
        rows = metrics_for_bundle(bundle, starts, params)
        out[m] = [
            (r.goal_tri, r.start_tri, r.outcome)
            + tuple(getattr(r, name) for name in METRIC_NAMES)
            for r in rows
        ]
    return int(g), out


def rows_from_tuples(tuples):
    rows = []
    for t in tuples:
        row = MetricsRow(goal_tri=int(t[0]), start_tri=int(t[1]), outcome=t[2])
        for name, val in zip(METRIC_NAMES, t[3:]):
            setattr(row, name, float(val))
        rows.append(row)
    return rows


def select_goals(c: SimplicialComplex, spec, seed: int = 0):
    """'all' or an integer subsample size; deterministic under the seed."""
    if spec == "all":
        return list(range(c.num_triangles))
    n = int(spec)
    if n >= c.num_triangles:
        return list(range(c.num_triangles))
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(c.num_triangles, size=n, replace=False).tolist())


def rows_to_csv(rows_by_method) -> str:
    """Deterministic delimited table of all metric rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "goal_tri", "start_tri", "outcome", *METRIC_NAMES])
    for method in sorted(rows_by_method):
        rows = sorted(rows_by_method[method], key=lambda r: (r.goal_tri, r.start_tri))
        for r in rows:
            w.writerow(
                [method, r.goal_tri, r.start_tri, r.outcome]
                + [f"{getattr(r, m):.12g}" for m in METRIC_NAMES]
            )
    return buf.getvalue()


def stats_to_text(stats: PairedStats, label_a="baseline", label_b="proposed") -> str:
    lines = [
        f"pairs={stats.n_pairs} dropped={stats.n_dropped} ({label_b} vs {label_a})",
        f"{'metric':<18}{'mean_'+label_a:>14}{'mean_'+label_b:>14}"
        f"{'improve%':>10}{'win%':>8}{'med_red%':>10}",
    ]
    for m in METRIC_NAMES:
        s = stats.per_metric[m]
        if s is None:
            lines.append(f"{m:<18}{'n/a':>14}")
            continue
        lines.append(
            f"{m:<18}{s['base_mean']:>14.6g}{s['prop_mean']:>14.6g}"
            f"{s['improvement_pct']:>10.2f}{s['win_rate_pct']:>8.2f}"
            f"{s['median_reduction_pct']:>10.2f}"
        )
    return "\n".join(lines) + "\n"
