"""Integral curves of the feedback field, with transition logging."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .errors import EmptyTrajectory, StartOutsideDomain, StartUnreachable
from .field_eval import PlanBundle, evaluate, locate
from .errors import GoalReached, OutsideDomain

OUTCOME_NAMES = {
    _kernel.OUT_CONVERGED: "Converged",
    _kernel.OUT_MAX_STEPS: "MaxSteps",
    _kernel.OUT_LEFT_DOMAIN: "LeftDomain",
}


@dataclass
class IntegrationParams:
    step: float | None = None  # default 0.005 * mean edge length
    eps_goal: float = 0.01
    max_steps: int = 200_000

    def resolved_step(self, bundle: PlanBundle) -> float:
        if self.step is not None:
            return float(self.step)
        return 0.005 * bundle.complex.mean_edge_length


@dataclass
class Trajectory:
    samples: np.ndarray  # (n, 2)
    transitions: np.ndarray  # (m, 4): step, from, to, face id
    outcome: str
    arc_length: float = field(init=False)

    def __post_init__(self):
        if len(self.samples) < 2:
            self.arc_length = 0.0
        else:
            d = np.diff(self.samples, axis=0)
            self.arc_length = float(np.hypot(d[:, 0], d[:, 1]).sum())

    @property
    def converged(self):
        return self.outcome == "Converged"


def integrate(
    bundle: PlanBundle, x0, params: IntegrationParams | None = None
) -> Trajectory:
    """Classical RK4 on x' = V(x) until the goal radius, escape or step cap."""
    if params is None:
        params = IntegrationParams()
    x0 = np.asarray(x0, dtype=float)
    try:
        t0 = locate(bundle, x0)
    except OutsideDomain as exc:
        raise StartOutsideDomain(str(exc)) from exc
    if not bundle.plan.reachable[t0]:
        raise StartUnreachable(f"start simplex {t0} cannot reach the goal")

    h = params.resolved_step(bundle)
    if np.hypot(*(x0 - bundle.plan.goal)) <= params.eps_goal:
        return Trajectory(
            samples=x0[None, :].copy(),
            transitions=np.zeros((0, 4), dtype=np.int64),
            outcome="Converged",
        )

    a = bundle.assignment
    samples = np.empty((params.max_steps + 1, 2))
    trans = np.empty((4096, 4), dtype=np.int64)
    ns, nt, outcome = _kernel.integrate_kernel(
        bundle.tri_normals,
        bundle.tri_offsets,
        bundle.complex.neighbors,
        bundle.complex.tri_faces,
        bundle.face_a,
        bundle.face_b,
        a.cell_kind,
        a.cell_vec,
        a.exit_mid,
        bundle.plan.exit_local,
        a.face_kind,
        a.face_vec,
        float(bundle.plan.goal[0]),
        float(bundle.plan.goal[1]),
        bundle.complex.diameter,
        float(bundle.grid_origin[0]),
        float(bundle.grid_origin[1]),
        bundle.grid_cell,
        bundle.grid_nx,
        bundle.grid_ny,
        bundle.grid_start,
        bundle.grid_items,
        float(x0[0]),
        float(x0[1]),
        t0,
        h,
        params.eps_goal,
        params.max_steps,
        samples,
        trans,
    )
    return Trajectory(
        samples=samples[:ns].copy(),
        transitions=trans[:nt].copy(),
        outcome=OUTCOME_NAMES[int(outcome)],
    )


def integrate_reference(
    bundle: PlanBundle, x0, params: IntegrationParams | None = None
) -> Trajectory:
    """Pure-Python RK4 used to cross-check the compiled kernel.

    Does not log transitions; intended for short verification runs only.
    """
    if params is None:
        params = IntegrationParams()
    x = np.asarray(x0, dtype=float).copy()
    try:
        hint = locate(bundle, x)
    except OutsideDomain as exc:
        raise StartOutsideDomain(str(exc)) from exc
    if not bundle.plan.reachable[hint]:
        raise StartUnreachable(f"start simplex {hint} cannot reach the goal")

    h = params.resolved_step(bundle)
    goal = bundle.plan.goal
    pts = [x.copy()]
    outcome = "MaxSteps"
    for _ in range(params.max_steps):
        dist = float(np.hypot(*(goal - x)))
        if dist <= params.eps_goal:
            outcome = "Converged"
            break
        hs = min(h, dist * 0.5) if dist < 2.0 * h else h
        ok = False
        for _ in range(8):
            try:
                v1, hint = evaluate(bundle, x, hint)
                v2, h2 = evaluate(bundle, x + 0.5 * hs * v1, hint)
                v3, h3 = evaluate(bundle, x + 0.5 * hs * v2, h2)
                v4, _ = evaluate(bundle, x + hs * v3, h3)
                nxt = x + hs / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4)
                locate(bundle, nxt, hint)
            except (OutsideDomain, GoalReached):
                hs *= 0.5
                continue
            ok = True
            break
        if not ok:
            outcome = "LeftDomain"
            break
        x = nxt
        pts.append(x.copy())
    return Trajectory(
        samples=np.asarray(pts),
        transitions=np.zeros((0, 4), dtype=np.int64),
        outcome=outcome,
    )


def resample_arclength(t: Trajectory, ds: float) -> np.ndarray:
    """Uniform arc-length resampling of the sample polyline."""
    pts = np.asarray(t.samples, dtype=float)
    if len(pts) < 2:
        raise EmptyTrajectory("need at least 2 samples to resample")
    if ds <= 0:
        raise ValueError("ds must be positive")
    seg = np.diff(pts, axis=0)
    seglen = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate(([0.0], np.cumsum(seglen)))
    L = s[-1]
    if L == 0.0:
        return pts[[0, -1]].copy()
    n = max(1, int(round(L / ds)))
    targets = np.linspace(0.0, L, n + 1)
    out = np.empty((n + 1, 2))
    out[:, 0] = np.interp(targets, s, pts[:, 0])
    out[:, 1] = np.interp(targets, s, pts[:, 1])
    return out


def export_samples(t: Trajectory, bundle: PlanBundle | None = None):
    """Delimited text rows: step, x, y, simplex id."""
    lines = ["step\tx\ty\tsimplex"]
    hint = None
    for i, (x, y) in enumerate(np.asarray(t.samples)):
        tri = -1
        if bundle is not None:
            try:
                tri = locate(bundle, (x, y), hint)
                hint = tri
            except OutsideDomain:
                tri = -1
        lines.append(f"{i}\t{x:.12g}\t{y:.12g}\t{tri}")
    return "\n".join(lines) + "\n"
