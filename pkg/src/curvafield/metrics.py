"""Path-quality and tracking-effort metrics, plus paired comparisons."""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidWeights, KeyMismatch, NotConverged, TooShort
from .trajectory import Trajectory, resample_arclength

METRIC_NAMES = (
    "path_length",
    "kappa_max",
    "total_bending",
    "total_turning",
    "lqr_travel_time",
    "lqr_effort",
)


@dataclass
class MetricsRow:
    goal_tri: int
    start_tri: int
    outcome: str
    path_length: float = 0.0
    kappa_max: float = 0.0
    total_bending: float = 0.0
    total_turning: float = 0.0
    lqr_travel_time: float = 0.0
    lqr_effort: float = 0.0

    def values(self):
        return {m: getattr(self, m) for m in METRIC_NAMES}


@dataclass
class LqrSetup:
    q_pos: float = 100.0
    q_vel: float = 1.0
    r: float = 1.0
    dt: float = 0.01


def curvature_profile(polyline, ds):
    """Discrete curvature: unwrapped heading change per unit arc length."""
    pts = np.asarray(polyline, dtype=float)
    if len(pts) < 3:
        raise TooShort("need at least 3 points for a curvature profile")
    seg = np.diff(pts, axis=0)
    theta = np.unwrap(np.arctan2(seg[:, 1], seg[:, 0]))
    return np.diff(theta) / ds


def bending_metrics(kappa, ds):
    kappa = np.asarray(kappa, dtype=float)
    if kappa.size == 0:
        return {"total_bending": 0.0, "total_turning": 0.0, "kappa_max": 0.0}
    return {
        "total_bending": float(np.sum(kappa**2) * ds),
        "total_turning": float(np.sum(np.abs(kappa)) * ds),
        "kappa_max": float(np.max(np.abs(kappa))),
    }


def lqr_gain(q_pos, q_vel, r):
    """Closed-form CARE gains for the per-axis double integrator.

    Returns (K, P): K = [k_pos, k_vel], P the Riccati solution, validated
    against the equation residual.
    """
    if q_pos <= 0 or q_vel < 0 or r <= 0:
        raise InvalidWeights("need q_pos > 0, q_vel >= 0, r > 0")
    k1 = math.sqrt(q_pos / r)
    k2 = math.sqrt(q_vel / r + 2.0 * math.sqrt(q_pos / r))
    p12 = r * k1
    p22 = r * k2
    p11 = p12 * p22 / r
    P = np.array([[p11, p12], [p12, p22]])
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    Q = np.diag([q_pos, q_vel])
    res = A.T @ P + P @ A - P @ B @ B.T @ P / r + Q
    if np.abs(res).max() > 1e-9 * max(1.0, np.abs(P).max()):
        raise InvalidWeights(f"Riccati residual too large: {np.abs(res).max():g}")
    return np.array([k1, k2]), P


@njit(cache=True)
def _track(ref_x, ref_y, vref_x, vref_y, k1, k2, dt):
    px = ref_x[0]
    vx = vref_x[0]
    py = ref_y[0]
    vy = vref_y[0]
    effort = 0.0
    for i in range(ref_x.shape[0]):
        ux = -k1 * (px - ref_x[i]) - k2 * (vx - vref_x[i])
        uy = -k1 * (py - ref_y[i]) - k2 * (vy - vref_y[i])
        effort += (ux * ux + uy * uy) * dt
        px += vx * dt
        py += vy * dt
        vx += ux * dt
        vy += uy * dt
    return effort


def lqr_track(t: Trajectory, setup: LqrSetup | None = None):
    """Track the path at unit reference speed with two decoupled axes.

    The reference moves along the path at speed 1, so travel time equals
    the path length.  The tracker starts at the path start with the
    reference's initial velocity, isolating path-shape effort.
    """
    if setup is None:
        setup = LqrSetup()
    if not t.converged:
        raise NotConverged(f"trajectory outcome is {t.outcome}")
    L = t.arc_length
    if L <= setup.dt:
        return {"travel_time": L, "effort": 0.0}
    ref = resample_arclength(t, setup.dt)  # spacing dt at unit speed
    vel = np.gradient(ref, setup.dt, axis=0)
    K, _ = lqr_gain(setup.q_pos, setup.q_vel, setup.r)
    effort = _track(
        np.ascontiguousarray(ref[:, 0]),
        np.ascontiguousarray(ref[:, 1]),
        np.ascontiguousarray(vel[:, 0]),
        np.ascontiguousarray(vel[:, 1]),
        K[0],
        K[1],
        setup.dt,
    )
    return {"travel_time": L, "effort": float(effort)}


def trajectory_metrics(t: Trajectory, goal_tri, start_tri, step_h, setup=None):
    """Full MetricsRow for one trajectory (zeros when not converged)."""
    row = MetricsRow(goal_tri=int(goal_tri), start_tri=int(start_tri), outcome=t.outcome)
    if not t.converged or len(t.samples) < 3:
        row.path_length = t.arc_length
        return row
    L = t.arc_length
    ds = max(2.0 * step_h, L / 5000.0)
    poly = resample_arclength(t, ds)
    row.path_length = L
    if len(poly) >= 3:
        actual_ds = L / (len(poly) - 1)
        kappa = curvature_profile(poly, actual_ds)
        bm = bending_metrics(kappa, actual_ds)
        row.kappa_max = bm["kappa_max"]
        row.total_bending = bm["total_bending"]
        row.total_turning = bm["total_turning"]
    lt = lqr_track(t, setup)
    row.lqr_travel_time = lt["travel_time"]
    row.lqr_effort = lt["effort"]
    return row


@dataclass
class PairedStats:
    per_metric: dict  # name -> {base_mean, base_std, prop_mean, prop_std,
    #                            improvement_pct, win_rate_pct, median_reduction_pct}
    n_pairs: int
    n_dropped: int


def paired_compare(rows_base, rows_prop) -> PairedStats:
    """Pair rows by (goal, start); strict-better win rates per metric."""
    base = {(r.goal_tri, r.start_tri): r for r in rows_base}
    prop = {(r.goal_tri, r.start_tri): r for r in rows_prop}
    if set(base) != set(prop):
        raise KeyMismatch("baseline and proposed row keys differ")
    keys = sorted(base)
    paired = [
        k for k in keys if base[k].outcome == "Converged" and prop[k].outcome == "Converged"
    ]
    dropped = len(keys) - len(paired)

    per_metric = {}
    for m in METRIC_NAMES:
        b = np.array([getattr(base[k], m) for k in paired])
        p = np.array([getattr(prop[k], m) for k in paired])
        if len(paired) == 0:
            per_metric[m] = None
            continue
        bm, pm = float(b.mean()), float(p.mean())
        wins = float(np.mean(p < b)) * 100.0
        with np.errstate(divide="ignore", invalid="ignore"):
            red = np.where(b > 0, (b - p) / b * 100.0, 0.0)
        per_metric[m] = {
            "base_mean": bm,
            "base_std": float(b.std()),
            "prop_mean": pm,
            "prop_std": float(p.std()),
            "improvement_pct": (bm - pm) / bm * 100.0 if bm != 0 else 0.0,
            "win_rate_pct": wins,
            "median_reduction_pct": float(np.median(red)),
        }
    return PairedStats(per_metric=per_metric, n_pairs=len(paired), n_dropped=dropped)
