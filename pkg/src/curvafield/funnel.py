"""Maximal star-shaped chain of simplexes around the goal.

The chain is grown breadth-first from the goal simplex; an adjacent
triangle is admitted when its off-face vertex lies strictly inside the
visibility cone spanned from the goal through the shared face.  The
resulting union of triangles is star-shaped with respect to the goal,
which the segment-walking oracle verifies independently.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCone
from .fields import (
    CELL_POINT_TO_GOAL,
    FACE_POINT_TO_GOAL,
    ROLE_FUNNEL_INTERNAL,
    FieldAssignment,
)
from .geometry import Cone, cone_contains, normalize
from .mesh import SimplicialComplex
from .planner import NO_TRI, DiscretePlan

STRICT_ALPHA = 1e-12

MODE_PLAN = "plan_constrained"
MODE_FULL = "full_bfs"


@dataclass
class FunnelRegion:
    members: set
    internal_faces: set
    boundary_faces: set
    mode: str = MODE_PLAN
    goal: np.ndarray = field(default=None)


def visibility_cone_test(x_g, face_pts, v_new) -> bool:
    """Strict membership of v_new in the cone from x_g through the face."""
    x_g = np.asarray(x_g, dtype=float)
    r1 = normalize(np.asarray(face_pts[0], float) - x_g)
    r2 = normalize(np.asarray(face_pts[1], float) - x_g)
    cross = r1[0] * r2[1] - r1[1] * r2[0]
    if abs(cross) <= 1e-9:
        raise DegenerateCone("goal is collinear with the shared face")
    v = normalize(np.asarray(v_new, float) - x_g)
    test = cone_contains(Cone(r1, r2), v, slack=STRICT_ALPHA)
    return bool(test.inside and test.alpha[0] > STRICT_ALPHA and test.alpha[1] > STRICT_ALPHA)


def grow_star_chain(
    c: SimplicialComplex, plan: DiscretePlan, mode: str = MODE_PLAN
) -> FunnelRegion:
    """FIFO expansion from the goal simplex under the visibility criterion.

    In plan-constrained mode only neighbors whose successor is the current
    simplex are explored, mirroring the paired-benchmark protocol; full
    BFS explores every adjacent simplex.
    """
    members = {int(plan.goal_tri)}
    visited = {int(plan.goal_tri)}
    queue = deque([int(plan.goal_tri)])
    while queue:
        cur = queue.popleft()
        for k in sorted(range(3), key=lambda kk: int(c.neighbors[cur, kk])):
            nb = int(c.neighbors[cur, k])
            if nb == NO_TRI or nb in visited:
                continue
            if mode == MODE_PLAN and int(plan.successor[nb]) != cur:
                continue
            # Shared face = local face k of cur; same vertices seen from nb.
            va = int(c.triangles[cur, (k + 1) % 3])
            vb = int(c.triangles[cur, (k + 2) % 3])
            v_new = next(
                int(v) for v in c.triangles[nb] if int(v) not in (va, vb)
            )
            try:
                ok = visibility_cone_test(
                    plan.goal,
                    (c.vertices[va], c.vertices[vb]),
                    c.vertices[v_new],
                )
            except DegenerateCone:
                ok = False
            if ok:
                members.add(nb)
                visited.add(nb)
                queue.append(nb)

    internal, boundary = set(), set()
    for t in members:
        for k in range(3):
            f = int(c.tri_faces[t, k])
            nb = int(c.neighbors[t, k])
            if nb != NO_TRI and nb in members:
                internal.add(f)
            else:
                boundary.add(f)
    return FunnelRegion(
        members=members,
        internal_faces=internal,
        boundary_faces=boundary,
        mode=mode,
        goal=np.asarray(plan.goal, dtype=float),
    )


def apply_funnel_overrides(
    c: SimplicialComplex, a: FieldAssignment, f: FunnelRegion
) -> FieldAssignment:
    """Point member cells and internal faces straight at the goal.

    Boundary faces of the funnel keep their previous vectors so the field
    blends smoothly at the funnel rim.
    """
    out = a.copy()
    for t in f.members:
        out.cell_kind[t] = CELL_POINT_TO_GOAL
        for k in range(3):
            if int(c.tri_faces[t, k]) in f.internal_faces:
                out.face_kind[t, k] = FACE_POINT_TO_GOAL
                out.face_role[t, k] = ROLE_FUNNEL_INTERNAL
    return out


# ---------------------------------------------------------------------------
# star-shape oracle

_KRONECKER = (0.7548776662466927, 0.5698402909980532)  # plastic-number pair


def _triangle_samples(tri, n):
    """Deterministic low-discrepancy interior points of a triangle."""
    pts = []
    for i in range(1, n + 1):
        u = (0.5 + i * _KRONECKER[0]) % 1.0
        v = (0.5 + i * _KRONECKER[1]) % 1.0
        if u + v > 1.0:
            u, v = 1.0 - u, 1.0 - v
        # Pull slightly toward the centroid so samples are strictly interior.
        w = np.array([1.0 - u - v, u, v]) * 0.999 + (1.0 / 3.0) * 0.001
        pts.append(w @ tri)
    return pts


def star_shape_oracle(
    c: SimplicialComplex, f: FunnelRegion, samples_per_simplex: int = 10
):
    """Check that segments from region samples to the goal stay inside.

    For each member triangle, a fixed low-discrepancy set of interior
    points plus the vertices is tested: the segment to the goal is cut at
    every face crossing and each sub-segment midpoint must lie in some
    member triangle.  Returns a list of violation strings.
    """
    goal = f.goal
    members = f.members
    violations = []

    # Segment/edge crossing parameters, vectorized over all complex edges.
    pa = c.vertices[c.faces[:, 0]]
    pb = c.vertices[c.faces[:, 1]]
    eab = pb - pa

    tri_pts = c.vertices[c.triangles]  # (T, 3, 2)
    v0 = tri_pts[:, 0]
    e1 = tri_pts[:, 1] - v0
    e2 = tri_pts[:, 2] - v0
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    tol = 1e-9

    def containing_members(p):
        dp = p - v0
        w1 = (dp[:, 0] * e2[:, 1] - dp[:, 1] * e2[:, 0]) / det
        w2 = (e1[:, 0] * dp[:, 1] - e1[:, 1] * dp[:, 0]) / det
        w0 = 1.0 - w1 - w2
        inside = (w0 >= -tol) & (w1 >= -tol) & (w2 >= -tol)
        return members.intersection(np.nonzero(inside)[0].tolist())

    def segment_ok(x):
        d = goal - x
        seg_len = np.hypot(d[0], d[1])
        if seg_len < 1e-12:
            return True
        denom = d[0] * eab[:, 1] - d[1] * eab[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ax = pa - x
            t = (ax[:, 0] * eab[:, 1] - ax[:, 1] * eab[:, 0]) / denom
            s = (ax[:, 0] * d[1] - ax[:, 1] * d[0]) / denom
        mask = np.isfinite(t) & (t > 0.0) & (t < 1.0) & (s >= 0.0) & (s <= 1.0)
        ts = np.concatenate(([0.0], np.sort(t[mask]), [1.0]))
        mids = x[None, :] + 0.5 * (ts[:-1] + ts[1:])[:, None] * d[None, :]
        for m in mids:
            if not containing_members(m):
                return False
        return True

    for t in sorted(members):
        tri = tri_pts[t]
        pts = list(tri) + _triangle_samples(tri, samples_per_simplex)
        for p in pts:
            if not segment_ok(np.asarray(p, dtype=float)):
                violations.append(
                    f"segment from {np.round(p, 6).tolist()} (simplex {t}) "
                    "to the goal leaves the region"
                )
    return violations
