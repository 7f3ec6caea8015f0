"""Online feedback law: point location, bump blending, field evaluation.

``PlanBundle`` packages an immutable complex, plan, assignment and optional
funnel together with a uniform-grid point-location accelerator and the flat
arrays consumed by the compiled integrator.  ``evaluate`` here is the plain
reference implementation; the batch integrator mirrors it exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GoalReached, OutsideDomain
from .fields import (
    CELL_CONSTANT,
    CELL_POINT_TO_EXIT,
    CELL_POINT_TO_GOAL,
    FACE_FIXED,
    FieldAssignment,
)
from .funnel import FunnelRegion
from .geometry import inward_normal
from .mesh import SimplicialComplex
from .planner import NO_TRI, DiscretePlan

NEAR_VERTEX_REL = 1e-9
BLEND_EPS = 1e-9


def lambda_aux(s: float) -> float:
    """(1/s) * exp(-1/s) for s > 0, extended by its limit 0 elsewhere."""
    if s <= 0.0:
        return 0.0
    try:
        return math.exp(-1.0 / s) / s
    except OverflowError:
        return 0.0


def bump(s: float) -> float:
    """Smooth monotone 0-to-1 ramp with all derivatives zero at 0 and 1."""
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    a = lambda_aux(s)
    return a / (a + lambda_aux(1.0 - s))


@dataclass
class PlanBundle:
    complex: SimplicialComplex
    plan: DiscretePlan
    assignment: FieldAssignment
    funnel: FunnelRegion | None = None

    # derived, filled in __post_init__
    tri_normals: np.ndarray = field(init=False, repr=False)
    tri_offsets: np.ndarray = field(init=False, repr=False)
    face_a: np.ndarray = field(init=False, repr=False)
    face_b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = self.complex
        T = c.num_triangles
        self.tri_normals = np.zeros((T, 3, 2))
        self.tri_offsets = np.zeros((T, 3))
        self.face_a = np.zeros((T, 3, 2))
        self.face_b = np.zeros((T, 3, 2))
        for t in range(T):
            tri = c.tri_coords(t)
            for k in range(3):
                n = inward_normal(tri, k)
                a = tri[(k + 1) % 3]
                self.tri_normals[t, k] = n
                self.tri_offsets[t, k] = -float(np.dot(n, a))
                self.face_a[t, k] = a
                self.face_b[t, k] = tri[(k + 2) % 3]
        self._build_grid()

    # -- uniform grid accelerator -----------------------------------------
    def _build_grid(self):
        c = self.complex
        tri_pts = c.vertices[c.triangles]
        diam_per_tri = c.edge_lengths.max(axis=1)
        cell = float(diam_per_tri.mean())
        lo = c.vertices.min(axis=0)
        hi = c.vertices.max(axis=0)
        nx = max(1, int(math.ceil((hi[0] - lo[0]) / cell)))
        ny = max(1, int(math.ceil((hi[1] - lo[1]) / cell)))
        buckets = [[] for _ in range(nx * ny)]
        for t in range(c.num_triangles):
            bx0 = int((tri_pts[t, :, 0].min() - lo[0]) / cell)
            bx1 = int((tri_pts[t, :, 0].max() - lo[0]) / cell)
            by0 = int((tri_pts[t, :, 1].min() - lo[1]) / cell)
            by1 = int((tri_pts[t, :, 1].max() - lo[1]) / cell)
            for bx in range(max(0, bx0), min(nx - 1, bx1) + 1):
                for by in range(max(0, by0), min(ny - 1, by1) + 1):
                    buckets[by * nx + bx].append(t)
        start = np.zeros(nx * ny + 1, dtype=np.int64)
        items = []
        for i, b in enumerate(buckets):
            start[i + 1] = start[i] + len(b)
            items.extend(b)
        self.grid_origin = lo
        self.grid_cell = cell
        self.grid_nx = nx
        self.grid_ny = ny
        self.grid_start = start
        self.grid_items = np.asarray(items, dtype=np.int64)

    def _grid_candidates(self, x):
        bx = int((x[0] - self.grid_origin[0]) / self.grid_cell)
        by = int((x[1] - self.grid_origin[1]) / self.grid_cell)
        if not (0 <= bx < self.grid_nx and 0 <= by < self.grid_ny):
            return ()
        i = by * self.grid_nx + bx
        return self.grid_items[self.grid_start[i] : self.grid_start[i + 1]]

    # -- queries ----------------------------------------------------------
    def face_distances(self, t, x):
        return self.tri_normals[t] @ np.asarray(x, dtype=float) + self.tri_offsets[t]

    def contains(self, t, x, tol=None):
        if tol is None:
            tol = NEAR_VERTEX_REL * self.complex.diameter
        return bool(self.face_distances(t, x).min() >= -tol)


def locate(bundle: PlanBundle, x, hint=None) -> int:
    """Triangle whose closed region contains x; lowest id on face ties."""
    c = bundle.complex
    x = np.asarray(x, dtype=float)
    tol = NEAR_VERTEX_REL * c.diameter

    t = _walk(bundle, x, hint, tol) if hint is not None else -1
    if t < 0:
        for cand in bundle._grid_candidates(x):
            if bundle.contains(int(cand), x, tol):
                t = int(cand)
                break
    if t < 0:
        for cand in range(c.num_triangles):
            if bundle.contains(cand, x, tol):
                t = cand
                break
    if t < 0:
        raise OutsideDomain(f"point {x.tolist()} is outside the complex")

    # On a shared face the lowest incident id wins.
    d = bundle.face_distances(t, x)
    best = t
    for k in range(3):
        if d[k] <= tol:
            nb = int(c.neighbors[t, k])
            if nb != NO_TRI and nb < best and bundle.contains(nb, x, tol):
                best = nb
    return best


def _walk(bundle, x, hint, tol, max_steps=None):
    c = bundle.complex
    t = int(hint)
    if max_steps is None:
        max_steps = c.num_triangles + 1
    for _ in range(max_steps):
        d = bundle.face_distances(t, x)
        k = int(np.argmin(d))
        if d[k] >= -tol:
            return t
        nb = int(c.neighbors[t, k])
        if nb == NO_TRI:
            return -1
        t = nb
    return -1


def closest_face_and_sigma(bundle: PlanBundle, t, x):
    """Closest local face and the bump parameter sigma in [0, 1].

    sigma is 0 on the closest face and 1 on the in-cell Voronoi boundary;
    near a vertex (two face distances ~ 0) the blend is undefined and the
    near_vertex flag tells callers to fall back to the cell vector.
    """
    d = bundle.face_distances(t, x)
    f_star = int(np.argmin(d))
    d_star = d[f_star]
    near = NEAR_VERTEX_REL * bundle.complex.diameter
    if sorted(d)[1] < near:
        return {"face": f_star, "sigma": 1.0, "near_vertex": True}
    prod = 1.0
    for k in range(3):
        if k != f_star:
            prod *= (d[k] - d_star) / d[k]
    sigma = min(1.0, max(0.0, 1.0 - prod))
    return {"face": f_star, "sigma": sigma, "near_vertex": False}


def _resolve_cell_vec(bundle, t, x):
    a = bundle.assignment
    kind = a.cell_kind[t]
    if kind == CELL_CONSTANT:
        return a.cell_vec[t]
    if kind == CELL_POINT_TO_GOAL:
        v = bundle.plan.goal - x
        n = np.hypot(v[0], v[1])
        if n < 1e-12:
            raise GoalReached("evaluation at the goal point")
        return v / n
    # CELL_POINT_TO_EXIT: guard the undefined direction at the midpoint.
    v = a.exit_mid[t] - x
    n = np.hypot(v[0], v[1])
    if n < 1e-9 * bundle.complex.diameter:
        k = int(bundle.plan.exit_local[t])
        return -bundle.tri_normals[t, k]
    return v / n


def _resolve_face_vec(bundle, t, k, x, cell_v):
    a = bundle.assignment
    if a.face_kind[t, k] == FACE_FIXED:
        return a.face_vec[t, k]
    # Point-to-goal face field, evaluated at the query point so it agrees
    # with a goal-pointing cell field everywhere inside a star region.
    v = bundle.plan.goal - np.asarray(x, dtype=float)
    n = np.hypot(v[0], v[1])
    if n < 1e-12:
        return cell_v
    return v / n


def evaluate(bundle: PlanBundle, x, hint=None, eps_goal=None):
    """The blended global field V(x); always unit length."""
    x = np.asarray(x, dtype=float)
    if eps_goal is not None:
        if np.hypot(*(x - bundle.plan.goal)) < eps_goal:
            raise GoalReached("within the goal radius")
    t = locate(bundle, x, hint)
    cf = closest_face_and_sigma(bundle, t, x)
    cell_v = _resolve_cell_vec(bundle, t, x)
    if cf["near_vertex"]:
        return np.asarray(cell_v, dtype=float), t
    face_v = _resolve_face_vec(bundle, t, cf["face"], x, cell_v)
    w = bump(cf["sigma"])
    v = (1.0 - w) * face_v + w * cell_v
    n = np.hypot(v[0], v[1])
    if n < BLEND_EPS:
        return np.asarray(cell_v, dtype=float), t
    return v / n, t
