"""Cell and face vector-field assignment, plus numeric validity checks.

Cell kinds:
  CELL_CONSTANT        a fixed unit vector (the aligned heuristic output)
  CELL_POINT_TO_GOAL   normalize(goal - x), used for the goal cell and
                       funnel members
  CELL_POINT_TO_EXIT   normalize(exit-face midpoint - x), the baseline

Face entries are stored per (triangle, local face) side.  Faces of the plan
tree carry a single shared vector on both sides (role EXIT_SHARED) so the
global field is single-valued exactly where trajectories cross.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateCone
from .geometry import Cone, cone_contains, inward_normal, normalize
from .mesh import SimplicialComplex
from .planner import NO_TRI, DiscretePlan

CELL_CONSTANT = 0
CELL_POINT_TO_GOAL = 1
CELL_POINT_TO_EXIT = 2

FACE_FIXED = 0
FACE_POINT_TO_GOAL = 1

ROLE_NONE = -1
ROLE_EXIT_SHARED = 0
ROLE_BOUNDARY_INWARD = 1
ROLE_SIBLING_INWARD = 2
ROLE_FUNNEL_INTERNAL = 3


@dataclass
class FieldAssignment:
    method: str
    cell_kind: np.ndarray  # (T,) int8
    cell_vec: np.ndarray  # (T, 2); meaningful for CELL_CONSTANT
    exit_mid: np.ndarray  # (T, 2); exit-face midpoint per non-goal cell
    face_kind: np.ndarray  # (T, 3) int8
    face_vec: np.ndarray  # (T, 3, 2); meaningful for FACE_FIXED
    face_role: np.ndarray  # (T, 3) int8

    def copy(self):
        return replace(
            self,
            cell_kind=self.cell_kind.copy(),
            cell_vec=self.cell_vec.copy(),
            exit_mid=self.exit_mid.copy(),
            face_kind=self.face_kind.copy(),
            face_vec=self.face_vec.copy(),
            face_role=self.face_role.copy(),
        )


def boundary_vectors(c: SimplicialComplex, plan: DiscretePlan, i) -> Cone:
    """Unit vectors from the opposite vertex to the two exit-face vertices."""
    k = int(plan.exit_local[i])
    if k < 0:
        raise DegenerateCone(f"simplex {i} has no exit face")
    tri = c.tri_coords(i)
    apex = tri[k]
    b1 = normalize(tri[(k + 1) % 3] - apex)
    b2 = normalize(tri[(k + 2) % 3] - apex)
    cross = b1[0] * b2[1] - b1[1] * b2[0]
    if abs(cross) <= 1e-9:
        raise DegenerateCone(f"boundary vectors of simplex {i} are parallel")
    return Cone(b1, b2)


def _face_midpoint(c, t, k):
    tri = c.tri_coords(t)
    return 0.5 * (tri[(k + 1) % 3] + tri[(k + 2) % 3])


def _cell_vec_at(c, plan, cell_kind, cell_vec, t, point):
    """Resolve a cell vector at a query point (used for Eq-style averaging)."""
    if cell_kind[t] == CELL_CONSTANT:
        return cell_vec[t]
    return normalize(plan.goal - point)


def align_cell_fields(c: SimplicialComplex, plan: DiscretePlan):
    """Propagate goal-directed cell vectors backward along the plan tree.

    Cells are processed in ascending hop distance; the candidate direction
    is straight-to-goal for hop-1 cells and the successor's vector
    otherwise.  Candidates falling outside the cell's boundary-vector cone
    are replaced by the nearest cone edge (max dot product, ties to the
    lower local face-vertex index).
    """
    T = c.num_triangles
    cell_kind = np.zeros(T, dtype=np.int8)
    cell_vec = np.zeros((T, 2))
    cell_kind[plan.goal_tri] = CELL_POINT_TO_GOAL

    order = sorted(
        (t for t in range(T) if plan.reachable[t] and t != plan.goal_tri),
        key=lambda t: (plan.hop[t], t),
    )
    for t in order:
        cone = boundary_vectors(c, plan, t)
        if plan.hop[t] == 1:
            cand = normalize(plan.goal - c.centroids[t])
        else:
            cand = cell_vec[plan.successor[t]]
        if not cone_contains(cone, cand).inside:
            if np.dot(cand, cone.b1) >= np.dot(cand, cone.b2):
                cand = cone.b1
            else:
                cand = cone.b2
        cell_kind[t] = CELL_CONSTANT
        cell_vec[t] = cand
    return cell_kind, cell_vec


def assign_face_vectors(c: SimplicialComplex, plan: DiscretePlan, cell_kind, cell_vec):
    """Face vectors: inward-normal-plus-cell-vector on non-crossing faces,
    cell-vector average on plan-tree faces (stored identically on both sides).
    """
    T = c.num_triangles
    face_kind = np.zeros((T, 3), dtype=np.int8)
    face_vec = np.zeros((T, 3, 2))
    face_role = np.full((T, 3), ROLE_NONE, dtype=np.int8)

    for t in range(T):
        if not plan.reachable[t]:
            continue
        tri = c.tri_coords(t)
        for k in range(3):
            nb = int(c.neighbors[t, k])
            # Plan-tree faces get a shared averaged vector in the second
            # pass; skip them here (the cell vector may point straight out
            # of its exit face, making the inward-normal sum degenerate).
            if t != plan.goal_tri and k == int(plan.exit_local[t]):
                continue
            if nb != NO_TRI and plan.reachable[nb] and int(plan.successor[nb]) == t:
                continue
            n_in = inward_normal(tri, k)
            vc = _cell_vec_at(c, plan, cell_kind, cell_vec, t, _face_midpoint(c, t, k))
            s = n_in + vc
            face_vec[t, k] = n_in if np.hypot(*s) < 1e-9 else normalize(s)
            face_role[t, k] = (
                ROLE_BOUNDARY_INWARD if nb == NO_TRI else ROLE_SIBLING_INWARD
            )

    # Plan-tree faces: one shared averaged vector, written to both sides.
    for t in range(T):
        if not plan.reachable[t] or t == plan.goal_tri:
            continue
        k = int(plan.exit_local[t])
        j = int(plan.successor[t])
        mid = _face_midpoint(c, t, k)
        vi = _cell_vec_at(c, plan, cell_kind, cell_vec, t, mid)
        vj = _cell_vec_at(c, plan, cell_kind, cell_vec, j, mid)
        shared = normalize(vi + vj)
        face_vec[t, k] = shared
        face_role[t, k] = ROLE_EXIT_SHARED
        kj = int(np.nonzero(c.neighbors[j] == t)[0][0])
        face_vec[j, kj] = shared
        face_role[j, kj] = ROLE_EXIT_SHARED

    _point_goal_cell_faces(c, plan, face_kind)
    return face_kind, face_vec, face_role


def _point_goal_cell_faces(c, plan, face_kind):
    """Goal-cell faces point straight at the goal, mirrored on both sides.

    The goal lies strictly inside its cell, so a goal-pointing vector has a
    positive inward component on every goal-cell face and a positive
    crossing component seen from any entering neighbor.  This makes the
    blended field inside the goal cell exactly radial toward the goal,
    which is what guarantees asymptotic convergence there.
    """
    g = int(plan.goal_tri)
    for k in range(3):
        face_kind[g, k] = FACE_POINT_TO_GOAL
        nb = int(c.neighbors[g, k])
        if nb != NO_TRI and plan.reachable[nb]:
            kj = int(np.nonzero(c.neighbors[nb] == g)[0][0])
            face_kind[nb, kj] = FACE_POINT_TO_GOAL


def proposed_assignment(c: SimplicialComplex, plan: DiscretePlan) -> FieldAssignment:
    """Heuristically aligned cell fields with averaged plan-face vectors."""
    cell_kind, cell_vec = align_cell_fields(c, plan)
    face_kind, face_vec, face_role = assign_face_vectors(c, plan, cell_kind, cell_vec)
    return FieldAssignment(
        method="proposed",
        cell_kind=cell_kind,
        cell_vec=cell_vec,
        exit_mid=_exit_midpoints(c, plan),
        face_kind=face_kind,
        face_vec=face_vec,
        face_role=face_role,
    )


def baseline_assignment(c: SimplicialComplex, plan: DiscretePlan) -> FieldAssignment:
    """Point-to-exit-midpoint cells with pure face normals."""
    T = c.num_triangles
    cell_kind = np.full(T, CELL_POINT_TO_EXIT, dtype=np.int8)
    cell_vec = np.zeros((T, 2))
    cell_kind[plan.goal_tri] = CELL_POINT_TO_GOAL
    face_kind = np.zeros((T, 3), dtype=np.int8)
    face_vec = np.zeros((T, 3, 2))
    face_role = np.full((T, 3), ROLE_NONE, dtype=np.int8)

    for t in range(T):
        if not plan.reachable[t]:
            continue
        tri = c.tri_coords(t)
        for k in range(3):
            n_in = inward_normal(tri, k)
            nb = int(c.neighbors[t, k])
            if k == plan.exit_local[t]:
                face_vec[t, k] = -n_in  # outward: crossing direction
                face_role[t, k] = ROLE_EXIT_SHARED
            elif nb != NO_TRI and plan.successor[nb] == t:
                face_vec[t, k] = n_in  # same vector as the other side's -n_in
                face_role[t, k] = ROLE_EXIT_SHARED
            else:
                face_vec[t, k] = n_in
                face_role[t, k] = (
                    ROLE_BOUNDARY_INWARD if nb == NO_TRI else ROLE_SIBLING_INWARD
                )
    _point_goal_cell_faces(c, plan, face_kind)
    return FieldAssignment(
        method="baseline",
        cell_kind=cell_kind,
        cell_vec=cell_vec,
        exit_mid=_exit_midpoints(c, plan),
        face_kind=face_kind,
        face_vec=face_vec,
        face_role=face_role,
    )


def _exit_midpoints(c, plan):
    mids = np.zeros((c.num_triangles, 2))
    for t in range(c.num_triangles):
        if plan.reachable[t] and t != plan.goal_tri:
            mids[t] = _face_midpoint(c, t, int(plan.exit_local[t]))
    return mids


def validate_assignment(
    c: SimplicialComplex, plan: DiscretePlan, a: FieldAssignment
):
    """Numeric validity report; an empty list means all conditions hold.

    Checks, per reachable cell: constant cell vectors inside the cell's
    boundary-vector cone; crossing faces move along the outward exit
    normal; non-crossing faces point inward and across the face/exit
    bisector.  All checked vectors are constants, so a single evaluation
    covers the face's whole region of influence.
    """
    violations = []
    T = c.num_triangles
    for t in range(T):
        if not plan.reachable[t]:
            continue
        tri = c.tri_coords(t)
        if a.cell_kind[t] == CELL_CONSTANT and t != plan.goal_tri:
            cone = boundary_vectors(c, plan, t)
            if not cone_contains(cone, a.cell_vec[t]).inside:
                violations.append(f"cell {t}: constant vector outside its cone")
        has_exit = plan.exit_local[t] >= 0 and t != plan.goal_tri
        n_x = -inward_normal(tri, int(plan.exit_local[t])) if has_exit else None
        for k in range(3):
            role = a.face_role[t, k]
            if role in (ROLE_NONE, ROLE_FUNNEL_INTERNAL):
                continue
            if a.face_kind[t, k] != FACE_FIXED:
                continue
            v = a.face_vec[t, k]
            n_in = inward_normal(tri, k)
            if role == ROLE_EXIT_SHARED:
                if has_exit and k == plan.exit_local[t]:
                    if float(np.dot(v, n_x)) <= 0.0:
                        violations.append(f"cell {t} face {k}: exit vector not outward")
                else:
                    if float(np.dot(v, n_in)) <= 0.0:
                        violations.append(
                            f"cell {t} face {k}: entering vector not inward"
                        )
            else:
                if float(np.dot(v, n_in)) <= 0.0:
                    violations.append(f"cell {t} face {k}: face vector not inward")
                if has_exit and k != plan.exit_local[t]:
                    n_bf = normalize(n_x + n_in)
                    if float(np.dot(v, n_bf)) <= 0.0:
                        violations.append(
                            f"cell {t} face {k}: face vector against the bisector"
                        )
        # Shared faces must carry identical vectors on both sides.
        for k in range(3):
            if a.face_role[t, k] == ROLE_EXIT_SHARED:
                nb = int(c.neighbors[t, k])
                if nb != NO_TRI:
                    kj = int(np.nonzero(c.neighbors[nb] == t)[0][0])
                    if a.face_kind[t, k] == a.face_kind[nb, kj] == FACE_FIXED and not np.allclose(
                        a.face_vec[t, k], a.face_vec[nb, kj], atol=1e-12
                    ):
                        violations.append(
                            f"faces {t}/{k} and {nb}/{kj}: shared vector mismatch"
                        )
    return violations
