"""Discrete plan: shortest-path tree to the goal simplex on the dual graph."""

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import GoalOutsideComplex, NoSuccessor
from .geometry import barycentric, inward_normal
from .mesh import SimplicialComplex

NO_TRI = -1


@dataclass
class DiscretePlan:
    """Successor map, hop distances and exit frames for every simplex.

    successor[i] is the BFS parent toward the goal (NO_TRI for the goal
    simplex and unreachable cells); hop[i] is the transition count to the
    goal (-1 if unreachable); exit_local[i] is the local face index of the
    exit face inside triangle i, which is also the local index of the
    opposite vertex.
    """

    goal: np.ndarray
    goal_tri: int
    successor: np.ndarray
    hop: np.ndarray
    exit_local: np.ndarray
    reachable: np.ndarray

    def exit_face(self, c: SimplicialComplex, i):
        if self.exit_local[i] < 0:
            raise NoSuccessor(f"simplex {i} has no exit face")
        return int(c.tri_faces[i, self.exit_local[i]])

    def opposite_vertex(self, c: SimplicialComplex, i):
        if self.exit_local[i] < 0:
            raise NoSuccessor(f"simplex {i} has no exit face")
        return int(c.triangles[i, self.exit_local[i]])


def _find_goal_tri(c: SimplicialComplex, goal):
    containing = []
    for t in range(c.num_triangles):
        w = barycentric(c.tri_coords(t), goal)
        if w.min() >= -1e-9:
            containing.append(t)
    if not containing:
        raise GoalOutsideComplex(f"goal {np.asarray(goal).tolist()} not in any simplex")
    return min(containing)


def build_plan(c: SimplicialComplex, goal) -> DiscretePlan:
    """BFS from the goal simplex over the dual graph (unit edge weights).

    Ties break toward the lowest simplex id.  A goal on a shared face or
    vertex snaps to the lowest-id incident triangle, and the goal point is
    nudged toward that triangle's centroid so the goal simplex is unique.
    """
    goal = np.asarray(goal, dtype=float)
    gt = _find_goal_tri(c, goal)
    w = barycentric(c.tri_coords(gt), goal)
    if w.min() < 1e-9:
        goal = goal + 1e-9 * c.diameter * _unit(c.centroids[gt] - goal)

    T = c.num_triangles
    successor = np.full(T, NO_TRI, dtype=np.int64)
    hop = np.full(T, -1, dtype=np.int64)
    exit_local = np.full(T, -1, dtype=np.int64)
    hop[gt] = 0
    # Expanding in (hop, id) order makes the lowest-id parent claim each
    # child, which pins down the tree among equally short alternatives.
    heap = [(0, gt)]
    while heap:
        h, cur = heapq.heappop(heap)
        if h > hop[cur]:
            continue
        for nb in (int(n) for n in c.neighbors[cur] if n != NO_TRI):
            if hop[nb] >= 0:
                continue
            hop[nb] = h + 1
            successor[nb] = cur
            exit_local[nb] = int(np.nonzero(c.neighbors[nb] == cur)[0][0])
            heapq.heappush(heap, (h + 1, nb))
    return DiscretePlan(
        goal=goal,
        goal_tri=gt,
        successor=successor,
        hop=hop,
        exit_local=exit_local,
        reachable=hop >= 0,
    )


def _unit(v):
    n = np.hypot(v[0], v[1])
    return v / n if n > 0 else v


def exit_frame(plan: DiscretePlan, c: SimplicialComplex, i):
    """Exit-face vertices, opposite vertex and outward exit normal of cell i."""
    if not plan.reachable[i] or i == plan.goal_tri:
        raise NoSuccessor(f"simplex {i} is the goal or unreachable")
    k = int(plan.exit_local[i])
    tri = c.tri_coords(i)
    va = int(c.triangles[i, (k + 1) % 3])
    vb = int(c.triangles[i, (k + 2) % 3])
    return {
        "face_vertices": (va, vb),
        "opposite_vertex": int(c.triangles[i, k]),
        "outward_normal": -inward_normal(tri, k),
    }
