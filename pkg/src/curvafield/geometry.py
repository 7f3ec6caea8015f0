"""2D geometric predicates and vector primitives.

Triangles are given as a (3, 2) array of vertex coordinates in CCW order.
Local face ``k`` of a triangle is the edge opposite vertex ``k``, i.e. the
segment joining vertices ``(k + 1) % 3`` and ``(k + 2) % 3``.

All functions are pure and operate on plain floats / small numpy arrays.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCone, DegenerateSimplex, ZeroVector

EPS_ZERO = 1e-12
CONE_SLACK = -1e-12


@dataclass(frozen=True)
class Cone:
    """Wedge of directions spanned by two non-parallel unit vectors."""

    b1: np.ndarray
    b2: np.ndarray


@dataclass(frozen=True)
class ConeTest:
    inside: bool
    alpha: tuple


def normalize(v, eps=EPS_ZERO):
    """Return v / ||v||; raises ZeroVector when ||v|| <= eps."""
    v = np.asarray(v, dtype=float)
    n = float(np.hypot(v[0], v[1]))
    if n <= eps:
        raise ZeroVector(f"cannot normalize near-zero vector {v!r}")
    return v / n


def orient2d(a, b, c):
    """Twice the signed area of triangle (a, b, c); >0 iff CCW."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def barycentric(tri, x):
    """Barycentric weights of x w.r.t. a (3, 2) triangle; sums to 1."""
    tri = np.asarray(tri, dtype=float)
    area2 = orient2d(tri[0], tri[1], tri[2])
    scale = max(np.ptp(tri[:, 0]), np.ptp(tri[:, 1]), 1e-300)
    if abs(area2) < 1e-12 * scale * scale:
        raise DegenerateSimplex(f"degenerate triangle {tri.tolist()}")
    w0 = orient2d(x, tri[1], tri[2]) / area2
    w1 = orient2d(tri[0], x, tri[2]) / area2
    w2 = 1.0 - w0 - w1
    return np.array([w0, w1, w2])


def inward_normal(tri, face):
    """Unit normal of local face `face`, pointing toward the opposite vertex."""
    tri = np.asarray(tri, dtype=float)
    a = tri[(face + 1) % 3]
    b = tri[(face + 2) % 3]
    edge = b - a
    n = np.hypot(edge[0], edge[1])
    scale = max(np.ptp(tri[:, 0]), np.ptp(tri[:, 1]), 1e-300)
    if n <= 1e-12 * scale:
        raise DegenerateSimplex("zero-length face")
    # Rotate the edge by +90 deg, then orient toward the opposite vertex.
    cand = np.array([-edge[1], edge[0]]) / n
    opp = tri[face]
    mid = 0.5 * (a + b)
    if float(np.dot(cand, opp - mid)) < 0.0:
        cand = -cand
    if abs(float(np.dot(cand, opp - mid))) <= 1e-12 * scale:
        raise DegenerateSimplex("opposite vertex on face line")
    return cand


def signed_face_distance(tri, face, x):
    """Perpendicular distance from x to the supporting line of local face.

    Positive on the interior side of the face, zero on the face itself.
    """
    tri = np.asarray(tri, dtype=float)
    n = inward_normal(tri, face)
    a = tri[(face + 1) % 3]
    return float(np.dot(n, np.asarray(x, dtype=float) - a))


def cone_contains(cone: Cone, v, slack=CONE_SLACK) -> ConeTest:
    """Test membership of v in the wedge via a direct 2x2 solve.

    Solves v = a1*b1 + a2*b2; membership means both coefficients are
    nonnegative (boundary counts as inside, up to `slack`).
    """
    b1, b2 = np.asarray(cone.b1, float), np.asarray(cone.b2, float)
    det = b1[0] * b2[1] - b1[1] * b2[0]
    if abs(det) <= 1e-9:
        raise DegenerateCone("cone boundary vectors are parallel")
    v = np.asarray(v, dtype=float)
    a1 = (v[0] * b2[1] - v[1] * b2[0]) / det
    a2 = (b1[0] * v[1] - b1[1] * v[0]) / det
    return ConeTest(inside=(a1 >= slack and a2 >= slack), alpha=(a1, a2))
