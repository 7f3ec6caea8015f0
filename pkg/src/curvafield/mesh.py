"""Environments and the simplicial complex: construction, import, validation.

Two ways to obtain a complex:

* ``triangulate(env)`` -- built-in: Delaunay triangulation of the boundary
  vertices, flip-based recovery of every boundary segment, a constrained
  Delaunay flip pass, and removal of triangles outside the free region.
  Inserts no Steiner points.
* ``load_triangle_mesh(node, ele)`` -- import a mesh produced by an external
  CDT tool in the Triangle ``.node``/``.ele`` format.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSimplex,
    GoalInObstacle,
    InvalidPolygon,
    NonConforming,
    ParseError,
    TriangulationFailed,
)
from .geometry import orient2d

DEGENERACY_REL = 1e-12  # area > DEGENERACY_REL * diameter^2


# ---------------------------------------------------------------------------
# polygon helpers


def polygon_area(pts):
    """Signed shoelace area; positive for CCW polygons."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _segments_properly_intersect(p1, p2, q1, q2):
    d1 = orient2d(q1, q2, p1)
    d2 = orient2d(q1, q2, p2)
    d3 = orient2d(p1, p2, q1)
    d4 = orient2d(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _polygon_is_simple(pts):
    n = len(pts)
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = pts[j], pts[(j + 1) % n]
            if _segments_properly_intersect(a1, a2, b1, b2):
                return False
    return True


def point_in_polygon(pt, poly):
    """Even-odd ray casting; boundary points are implementation-defined."""
    x, y = float(pt[0]), float(pt[1])
    poly = np.asarray(poly, dtype=float)
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
            if x < xc:
                inside = not inside
    return inside


# ---------------------------------------------------------------------------
# Environment


@dataclass
class Environment:
    """Polygonal free space: outer boundary (CCW) minus holes (CW)."""

    name: str
    outer: np.ndarray
    holes: list = field(default_factory=list)
    goal: np.ndarray | None = None

    def free_area(self):
        return polygon_area(self.outer) + sum(polygon_area(h) for h in self.holes)

    def contains(self, pt):
        if not point_in_polygon(pt, self.outer):
            return False
        return not any(point_in_polygon(pt, h) for h in self.holes)


def load_environment(source) -> Environment:
    """Parse an environment document (JSON text, path, or dict)."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if hasattr(source, "read"):
            text = source.read()
        elif isinstance(source, str) and "\n" not in source and source.endswith(".json"):
            with open(source) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ParseError(f"bad environment document: {exc}") from exc

    if "outer" not in doc:
        raise ParseError("environment document lacks an 'outer' polygon")
    name = str(doc.get("name", "unnamed"))
    outer = np.asarray(doc["outer"], dtype=float)
    holes = [np.asarray(h, dtype=float) for h in doc.get("holes", [])]
    goal = None if doc.get("goal") is None else np.asarray(doc["goal"], dtype=float)
    return make_environment(name, outer, holes, goal)


def make_environment(name, outer, holes=(), goal=None) -> Environment:
    """Validate polygons and normalize orientations (outer CCW, holes CW)."""
    outer = np.asarray(outer, dtype=float)
    if len(outer) < 3:
        raise InvalidPolygon("outer polygon needs at least 3 vertices")
    if not _polygon_is_simple(outer):
        raise InvalidPolygon("outer polygon self-intersects")
    if polygon_area(outer) < 0:
        outer = outer[::-1].copy()

    norm_holes = []
    for h in holes:
        h = np.asarray(h, dtype=float)
        if len(h) < 3:
            raise InvalidPolygon("hole with fewer than 3 vertices")
        if not _polygon_is_simple(h):
            raise InvalidPolygon("hole polygon self-intersects")
        if polygon_area(h) > 0:
            h = h[::-1].copy()
        norm_holes.append(h)

    # Holes strictly inside the outer polygon and pairwise disjoint.
    for h in norm_holes:
        for v in h:
            if not point_in_polygon(v, outer):
                raise InvalidPolygon("hole vertex outside the outer polygon")
        n = len(outer)
        for i in range(n):
            a1, a2 = outer[i], outer[(i + 1) % n]
            m = len(h)
            for j in range(m):
                if _segments_properly_intersect(a1, a2, h[j], h[(j + 1) % m]):
                    raise InvalidPolygon("hole crosses the outer boundary")
    for i in range(len(norm_holes)):
        for j in range(i + 1, len(norm_holes)):
            hi, hj = norm_holes[i], norm_holes[j]
            if point_in_polygon(hi[0], hj) or point_in_polygon(hj[0], hi):
                raise InvalidPolygon("holes overlap")
            for a in range(len(hi)):
                for b in range(len(hj)):
                    if _segments_properly_intersect(
                        hi[a], hi[(a + 1) % len(hi)], hj[b], hj[(b + 1) % len(hj)]
                    ):
                        raise InvalidPolygon("holes overlap")

    env = Environment(name=name, outer=outer, holes=norm_holes, goal=None)
    if goal is not None:
        goal = np.asarray(goal, dtype=float)
        if not env.contains(goal):
            raise GoalInObstacle(f"goal {goal.tolist()} is not in free space")
        env.goal = goal
    return env


# ---------------------------------------------------------------------------
# SimplicialComplex


class SimplicialComplex:
    """Conforming 2D triangle complex with precomputed adjacency.

    Attributes
    ----------
    vertices : (V, 2) float array
    triangles : (T, 3) int array, CCW
    faces : (F, 2) int array of vertex pairs
    face_tris : (F, 2) int array; incident triangles, -1 marks the boundary
    tri_faces : (T, 3) int array; face id opposite local vertex k
    neighbors : (T, 3) int array; triangle across local face k, or -1
    """

    BOUNDARY = -1

    def __init__(self, vertices, triangles, constrained_faces=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.d = 2
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        self.diameter = float(np.hypot(*(hi - lo)))

        # Normalize orientation to CCW and reject degenerate triangles.
        areas = np.empty(len(self.triangles))
        for t, (i, j, k) in enumerate(self.triangles):
            a2 = orient2d(self.vertices[i], self.vertices[j], self.vertices[k])
            if a2 < 0:
                self.triangles[t] = (i, k, j)
                a2 = -a2
            areas[t] = 0.5 * a2
            if areas[t] <= DEGENERACY_REL * self.diameter**2:
                raise DegenerateSimplex(f"triangle {t} is degenerate (area {areas[t]:g})")
        self.areas = areas

        face_map = {}
        for t, tri in enumerate(self.triangles):
            for k in range(3):
                key = tuple(sorted((tri[(k + 1) % 3], tri[(k + 2) % 3])))
                face_map.setdefault(key, []).append((t, k))

        faces, face_tris = [], []
        tri_faces = np.full((len(self.triangles), 3), -1, dtype=np.int64)
        neighbors = np.full((len(self.triangles), 3), self.BOUNDARY, dtype=np.int64)
        for f, (key, incid) in enumerate(sorted(face_map.items())):
            if len(incid) > 2:
                raise NonConforming(f"face {key} shared by {len(incid)} triangles")
            faces.append(key)
            ids = [t for t, _ in incid]
            face_tris.append((ids[0], ids[1] if len(ids) == 2 else self.BOUNDARY))
            for t, k in incid:
                tri_faces[t, k] = f
            if len(incid) == 2:
                (t0, k0), (t1, k1) = incid
                neighbors[t0, k0] = t1
                neighbors[t1, k1] = t0
        self.faces = np.asarray(faces, dtype=np.int64)
        self.face_tris = np.asarray(face_tris, dtype=np.int64)
        self.tri_faces = tri_faces
        self.neighbors = neighbors
        self.constrained_faces = (
            frozenset() if constrained_faces is None else frozenset(constrained_faces)
        )

        self.centroids = self.vertices[self.triangles].mean(axis=1)
        edge_vecs = (
            self.vertices[self.triangles[:, [1, 2, 0]]]
            - self.vertices[self.triangles[:, [0, 1, 2]]]
        )
        self.edge_lengths = np.hypot(edge_vecs[..., 0], edge_vecs[..., 1])
        self.mean_edge_length = float(self.edge_lengths.mean())

    @property
    def num_triangles(self):
        return len(self.triangles)

    def tri_coords(self, t):
        return self.vertices[self.triangles[t]]

    def boundary_face_ids(self):
        return np.nonzero(self.face_tris[:, 1] == self.BOUNDARY)[0]

    def total_area(self):
        return float(self.areas.sum())


def validate_complex(c: SimplicialComplex):
    """Return a list of violation strings; empty means the complex is valid."""
    violations = []
    for t in range(c.num_triangles):
        i, j, k = c.triangles[t]
        a2 = orient2d(c.vertices[i], c.vertices[j], c.vertices[k])
        if a2 <= 0:
            violations.append(f"triangle {t}: non-CCW orientation")
        if 0.5 * abs(a2) <= DEGENERACY_REL * c.diameter**2:
            violations.append(f"triangle {t}: degenerate area")
    for t in range(c.num_triangles):
        for k in range(3):
            nb = c.neighbors[t, k]
            if nb != c.BOUNDARY and t not in c.neighbors[nb]:
                violations.append(f"adjacency asymmetric between {t} and {nb}")
    # Hanging (T-junction) vertices: a vertex lying strictly inside a face.
    tol = 1e-9 * c.diameter
    for f, (a, b) in enumerate(c.faces):
        pa, pb = c.vertices[a], c.vertices[b]
        ab = pb - pa
        L2 = float(ab @ ab)
        for v in range(len(c.vertices)):
            if v == a or v == b:
                continue
            ap = c.vertices[v] - pa
            s = float(ap @ ab) / L2
            if 0.0 < s < 1.0:
                perp = ap - s * ab
                if np.hypot(perp[0], perp[1]) < tol:
                    violations.append(f"vertex {v} hangs on face {f}")
    return violations


# ---------------------------------------------------------------------------
# Triangle .node/.ele import


def _data_lines(text):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line.split()


def load_triangle_mesh(node_text, ele_text) -> SimplicialComplex:
    """Build a complex from Triangle-format .node / .ele file contents."""
    if hasattr(node_text, "read"):
        node_text = node_text.read()
    if hasattr(ele_text, "read"):
        ele_text = ele_text.read()

    nlines = list(_data_lines(node_text))
    if not nlines:
        raise ParseError("empty .node file")
    try:
        npts = int(nlines[0][0])
    except (ValueError, IndexError) as exc:
        raise ParseError("bad .node header") from exc
    rows = nlines[1 : 1 + npts]
    if len(rows) != npts:
        raise ParseError(f".node declares {npts} points, found {len(rows)}")
    try:
        base = int(rows[0][0])
        ids = [int(r[0]) for r in rows]
        coords = {int(r[0]): (float(r[1]), float(r[2])) for r in rows}
    except (ValueError, IndexError) as exc:
        raise ParseError("bad .node row") from exc
    if base not in (0, 1):
        raise ParseError(f"unsupported index base {base}")
    if sorted(ids) != list(range(base, base + npts)):
        raise ParseError(".node indices are not contiguous")
    vertices = np.array([coords[i] for i in range(base, base + npts)])

    elines = list(_data_lines(ele_text))
    if not elines:
        raise ParseError("empty .ele file")
    try:
        ntri = int(elines[0][0])
    except (ValueError, IndexError) as exc:
        raise ParseError("bad .ele header") from exc
    rows = elines[1 : 1 + ntri]
    if len(rows) != ntri:
        raise ParseError(f".ele declares {ntri} triangles, found {len(rows)}")
    tris = []
    for r in rows:
        try:
            v = [int(r[1]) - base, int(r[2]) - base, int(r[3]) - base]
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad .ele row {r}") from exc
        if any(not 0 <= x < npts for x in v):
            raise ParseError(f".ele row references missing node: {r}")
        tris.append(v)
    return SimplicialComplex(vertices, tris)


# ---------------------------------------------------------------------------
# built-in triangulation: Delaunay + constraint edge recovery + flips


def _incircle(pa, pb, pc, pd):
    """Positive when pd lies inside the circumcircle of CCW triangle pa-pb-pc."""
    adx = pa[0] - pd[0]
    ady = pa[1] - pd[1]
    bdx = pb[0] - pd[0]
    bdy = pb[1] - pd[1]
    cdx = pc[0] - pd[0]
    cdy = pc[1] - pd[1]
    abdet = adx * bdy - bdx * ady
    bcdet = bdx * cdy - cdx * bdy
    cadet = cdx * ady - adx * cdy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    return alift * bcdet + blift * cadet + clift * abdet


class _FlipMesh:
    """Mutable triangle soup with an edge -> incident-triangle map.

    Supports diagonal flips of interior edges; used both for constraint
    segment recovery and for the constrained Delaunay flip pass.
    """

    def __init__(self, verts, tris):
        self.verts = [(float(p[0]), float(p[1])) for p in verts]
        self.tris = [list(map(int, t)) for t in tris]
        self.edge_map = {}
        for t, tri in enumerate(self.tris):
            for k in range(3):
                key = self._key(tri[(k + 1) % 3], tri[(k + 2) % 3])
                self.edge_map.setdefault(key, []).append(t)

    @staticmethod
    def _key(a, b):
        return (a, b) if a < b else (b, a)

    def _quad(self, key):
        """(t0, t1, u, v, a, b): diagonal u-v with (u, v, a) CCW, apexes a in t0."""
        t0, t1 = self.edge_map[key]
        a = next(w for w in self.tris[t0] if w not in key)
        b = next(w for w in self.tris[t1] if w not in key)
        u, v = key
        if orient2d(self.verts[u], self.verts[v], self.verts[a]) < 0:
            u, v = v, u
        return t0, t1, u, v, a, b

    def can_flip(self, key):
        incident = self.edge_map.get(key)
        if incident is None or len(incident) != 2:
            return False
        _, _, u, v, a, b = self._quad(key)
        pa, pb = self.verts[a], self.verts[b]
        pu, pv = self.verts[u], self.verts[v]
        # Both replacement triangles must keep a strictly positive area.
        return orient2d(pa, pu, pb) > 0 and orient2d(pb, pv, pa) > 0

    def flip(self, key):
        """Replace diagonal u-v with a-b; returns the new edge key."""
        t0, t1, u, v, a, b = self._quad(key)
        self.tris[t0] = [a, u, b]
        self.tris[t1] = [b, v, a]
        del self.edge_map[key]
        new_key = self._key(a, b)
        self.edge_map[new_key] = [t0, t1]
        # Edge (v, a) moves from t0 to t1; edge (u, b) moves from t1 to t0.
        for ekey, old, new in ((self._key(v, a), t0, t1), (self._key(u, b), t1, t0)):
            lst = self.edge_map[ekey]
            lst[lst.index(old)] = new
        return new_key

    def quad_ring(self, key):
        """The four outer edges of the quadrilateral around interior edge key."""
        _, _, u, v, a, b = self._quad(key)
        return (
            self._key(u, a),
            self._key(v, a),
            self._key(u, b),
            self._key(v, b),
        )


def _insert_constraint(mesh: _FlipMesh, a, b):
    """Flip edges crossing segment a-b until it appears as a mesh edge."""
    goal_key = mesh._key(a, b)
    if goal_key in mesh.edge_map:
        return
    pa, pb = mesh.verts[a], mesh.verts[b]
    from collections import deque

    crossing = deque(
        key
        for key, incident in mesh.edge_map.items()
        if len(incident) == 2
        and _segments_properly_intersect(
            pa, pb, mesh.verts[key[0]], mesh.verts[key[1]]
        )
    )
    guard = 0
    limit = 64 * (len(crossing) + 4)
    while crossing:
        guard += 1
        if guard > limit:
            raise TriangulationFailed(
                f"could not recover boundary segment {a}-{b}"
            )
        key = crossing.popleft()
        if key not in mesh.edge_map or not _segments_properly_intersect(
            pa, pb, mesh.verts[key[0]], mesh.verts[key[1]]
        ):
            continue
        if not mesh.can_flip(key):
            crossing.append(key)
            continue
        new_key = mesh.flip(key)
        if new_key != goal_key and _segments_properly_intersect(
            pa, pb, mesh.verts[new_key[0]], mesh.verts[new_key[1]]
        ):
            crossing.append(new_key)
    if goal_key not in mesh.edge_map:
        raise TriangulationFailed(f"boundary segment {a}-{b} not recovered")


def _delaunay_flips(mesh: _FlipMesh, constrained):
    """Lawson flip pass: restore the Delaunay property away from constraints."""
    queue = [
        key
        for key, incident in mesh.edge_map.items()
        if len(incident) == 2 and key not in constrained
    ]
    seen = set(queue)
    guard = 0
    limit = 64 * (len(mesh.tris) + 4) * 4
    while queue:
        guard += 1
        if guard > limit:
            raise TriangulationFailed("edge flipping failed to terminate")
        key = queue.pop()
        seen.discard(key)
        incident = mesh.edge_map.get(key)
        if incident is None or len(incident) != 2 or key in constrained:
            continue
        _, _, u, v, a, b = mesh._quad(key)
        scale = max(
            abs(mesh.verts[u][0]), abs(mesh.verts[u][1]), abs(mesh.verts[v][0]),
            abs(mesh.verts[v][1]), 1.0,
        )
        if _incircle(
            mesh.verts[u], mesh.verts[v], mesh.verts[a], mesh.verts[b]
        ) <= 1e-12 * scale**4:
            continue
        if not mesh.can_flip(key):
            continue
        ring = mesh.quad_ring(key)
        mesh.flip(key)
        for nb_key in ring:
            if nb_key not in constrained and nb_key not in seen:
                queue.append(nb_key)
                seen.add(nb_key)


def triangulate(env: Environment) -> SimplicialComplex:
    """Triangulate the free space of an environment without new vertices.

    Delaunay triangulation of the boundary vertices, followed by flip-based
    recovery of every boundary segment, a constrained Delaunay flip pass,
    and removal of triangles outside the free region.
    """
    from scipy.spatial import Delaunay

    rings = [np.asarray(env.outer, dtype=float)]
    rings.extend(np.asarray(h, dtype=float) for h in env.holes)
    verts = np.vstack(rings)
    segments = []
    offset = 0
    for ring in rings:
        n = len(ring)
        for i in range(n):
            segments.append((offset + i, offset + (i + 1) % n))
        offset += n

    if len(np.unique(verts, axis=0)) != len(verts):
        raise TriangulationFailed("duplicate boundary vertices")

    dt = Delaunay(verts)
    mesh = _FlipMesh(verts, dt.simplices)
    constrained = {mesh._key(a, b) for a, b in segments}
    for a, b in segments:
        _insert_constraint(mesh, a, b)
    _delaunay_flips(mesh, constrained)

    kept = []
    for tri in mesh.tris:
        centroid = verts[tri].mean(axis=0)
        if env.contains(centroid):
            kept.append(tri)
    if not kept:
        raise TriangulationFailed("no triangles inside the free region")

    cx = SimplicialComplex(verts, np.asarray(kept, dtype=np.int64))
    present = {tuple(f) for f in cx.faces.tolist()}
    for a, b in segments:
        if (min(a, b), max(a, b)) not in present:
            raise TriangulationFailed(f"boundary segment {a}-{b} missing from mesh")
    mask = np.zeros(len(cx.faces), dtype=bool)
    keys = {(min(a, b), max(a, b)) for a, b in segments}
    for f, (a, b) in enumerate(cx.faces.tolist()):
        if (a, b) in keys:
            mask[f] = True
    cx.constrained_faces = mask

    total = float(cx.areas.sum())
    if abs(total - env.free_area()) > 1e-9 * max(1.0, env.free_area()):
        raise TriangulationFailed(
            f"triangulated area {total:.12g} does not cover the free region "
            f"{env.free_area():.12g}"
        )
    return cx
