"""Regenerate the bundled environment JSON files in src/curvafield/data/.

Boundary edges are subdivided with a small deterministic jitter so that no
three boundary vertices are collinear, which keeps the dependency-free
triangulator away from degenerate ears.
"""

import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "curvafield" / "data"


def subdivide(poly, spacing, jitter, rng):
    """Insert jittered points along each edge, keeping corners exact."""
    poly = np.asarray(poly, dtype=float)
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        out.append(a)
        L = np.hypot(*(b - a))
        pieces = max(1, int(round(L / spacing)))
        d = (b - a) / L
        perp = np.array([-d[1], d[0]])
        for j in range(1, pieces):
            p = a + d * (L * j / pieces) + perp * rng.uniform(-jitter, jitter)
            out.append(p)
    return [[round(float(x), 6), round(float(y), 6)] for x, y in out]


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def maze():
    rng = np.random.default_rng(20260825)
    outer = subdivide(rect(0, 0, 20, 20), 2.5, 0.12, rng)
    walls = [
        rect(0.8, 5.3, 14.5, 6.3),      # attached near the left wall
        rect(5.5, 9.3, 19.2, 10.3),     # attached near the right wall
        rect(0.8, 13.3, 14.5, 14.3),    # attached near the left wall
    ]
    holes = [subdivide(w, 2.3, 0.08, rng) for w in walls]
    return {"name": "maze", "outer": outer, "holes": holes, "goal": [17.5, 1.8]}


def bugtrap():
    rng = np.random.default_rng(1137)
    outer = subdivide(rect(0, 0, 16, 16), 2.0, 0.1, rng)
    # C-shaped trap: square ring of wall thickness 0.8 with a mouth slit
    # of height 1.6 on the right side, opening into the inner cavity.
    x0, y0, x1, y1 = 5.0, 5.0, 11.0, 11.0
    w = 0.8
    my0, my1 = 7.2, 8.8  # mouth extent in y on the right wall
    trap = [
        [x1, y0], [x1, my0], [x1 - w, my0], [x1 - w, y0 + w],
        [x0 + w, y0 + w], [x0 + w, y1 - w], [x1 - w, y1 - w], [x1 - w, my1],
        [x1, my1], [x1, y1], [x0, y1], [x0, y0],
    ]
    holes = [subdivide(trap, 1.6, 0.06, rng)]
    return {"name": "bugtrap", "outer": outer, "holes": holes, "goal": [8.9, 7.66]}


def sparse():
    rng = np.random.default_rng(404)
    outer = subdivide(rect(0, 0, 14, 14), 1.8, 0.1, rng)

    def blob(cx, cy, r, k, phase):
        ang = np.linspace(0, 2 * np.pi, k, endpoint=False) + phase
        rr = r * (1.0 + 0.18 * np.sin(3.1 * ang + phase))
        return [[cx + ri * np.cos(a), cy + ri * np.sin(a)] for ri, a in zip(rr, ang)]

    obstacles = [
        blob(3.4, 3.6, 1.15, 7, 0.3),
        blob(10.2, 4.0, 1.3, 6, 1.1),
        blob(4.2, 10.3, 1.2, 6, 2.0),
        blob(10.6, 10.8, 1.05, 7, 0.7),
    ]
    holes = [
        [[round(float(x), 6), round(float(y), 6)] for x, y in h] for h in obstacles
    ]
    return {"name": "sparse", "outer": outer, "holes": holes, "goal": [7.0, 7.2]}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for builder in (maze, bugtrap, sparse):
        doc = builder()
        path = OUT / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
