"""Standalone SVG figures: mesh, funnel, field glyphs and trajectories."""

from xml.sax.saxutils import escape

import numpy as np

from .field_eval import PlanBundle

_STYLE = {
    "obstacle_fill": "#cbd5e1",
    "obstacle_stroke": "#64748b",
    "mesh_stroke": "#94a3b8",
    "funnel_fill": "#fde68a",
    "glyph_stroke": "#1d4ed8",
    "trajectory_stroke": "#dc2626",
    "goal_fill": "#059669",
}


def _fmt(v):
    return f"{float(v):.6g}"


def _polyline(points, close=False):
    d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return d + (" Z" if close else "")


def render_svg(
    bundle: PlanBundle,
    trajectories=(),
    environment=None,
    width: int = 720,
    show_glyphs: bool = True,
) -> str:
    """A standalone SVG document for a plan bundle.

    Layers, back to front: obstacle polygons (when an environment is
    given), mesh edges, funnel member fill, per-cell field glyphs,
    trajectories, goal marker.
    """
    c = bundle.complex
    lo = c.vertices.min(axis=0)
    hi = c.vertices.max(axis=0)
    span = hi - lo
    pad = 0.03 * max(span[0], span[1])
    vb_w = span[0] + 2 * pad
    vb_h = span[1] + 2 * pad
    height = int(round(width * vb_h / vb_w))

    def pt(p):
        # Flip y so the figure reads with y up.
        return (p[0] - lo[0] + pad, vb_h - (p[1] - lo[1] + pad))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {_fmt(vb_w)} {_fmt(vb_h)}">',
        f"<title>{escape('feedback field over ' + str(c.num_triangles) + ' simplexes')}</title>",
    ]
    stroke_w = 0.0025 * max(vb_w, vb_h)

    if environment is not None:
        parts.append('<g id="obstacles">')
        for hole in environment.holes:
            parts.append(
                f'<path d="M {_polyline([pt(p) for p in hole], close=True)}" '
                f'fill="{_STYLE["obstacle_fill"]}" '
                f'stroke="{_STYLE["obstacle_stroke"]}" stroke-width="{_fmt(stroke_w)}"/>'
            )
        parts.append(
            f'<path d="M {_polyline([pt(p) for p in environment.outer], close=True)}" '
            f'fill="none" stroke="{_STYLE["obstacle_stroke"]}" '
            f'stroke-width="{_fmt(2 * stroke_w)}"/>'
        )
        parts.append("</g>")

    if bundle.funnel is not None and bundle.funnel.members:
        parts.append('<g id="funnel">')
        for t in sorted(bundle.funnel.members):
            tri = [pt(p) for p in c.tri_coords(int(t))]
            parts.append(
                f'<path d="M {_polyline(tri, close=True)}" '
                f'fill="{_STYLE["funnel_fill"]}" stroke="none" opacity="0.8"/>'
            )
        parts.append("</g>")

    parts.append(
        f'<g id="mesh" stroke="{_STYLE["mesh_stroke"]}" '
        f'stroke-width="{_fmt(stroke_w)}" fill="none">'
    )
    for a, b in c.faces:
        pa, pb = pt(c.vertices[a]), pt(c.vertices[b])
        parts.append(
            f'<line x1="{_fmt(pa[0])}" y1="{_fmt(pa[1])}" '
            f'x2="{_fmt(pb[0])}" y2="{_fmt(pb[1])}"/>'
        )
    parts.append("</g>")

    if show_glyphs:
        parts.append(
            f'<g id="glyphs" stroke="{_STYLE["glyph_stroke"]}" '
            f'stroke-width="{_fmt(stroke_w)}" fill="{_STYLE["glyph_stroke"]}">'
        )
        glyph_len = 0.35 * c.mean_edge_length
        for t in range(c.num_triangles):
            if not bundle.plan.reachable[t]:
                continue
            x0 = c.centroids[t]
            v = _glyph_direction(bundle, t)
            if v is None:
                continue
            tip = x0 + glyph_len * v
            left = tip - 0.35 * glyph_len * _rot(v, 0.5)
            right = tip - 0.35 * glyph_len * _rot(v, -0.5)
            a, b = pt(x0), pt(tip)
            parts.append(
                f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" '
                f'x2="{_fmt(b[0])}" y2="{_fmt(b[1])}"/>'
            )
            parts.append(
                f'<path d="M {_polyline([pt(tip), pt(left), pt(right)], close=True)}"/>'
            )
        parts.append("</g>")

    if len(trajectories):
        parts.append(
            f'<g id="trajectories" stroke="{_STYLE["trajectory_stroke"]}" '
            f'stroke-width="{_fmt(1.5 * stroke_w)}" fill="none">'
        )
        for traj in trajectories:
            pts = np.asarray(traj.samples if hasattr(traj, "samples") else traj)
            if len(pts) < 2:
                continue
            step = max(1, len(pts) // 1500)
            sampled = list(pts[::step])
            if not np.array_equal(sampled[-1], pts[-1]):
                sampled.append(pts[-1])
            parts.append(f'<path d="M {_polyline([pt(p) for p in sampled])}"/>')
        parts.append("</g>")

    g = pt(bundle.plan.goal)
    r = 0.15 * c.mean_edge_length
    parts.append(
        f'<circle id="goal" cx="{_fmt(g[0])}" cy="{_fmt(g[1])}" r="{_fmt(r)}" '
        f'fill="{_STYLE["goal_fill"]}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _rot(v, s):
    """Rotate unit vector v by angle asin-ish parameter s (small wing angle)."""
    c = np.sqrt(max(0.0, 1.0 - s * s))
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _glyph_direction(bundle: PlanBundle, t: int):
    from .errors import GoalReached
    from .field_eval import evaluate

    try:
        v, _ = evaluate(bundle, bundle.complex.centroids[t], int(t))
    except GoalReached:
        return None
    return v
