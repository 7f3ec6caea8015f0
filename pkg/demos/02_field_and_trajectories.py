"""Synthesize the smooth field and follow it from several starts.

Uses the bundled maze: per-simplex constant vectors aligned by the
hop-ordered heuristic, face vectors averaged on plan faces, a star-shaped
funnel around the goal, and a bump-blended global field integrated with
fixed-step RK4.
"""

import numpy as np

from curvafield import (
    IntegrationParams,
    bundled_environment,
    evaluate,
    integrate,
    make_bundle,
    trajectory_metrics,
    triangulate,
)

env = bundled_environment("maze")
c = triangulate(env)
bundle = make_bundle(c, env.goal, method="proposed", funnel="plan")
print(f"maze: {c.num_triangles} simplexes, funnel covers "
      f"{len(bundle.funnel.members)} of them")

v, tri = evaluate(bundle, [2.0, 18.0])
print(f"field at (2, 18): direction ({v[0]:+.3f}, {v[1]:+.3f}) in simplex {tri}")

params = IntegrationParams()
h = params.resolved_step(bundle)
for start in ([2.0, 18.0], [10.0, 12.0], [1.5, 2.0]):
    t = integrate(bundle, start, params)
    row = trajectory_metrics(t, bundle.plan.goal_tri, -1, h)
    print(f"start {start}: {t.outcome}, length {t.arc_length:.2f}, "
          f"{len(t.transitions)} cell transitions, "
          f"total bending {row.total_bending:.2f}, "
          f"tracking effort {row.lqr_effort:.2f}")
