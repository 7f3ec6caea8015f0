"""From a polygonal world to a discrete plan.

Builds a small world with one rectangular obstacle, triangulates its free
space without inserting new vertices, and computes the shortest-path tree
of simplex-to-simplex transitions toward a goal.
"""

import numpy as np

from curvafield import build_plan, make_environment, triangulate, validate_complex

env = make_environment(
    name="demo-room",
    outer=[[0, 0], [10, 0], [10, 8], [0, 8]],
    holes=[[[4, 2], [6, 2], [6, 6], [4, 6]]],
    goal=[9.0, 4.0],
)
print(f"free area: {env.free_area():.2f}")

c = triangulate(env)
print(f"triangulated into {c.num_triangles} simplexes, "
      f"{len(c.faces)} faces, mesh diameter {c.diameter:.2f}")
problems = validate_complex(c)
print(f"complex validation: {len(problems)} problem(s)")

plan = build_plan(c, env.goal)
print(f"goal simplex: {plan.goal_tri}")
print("hop histogram:", np.bincount(plan.hop[plan.hop >= 0]).tolist())
for t in range(c.num_triangles):
    if plan.reachable[t] and t != plan.goal_tri:
        print(f"  simplex {t:2d}: hop {plan.hop[t]}, exits via face "
              f"{plan.exit_face(c, t)} into simplex {plan.successor[t]}")
