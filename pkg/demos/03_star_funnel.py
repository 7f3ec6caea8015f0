"""Grow and verify the star-shaped funnel around a goal.

The funnel is the maximal chain of simplexes, grown outward from the goal
simplex, whose union stays star-shaped with respect to the goal: every
point in the region sees the goal along a straight collision-free segment.
Inside it the field simply points at the goal.
"""

from curvafield import (
    build_plan,
    bundled_environment,
    grow_star_chain,
    star_shape_oracle,
    triangulate,
)
from curvafield.funnel import MODE_FULL, MODE_PLAN

env = bundled_environment("sparse")
c = triangulate(env)
plan = build_plan(c, env.goal)

for mode in (MODE_PLAN, MODE_FULL):
    funnel = grow_star_chain(c, plan, mode=mode)
    bad = star_shape_oracle(c, funnel)
    area = sum(c.areas[t] for t in funnel.members)
    print(f"mode {mode:>16}: {len(funnel.members)} member simplexes, "
          f"{len(funnel.internal_faces)} internal faces, "
          f"area {area:.1f} of {c.areas.sum():.1f}, "
          f"oracle violations: {len(bad)}")

# The plan-constrained funnel only explores backward along the plan tree,
# so it is never larger than the full geometric search.
plan_members = grow_star_chain(c, plan, mode=MODE_PLAN).members
full_members = grow_star_chain(c, plan, mode=MODE_FULL).members
print("plan-constrained is a subset of full search:",
      plan_members <= full_members)
