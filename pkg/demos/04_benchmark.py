"""Paired benchmark: aligned assignment vs point-to-exit baseline.

For a deterministic subsample of goal simplexes, both methods run on the
identical discrete plan from every other simplex centroid, so metric
differences isolate the field-assignment strategy.  A second table
ablates the funnel.
"""

from curvafield import bundled_environment, triangulate
from curvafield.bench import compare_goals, select_goals, stats_to_text

for name in ("maze", "bugtrap", "sparse"):
    env = bundled_environment(name)
    c = triangulate(env)
    goals = select_goals(c, 6, seed=1)
    _, stats = compare_goals(c, goals, methods=("baseline", "proposed"))
    print(f"=== {name}: proposed vs baseline, goals {goals} ===")
    print(stats_to_text(stats))

env = bundled_environment("sparse")
c = triangulate(env)
goals = select_goals(c, 6, seed=1)
_, stats = compare_goals(c, goals, methods=("proposed_no_funnel", "proposed"))
print("=== sparse: funnel ablation (full method vs alignment only) ===")
print(stats_to_text(stats, "no_funnel", "full"))
