"""Artifacts: SVG figures, bundle documents and trajectory tables.

Everything the command-line front end emits is available as library
calls; this script writes a figure of the bugtrap field with a
trajectory, a serialized plan bundle, and a delimited trajectory table
into ./out/.
"""

import pathlib

from curvafield import bundled_environment, integrate, make_bundle, render_svg, triangulate
from curvafield.bundle_io import load_bundle, save_bundle
from curvafield.trajectory import export_samples

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

env = bundled_environment("bugtrap")
c = triangulate(env)
bundle = make_bundle(c, env.goal)

traj = integrate(bundle, [1.0, 1.0])
print(f"trajectory from (1, 1): {traj.outcome}, length {traj.arc_length:.2f}")

svg_path = out / "bugtrap.svg"
svg_path.write_text(render_svg(bundle, [traj], environment=env))
print(f"wrote {svg_path}")

bundle_path = out / "bugtrap_bundle.json"
doc = save_bundle(bundle, bundle_path, env.name)
print(f"wrote {bundle_path} (plan digest {doc['digests']['plan'][:12]}…)")

reloaded = load_bundle(bundle_path)
again = integrate(reloaded, [1.0, 1.0])
print(f"reloaded bundle reproduces the run: "
      f"{again.outcome == traj.outcome and abs(again.arc_length - traj.arc_length) < 1e-9}")

table_path = out / "bugtrap_trajectory.tsv"
table_path.write_text(export_samples(traj, bundle))
print(f"wrote {table_path}")
