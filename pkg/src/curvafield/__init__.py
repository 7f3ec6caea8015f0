"""Smooth, collision-free feedback vector fields over 2D triangulations.

Construct a triangulation of polygonal free space, compute a discrete plan
to a goal, synthesize per-simplex and per-face unit vector fields, blend
them into a globally smooth field, and integrate, measure and compare the
resulting trajectories.
"""

from .bench import compare_goals, convergence_sweep, make_bundle, select_goals
from .envs import BUNDLED, bundled_environment, resolve_environment
from .errors import CurvafieldError
from .field_eval import PlanBundle, bump, evaluate, locate
from .fields import (
    FieldAssignment,
    baseline_assignment,
    proposed_assignment,
    validate_assignment,
)
from .funnel import FunnelRegion, apply_funnel_overrides, grow_star_chain, star_shape_oracle
from .mesh import (
    Environment,
    SimplicialComplex,
    load_environment,
    load_triangle_mesh,
    make_environment,
    triangulate,
    validate_complex,
)
from .metrics import LqrSetup, MetricsRow, lqr_gain, lqr_track, paired_compare, trajectory_metrics
from .planner import DiscretePlan, build_plan
from .svg import render_svg
from .trajectory import IntegrationParams, Trajectory, integrate, resample_arclength

__version__ = "1.0.0"

__all__ = [
    "BUNDLED",
    "CurvafieldError",
    "DiscretePlan",
    "Environment",
    "FieldAssignment",
    "FunnelRegion",
    "IntegrationParams",
    "LqrSetup",
    "MetricsRow",
    "PlanBundle",
    "SimplicialComplex",
    "Trajectory",
    "apply_funnel_overrides",
    "baseline_assignment",
    "build_plan",
    "bump",
    "bundled_environment",
    "compare_goals",
    "convergence_sweep",
    "evaluate",
    "grow_star_chain",
    "integrate",
    "load_environment",
    "load_triangle_mesh",
    "locate",
    "lqr_gain",
    "lqr_track",
    "make_bundle",
    "make_environment",
    "paired_compare",
    "proposed_assignment",
    "render_svg",
    "resample_arclength",
    "resolve_environment",
    "select_goals",
    "star_shape_oracle",
    "trajectory_metrics",
    "triangulate",
    "validate_assignment",
    "validate_complex",
]
