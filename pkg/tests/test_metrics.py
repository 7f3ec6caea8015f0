import math

import numpy as np
import pytest

from curvafield import MetricsRow, lqr_gain, lqr_track, paired_compare
from curvafield.errors import InvalidWeights, KeyMismatch, NotConverged, TooShort
from curvafield.metrics import (
    LqrSetup,
    bending_metrics,
    curvature_profile,
    trajectory_metrics,
)
from curvafield.trajectory import Trajectory


def make_traj(pts, outcome="Converged"):
    return Trajectory(np.asarray(pts, float), np.zeros((0, 4), np.int64), outcome)


def semicircle(ds=0.01, radius=1.0):
    n = int(round(math.pi * radius / ds))
    th = np.linspace(0.0, math.pi, n + 1)
    return np.c_[radius * np.cos(th), radius * np.sin(th)]


class TestCurvature:
    def test_semicircle_energy_and_turning(self):
        # Unit semicircle: kappa = 1 along length pi, so the bending energy
        # integral of kappa^2 ds and the total turning both equal pi.
        ds = 0.01
        pts = semicircle(ds)
        actual_ds = math.pi / (len(pts) - 1)
        kappa = curvature_profile(pts, actual_ds)
        bm = bending_metrics(kappa, actual_ds)
        assert bm["total_bending"] == pytest.approx(math.pi, rel=0.02)
        assert bm["total_turning"] == pytest.approx(math.pi, rel=0.02)
        assert bm["kappa_max"] == pytest.approx(1.0, rel=0.02)

    def test_scaled_semicircle(self):
        # radius R: kappa = 1/R over length pi R, bending = pi/R, turning = pi
        ds = 0.01
        R = 2.5
        pts = semicircle(ds, radius=R)
        actual_ds = math.pi * R / (len(pts) - 1)
        kappa = curvature_profile(pts, actual_ds)
        bm = bending_metrics(kappa, actual_ds)
        assert bm["total_bending"] == pytest.approx(math.pi / R, rel=0.02)
        assert bm["total_turning"] == pytest.approx(math.pi, rel=0.02)

    def test_straight_line_zero(self):
        pts = np.c_[np.linspace(0, 5, 500), np.zeros(500)]
        kappa = curvature_profile(pts, 5 / 499)
        bm = bending_metrics(kappa, 5 / 499)
        assert bm["total_bending"] == pytest.approx(0.0, abs=1e-12)
        assert bm["kappa_max"] == pytest.approx(0.0, abs=1e-12)

    def test_too_short_raises(self):
        with pytest.raises(TooShort):
            curvature_profile([[0, 0], [1, 1]], 0.1)

    def test_empty_profile(self):
        bm = bending_metrics([], 0.1)
        assert bm == {"total_bending": 0.0, "total_turning": 0.0, "kappa_max": 0.0}


class TestLqrGain:
    def test_closed_form_values(self):
        K, P = lqr_gain(100.0, 1.0, 1.0)
        assert abs(K[0] - 10.0) < 1e-9
        assert abs(K[1] - math.sqrt(21.0)) < 1e-9

    def test_riccati_residual_small(self):
        K, P = lqr_gain(100.0, 1.0, 1.0)
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        B = np.array([[0.0], [1.0]])
        Q = np.diag([100.0, 1.0])
        res = A.T @ P + P @ A - P @ B @ B.T @ P + Q
        assert np.abs(res).max() < 1e-9

    def test_matches_scipy_care(self):
        from scipy.linalg import solve_continuous_are

        for q_pos, q_vel, r in [(100, 1, 1), (5, 0.5, 2), (1, 0, 1)]:
            K, P = lqr_gain(q_pos, q_vel, r)
            A = np.array([[0.0, 1.0], [0.0, 0.0]])
            B = np.array([[0.0], [1.0]])
            P_ref = solve_continuous_are(A, B, np.diag([q_pos, q_vel]), [[r]])
            assert np.allclose(P, P_ref, atol=1e-9)
            K_ref = (B.T @ P_ref / r).ravel()
            assert np.allclose(K, K_ref, atol=1e-9)

    def test_invalid_weights(self):
        with pytest.raises(InvalidWeights):
            lqr_gain(0.0, 1.0, 1.0)
        with pytest.raises(InvalidWeights):
            lqr_gain(100.0, 1.0, 0.0)
        with pytest.raises(InvalidWeights):
            lqr_gain(100.0, -1.0, 1.0)


class TestLqrTrack:
    def test_straight_path_near_zero_effort(self):
        pts = np.c_[np.linspace(0, 5, 2001), np.zeros(2001)]
        out = lqr_track(make_traj(pts))
        assert out["travel_time"] == pytest.approx(5.0)
        assert out["effort"] < 1e-6

    def test_curved_costs_more_than_straight(self):
        straight = np.c_[np.linspace(0, math.pi, 1500), np.zeros(1500)]
        arc = semicircle(0.002)
        e_straight = lqr_track(make_traj(straight))["effort"]
        e_arc = lqr_track(make_traj(arc))["effort"]
        assert e_arc > e_straight + 0.1

    def test_not_converged_raises(self):
        with pytest.raises(NotConverged):
            lqr_track(make_traj([[0, 0], [1, 0]], outcome="MaxSteps"))

    def test_degenerate_short_path(self):
        out = lqr_track(make_traj([[0, 0], [0.001, 0]]))
        assert out["effort"] == 0.0


class TestTrajectoryMetrics:
    def test_populates_all_fields(self):
        t = make_traj(semicircle(0.005))
        row = trajectory_metrics(t, goal_tri=3, start_tri=7, step_h=0.005)
        assert row.goal_tri == 3 and row.start_tri == 7
        assert row.outcome == "Converged"
        assert row.path_length == pytest.approx(math.pi, rel=1e-3)
        assert row.total_bending == pytest.approx(math.pi, rel=0.05)
        assert row.lqr_travel_time == pytest.approx(math.pi, rel=1e-3)
        assert row.lqr_effort > 0
        assert set(row.values()) == {
            "path_length",
            "kappa_max",
            "total_bending",
            "total_turning",
            "lqr_travel_time",
            "lqr_effort",
        }

    def test_not_converged_is_zeros(self):
        t = make_traj([[0, 0], [1, 0], [2, 0]], outcome="LeftDomain")
        row = trajectory_metrics(t, 0, 1, 0.01)
        assert row.total_bending == 0.0
        assert row.lqr_effort == 0.0
        assert row.outcome == "LeftDomain"


def row(goal, start, bending, outcome="Converged"):
    return MetricsRow(
        goal_tri=goal,
        start_tri=start,
        outcome=outcome,
        path_length=1.0,
        kappa_max=bending,
        total_bending=bending,
        total_turning=bending,
        lqr_travel_time=1.0,
        lqr_effort=bending,
    )


class TestPairedCompare:
    def test_win_rate_and_median(self):
        base = [row(0, s, 10.0) for s in range(4)]
        prop = [row(0, 0, 5.0), row(0, 1, 2.0), row(0, 2, 12.0), row(0, 3, 10.0)]
        st = paired_compare(base, prop)
        m = st.per_metric["total_bending"]
        # strictly better on 2 of 4 pairs (ties do not count as wins)
        assert m["win_rate_pct"] == pytest.approx(50.0)
        # reductions: 50, 80, -20, 0 -> median 25
        assert m["median_reduction_pct"] == pytest.approx(25.0)
        assert st.n_pairs == 4 and st.n_dropped == 0

    def test_non_converged_pairs_dropped(self):
        base = [row(0, 0, 10.0), row(0, 1, 10.0, outcome="MaxSteps")]
        prop = [row(0, 0, 5.0), row(0, 1, 5.0)]
        st = paired_compare(base, prop)
        assert st.n_pairs == 1 and st.n_dropped == 1
        assert st.per_metric["total_bending"]["win_rate_pct"] == pytest.approx(100.0)

    def test_key_mismatch_raises(self):
        with pytest.raises(KeyMismatch):
            paired_compare([row(0, 0, 1.0)], [row(0, 1, 1.0)])

    def test_setup_defaults(self):
        s = LqrSetup()
        assert (s.q_pos, s.q_vel, s.r) == (100.0, 1.0, 1.0)
