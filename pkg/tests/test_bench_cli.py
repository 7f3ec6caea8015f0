import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from curvafield import (
    IntegrationParams,
    integrate,
    make_bundle,
    render_svg,
    select_goals,
)
from curvafield.bench import (
    compare_goals,
    compare_one_goal,
    convergence_sweep,
    rows_from_tuples,
    rows_to_csv,
    stats_to_text,
)
from curvafield.bundle_io import (
    FORMAT,
    bundle_to_doc,
    doc_to_bundle,
    load_bundle,
    plan_digest,
    save_bundle,
)
from curvafield.cli import EXIT_INPUT, EXIT_OK, main
from curvafield.errors import ParseError


class TestMakeBundle:
    def test_methods_and_funnels(self, square_with_hole):
        env, c = square_with_hole
        b = make_bundle(c, env.goal, method="baseline")
        assert b.assignment.method == "baseline"
        assert b.funnel is None

        b = make_bundle(c, env.goal, method="proposed", funnel="off")
        assert b.funnel is None

        b = make_bundle(c, env.goal, method="proposed_no_funnel", funnel="full")
        assert b.funnel is None  # ablation variant never grows a funnel

        b = make_bundle(c, env.goal, method="proposed", funnel="full")
        assert b.funnel is not None
        assert b.plan.goal_tri in b.funnel.members

    def test_shared_plan_reuse(self, square_with_hole):
        env, c = square_with_hole
        from curvafield import build_plan

        plan = build_plan(c, env.goal)
        b1 = make_bundle(c, env.goal, method="baseline", plan=plan)
        b2 = make_bundle(c, env.goal, method="proposed", plan=plan)
        assert b1.plan is plan and b2.plan is plan
        assert plan_digest(b1.plan) == plan_digest(b2.plan)

    def test_unknown_method_or_funnel(self, square_with_hole):
        env, c = square_with_hole
        with pytest.raises(ValueError):
            make_bundle(c, env.goal, method="nope")
        with pytest.raises(ValueError):
            make_bundle(c, env.goal, funnel="nope")


class TestSelectGoals:
    def test_all(self, square_with_hole):
        _, c = square_with_hole
        assert select_goals(c, "all") == list(range(c.num_triangles))

    def test_subsample_deterministic(self, square_with_hole):
        _, c = square_with_hole
        g1 = select_goals(c, 4, seed=3)
        g2 = select_goals(c, 4, seed=3)
        assert g1 == g2
        assert len(g1) == 4 == len(set(g1))
        assert select_goals(c, 4, seed=4) != g1 or True  # just determinism above

    def test_oversized_subsample_returns_all(self, square_with_hole):
        _, c = square_with_hole
        assert select_goals(c, 10_000) == list(range(c.num_triangles))


class TestConvergenceSweep:
    def test_all_goals_converge_with_checks(self, square_with_hole):
        env, c = square_with_hole
        params = IntegrationParams(step=0.01, eps_goal=0.01, max_steps=100_000)
        for res in convergence_sweep(
            c,
            goals=range(c.num_triangles),
            params=params,
            method="proposed",
            funnel="plan",
            check_containment=True,
            check_discipline=True,
        ):
            assert res.all_converged, res.outcomes
            assert res.violations == []
            assert len(res.outcomes) == c.num_triangles - 1


class TestCompare:
    def test_compare_goals_and_csv_determinism(self, square_with_hole):
        env, c = square_with_hole
        params = IntegrationParams(step=0.02, eps_goal=0.02, max_steps=50_000)
        goals = [0, 3]
        rows1, stats1 = compare_goals(c, goals, params)
        rows2, stats2 = compare_goals(c, goals, params)
        assert rows_to_csv(rows1) == rows_to_csv(rows2)
        assert stats1.n_pairs == stats2.n_pairs > 0
        text = stats_to_text(stats1)
        assert "total_bending" in text and "win%" in text

    def test_worker_matches_inline(self, square_with_hole):
        env, c = square_with_hole
        methods = ("baseline", "proposed")
        payload = (
            np.asarray(c.vertices),
            np.asarray(c.triangles),
            0,
            methods,
            "plan",
            0.02,
            0.02,
            50_000,
        )
        g, out = compare_one_goal(payload)
        assert g == 0
        rows, _ = compare_goals(
            c, [0], IntegrationParams(step=0.02, eps_goal=0.02, max_steps=50_000)
        )
        for m in methods:
            got = rows_from_tuples(out[m])
            assert len(got) == len(rows[m])
            for a, b in zip(got, rows[m]):
                assert (a.goal_tri, a.start_tri, a.outcome) == (
                    b.goal_tri,
                    b.start_tri,
                    b.outcome,
                )
                assert a.total_bending == pytest.approx(b.total_bending)

    def test_csv_header(self, square_with_hole):
        env, c = square_with_hole
        rows, _ = compare_goals(
            c, [0], IntegrationParams(step=0.05, eps_goal=0.05, max_steps=20_000)
        )
        lines = rows_to_csv(rows).splitlines()
        assert lines[0].startswith("method,goal_tri,start_tri,outcome,path_length")
        assert len(lines) == 1 + sum(len(v) for v in rows.values())


class TestBundleIO:
    def test_roundtrip_preserves_trajectory(self, square_with_hole, tmp_path):
        env, c = square_with_hole
        bundle = make_bundle(c, env.goal, method="proposed", funnel="full")
        path = tmp_path / "bundle.json"
        save_bundle(bundle, path, env.name)
        loaded = load_bundle(path)
        params = IntegrationParams(step=0.02, eps_goal=0.02, max_steps=50_000)
        t1 = integrate(bundle, [0.3, 0.3], params)
        t2 = integrate(loaded, [0.3, 0.3], params)
        assert t1.outcome == t2.outcome
        assert np.array_equal(t1.samples, t2.samples)
        assert loaded.funnel.members == bundle.funnel.members

    def test_digests_stable_and_plan_shared(self, square_with_hole):
        env, c = square_with_hole
        from curvafield import build_plan

        plan = build_plan(c, env.goal)
        d_base = bundle_to_doc(make_bundle(c, env.goal, method="baseline", plan=plan))
        d_prop = bundle_to_doc(make_bundle(c, env.goal, method="proposed", plan=plan))
        # same discrete plan => identical plan digest; different assignments
        assert d_base["digests"]["plan"] == d_prop["digests"]["plan"]
        assert d_base["digests"]["assignment"] != d_prop["digests"]["assignment"]
        assert d_base["digests"]["complex"] == d_prop["digests"]["complex"]
        assert d_base["format"] == FORMAT

    def test_doc_roundtrip_equals(self, square_with_hole):
        env, c = square_with_hole
        bundle = make_bundle(c, env.goal, method="baseline")
        doc = bundle_to_doc(bundle, env.name)
        again = bundle_to_doc(doc_to_bundle(doc), env.name)
        assert doc["digests"]["bundle"] == again["digests"]["bundle"]

    def test_bad_format_rejected(self):
        with pytest.raises(ParseError):
            doc_to_bundle({"format": "something-else"})


class TestRenderSvg:
    def test_well_formed_with_layers(self, square_with_hole):
        env, c = square_with_hole
        bundle = make_bundle(c, env.goal, method="proposed", funnel="full")
        traj = integrate(
            bundle, [0.3, 0.3], IntegrationParams(step=0.02, eps_goal=0.02)
        )
        svg = render_svg(bundle, [traj], environment=env)
        root = ET.fromstring(svg)
        ids = {e.get("id") for e in root.iter() if e.get("id")}
        assert {"obstacles", "funnel", "mesh", "glyphs", "trajectories", "goal"} <= ids

    def test_no_funnel_layer_when_off(self, square_with_hole):
        env, c = square_with_hole
        bundle = make_bundle(c, env.goal, method="proposed", funnel="off")
        svg = render_svg(bundle, [], environment=None, show_glyphs=False)
        root = ET.fromstring(svg)
        ids = {e.get("id") for e in root.iter() if e.get("id")}
        assert "funnel" not in ids
        assert "obstacles" not in ids
        assert "glyphs" not in ids
        assert "mesh" in ids and "goal" in ids


ENV_JSON = {
    "name": "cli-square",
    "outer": [[0, 0], [4, 0], [4, 4], [0, 4]],
    "holes": [[[1.5, 1.5], [2.5, 1.5], [2.5, 2.5], [1.5, 2.5]]],
    "goal": [3.4, 3.3],
}


@pytest.fixture()
def env_file(tmp_path):
    path = tmp_path / "env.json"
    path.write_text(json.dumps(ENV_JSON))
    return str(path)


class TestCli:
    def test_validate_ok(self, env_file, capsys):
        assert main(["validate", "--env", env_file]) == EXIT_OK
        assert "ok:" in capsys.readouterr().out

    def test_unknown_env_is_input_error(self, capsys):
        assert main(["validate", "--env", "no-such-env"]) == EXIT_INPUT
        assert "input error" in capsys.readouterr().err

    def test_missing_goal_is_input_error(self, tmp_path, capsys):
        path = tmp_path / "nogoal.json"
        doc = dict(ENV_JSON)
        doc.pop("goal")
        path.write_text(json.dumps(doc))
        assert main(["trace", "--env", str(path), "--start", "0.3,0.3"]) == EXIT_INPUT

    def test_plan_writes_bundle_and_timing(self, env_file, tmp_path, capsys):
        out = tmp_path / "bundle.json"
        code = main(["plan", "--env", env_file, "--out", str(out)])
        assert code == EXIT_OK
        err = capsys.readouterr().err
        assert "precompute:" in err and "validation: 0 violation(s)" in err
        doc = json.loads(out.read_text())
        assert doc["format"] == FORMAT

    def test_trace_from_bundle(self, env_file, tmp_path, capsys):
        bundle_path = tmp_path / "bundle.json"
        main(["plan", "--env", env_file, "--out", str(bundle_path)])
        capsys.readouterr()
        out = tmp_path / "trace.tsv"
        code = main([
            "trace", "--bundle", str(bundle_path), "--start", "0.3,0.3",
            "--out", str(out), "--step", "0.01",
        ])
        assert code == EXIT_OK
        err = capsys.readouterr().err
        assert "outcome: Converged" in err
        assert "field evaluation: mean" in err
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "step\tx\ty\tsimplex"
        assert lines[-1].startswith("# metrics: outcome=Converged")

    def test_trace_outside_start_is_input_error(self, env_file):
        assert (
            main(["trace", "--env", env_file, "--start", "99,99"]) == EXIT_INPUT
        )

    def test_compare_deterministic_csv(self, env_file, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        common = [
            "compare", "--env", env_file, "--goals", "2", "--seed", "5",
            "--step", "0.02", "--eps-goal", "0.02", "--jobs", "1",
        ]
        assert main(common + ["--out", str(a)]) == EXIT_OK
        assert main(common + ["--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        assert "pairs=" in capsys.readouterr().err

    def test_compare_ablation(self, env_file, tmp_path, capsys):
        out = tmp_path / "abl.csv"
        code = main([
            "compare", "--env", env_file, "--goals", "1", "--seed", "0",
            "--ablation", "--step", "0.02", "--eps-goal", "0.02",
            "--jobs", "1", "--out", str(out),
        ])
        assert code == EXIT_OK
        header = out.read_text().splitlines()
        assert any(line.startswith("proposed_no_funnel,") for line in header[1:])

    def test_render_svg_output(self, env_file, tmp_path):
        out = tmp_path / "fig.svg"
        code = main([
            "render", "--env", env_file, "--start", "0.3,0.3",
            "--step", "0.02", "--eps-goal", "0.02", "--out", str(out),
        ])
        assert code == EXIT_OK
        ET.fromstring(out.read_text())

    def test_triangle_mesh_import(self, tmp_path):
        node = tmp_path / "m.node"
        ele = tmp_path / "m.ele"
        node.write_text(
            "4 2 0 0\n0 0.0 0.0\n1 2.0 0.0\n2 2.0 2.0\n3 0.0 2.0\n"
        )
        ele.write_text("2 3 0\n0 0 1 2\n1 0 2 3\n")
        code = main([
            "validate", "--mesh-node", str(node), "--mesh-ele", str(ele),
            "--goal", "1.5,0.5",
        ])
        assert code == EXIT_OK

    def test_data_dir_override(self, tmp_path, monkeypatch, capsys):
        # CURVAFIELD_DATA points environment lookup at a custom directory.
        custom = tmp_path / "data"
        custom.mkdir()
        (custom / "myenv.json").write_text(json.dumps(ENV_JSON))
        monkeypatch.setenv("CURVAFIELD_DATA", str(custom))
        assert main(["validate", "--env", "myenv"]) == EXIT_OK
        # bundled names now resolve against the override, so they are gone
        assert main(["validate", "--env", "maze"]) == EXIT_INPUT
