"""Command-line interface: config resolution, commands, exit codes, artifacts."""

import json
import subprocess
import sys

import numpy as np
import pytest

import solsurf as ss
from solsurf import fieldio as fio
from solsurf.cli import main, resolve_config
from solsurf.fixtures import traveling_circle

from conftest import circle_grid


def read_tree(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir()) if p.is_file()}


class TestResolveConfig:
    def test_defaults(self):
        cfg = resolve_config({}, {})
        assert cfg.scenario == "traveling_circle"
        assert cfg.n == 129
        assert cfg.boundary == "periodic"
        assert cfg.dx == pytest.approx(2 * np.pi / 128)
        assert cfg.dt == pytest.approx(cfg.dx / 4)

    def test_scenario_layer_applies(self):
        cfg = resolve_config({}, {"scenario": "sphere"})
        assert cfg.n == 65
        assert cfg.boundary == "one_sided"
        assert cfg.t0 == pytest.approx(0.3)
        assert cfg.params["radius"] == 1.0

    def test_flags_override_file(self):
        cfg = resolve_config({"steps": 4, "seed": 9}, {"steps": 2})
        assert cfg.steps == 2
        assert cfg.seed == 9

    def test_params_union_across_layers(self):
        cfg = resolve_config({"scenario": "sphere", "params": {"radius": 2.0}}, {})
        assert cfg.params == {"radius": 2.0}

    def test_unknown_config_key_rejected(self):
        with pytest.raises(ss.ConfigError, match="nonsense"):
            resolve_config({"nonsense": 1}, {})

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ss.ConfigError):
            resolve_config({}, {"scenario": "klein_bottle"})

    def test_unknown_param_rejected(self):
        with pytest.raises(ss.ConfigError, match="radius"):
            resolve_config({"scenario": "traveling_circle",
                            "params": {"radius": 1.0}}, {})

    def test_which_alias_m0(self):
        cfg = resolve_config({}, {"which": "m0"})
        assert cfg.which == "torsion"

    def test_violations_reported_together(self):
        with pytest.raises(ss.ConfigError) as exc:
            resolve_config({"beta": 3, "boundary": "wrap"}, {})
        msg = str(exc.value)
        assert "beta" in msg and "boundary" in msg


class TestSimulate:
    def test_writes_artifacts_and_exits_zero(self, tmp_path, capsys):
        rc = main(["simulate", "--n", "33", "--steps", "8",
                   "--out", str(tmp_path)])
        assert rc == 0
        for name in ("series.json", "series.csv", "simulate_summary.json"):
            assert (tmp_path / name).exists(), name
        summary = json.loads((tmp_path / "simulate_summary.json").read_text())
        assert summary["max_sphere_drift"] <= 1e-12
        assert summary["steps"] == 8
        out = capsys.readouterr().out
        assert "simulate" in out and "drift" in out

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["simulate", "--n", "33", "--steps", "8", "--out", str(tmp_path)]
        assert main(args) == 0
        first = read_tree(tmp_path)
        assert main(args) == 0
        assert read_tree(tmp_path) == first

    def test_ic_file_round_trip(self, tmp_path):
        ic = traveling_circle(circle_grid(33))
        fio.save_json(ic, tmp_path / "ic.json")
        rc = main(["simulate", "--ic", str(tmp_path / "ic.json"), "--steps", "4",
                   "--out", str(tmp_path)])
        assert rc == 0
        series = fio.load_json(tmp_path / "series.json")
        assert np.array_equal(series.slice(0).S, ic.S)

    def test_format_selection(self, tmp_path):
        rc = main(["simulate", "--n", "33", "--steps", "2", "--format", "json",
                   "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "series.json").exists()
        assert not (tmp_path / "series.csv").exists()

    def test_constraint_breakdown_exits_three(self, tmp_path, capsys):
        rc = main(["simulate", "--scenario", "random_smooth", "--param", "seed=5",
                   "--steps", "128", "--out", str(tmp_path)])
        assert rc == 3
        assert "step" in capsys.readouterr().err


class TestCheck:
    def test_sphere_gc_passes(self, tmp_path, capsys):
        rc = main(["check", "--scenario", "sphere", "--which", "gc",
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "check_gc.json").read_text())
        assert report["pass"] is True
        assert report["finest_residual"] <= 1e-10
        assert len(report["levels"]) == 2
        assert "PASS" in capsys.readouterr().out

    def test_sphere_metric_passes(self, tmp_path):
        rc = main(["check", "--scenario", "sphere", "--which", "metric",
                   "--out", str(tmp_path)])
        assert rc == 0

    def test_random_fields_fail_compatibility(self, tmp_path, capsys):
        rc = main(["check", "--scenario", "random_ct", "--which", "compat",
                   "--out", str(tmp_path)])
        assert rc == 1
        report = json.loads((tmp_path / "check_compat.json").read_text())
        assert report["pass"] is False
        assert "FAIL" in capsys.readouterr().out

    def test_spin_scenario_default_diagnostic(self, tmp_path):
        rc = main(["check", "--scenario", "random_smooth", "--n", "65",
                   "--steps", "32", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "check_torsion.json").exists()

    def test_m0_alias_maps_to_torsion(self, tmp_path):
        rc = main(["check", "--scenario", "traveling_circle", "--which", "m0",
                   "--n", "33", "--steps", "8", "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "check_torsion.json").exists()

    def test_gc_check_needs_field_scenario(self, tmp_path):
        rc = main(["check", "--scenario", "traveling_circle", "--which", "gc",
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_ic_rejected_for_checks(self, tmp_path):
        ic = traveling_circle(circle_grid(33))
        fio.save_json(ic, tmp_path / "ic.json")
        rc = main(["check", "--ic", str(tmp_path / "ic.json"),
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_threshold_flag_respected(self, tmp_path):
        # an absurdly tight threshold turns a passing check into a failure
        rc = main(["check", "--scenario", "traveling_circle", "--which", "compat",
                   "--n", "33", "--steps", "8", "--threshold", "1e-300",
                   "--out", str(tmp_path)])
        assert rc == 1


class TestConvergence:
    def test_three_level_study(self, tmp_path):
        rc = main(["convergence", "--scenario", "sphere", "--which", "gc",
                   "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "convergence_gc.json").read_text())
        assert len(report["levels"]) == 3
        assert report["order"] >= 1.7
        assert (tmp_path / "residuals_gc.csv").exists()

    def test_levels_flag(self, tmp_path):
        rc = main(["convergence", "--scenario", "traveling_circle",
                   "--which", "torsion", "--n", "33", "--steps", "4",
                   "--levels", "2", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "convergence_torsion.json").read_text())
        assert len(report["levels"]) == 2


class TestSurface:
    def test_sphere_patch(self, tmp_path):
        rc = main(["surface", "--scenario", "sphere", "--out", str(tmp_path)])
        assert rc == 0
        for name in ("mesh.obj", "mesh.json", "mesh.csv", "curvature.csv",
                     "surface_summary.json"):
            assert (tmp_path / name).exists(), name
        summary = json.loads((tmp_path / "surface_summary.json").read_text())
        assert abs(summary["K_mean"] - 1.0) < 1e-2
        assert summary["degenerate_count"] == 0

    def test_reconstructed_trajectory(self, tmp_path):
        rc = main(["surface", "--scenario", "traveling_circle", "--n", "33",
                   "--steps", "8", "--out", str(tmp_path)])
        assert rc == 0
        mesh = fio.load_json(tmp_path / "mesh.json")
        assert mesh.r.shape == (33, 9, 3)

    def test_obj_reexport_stable(self, tmp_path):
        rc = main(["surface", "--scenario", "cylinder", "--out", str(tmp_path)])
        assert rc == 0
        data = (tmp_path / "mesh.obj").read_bytes()
        back = ss.import_obj(tmp_path / "mesh.obj")
        ss.export_obj(back, tmp_path / "again.obj")
        assert (tmp_path / "again.obj").read_bytes() == data


class TestConfigFileAndEnv:
    def test_config_file_drives_run(self, tmp_path):
        cfg = {"scenario": "traveling_circle", "n": 33, "steps": 4,
               "out": str(tmp_path / "from_file")}
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps(cfg))
        rc = main(["simulate", "--config", str(cfg_path)])
        assert rc == 0
        assert (tmp_path / "from_file" / "series.json").exists()

    def test_flag_beats_config_file(self, tmp_path):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"n": 33, "steps": 4}))
        rc = main(["simulate", "--config", str(cfg_path), "--steps", "2",
                   "--out", str(tmp_path)])
        assert rc == 0
        summary = json.loads((tmp_path / "simulate_summary.json").read_text())
        assert summary["steps"] == 2

    def test_unknown_config_key_exits_two(self, tmp_path, capsys):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"stepz": 4}))
        rc = main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path)])
        assert rc == 2
        assert "stepz" in capsys.readouterr().err

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOLSURF_OUT", str(tmp_path / "env_dir"))
        rc = main(["simulate", "--n", "33", "--steps", "2"])
        assert rc == 0
        assert (tmp_path / "env_dir" / "series.json").exists()

    def test_out_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOLSURF_OUT", str(tmp_path / "env_dir"))
        rc = main(["simulate", "--n", "33", "--steps", "2",
                   "--out", str(tmp_path / "flag_dir")])
        assert rc == 0
        assert (tmp_path / "flag_dir" / "series.json").exists()
        assert not (tmp_path / "env_dir").exists()

    def test_missing_config_file_exits_two(self, tmp_path):
        rc = main(["simulate", "--config", str(tmp_path / "absent.json"),
                   "--out", str(tmp_path)])
        assert rc == 2


class TestArgumentErrors:
    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "0.1.0" in capsys.readouterr().out

    def test_no_subcommand(self):
        assert main([]) == 2

    def test_unknown_flag(self):
        assert main(["simulate", "--frobnicate"]) == 2

    def test_unknown_scenario(self, tmp_path):
        rc = main(["simulate", "--scenario", "torus", "--out", str(tmp_path)])
        assert rc == 2

    def test_bad_param_for_scenario(self, tmp_path):
        rc = main(["simulate", "--param", "radius=2.0", "--out", str(tmp_path)])
        assert rc == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "solsurf", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "0.1.0" in proc.stdout
