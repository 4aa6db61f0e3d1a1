import json
import math
import os

import numpy as np
import pytest

from hyperifs.cli import main
from hyperifs.report import CSV_COLUMNS, VerifierReport


def run(argv, capsys=None):
    return main(argv)


class TestVerifyOverlap:
    def test_positive_margin_exit_zero(self, tmp_path, capsys):
        code = run(["verify-overlap", "--manifold", "circle", "--theta", "6",
                    "--t", "0.1", "--ell", "0.8", "--seed", "7",
                    "--samples", "5", "--out-dir", str(tmp_path)])
        assert code == 0
        out = json.loads(capsys.readouterr().out.strip())
        assert out["min_relative_margin"] == pytest.approx(1 / 15, abs=1e-9)
        assert (tmp_path / "verify_overlap.json").exists()
        assert (tmp_path / "verify_overlap.csv").exists()

    def test_negative_margin_exit_one(self, tmp_path):
        code = run(["verify-overlap", "--manifold", "circle", "--theta", "6",
                    "--t", "0.5", "--ell", "0.99", "--seed", "7",
                    "--samples", "5", "--out-dir", str(tmp_path)])
        assert code == 1

    def test_missing_seed_exit_two(self, tmp_path, capsys):
        code = run(["verify-overlap", "--manifold", "circle",
                    "--out-dir", str(tmp_path)])
        assert code == 2
        assert "seed" in capsys.readouterr().err

    def test_bad_params_exit_two(self, tmp_path):
        code = run(["verify-overlap", "--manifold", "circle", "--theta",
                    "0.5", "--seed", "1", "--out-dir", str(tmp_path)])
        assert code == 2

    def test_csv_header(self, tmp_path):
        run(["verify-overlap", "--manifold", "circle", "--seed", "7",
             "--samples", "3", "--out-dir", str(tmp_path)])
        header = (tmp_path / "verify_overlap.csv").read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)


class TestCheckHyperMinimal:
    def test_circle_passes(self, tmp_path):
        code = run(["check-hyper-minimal", "--example", "circle",
                    "--theta", "6", "--pairs", "10", "--r", "0.02",
                    "--seed", "7", "--out-dir", str(tmp_path)])
        assert code == 0

    def test_rational_control_fails_and_lists_pairs(self, tmp_path, capsys):
        code = run(["check-hyper-minimal", "--example", "rational-circle",
                    "--theta", "6", "--pairs", "4", "--r", "0.02",
                    "--seed", "7", "--max-depth", "50",
                    "--out-dir", str(tmp_path)])
        assert code == 1
        assert "failing pairs" in capsys.readouterr().err

    def test_theta_guard(self, tmp_path):
        code = run(["check-hyper-minimal", "--example", "circle",
                    "--theta", "4", "--pairs", "2", "--r", "0.02",
                    "--seed", "7", "--out-dir", str(tmp_path)])
        assert code == 2

    def test_check_local(self, tmp_path):
        code = run(["check-local", "--example", "circle", "--theta", "6",
                    "--pairs", "4", "--r", "0.02", "--u-center", "0.5",
                    "--u-radius", "0.05", "--seed", "3",
                    "--out-dir", str(tmp_path)])
        assert code == 0


class TestOrbitAndCoverage:
    def test_rotation_orbit_rows(self, tmp_path):
        code = run(["orbit", "--example", "rational-circle", "--x", "0.2",
                    "--steps", "10", "--seed", "1",
                    "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "orbit.csv").read_text().splitlines()
        assert rows[0] == "step,letter,x1"
        assert len(rows) == 12  # header + start + 10 steps
        for i, line in enumerate(rows[2:], start=1):
            val = float(line.split(",")[2])
            assert val == pytest.approx((0.2 + i / 3.0) % 1.0, abs=1e-12)

    def test_full_space_coverage_constant(self, tmp_path):
        code = run(["coverage", "--example", "rational-circle",
                    "--u0-center", "0.5", "--u0-radius", "0.499",
                    "--eps", "0.01", "--max-depth", "5", "--seed", "1",
                    "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "coverage.csv").read_text().splitlines()[1:]
        assert all(float(r.split(",")[1]) == 1.0 for r in rows)

    def test_rational_coverage_plateau(self, tmp_path):
        run(["coverage", "--example", "rational-circle",
             "--u0-center", "0.1", "--u0-radius", "0.005", "--eps", "0.001",
             "--max-depth", "30", "--seed", "1", "--out-dir", str(tmp_path)])
        rows = (tmp_path / "coverage.csv").read_text().splitlines()[1:]
        vals = [float(r.split(",")[1]) for r in rows]
        assert vals == sorted(vals)
        assert vals[-1] == pytest.approx(0.03, abs=0.01)


class TestConfigAndEnv:
    def test_ini_defaults_with_flag_override(self, tmp_path, capsys):
        ini = tmp_path / "run.ini"
        ini.write_text("[verify-overlap]\nseed = 9\nsamples = 4\n"
                       "t = 0.5\nell = 0.99\n")
        # flag --t overrides the file; file supplies seed and ell
        code = run(["--config", str(ini), "verify-overlap",
                    "--manifold", "circle", "--t", "0.1", "--ell", "0.8",
                    "--out-dir", str(tmp_path)])
        assert code == 0
        code = run(["--config", str(ini), "verify-overlap",
                    "--manifold", "circle", "--out-dir", str(tmp_path)])
        assert code == 1  # file's t=0.5, ell=0.99 give a negative margin

    def test_unknown_config_key(self, tmp_path):
        ini = tmp_path / "bad.ini"
        ini.write_text("[verify-overlap]\nseed = 9\nbogus = 1\n")
        code = run(["--config", str(ini), "verify-overlap",
                    "--manifold", "circle", "--out-dir", str(tmp_path)])
        assert code == 2

    def test_env_out_dir_override(self, tmp_path, monkeypatch):
        env_dir = tmp_path / "env_reports"
        monkeypatch.setenv("HYPERIFS_OUT_DIR", str(env_dir))
        code = run(["verify-overlap", "--manifold", "circle", "--seed", "7",
                    "--samples", "3", "--out-dir", str(tmp_path / "ignored")])
        assert code == 0
        assert (env_dir / "verify_overlap.json").exists()
        assert not (tmp_path / "ignored").exists()


class TestReproducibility:
    def test_byte_identical_reports(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            code = run(["check-hyper-minimal", "--example", "circle",
                        "--theta", "6", "--pairs", "5", "--r", "0.02",
                        "--seed", "13", "--out-dir", str(d)])
            assert code == 0
        for name in ("check_hyper_minimal.json", "check_hyper_minimal.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d, seed in ((a, "13"), (b, "14")):
            run(["check-hyper-minimal", "--example", "circle", "--theta", "6",
                 "--pairs", "5", "--r", "0.02", "--seed", seed,
                 "--out-dir", str(d)])
        assert (a / "check_hyper_minimal.json").read_bytes() != \
            (b / "check_hyper_minimal.json").read_bytes()


class TestExampleBundles:
    def test_circle_bundle(self, tmp_path, capsys):
        code = run(["example", "circle", "--seed", "7", "--pairs", "5",
                    "--omega-steps", "20000", "--out-dir", str(tmp_path)])
        assert code == 0
        battery = json.loads((tmp_path / "circle_battery.json").read_text())
        freq = battery["checks"]["omega_frequency"]
        assert abs(freq["frequency"] - 22 / 23) < 0.01
        system = json.loads((tmp_path / "circle_system.json").read_text())
        assert system["k"] == 23

    def test_sphere_bundle(self, tmp_path):
        code = run(["example", "sphere", "--seed", "7", "--pairs", "5",
                    "--max-len", "4", "--out-dir", str(tmp_path)])
        assert code == 0
        battery = json.loads((tmp_path / "sphere_battery.json").read_text())
        assert battery["checks"]["fixed_points"]["max_residual"] < 1e-9
        rows = (tmp_path / "sphere_fixed_points.csv").read_text().splitlines()
        assert len(rows) - 1 == sum(4**i for i in range(1, 5))

    def test_torus_bundle_histogram(self, tmp_path):
        code = run(["example", "torus", "--seed", "7", "--pairs", "3",
                    "--max-steps", "20000", "--out-dir", str(tmp_path)])
        battery = json.loads((tmp_path / "torus_battery.json").read_text())
        ri = battery["checks"]["return_index"]
        assert ri["pairs"] == 3
        assert len(ri["histogram_counts"]) == len(ri["histogram_bins"]) - 1
