import json
import math
import subprocess
import sys

import numpy as np
import pytest

from overlaplab import cli
from overlaplab.cli import parse_pi_value, parse_point, parse_range
from overlaplab.models import wrap_angle


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "overlaplab.cli", *args],
        cwd=cwd, capture_output=True, text=True)


class TestParsing:
    def test_pi_values(self):
        assert parse_pi_value("pi") == math.pi
        assert parse_pi_value("-pi/2") == -math.pi / 2
        assert parse_pi_value("2pi") == pytest.approx(2 * math.pi)
        assert parse_pi_value("0.25") == 0.25
        assert parse_pi_value("-3") == -3.0

    def test_points(self):
        p = parse_point("pi,0")
        assert (p.x, p.y) == (math.pi, 0.0)

    def test_linear_range_inclusive(self):
        r = parse_range("0.9:1.05:0.05")
        assert np.allclose(r, [0.9, 0.95, 1.0, 1.05])

    def test_log_range(self):
        r = parse_range("0.002:0.05:log4")
        assert r.size == 4
        assert r[0] == pytest.approx(0.002)
        assert r[-1] == pytest.approx(0.05)
        ratios = r[1:] / r[:-1]
        assert np.allclose(ratios, ratios[0])

    def test_single_value(self):
        assert parse_range("0.5").tolist() == [0.5]

    def test_bad_range(self):
        with pytest.raises(ValueError):
            parse_range("1:2")


class TestExitCodes:
    def test_usage_error_is_one(self, tmp_path):
        res = run_cli(["orbit", "--family", "torus"], tmp_path)
        assert res.returncode == 1

    def test_unknown_command_is_one(self, tmp_path):
        res = run_cli(["bogus"], tmp_path)
        assert res.returncode == 1

    def test_domain_error_is_two(self, tmp_path):
        res = run_cli(["melnikov", "--family", "cubic", "--eps", "0.5",
                       "--connection", "pi,0:0,1", "--quiet"], tmp_path)
        assert res.returncode == 2
        assert "no such connection" in res.stderr

    def test_success_is_zero(self, tmp_path):
        res = run_cli(["saddle", "--family", "cubic", "--eps", "1",
                       "--mu", "0", "--seed", "pi,0", "--quiet"], tmp_path)
        assert res.returncode == 0


class TestSaddleCommand:
    def test_exact_saddle_json(self, tmp_path):
        res = run_cli(["saddle", "--family", "cubic", "--eps", "1",
                       "--mu", "0", "--seed", "pi,0", "--quiet"], tmp_path)
        assert res.returncode == 0
        data = json.loads((tmp_path / "saddle_orbit.json").read_text())
        assert abs(data["base"]["x"] - math.pi) <= 1e-12
        assert abs(data["base"]["y"]) <= 1e-12
        assert data["residual"] <= 1e-12
        assert data["eigenvalues"]["unstable"] > 1


class TestOrbitCommand:
    def test_fig_recipe_reaches_large_excursion(self, tmp_path):
        res = run_cli(["orbit", "--family", "torus", "--eps", "0.99",
                       "--mu", "0.1", "--coupling", "mu-only",
                       "--f", "1.0*cos(x+2y+t)", "--x0", "0", "--y0", "0.01",
                       "--tmax", "500", "--quiet"], tmp_path)
        assert res.returncode == 0
        rows = np.loadtxt(tmp_path / "orbit_trajectory.csv", delimiter=",",
                          skiprows=1)
        header = (tmp_path / "orbit_trajectory.csv").read_text().splitlines()[0]
        assert header == "t,x,y,x_lift,y_lift,energy"
        y_lift = rows[:, 4]
        assert np.max(np.abs(y_lift - y_lift[0])) >= 2 * math.pi

    def test_manifest_replay_is_byte_identical(self, tmp_path):
        args = ["orbit", "--family", "torus", "--eps", "0.8", "--mu", "0.05",
                "--x0", "0.1", "--y0", "1", "--tmax", "20",
                "--sample-dt", "0.5", "--quiet"]
        assert run_cli(args, tmp_path).returncode == 0
        first = (tmp_path / "orbit_trajectory.csv").read_bytes()
        manifest = json.loads((tmp_path / "orbit_manifest.json").read_text())
        assert run_cli(manifest["argv"], tmp_path).returncode == 0
        second = (tmp_path / "orbit_trajectory.csv").read_bytes()
        assert first == second

    def test_stdout_mode(self, tmp_path):
        res = run_cli(["orbit", "--family", "cubic", "--eps", "1",
                       "--x0", "0", "--y0", "0.5", "--tmax", "5",
                       "--stdout", "--quiet"], tmp_path)
        assert res.returncode == 0
        assert res.stdout.startswith("t,x,y,x_lift,y_lift,energy")
        assert not (tmp_path / "orbit_trajectory.csv").exists()

    def test_f_file_equivalent_to_inline(self, tmp_path):
        (tmp_path / "f.txt").write_text("1 1 2 1 0\n")
        a = ["orbit", "--family", "torus", "--eps", "0.9", "--mu", "0.05",
             "--x0", "0", "--y0", "0.3", "--tmax", "10", "--quiet"]
        run_cli(a + ["--f", "1.0*cos(x+2y+t)", "--prefix", "inline"],
                tmp_path)
        run_cli(a + ["--f-file", "f.txt", "--prefix", "file"], tmp_path)
        assert (tmp_path / "inline_trajectory.csv").read_bytes() == \
            (tmp_path / "file_trajectory.csv").read_bytes()

    def test_full_precision_output(self, tmp_path):
        run_cli(["strobe", "--family", "torus", "--eps", "0.9",
                 "--mu", "0.02", "--x0", "0.1", "--y0", "1", "--n", "2",
                 "--quiet"], tmp_path)
        text = (tmp_path / "strobe_strobe.csv").read_text().splitlines()
        # values re-parse to the same doubles that were written
        row = text[2].split(",")
        t_val = float(row[0])
        assert ("%.17g" % t_val) == row[0]


class TestPortrait:
    @pytest.mark.parametrize("family", ["cubic", "torus"])
    @pytest.mark.parametrize("eps", [0.5, 1.0, 1.5])
    def test_critical_point_census(self, tmp_path, family, eps):
        res = run_cli(["portrait", "--family", family, "--eps", str(eps),
                       "--window=-pi:pi:-pi:pi", "--grid", "101",
                       "--quiet"], tmp_path)
        assert res.returncode == 0
        data = json.loads(
            (tmp_path / "portrait_critical_points.json").read_text())

        def cells(points):
            kept = set()
            for p in points:
                kept.add((round(float(wrap_angle(p["x"])), 6),
                          round(float(wrap_angle(p["y"])), 6)))
            return kept

        # one fundamental cell carries two saddles and two centers
        assert len(cells(data["saddles"])) == 2
        assert len(cells(data["centers"])) == 2
        assert data["reconnected"] == (eps == 1.0)

    def test_levels_cover_separatrices(self, tmp_path):
        run_cli(["portrait", "--family", "torus", "--eps", "1.0",
                 "--grid", "201", "--quiet"], tmp_path)
        rows = np.loadtxt(tmp_path / "portrait_levels.csv", delimiter=",",
                          skiprows=1, usecols=(0,))
        assert 0.0 in set(np.round(rows, 12))   # reconnected level present


class TestConfineCommand:
    def test_verdict_and_evidence_files(self, tmp_path):
        res = run_cli(["confine", "--family", "torus", "--eps", "1.0",
                       "--mu", "0.01", "--band", "0:pi", "--orbits", "12",
                       "--strobes", "200", "--quiet"], tmp_path)
        assert res.returncode == 0
        data = json.loads((tmp_path / "confine_verdict.json").read_text())
        assert data["verdict"] == "overlapped"
        assert (tmp_path / "confine_crossing.csv").exists()
