import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qswitch_thermo import analysis
from qswitch_thermo.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def strip_timestamp(text):
    d = json.loads(text)
    d.pop("timestamp")
    return d


class TestSweep:
    def test_two_points(self, capsys):
        code, out, _ = invoke(capsys, "sweep", "--start", "0.3", "--stop", "0.9", "--points", "2")
        header, data = parse_csv(out)
        assert code == 0
        assert header == ["T", "beta", "F_noswitch", "F_switch", "F_ho", "chi"]
        assert data.shape == (2, 6)

    def test_three_probe_ordering(self, capsys):
        code, out, _ = invoke(capsys, "sweep", "--start", "0.05", "--stop", "2", "--points", "400",
                              "--gap", "1", "--xi", "1")
        header, data = parse_csv(out)
        col = {h: data[:, i] for i, h in enumerate(header)}
        assert np.all(col["F_switch"] >= col["F_noswitch"])
        below = col["T"] < 0.4157 - 2e-3
        above = col["T"] > 0.4157 + 2e-3
        assert np.all(col["F_switch"][below] > col["F_ho"][below])
        assert np.all(col["F_switch"][above] < col["F_ho"][above])

    def test_alpha_symmetry(self, capsys):
        code, out, _ = invoke(capsys, "sweep", "--param", "alpha", "--start", "0", "--stop", "1",
                              "--points", "21", "--temp", "1", "--gap", "1", "--probes", "qubit_switch")
        header, data = parse_csv(out)
        assert header == ["alpha", "xi", "F_switch"]
        f = data[:, 2]
        np.testing.assert_allclose(f, f[::-1], rtol=1e-12)
        assert np.argmax(f) == 10 and data[10, 0] == 0.5

    def test_gap_and_beta_sweeps(self, capsys):
        code, out, _ = invoke(capsys, "sweep", "--param", "gap", "--start", "0.1", "--stop", "10",
                              "--points", "5", "--beta", "1", "--alpha", "0.5")
        assert code == 0 and parse_csv(out)[0][0] == "gap"
        code, out, _ = invoke(capsys, "sweep", "--param", "beta", "--start", "0", "--stop", "2",
                              "--points", "3", "--probes", "qubit_noswitch,harmonic_oscillator")
        header, data = parse_csv(out)
        assert header == ["beta", "T", "F_noswitch", "F_ho"]
        assert np.isinf(data[0, 1]) and np.isinf(data[0, 3])

    def test_csv_precision_and_determinism(self, capsys):
        args = ("sweep", "--start", "0.1", "--stop", "3", "--points", "7")
        _, first, _ = invoke(capsys, *args)
        _, second, _ = invoke(capsys, *args)
        assert first == second
        for cell in first.splitlines()[1].split(","):
            assert format(float(cell), ".17g") == cell

    def test_json_and_partial_thermalization(self, capsys):
        code, out, err = invoke(capsys, "sweep", "--start", "0.5", "--stop", "1", "--points", "2",
                                "--lambda", "0.5", "--format", "json")
        rec = json.loads(out)
        assert code == 0 and rec["method"] == "spectral" and "spectral" in err
        assert len(rec["rows"]) == 2 and rec["columns"][0] == "T"

    def test_full_thermalization_through_spectral_matches(self, capsys):
        _, exact, _ = invoke(capsys, "sweep", "--start", "0.5", "--stop", "1", "--points", "3",
                             "--probes", "qubit_switch")
        _, near, _ = invoke(capsys, "sweep", "--start", "0.5", "--stop", "1", "--points", "3",
                            "--probes", "qubit_switch", "--lambda", "0.999999999")
        np.testing.assert_allclose(parse_csv(near)[1], parse_csv(exact)[1], rtol=1e-6)

    @pytest.mark.parametrize("argv", [
        ("sweep", "--start", "2", "--stop", "1"),
        ("sweep", "--start", "1", "--stop", "2", "--points", "1"),
        ("sweep", "--start", "1", "--stop", "2", "--probes", "thermocouple"),
        ("sweep", "--start", "1", "--stop", "2", "--temp", "1"),
        ("sweep", "--start", "1", "--stop", "2", "--alpha", "0.5", "--xi", "1"),
        ("sweep", "--start", "1", "--stop", "2", "--xi", "3"),
        ("optimize", "--xi", "-0.5"),
        ("threshold", "--gap", "0"),
        ("reproduce", "fig9"),
        ("calibrate",),
    ])
    def test_usage_errors(self, capsys, argv):
        code, out, err = invoke(capsys, *argv)
        assert code == 2 and out == ""
        lines = err.strip().splitlines()
        assert len(lines) == 1 and json.loads(lines[0])["error"] == "usage"


class TestReports:
    @pytest.mark.parametrize("xi,expected", [("0", 2.399), ("1", 2.4741)])
    def test_optimize(self, capsys, xi, expected):
        code, out, _ = invoke(capsys, "optimize", "--xi", xi)
        rep = json.loads(out)
        assert code == 0 and abs(rep["x_star"] - expected) <= 1e-3
        assert abs(rep["argmax_crosscheck"] - rep["x_star"]) <= 1e-6
        assert rep["optimal_T_for_unit_gap"] == pytest.approx(1 / rep["x_star"])

    def test_optimize_deterministic(self, capsys):
        _, a, _ = invoke(capsys, "optimize", "--xi", "0")
        _, b, _ = invoke(capsys, "optimize", "--xi", "0")
        assert strip_timestamp(a) == strip_timestamp(b)

    def test_optimize_failure_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(analysis, "ROOT_BRACKET", (5.0, 10.0))
        code, out, err = invoke(capsys, "optimize", "--xi", "1")
        assert code == 3 and out == ""
        assert json.loads(err)["error"] == "numerical"

    def test_threshold(self, capsys):
        _, one, _ = invoke(capsys, "threshold", "--gap", "1")
        _, two, _ = invoke(capsys, "threshold", "--gap", "2")
        one, two = json.loads(one), json.loads(two)
        assert abs(one["t_threshold"] - 0.4157) <= 1e-3
        assert two["x_star"] == one["x_star"]
        assert two["t_threshold"] == pytest.approx(2 * one["t_threshold"])

    def test_tur(self, capsys):
        _, out, _ = invoke(capsys, "tur", "--beta", "1", "--xi", "0")
        assert json.loads(out)["bound"] == 1.0
        _, out, _ = invoke(capsys, "tur", "--beta", "50", "--gap", "1", "--xi", "1")
        rep = json.loads(out)
        assert rep["bound"] == pytest.approx(1 / np.sqrt(1.5), abs=1e-6)
        assert rep["consistency_pass"] is True
        _, out, _ = invoke(capsys, "tur", "--beta", "1e-8", "--gap", "1", "--xi", "1", "--nu", "4")
        rep = json.loads(out)
        assert rep["bound"] == pytest.approx(1 / np.sqrt(7 / 6), abs=1e-6)
        assert rep["bound_side"] == pytest.approx(rep["bound"] / 2)

    def test_tur_inconsistency_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(analysis, "tur_bound", lambda *a: 0.5)
        code, _, err = invoke(capsys, "tur", "--beta", "1", "--xi", "1")
        assert code == 3 and json.loads(err)["error"] == "numerical"


class TestReproduce:
    def test_headline(self, capsys, tmp_path):
        code, _, _ = invoke(capsys, "reproduce", "headline", "--out", str(tmp_path))
        rep = json.loads((tmp_path / "headline.json").read_text())
        assert code == 0
        assert rep["chi_limits"]["high_T"] == pytest.approx(7 / 6, abs=1e-6)
        assert rep["chi_limits"]["low_T"] == pytest.approx(1.5, abs=1e-6)
        assert rep["precision_percents"]["high_T"] == pytest.approx(8.01, abs=5e-3)
        assert rep["precision_percents"]["low_T"] == pytest.approx(22.47, abs=5e-3)
        assert abs(rep["T_threshold"] - 0.4157) <= 1e-3
        assert abs(rep["x_star_noswitch"] - 2.399) <= 1e-3
        assert abs(rep["x_star_switch"] - 2.4741) <= 1e-3

    def test_fig2(self, capsys, tmp_path):
        invoke(capsys, "reproduce", "fig2", "--out", str(tmp_path), "--points", "25")
        header, data = parse_csv((tmp_path / "fig2.csv").read_text())
        assert header == ["gap", "alpha", "xi", "F_switch"]
        assert data.shape == (25 * 21, 4)
        for gap in np.unique(data[:, 0]):
            rows = data[data[:, 0] == gap]
            f = dict(zip(rows[:, 1], rows[:, 3]))
            assert f[0.5] >= f[0.0]

    def test_fig3(self, capsys, tmp_path):
        invoke(capsys, "reproduce", "fig3", "--out", str(tmp_path))
        header, data = parse_csv((tmp_path / "fig3.csv").read_text())
        assert header == ["T", "beta", "F_noswitch", "F_switch", "chi"]
        assert data.shape[0] == 300 and data[0, 0] == 0.05 and data[-1, 0] == 3.0
        assert np.all(np.diff(data[:, 4]) < 0)

    def test_fig4_single_crossing(self, capsys):
        code, out, _ = invoke(capsys, "reproduce", "fig4")
        header, data = parse_csv(out)
        col = {h: data[:, i] for i, h in enumerate(header)}
        flips = np.nonzero(np.diff(np.sign(col["F_switch"] - col["F_ho"])))[0]
        assert code == 0 and len(flips) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qswitch_thermo", "threshold"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert abs(json.loads(proc.stdout)["t_threshold"] - 0.4157) <= 1e-3


def test_help_states_units():
    proc = subprocess.run([sys.executable, "-m", "qswitch_thermo", "--help"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "k_B = hbar = 1" in proc.stdout
