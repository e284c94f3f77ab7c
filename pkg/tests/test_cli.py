import csv
import json
import math
import re
import subprocess
import sys

import pytest
import yaml

from slabheat.cli import main
from slabheat.domain import SlabProblem
from slabheat.series import select_truncation, tail_bound

from conftest import parabola


def write_config(path, profile, **sections):
    cfg = {"problem": {"length": 1.0, "diffusivity": 1.0, "profile": profile}, **sections}
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


ZERO = {"kind": "constant", "value": 0.0}
MODE1 = {"kind": "single_mode", "mode": 1, "amplitude": 1.0}


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_zero_profile(tmp_path):
    cfg = write_config(tmp_path / "c.yaml", ZERO)
    out = tmp_path / "u.csv"
    assert main(["solve", "--config", cfg, "--times", "0,0.1", "--output", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 202
    assert all(float(r["u"]) == 0.0 for r in rows)


def test_solve_single_mode(tmp_path):
    cfg = write_config(tmp_path / "c.yaml", MODE1)
    out = tmp_path / "u.csv"
    assert main(["solve", "--config", cfg, "--times", "0.1", "--n-x", "101", "--n-modes", "5", "--output", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 101
    for r in rows:
        x = float(r["x"])
        assert abs(float(r["u"]) - math.exp(-math.pi**2 * 0.1) * math.sin(math.pi * x)) <= 1e-12
        assert float(r["tail_bound"]) >= 0
    meta = json.loads((tmp_path / "u.csv.meta.json").read_text())
    assert meta["n_modes"] == 5 and meta["selected"] is False


def test_solve_selects_truncation(tmp_path):
    cfg = write_config(tmp_path / "c.yaml", {"kind": "polynomial", "coefficients": [0, 1, -1]})
    out, meta_path = tmp_path / "u.csv", tmp_path / "meta.json"
    rc = main(["solve", "--config", cfg, "--target-error", "1e-8", "--t-min", "0.1",
               "--output", str(out), "--metadata", str(meta_path)])
    assert rc == 0
    meta = json.loads(meta_path.read_text())
    N = meta["n_modes"]
    assert N == select_truncation(SlabProblem(1.0, 1.0, parabola()), 1e-8, 0.1)
    K = 1 / 3
    assert tail_bound(K, 1, 1, N, 0.1).bound <= 1e-8 < tail_bound(K, 1, 1, N - 1, 0.1).bound
    assert meta["tail_bound_at_t_min"] == pytest.approx(tail_bound(K, 1, 1, N, 0.1).bound)


def test_flags_override_config(tmp_path):
    cfg = write_config(tmp_path / "c.yaml", MODE1, solve={"times": [0.0], "n_x": 5, "n_modes": 2,
                                                            "output": str(tmp_path / "a.csv")})
    assert main(["solve", "--config", cfg, "--n-x", "3", "--length", "2.0"]) == 0
    rows = read_rows(tmp_path / "a.csv")
    assert [float(r["x"]) for r in rows] == [0.0, 1.0, 2.0]


def coeff_column(path):
    return [float(r["B_w"]) for r in read_rows(path)]


def test_coeffs_examples(tmp_path):
    out = tmp_path / "b.csv"
    cfg = write_config(tmp_path / "c.yaml", {"kind": "constant", "value": 1.0})
    assert main(["coeffs", "--config", cfg, "--n-modes", "4", "--output", str(out)]) == 0
    assert coeff_column(out) == pytest.approx([4 / math.pi, 0, 4 / (3 * math.pi), 0], abs=1e-12)
    assert read_rows(out)[0]["method"] == "closed_form"

    cfg = write_config(tmp_path / "c.yaml", {"kind": "single_mode", "mode": 2, "amplitude": 1.0})
    assert main(["coeffs", "--config", cfg, "--n-modes", "4", "--output", str(out)]) == 0
    assert coeff_column(out) == [0, 1, 0, 0]

    cfg = write_config(tmp_path / "c.yaml", ZERO)
    assert main(["coeffs", "--config", cfg, "--n-modes", "4", "--output", str(out)]) == 0
    assert coeff_column(out) == [0, 0, 0, 0]


def test_coeffs_quadrature_failure_exits_nonzero(tmp_path, capsys):
    out = tmp_path / "b.csv"
    cfg = write_config(tmp_path / "c.yaml", {"kind": "callable", "target": "tests_profiles:rough"})
    sys.path.insert(0, str(tmp_path))
    (tmp_path / "tests_profiles.py").write_text(
        "import math\n"
        "def rough(x):\n"
        "    return math.copysign(1.0, math.sin(1e4 * x)) / max(x, 1e-300) ** 0.9\n"
    )
    try:
        assert main(["coeffs", "--config", cfg, "--n-modes", "2", "--tol", "1e-14", "--output", str(out)]) == 1
    finally:
        sys.path.remove(str(tmp_path))
    assert "quadrature failed" in capsys.readouterr().err
    assert read_rows(out)[0]["method"] == "quadrature_failed"


def test_verify_default_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 10 and all(line.startswith("PASS") for line in out)


def test_sabotage_needs_testing_env(monkeypatch):
    monkeypatch.delenv("SLABHEAT_TESTING", raising=False)
    with pytest.raises(SystemExit):
        main(["verify", "--sabotage", "break-decay"])


def verify_lines(capsys, *extra):
    rc = main(["verify", *extra])
    lines = capsys.readouterr().out.splitlines()
    return rc, {re.match(r"\w+ (\w+):", l).group(1): l.startswith("PASS") for l in lines}


def test_sabotage_flip_sign(monkeypatch, capsys):
    monkeypatch.setenv("SLABHEAT_TESTING", "1")
    rc, status = verify_lines(capsys, "--sabotage", "flip-sign-mode", "3")
    assert rc == 1
    assert status["termwise_pde_identity"]
    assert not status["initial_condition_recovery"]


def test_sabotage_break_decay(monkeypatch, capsys):
    monkeypatch.setenv("SLABHEAT_TESTING", "1")
    rc, status = verify_lines(capsys, "--sabotage", "break-decay")
    assert rc == 1
    assert not status["tail_bound_soundness"]


def test_compare(tmp_path):
    args = ["--series-output", str(tmp_path / "s.csv"), "--fd-output", str(tmp_path / "f.csv")]
    cfg = write_config(tmp_path / "z.yaml", ZERO)
    assert main(["compare", "--config", cfg, "--n-x", "41", "--dt", "1e-3", *args]) == 0
    cfg = write_config(tmp_path / "m.yaml", MODE1)
    summary = tmp_path / "sum.json"
    assert main(["compare", "--config", cfg, "--tolerance", "1e-3", "--summary-output", str(summary), *args]) == 0
    assert json.loads(summary.read_text())["max_abs"] < 2e-4
    s_rows, f_rows = read_rows(tmp_path / "s.csv"), read_rows(tmp_path / "f.csv")
    assert [r["x"] for r in s_rows] == [r["x"] for r in f_rows if float(r["t"]) > 0]
    assert main(["compare", "--config", cfg, "--n-x", "21", "--dt", "1e-3", "--tolerance", "1e-9", *args]) == 1


def plot_from(tmp_path, text):
    src, dst = tmp_path / "g.csv", tmp_path / "g.svg"
    src.write_text(text)
    assert main(["plot", "--input", str(src), "--output", str(dst)]) == 0
    return dst.read_text()


def test_plot_single_snapshot(tmp_path):
    svg = plot_from(tmp_path, "x,t,u,tail_bound\n0,0.1,0,\n0.5,0.1,1,\n1,0.1,0,\n")
    polys = re.findall(r'<polyline[^>]*points="([^"]*)"', svg)
    assert len(polys) == 1 and len(polys[0].split()) == 3
    assert svg.startswith("<svg") and "viewBox" in svg and "<script" not in svg
    assert ">x</text>" in svg and ">u</text>" in svg


def test_plot_legend_order(tmp_path):
    svg = plot_from(tmp_path, "x,t,u\n0,0.5,0\n1,0.5,0\n0,0.1,0\n1,0.1,1\n")
    assert len(re.findall("<polyline", svg)) == 2
    assert re.findall(r"t = ([0-9.]+)</text>", svg) == ["0.1", "0.5"]


def test_plot_malformed_csv(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("x,t,u\n0,zero,1\n")
    assert main(["plot", "--input", str(src), "--output", str(tmp_path / "o.svg")]) == 2


@pytest.mark.parametrize(
    "text",
    ["problem: [1, 2", "problem:\n  length: -1\n", "problem:\n  profile: {kind: spline}\n"],
)
def test_config_errors_exit_2(tmp_path, capsys, text):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(text)
    assert main(["solve", "--config", str(cfg), "--output", str(tmp_path / "x.csv")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("slabheat solve:") and err.count("\n") == 1


def test_missing_config_exit_2(tmp_path):
    assert main(["coeffs", "--config", str(tmp_path / "nope.yaml")]) == 2


def test_console_script_entry(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "slabheat.cli", "coeffs", "--n-modes", "2", "--output", str(tmp_path / "c.csv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "c.csv").read_text().startswith("w,B_w,method,est_error\n")
