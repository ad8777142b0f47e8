import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from liouspace.cli import main
from liouspace.fieldio import read_field, write_field
from liouspace.fields import DensityMatrixField, UniformGrid1D
from liouspace.oracles import hermite_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_evolve_reports_covariance(tmp_path, capsys):
    out = tmp_path / "f.txt"
    code, stdout, _ = run(capsys, "evolve", "--t", "1", "--out", str(out))
    assert code == 0
    rec = json.loads(stdout)
    assert (rec["cov_qq"], rec["cov_qp"], rec["cov_pp"]) == pytest.approx((1.0, 0.5, 0.5))
    assert (rec["mean_q"], rec["mean_p"]) == pytest.approx((-0.5, -1.0))
    assert read_field(out).time == 1.0


def test_evolve_peak_at_t0(tmp_path, capsys):
    out = tmp_path / "f.txt"
    code, _, _ = run(capsys, "evolve", "--grid=-6,6,121,-8,8,161", "--out", str(out))
    assert code == 0
    assert read_field(out).values.max() == pytest.approx(1 / math.pi, rel=1e-15)


def test_evolve_missing_out_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["evolve", "--t", "1"])
    assert exc.value.code == 2


def test_evolve_invalid_covariance_exits_2(tmp_path, capsys):
    code, _, err = run(capsys, "evolve", "--cov", "1,2,1", "--out", str(tmp_path / "f.txt"))
    assert code == 2
    assert "covariance" in err


def test_phase_prints_number(capsys):
    code, out, _ = run(capsys, "phase", "--t", "1")
    assert code == 0
    assert float(out) == pytest.approx(-0.4968657483653908, rel=1e-15)
    code, out, _ = run(capsys, "phase", "--t", "1", "--method", "rk4")
    assert float(out) == pytest.approx(-0.4968657483653908, abs=1e-12)


def test_phase_writes_curve(tmp_path, capsys):
    path = tmp_path / "phi.txt"
    code, _, _ = run(capsys, "phase", "--t", "2", "--method", "rk4", "--out", str(path))
    assert code == 0
    curve = read_field(path)
    assert curve.span == (0.0, 2.0)


def test_greens_eval(capsys):
    code, out, _ = run(capsys, "greens-eval", "--x", "0", "--xp", "0", "--t", "2")
    rec = json.loads(out)
    assert code == 0
    assert rec["arg"] == pytest.approx(-1 / 3 - math.pi / 4)
    assert rec["abs"] == pytest.approx(1 / math.sqrt(4 * math.pi))
    code, _, err = run(capsys, "greens-eval", "--x", "0", "--xp", "0", "--t", "0")
    assert code == 2 and "singular" in err


def test_verify_roundtrip_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "roundtrip")
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert lines and all(rec["pass"] for rec in lines)


def test_factorize_mixed_state_exits_1(tmp_path, capsys):
    grid = UniformGrid1D(-8, 8, 161)
    a, b = hermite_state(0, grid).density(), hermite_state(1, grid).density()
    path = tmp_path / "mix.txt"
    write_field(path, DensityMatrixField(grid, 0.5 * (a.values + b.values)))
    code, out, err = run(capsys, "factorize", "--in", str(path), "--out", str(tmp_path / "psi.txt"))
    assert code == 1
    assert "not factorizable" in err
    assert out == ""


def test_malformed_file_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("# kind=density_matrix\n# t=0\n1,2\n")
    code, _, err = run(capsys, "rho2f", "--in", str(path), "--out", str(tmp_path / "f.txt"))
    assert code == 2 and err


def test_missing_file_exits_1(tmp_path, capsys):
    code, _, err = run(capsys, "rho2f", "--in", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "f.txt"))
    assert code == 1 and "I/O" in err


def test_wrong_kind_exits_2(tmp_path, capsys):
    f = tmp_path / "f.txt"
    run(capsys, "evolve", "--grid=-6,6,41,-8,8,41", "--out", str(f))
    code, _, err = run(capsys, "factorize", "--in", str(f), "--out", str(tmp_path / "psi.txt"))
    assert code == 2 and "expected" in err


def test_full_chain_is_exact_on_aligned_grids(tmp_path, capsys):
    f, rho, psi, psi_t, f_t = (tmp_path / n for n in ("f", "rho", "psi", "psit", "ft"))
    assert run(capsys, "evolve", "--grid=-10,10,401,-8,8,161", "--out", str(f))[0] == 0
    assert run(capsys, "f2rho", "--in", str(f), "--xgrid=-10,10,201", "--out", str(rho))[0] == 0
    code, out, _ = run(capsys, "factorize", "--in", str(rho), "--out", str(psi))
    assert code == 0 and json.loads(out)["norm"] == pytest.approx(1.0, abs=1e-9)
    code, out, _ = run(capsys, "propagate", "--in", str(psi), "--t", "1", "--out", str(psi_t))
    assert code == 0 and json.loads(out)["t"] == 1.0
    code, out, _ = run(capsys, "rho2f", "--in", str(rho), "--pgrid=-8,8,161", "--out", str(f_t))
    rec = json.loads(out)
    assert code == 0 and rec["integral"] == pytest.approx(1.0, abs=1e-9)


def test_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    out_a = run(capsys, "evolve", "--t", "0.5", "--grid=-5,5,41,-5,5,41", "--out", str(a))[1]
    out_b = run(capsys, "evolve", "--t", "0.5", "--grid=-5,5,41,-5,5,41", "--out", str(b))[1]
    assert out_a == out_b
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "liouspace", "phase", "--t", "0"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert float(proc.stdout) == 0.0


def _cli(level, *argv):
    env = {**os.environ, "LIOUSPACE_LOG": level}
    return subprocess.run([sys.executable, "-m", "liouspace", *argv], capture_output=True, text=True, env=env)


def test_log_level_env(tmp_path):
    f, rho = tmp_path / "f.txt", tmp_path / "rho.txt"
    quiet = _cli("error", "evolve", "--grid=-6,6,41,-8,8,41", "--out", str(f))
    assert quiet.returncode == 0 and quiet.stderr == ""
    # 41 q-points are not the 31-point x-grid refined by two, so f2rho logs a note
    chatty = _cli("info", "f2rho", "--in", str(f), "--xgrid=-6,6,31", "--out", str(rho))
    assert chatty.returncode == 0
    assert "interpolated" in chatty.stderr
    assert np.isfinite(json.loads(chatty.stdout)["trace"])
