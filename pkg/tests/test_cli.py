import csv
import io
import json
import subprocess
import sys

import pytest

from boolcube import cli
from boolcube.errors import ParseError


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def read_scan(text):
    lines = text.splitlines()
    assert lines[0].startswith("# boolcube scan schema=1")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_parse_grid_inclusive_stop():
    assert cli.parse_grid("0.05:0.95:0.05") == [round(0.05 * k, 12) for k in range(1, 20)]
    assert cli.parse_grid("0.1:0.9:0.1")[-1] == 0.9
    assert cli.parse_grid("0.25,0.5,0.9") == [0.25, 0.5, 0.9]
    assert cli.parse_grid("0:rmax:0.25", names={"rmax": 0.5}) == [0.0, 0.25, 0.5]
    for bad in ("0.5:0.1:0.1", "0:1", "a,b", "0.5,0.2"):
        with pytest.raises(ParseError):
            cli.parse_grid(bad)


def test_fourier_examples(capsys):
    code, out, _ = run(capsys, "fourier", "n=2:a")
    assert code == 0 and "S={1}: 1" in out and "a = 1/2" in out
    _, out, _ = run(capsys, "fourier", "n=2:0")
    assert "S=∅: 1" in out and "a = 1 " in out
    _, out, _ = run(capsys, "fourier", "n=2:6")
    assert "S={1,2}: 1" in out


def test_fourier_parse_error_is_usage(capsys):
    code, _, err = run(capsys, "fourier", "n=2:q")
    assert code == cli.EXIT_USAGE and "position" in err


def test_mi_dictator_and_xor(capsys):
    code, out, _ = run(capsys, "mi", "n=2:a", "n=2:a", "--rho", "0.5", "--json")
    assert code == 0 and abs(json.loads(out)["gap"]) <= 1e-12
    code, out, _ = run(capsys, "mi", "n=2:6", "n=2:6", "--rho", "0.5")
    assert "I(f;g) = 0.045565997075" in out and "gap = 0.143155878466" in out
    code, out, _ = run(capsys, "mi", "n=2:6", "n=2:6", "--rho", "0.5", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["mi"] == pytest.approx(0.045566, abs=1e-6)
    assert data["gap"] == pytest.approx(0.143156, abs=1e-6)


def test_mi_rejects_bad_rho(capsys):
    code, _, _ = run(capsys, "mi", "n=2:6", "n=2:6", "--rho", "1.5")
    assert code == cli.EXIT_USAGE


def test_mi_dimension_mismatch(capsys):
    code, _, _ = run(capsys, "mi", "n=2:6", "n=3:06", "--rho", "0.5")
    assert code == cli.EXIT_USAGE


def test_verify_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--n", "2", "--mode", "exhaustive", "--rho-grid", "0.1:0.9:0.1")
    assert code == 0 and out.startswith("PASS")
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--n", "3", "--mode", "exhaustive", "--rho-grid", "0.5",
                       "--out", str(report))
    assert code == 0 and "pairs=65536" in out
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["pairs_scanned"] == 65536 and data["passed"]
    assert b"\r\n" not in report.read_bytes()


def test_verify_too_large_is_usage(capsys):
    code, _, err = run(capsys, "verify", "--n", "9", "--mode", "exhaustive")
    assert code == cli.EXIT_USAGE and "n <= 3" in err


def test_verify_bad_mode_is_usage(capsys):
    code, _, _ = run(capsys, "verify", "--n", "2", "--mode", "bogus")
    assert code == cli.EXIT_USAGE


def test_verify_non_dictator_maximizer_exit_code(capsys):
    code, _, err = run(capsys, "verify", "--n", "2", "--rho-grid", "0.5", "--maximizer-tol", "0.2")
    assert code == cli.EXIT_INTERNAL and "not dictator pairs" in err


def test_conjecture(capsys):
    code, out, _ = run(capsys, "conjecture", "--n", "3", "--rho-grid", "0.5", "--all")
    assert code == 0 and out.startswith("PASS pairs=256")


def test_lemma1_small_grid(capsys, tmp_path):
    out_json, out_csv = tmp_path / "l.json", tmp_path / "l.csv"
    code, out, _ = run(capsys, "lemma1", "--grid", "10x10x5", "--out", str(out_json), "--csv", str(out_csv))
    assert code == 0 and out.startswith("PASS")
    data = json.loads(out_json.read_text())
    assert data["violations"] == 0 and data["min_phi"] > 0
    rows = read_scan(out_csv.read_text())
    assert len(rows) == data["evaluations"]


def test_scan_gamma(capsys):
    code, out, _ = run(capsys, "scan", "--what", "gamma", "--range", "0.01:0.99:0.01")
    rows = read_scan(out)
    assert code == 0 and len(rows) == 99
    assert all(float(r["gamma"]) > 0 for r in rows)
    signs = [float(r["gamma_prime"]) > 0 for r in rows]
    flips = [k for k in range(1, len(signs)) if signs[k] != signs[k - 1]]
    assert len(flips) == 1
    assert float(rows[flips[0] - 1]["x"]) <= 2 / 3 <= float(rows[flips[0]]["x"])


def test_scan_phi_second_derivative_single_sign_change(capsys):
    code, out, _ = run(capsys, "scan", "--what", "phi", "--alpha", "0.3", "--beta", "0.6", "--rho", "0:rmax:0.01")
    rows = read_scan(out)
    assert code == 0
    second = [float(r["phi_second"]) for r in rows if r["phi_second"]]
    signs = [v > 0 for v in second]
    assert sum(signs[k] != signs[k - 1] for k in range(1, len(signs))) == 1
    assert all(float(r["phi"]) >= 0 for r in rows)


def test_scan_psi(capsys):
    code, out, _ = run(capsys, "scan", "--what", "psi", "--c", "0.5", "--range", "0.2,0.5")
    rows = read_scan(out)
    assert code == 0 and len(rows) == 2
    assert all(abs(float(r["psi_prime"])) < 1e-12 for r in rows)


def test_scan_phi_needs_biases(capsys):
    code, _, _ = run(capsys, "scan", "--what", "phi")
    assert code == cli.EXIT_USAGE


def test_sample_is_deterministic(capsys):
    args = ("sample", "n=3:0f", "n=3:0f", "--rho", "0.5", "--samples", "100000", "--seed", "3")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--workers", "2")
    assert first == second
    data = json.loads(first)
    assert all(abs(z) < 5 for z in data["z"].values())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "boolcube", "fourier", "n=1:2"],
                          capture_output=True, check=False)
    assert proc.returncode == 0
    assert "S={1}: 1".encode("utf-8") in proc.stdout


def test_workers_env_default(monkeypatch):
    monkeypatch.setenv("BOOLCUBE_WORKERS", "3")
    args = cli.build_parser().parse_args(["verify", "--n", "2"])
    assert args.workers == 3
