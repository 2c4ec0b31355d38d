import io
import json
import math
import subprocess
import sys

import pytest

from fockbound import cli
from fockbound.extremal import best_interval
from fockbound.lemmas import check_lemma_1_3
from fockbound.reports import LemmaReport, SlackViolation
from fockbound.symbols import StepSymbol, save_symbol
from fockbound.toeplitz import RadialSymbol, norm_estimate


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    args = cli.build_parser().parse_args(list(argv))
    code = cli.run(cli.config_from_args(args), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def disk(tmp_path):
    path = tmp_path / "disk.json"
    save_symbol(StepSymbol.indicator(0.0, 1.0), path)
    return str(path)


@pytest.fixture
def annulus(tmp_path):
    path = tmp_path / "annulus.json"
    save_symbol(StepSymbol.indicator(1.0, 2.0), path)
    return str(path)


def test_verify_lemma_13(disk):
    code, out, _ = run_cli("verify-lemma", "--lemma", "1.3", "--symbol", disk)
    assert code == 0
    doc = json.loads(out)
    assert doc["witness_n"] == 0 and abs(doc["slack"]) <= 1e-12
    assert doc == check_lemma_1_3(StepSymbol.indicator(0, 1)).to_dict()


def test_verify_lemma_11_needs_order(disk):
    code, _, err = run_cli("verify-lemma", "--lemma", "1.1", "--symbol", disk)
    assert code == 2 and "--n" in err
    code, out, _ = run_cli("verify-lemma", "--lemma", "1.1", "--symbol", disk, "--n", "0", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "lemma_id,lhs,rhs,slack,witness_n,n_searched,truncation_bound"
    assert row.startswith("L1_1,")


def test_extremal():
    code, out, _ = run_cli("extremal", "--n", "5", "--length", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["a"] == pytest.approx(4.0665, abs=5e-4)
    assert doc["a"] == best_interval(5, 2.0).a


def test_norm_annulus(annulus):
    code, out, _ = run_cli("norm", "--radial", annulus)
    doc = json.loads(out)
    assert code == 0
    assert doc["norm_lb"] < doc["bound"]
    assert doc["bound"] == pytest.approx(1 - math.exp(-3 * math.pi), abs=1e-16)
    assert doc["strict"] is True
    assert doc["norm_lb"] == norm_estimate(RadialSymbol.annulus(1, 2)).norm_lb


def test_sweep_csv(disk):
    code, out, _ = run_cli("sweep", "--symbol", disk, "--n-max", "3")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,integral" and len(lines) == 5
    assert float(lines[1].split(",")[1]) == pytest.approx(1 - math.exp(-1), abs=1e-15)


def test_spectrum_csv(disk):
    code, out, _ = run_cli("spectrum", "--radial", disk)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "p,gamma" and lines[-1].startswith("# tail_bound=")
    assert "l1_plane=3.141592653589793" in lines[-1]


def test_qform_seeded_deterministic(annulus, tmp_path):
    a = run_cli("qform", "--radial", annulus, "--random", "50", "--seed", "4")
    b = run_cli("qform", "--radial", annulus, "--random", "50", "--seed", "4")
    c = run_cli("qform", "--radial", annulus, "--random", "50", "--seed", "5")
    assert a == b and a[1] != c[1]
    doc = json.loads(a[1])
    assert doc["quadratic_form"] <= doc["norm_lb"] + 1e-10 <= doc["bound"] + 2e-10

    coeffs = tmp_path / "c.csv"
    coeffs.write_text("p,re,im\n0,0.6,0.0\n1,0.0,0.8\n")
    code, out, _ = run_cli("qform", "--radial", annulus, "--coeffs", str(coeffs))
    assert code == 0 and json.loads(out)["size"] == 2


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("s,g\n0,1\n0.5, -1\n")
    code, out, err = run_cli("sweep", "--symbol", str(bad), "--n-max", "2")
    assert code == 2 and out == ""
    assert "line 3" in err and "out of [0, 1]" in err


def test_validation_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"type":"step","pieces":[{"a":0,"b":1,"eps":1.5}]}')
    code, _, err = run_cli("verify-lemma", "--lemma", "1.3", "--symbol", str(bad))
    assert code == 2 and "exceeds 1" in err


def test_slack_violation_exit_code(disk, monkeypatch):
    def broken(symbol, **kwargs):
        raise SlackViolation(LemmaReport("L1_3", 1.0, 0.5, -0.5, 0, 0, 0.0), {"n": 0})

    monkeypatch.setattr(cli, "check_lemma_1_3", broken)
    code, _, err = run_cli("verify-lemma", "--lemma", "1.3", "--symbol", disk)
    assert code == 3 and "slack" in err


def test_truncation_flagged(tmp_path):
    path = tmp_path / "far.json"
    save_symbol(StepSymbol.from_triples([(0, 1, 1.0), (1000, 1000.5, 0.01)]), path)
    code, out, _ = run_cli("verify-lemma", "--lemma", "1.3", "--symbol", str(path), "--truncate-quantile", "0.99")
    doc = json.loads(out)
    assert code == 0 and doc["truncated"] is True
    assert doc["discarded_mass"] == pytest.approx(0.005)
    assert doc["n_searched"] < 50


def test_thread_env(disk, monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "0")
    code, _, err = run_cli("norm", "--radial", disk)
    assert code == 2 and cli.THREADS_ENV in err
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert run_cli("norm", "--radial", disk)[0] == 0


def test_self_check():
    code, out, _ = run_cli("--self-check", "--seed", "2")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert {c["name"] for c in doc["checks"]} >= {"identity", "sharpness", "toeplitz_sharpness"}


def test_entry_point_byte_identical(annulus):
    cmd = [sys.executable, "-m", "fockbound", "spectrum", "--radial", annulus, "--p-max", "60"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first.startswith(b"p,gamma\n")


def test_entry_point_usage_error():
    proc = subprocess.run([sys.executable, "-m", "fockbound"], capture_output=True)
    assert proc.returncode == 2
