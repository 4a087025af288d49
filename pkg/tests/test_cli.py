"""End-to-end CLI runs through subprocess."""

import subprocess
import sys

import pytest

from conftest import binary_group_dataset
from ffpdg.audit import FORMAT_LINE
from ffpdg.data import load_csv, save_csv, save_schema


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "ffpdg.cli", *map(str, args)],
        capture_output=True, text=True, timeout=120,
    )


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    train = binary_group_dataset(2500, 0.25, 0.6, seed=30, n_features=3)
    holdout = binary_group_dataset(600, 0.25, 0.6, seed=31, n_features=3)
    save_schema(train.schema, root / "data.schema")
    save_csv(train, root / "train.csv")
    save_csv(holdout, root / "holdout.csv")
    return root


def test_generate_writes_csv_and_audit(workdir):
    out = workdir / "syn.csv"
    audit = workdir / "run.audit"
    proc = run_cli("generate", "--schema", workdir / "data.schema",
                   "--input", workdir / "train.csv", "--output", out,
                   "--audit", audit, "--epsilon", "2", "--seed", "3",
                   "--n-out", "500")
    assert proc.returncode == 0, proc.stderr
    assert "generate_seconds=" in proc.stdout
    assert "rows=500" in proc.stdout
    syn = load_csv(out, load_schema_for(workdir))
    assert syn.n == 500
    assert audit.read_text().splitlines()[0] == FORMAT_LINE


def load_schema_for(workdir):
    from ffpdg.data import load_schema
    return load_schema(workdir / "data.schema")


def test_generate_deterministic_bytes(workdir):
    a, b = workdir / "a.csv", workdir / "b.csv"
    for out in (a, b):
        proc = run_cli("generate", "--schema", workdir / "data.schema",
                       "--input", workdir / "train.csv", "--output", out,
                       "--seed", "7", "--n-out", "300")
        assert proc.returncode == 0, proc.stderr
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_prints_report_and_kv(workdir):
    syn = workdir / "for_eval.csv"
    assert run_cli("generate", "--schema", workdir / "data.schema",
                   "--input", workdir / "train.csv", "--output", syn,
                   "--seed", "5", "--n-out", "600").returncode == 0
    proc = run_cli("evaluate", "--schema", workdir / "data.schema",
                   "--input", workdir / "train.csv", "--test", workdir / "holdout.csv",
                   "--synthetic", syn, "--seed", "1")
    assert proc.returncode == 0, proc.stderr
    for key in ("aucroc_best=", "deo=", "dsp=", "di_ratio=", "lrd="):
        assert key in proc.stdout
    assert "AUCROC best" in proc.stdout


def test_bench_reports_growth_exponent(workdir):
    proc = run_cli("bench", "--schema", workdir / "data.schema",
                   "--input", workdir / "train.csv", "--max-n", "2000",
                   "--seed", "2")
    assert proc.returncode == 0, proc.stderr
    assert "n=1000 " in proc.stdout and "n=2000 " in proc.stdout
    assert "growth_exponent_ok=" in proc.stdout


def test_inspect_prints_sections(workdir):
    audit = workdir / "run.audit"
    if not audit.exists():  # ordering safety if run alone
        run_cli("generate", "--schema", workdir / "data.schema",
                "--input", workdir / "train.csv", "--output", workdir / "tmp.csv",
                "--audit", audit, "--seed", "3", "--n-out", "200")
    proc = run_cli("inspect", "--audit", audit)
    assert proc.returncode == 0, proc.stderr
    for line in ("[config]", "[privacy]", "dp_reported=eps_mu+eps_sigma="):
        assert line in proc.stdout
    assert "projection_orthonormality_defect=" in proc.stdout


def test_usage_errors_exit_2(workdir):
    assert run_cli().returncode == 2
    proc = run_cli("generate", "--schema", workdir / "data.schema")
    assert proc.returncode == 2
    assert "--input" in proc.stderr or "required" in proc.stderr


def test_missing_input_exits_1_and_names_path(workdir):
    proc = run_cli("generate", "--schema", workdir / "data.schema",
                   "--input", workdir / "nope.csv", "--output", workdir / "x.csv")
    assert proc.returncode == 1
    assert "nope.csv" in proc.stderr
