"""Regenerate the frozen benchmark extracts bundled under data/.

The CSVs checked into data/ are small (1000-row) draws from the
simulators in tests/benchdata.py: a train extract and a disjoint
holdout for each benchmark, plus the schema files the CLI consumes.
Run from the repository root:

    python3 scripts/make_benchmark_samples.py

Output is byte-stable: fixed seeds, fixed row counts, %.17g floats.
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import benchdata  # noqa: E402

from ffpdg.data import save_csv, save_schema  # noqa: E402


def main():
    out = ROOT / "data"
    out.mkdir(exist_ok=True)
    n, s_tr, s_te = benchdata.SAMPLE_ROWS, benchdata.SAMPLE_SEED, benchdata.HOLDOUT_SEED

    save_schema(benchdata.ADULT_SCHEMA, out / "adult.schema")
    save_csv(benchdata.make_adult(n, s_tr), out / "adult_sample.csv")
    save_csv(benchdata.make_adult(n, s_te), out / "adult_holdout.csv")

    save_schema(benchdata.COMPAS_SCHEMA, out / "compas.schema")
    save_csv(benchdata.make_compas(n, s_tr), out / "compas_sample.csv")
    save_csv(benchdata.make_compas(n, s_te), out / "compas_holdout.csv")

    for p in sorted(out.iterdir()):
        print(f"wrote {p.relative_to(ROOT)} ({p.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
