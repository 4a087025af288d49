"""Download the UCI Adult census data and project it onto our schema.

Writes data/adult_full.csv (~32k rows) in the five-column layout from
data/adult.schema: age, education_years, race_white, sex_male, income.
Rows with missing fields ('?') are dropped.

Needs network access to archive.ics.uci.edu. The bundled
data/adult_sample.csv / adult_holdout.csv extracts are simulator draws
(tests/benchdata.py) calibrated to this dataset, for offline use; rerun
this script to evaluate against the real rows instead.

    python3 scripts/fetch_adult.py [--url URL]
"""

import argparse
import csv
import io
import pathlib
import sys
import urllib.request

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from benchdata import ADULT_SCHEMA  # noqa: E402

from ffpdg.data import Dataset, save_csv  # noqa: E402

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data"

# adult.data is headerless; positions per the dataset's names file
COL_AGE, COL_EDU_NUM, COL_RACE, COL_SEX, COL_INCOME = 0, 4, 8, 9, 14


def parse(raw: str) -> Dataset:
    rows = []
    for rec in csv.reader(io.StringIO(raw), skipinitialspace=True):
        if len(rec) < 15 or "?" in rec:
            continue
        rows.append([
            float(rec[COL_AGE]),
            float(rec[COL_EDU_NUM]),
            1.0 if rec[COL_RACE] == "White" else 0.0,
            1.0 if rec[COL_SEX] == "Male" else 0.0,
            1.0 if rec[COL_INCOME].rstrip(".") == ">50K" else 0.0,
        ])
    return Dataset(ADULT_SCHEMA, np.asarray(rows, dtype=float))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--url", default=URL)
    ap.add_argument("--out", default=str(ROOT / "data" / "adult_full.csv"))
    args = ap.parse_args()

    print(f"fetching {args.url} ...")
    with urllib.request.urlopen(args.url, timeout=60) as resp:
        raw = resp.read().decode("utf-8", errors="replace")
    ds = parse(raw)
    save_csv(ds, args.out)
    rate = ds.values[:, ADULT_SCHEMA.index_of("income")].mean()
    print(f"wrote {args.out}: {ds.values.shape[0]} rows, P(income=1)={rate:.3f}")


if __name__ == "__main__":
    main()
