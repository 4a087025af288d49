"""Download the ProPublica COMPAS two-year recidivism data and project it
onto our schema.

Writes data/compas_full.csv (~6k rows) in the six-column layout from
data/compas.schema: age, priors_count, charge_felony, sex_male,
race_minority, two_year_recid. Applies the usual filters: screening
within 30 days of arrest, ordinary felony/misdemeanor charges only,
recidivism flag present.

Needs network access to raw.githubusercontent.com. The bundled
data/compas_sample.csv / compas_holdout.csv extracts are simulator draws
(tests/benchdata.py) calibrated to this dataset, for offline use; rerun
this script to evaluate against the real rows instead.

    python3 scripts/fetch_compas.py [--url URL]
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

from benchdata import COMPAS_SCHEMA  # noqa: E402

from ffpdg.data import Dataset, save_csv  # noqa: E402

URL = ("https://raw.githubusercontent.com/propublica/compas-analysis/"
       "master/compas-scores-two-years.csv")


def keep(rec: dict) -> bool:
    try:
        days = float(rec["days_b_screening_arrest"])
    except (ValueError, KeyError):
        return False
    return (-30 <= days <= 30
            and rec.get("is_recid") != "-1"
            and rec.get("c_charge_degree") in ("F", "M")
            and rec.get("score_text") != "N/A")


def parse(raw: str) -> Dataset:
    rows = []
    for rec in csv.DictReader(io.StringIO(raw)):
        if not keep(rec):
            continue
        rows.append([
            float(rec["age"]),
            float(rec["priors_count"]),
            1.0 if rec["c_charge_degree"] == "F" else 0.0,
            1.0 if rec["sex"] == "Male" else 0.0,
            0.0 if rec["race"] == "Caucasian" else 1.0,
            float(rec["two_year_recid"]),
        ])
    return Dataset(COMPAS_SCHEMA, np.asarray(rows, dtype=float))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--url", default=URL)
    ap.add_argument("--out", default=str(ROOT / "data" / "compas_full.csv"))
    args = ap.parse_args()

    print(f"fetching {args.url} ...")
    with urllib.request.urlopen(args.url, timeout=60) as resp:
        raw = resp.read().decode("utf-8", errors="replace")
    ds = parse(raw)
    save_csv(ds, args.out)
    i_r = COMPAS_SCHEMA.index_of("race_minority")
    i_y = COMPAS_SCHEMA.index_of("two_year_recid")
    r, y = ds.values[:, i_r], ds.values[:, i_y]
    print(f"wrote {args.out}: {ds.values.shape[0]} rows, "
          f"P(recid|minority)={y[r == 1].mean():.3f}, P(recid|other)={y[r == 0].mean():.3f}")


if __name__ == "__main__":
    main()
