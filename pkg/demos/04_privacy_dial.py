"""Turn the privacy dial and measure what the noise costs.

Smaller epsilon means more Laplace noise in the released mean and
covariance. Utility (AUCROC of models trained on the synthetic rows,
scored on held-out real rows) degrades as the budget tightens, while the
discriminator score drifts away from the indistinguishable 0.5.
Medians over 5 seeds keep one lucky draw from telling the story.
"""

from pathlib import Path

import numpy as np

from ffpdg.data import load_csv, load_schema
from ffpdg.dp import PrivacyBudget
from ffpdg.metrics import evaluate
from ffpdg.rongauss import GenerationConfig, generate_with_artifacts

DATA = Path(__file__).resolve().parents[1] / "data"
SEEDS = range(5)

schema = load_schema(DATA / "adult.schema")
train = load_csv(DATA / "adult_sample.csv", schema)
holdout = load_csv(DATA / "adult_holdout.csv", schema)

print(f"{'epsilon':>8}  {'auc med':>7}  {'auc best':>8}  {'dsp med':>7}  {'lrd med':>7}")
for epsilon in (0.25, 0.5, 1.0, 2.0, 8.0, 1e6):
    aucs, dsps, lrds = [], [], []
    for seed in SEEDS:
        config = GenerationConfig(budget=PrivacyBudget.from_total(epsilon),
                                  seed=seed, bins=1)
        result = generate_with_artifacts(train, config=config)
        report = evaluate(train, holdout, result.dataset, seed=seed)
        aucs.append(report.aucroc_best)
        dsps.append(report.dsp)
        lrds.append(report.lrd)
    label = f"{epsilon:g}"
    print(f"{label:>8}  {np.median(aucs):>7.3f}  {max(aucs):>8.3f}  "
          f"{np.median(dsps):>7.3f}  {np.median(lrds):>7.3f}")

print("\nepsilon splits 30/70 between the mean and covariance releases; "
      "1e6 is effectively noise-free and shows the pipeline ceiling")
