"""Command-line surface: generate, evaluate, bench, inspect.

Exit codes: 0 success, 1 runtime or domain error, 2 usage error.
Every command is deterministic given --seed. FFPDG_THREADS caps the
evaluation stage's internal parallelism (default 1).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import audit as audit_mod
from . import metrics, rongauss
from .data import Dataset, load_csv, load_schema, save_csv
from .dp import PrivacyBudget
from .errors import FfpdgError


@dataclass(frozen=True)
class RunConfig:
    """Parsed command line with every knob and its default."""

    command: str
    input: str | None = None
    schema: str | None = None
    output: str | None = None
    test: str | None = None
    synthetic: str | None = None
    audit: str | None = None
    report: str | None = None
    epsilon: float = 1.0
    epsilon_split: str = "0.3:0.7"
    p: int | None = None
    n_out: int | None = None
    bins: int = 1
    mode: str = "auto"
    seed: int = 0
    folds: int = 5
    rate: float = 1.0
    quantiles: int = rongauss.DEFAULT_QUANTILE_POINTS
    max_n: int | None = None

    def budget(self) -> PrivacyBudget:
        try:
            mu_part, sigma_part = (float(t) for t in self.epsilon_split.split(":"))
        except ValueError:
            raise FfpdgError(f"bad --epsilon-split {self.epsilon_split!r}, expected MU:SIGMA") from None
        total = mu_part + sigma_part
        if total <= 0 or mu_part <= 0 or sigma_part <= 0:
            raise FfpdgError("--epsilon-split parts must be positive")
        return PrivacyBudget.from_total(self.epsilon, mu_fraction=mu_part / total)

    def generation_config(self) -> rongauss.GenerationConfig:
        return rongauss.GenerationConfig(
            budget=self.budget(), p=self.p, n_out=self.n_out, mode=self.mode,
            seed=self.seed, bins=self.bins, rate=self.rate,
            quantile_points=self.quantiles,
        )


def _load(config: RunConfig, path: str) -> Dataset:
    if config.schema is None:
        raise FfpdgError("--schema is required")
    schema = load_schema(config.schema)
    return load_csv(path, schema)


def cmd_generate(config: RunConfig) -> int:
    dataset = _load(config, config.input)
    gen_config = config.generation_config()
    start = time.perf_counter()
    result = rongauss.generate_with_artifacts(dataset, config=gen_config)
    seconds = time.perf_counter() - start
    save_csv(result.dataset, config.output)
    if config.audit:
        audit_mod.write_audit(config.audit, result, gen_config, seconds)
    print(f"generate_seconds={seconds:.3f}")
    print(f"rows={result.dataset.n} output={config.output}")
    return 0


def cmd_evaluate(config: RunConfig) -> int:
    real_train = _load(config, config.input)
    real_test = _load(config, config.test)
    synthetic = _load(config, config.synthetic)
    report = metrics.evaluate(real_train, real_test, synthetic,
                              seed=config.seed, folds=config.folds)
    text = report.to_text() + "\n\n" + report.to_kv() + "\n"
    sys.stdout.write(text)
    if config.report:
        with open(config.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def bench_sizes(n: int, max_n: int | None = None) -> list[int]:
    """Subsample ladder 1000, 2000, 4000, ... capped at the data size."""
    top = min(n, max_n) if max_n else n
    if top < 1000:
        return [top]
    sizes = []
    k = 1000
    while k <= top:
        sizes.append(k)
        k *= 2
    return sizes


def fit_growth_exponent(sizes, seconds) -> float:
    """Slope of log time against log size."""
    logs = np.log(np.asarray(sizes, dtype=float))
    logt = np.log(np.maximum(np.asarray(seconds, dtype=float), 1e-6))
    slope, _ = np.polyfit(logs, logt, 1)
    return float(slope)


def cmd_bench(config: RunConfig) -> int:
    dataset = _load(config, config.input)
    gen_config = config.generation_config()
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(dataset.n)
    sizes = bench_sizes(dataset.n, config.max_n)
    times = []
    for size in sizes:
        subset = dataset.take(order[:size])
        start = time.perf_counter()
        rongauss.generate(subset, config=gen_config)
        elapsed = time.perf_counter() - start
        times.append(elapsed)
        print(f"n={size} seconds={elapsed:.3f}")
    if len(sizes) >= 2:
        exponent = fit_growth_exponent(sizes, times)
        print(f"growth_exponent={exponent:.3f}")
        print(f"growth_exponent_ok={int(exponent <= 2.5)}")
    else:
        print("growth_exponent=nan")
        print("growth_exponent_ok=1")
    return 0


def cmd_inspect(config: RunConfig) -> int:
    parsed = audit_mod.read_audit(config.audit)
    sections = parsed["sections"]
    for name in ("config", "codebook", "maxent", "rates", "privacy"):
        print(f"[{name}]")
        for line in sections[name]:
            if line:
                print(line)
        print()
    if parsed["model"] is not None:
        model = parsed["model"]
        print("[model]")
        print(f"mode={model.mode} d_eff={model.d_eff} p={model.projection.p} "
              f"classes={len(model.class_values) or '-'}")
        defect = model.projection.orthonormality_defect()
        print(f"projection_orthonormality_defect={defect:.3e}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "inspect": cmd_inspect,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffpdg",
        description="Fair differentially private synthetic tabular data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--schema", required=True, help="schema text file")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")

    g = sub.add_parser("generate", help="synthesize a fair private dataset")
    add_common(g)
    g.add_argument("--input", required=True, help="real training CSV")
    g.add_argument("--output", required=True, help="synthetic CSV destination")
    g.add_argument("--audit", help="write the audit file here")
    g.add_argument("--epsilon", type=float, default=1.0, help="privacy budget (default 1)")
    g.add_argument("--epsilon-split", default="0.3:0.7",
                   help="mean:covariance budget split (default 0.3:0.7)")
    g.add_argument("--p", type=int, default=None, help="projected dimension (default min(d_eff-1, 8))")
    g.add_argument("--n-out", type=int, default=None, help="synthetic rows (default: input size)")
    g.add_argument("--bins", type=int, default=1, help="bits per continuous column (default 1)")
    g.add_argument("--mode", default="auto",
                   choices=["auto", "unsupervised", "classification", "regression"])
    g.add_argument("--rate", type=float, default=1.0,
                   help="statistical-rate target, 1 = exact parity (default 1)")
    g.add_argument("--quantiles", type=int, default=rongauss.DEFAULT_QUANTILE_POINTS,
                   help="stored training quantiles per continuous column (default 257)")

    e = sub.add_parser("evaluate", help="score synthetic against real data")
    add_common(e)
    e.add_argument("--input", required=True, help="real training CSV")
    e.add_argument("--test", required=True, help="real held-out CSV")
    e.add_argument("--synthetic", required=True, help="synthetic CSV")
    e.add_argument("--folds", type=int, default=5, help="discriminator CV folds (default 5)")
    e.add_argument("--report", help="also write the report here")

    b = sub.add_parser("bench", help="time generation over a size ladder")
    add_common(b)
    b.add_argument("--input", required=True, help="real training CSV")
    b.add_argument("--epsilon", type=float, default=1.0)
    b.add_argument("--epsilon-split", default="0.3:0.7")
    b.add_argument("--p", type=int, default=None)
    b.add_argument("--bins", type=int, default=1)
    b.add_argument("--mode", default="auto",
                   choices=["auto", "unsupervised", "classification", "regression"])
    b.add_argument("--max-n", type=int, default=None, help="cap the ladder at this size")

    i = sub.add_parser("inspect", help="print a generation audit")
    i.add_argument("--audit", required=True, help="audit file from generate")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {f: getattr(args, f) for f in RunConfig.__dataclass_fields__ if hasattr(args, f)}
    config = RunConfig(**fields)
    try:
        return COMMANDS[config.command](config)
    except FfpdgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
