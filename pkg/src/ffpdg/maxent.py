"""Maximum-entropy re-distribution of binary codes under parity constraints.

The fitted distribution has the form p(x) proportional to q(x) *
exp(<lambda, phi(x)>) where q is a smoothed empirical prior over the
observed codes and phi(x) stacks the m bits of x with the single product
term x_protected * x_label. Matching the bit means preserves every
marginal (including the protected-group representation rate) while the
product-term target moves both group-conditional positive rates to the
overall positive rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, FeasibilityError


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probabilities over a support of distinct binary codes."""

    support: np.ndarray  # (k, m) uint8
    probs: np.ndarray    # (k,) nonnegative, sums to 1

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.uint8)
        probs = np.asarray(self.probs, dtype=np.float64)
        if support.ndim != 2 or len(support) != len(probs):
            raise DataError("support and probs must align")
        if np.any(probs < 0):
            raise DataError("negative probability")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise DataError(f"probabilities sum to {probs.sum()!r}, not 1")
        if len(np.unique(support, axis=0)) != len(support):
            raise DataError("support codes must be unique")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


@dataclass(frozen=True)
class ParityConstraints:
    """Bit-mean targets plus the protected*label product target."""

    theta: np.ndarray
    joint_target: float
    protected_bit: int
    label_bit: int

    @property
    def targets(self) -> np.ndarray:
        return np.append(self.theta, self.joint_target)


@dataclass(frozen=True)
class MaxEntSolution:
    lam: np.ndarray                  # dual variables, one per constraint
    theta: np.ndarray                # bit-mean targets
    distribution: DiscreteDistribution
    residual: float                  # max |E_p[phi] - target| at termination
    iterations: int
    converged: bool
    objective_trace: np.ndarray      # dual objective after each accepted step


def empirical_prior(binary: np.ndarray, smooth: float = 0.1) -> DiscreteDistribution:
    """Smoothed relative frequencies over the observed distinct codes.

    q(x) = (count(x) + smooth) / (n + smooth * #distinct).
    """
    binary = np.asarray(binary, dtype=np.uint8)
    if binary.ndim != 2 or len(binary) < 1:
        raise DataError("binary data must be a nonempty 2-d array")
    if smooth < 0:
        raise DataError("smooth must be >= 0")
    support, counts = np.unique(binary, axis=0, return_counts=True)
    probs = (counts + smooth) / (len(binary) + smooth * len(support))
    return DiscreteDistribution(support, probs / probs.sum())


def group_rates(binary: np.ndarray, protected_bit: int, label_bit: int) -> tuple[float, float]:
    """(P(Y=1 | C=0), P(Y=1 | C=1)) of a binary dataset."""
    binary = np.asarray(binary)
    c = binary[:, protected_bit]
    y = binary[:, label_bit]
    if not (np.any(c == 0) and np.any(c == 1)):
        raise DataError("both protected groups must be present")
    return float(y[c == 0].mean()), float(y[c == 1].mean())


def fair_marginals(binary: np.ndarray, protected_bit: int, label_bit: int,
                   rate: float = 1.0) -> ParityConstraints:
    """Constraint targets that preserve every bit mean and enforce parity.

    With rate=1 (exact parity) both group-conditional positive rates are
    pinned to the overall positive rate r, which fixes E[Y*C] = r * P(C=1).
    A relaxed rate tau < 1 leaves the data unchanged when min/max of the
    two group rates already reaches tau, and otherwise shrinks the gap
    just enough, preserving the overall positive rate.
    """
    binary = np.asarray(binary, dtype=np.uint8)
    if protected_bit == label_bit:
        raise DataError("protected and label bits must differ")
    if not 0.0 < rate <= 1.0:
        raise DataError("rate must be in (0, 1]")
    theta = binary.mean(axis=0)
    r0, r1 = group_rates(binary, protected_bit, label_bit)
    c = float(theta[protected_bit])
    r = float(theta[label_bit])
    lo, hi = min(r0, r1), max(r0, r1)
    if hi == 0.0 or (hi > 0 and lo / hi >= rate):
        joint = float((binary[:, protected_bit] * binary[:, label_bit]).mean())
    else:
        # target rates t0 (group C=0) and t1 (group C=1) with
        # min/max ratio = rate and (1-c) t0 + c t1 = r
        if r1 >= r0:
            t1 = r / ((1 - c) * rate + c)
            t0 = rate * t1
        else:
            t0 = r / ((1 - c) + c * rate)
            t1 = rate * t0
        joint = c * t1
    return ParityConstraints(theta=theta, joint_target=joint,
                             protected_bit=protected_bit, label_bit=label_bit)


def feature_matrix(support: np.ndarray, constraints: ParityConstraints) -> np.ndarray:
    """phi(x) for each support code: the m bits plus the C*Y product."""
    support = np.asarray(support, dtype=np.float64)
    product = support[:, constraints.protected_bit] * support[:, constraints.label_bit]
    return np.hstack([support, product[:, None]])


def _dual_value(lam, log_q, features, targets):
    z = log_q + features @ lam
    zmax = z.max()
    return float(zmax + np.log(np.exp(z - zmax).sum()) - lam @ targets)


def _dual_probs(lam, log_q, features):
    z = log_q + features @ lam
    z -= z.max()
    p = np.exp(z)
    return p / p.sum()


def solve_maxent(prior: DiscreteDistribution, constraints: ParityConstraints,
                 tol: float = 1e-6, max_iter: int = 10000) -> MaxEntSolution:
    """Minimize the dual log Z(lambda) - <lambda, targets> by gradient descent.

    Backtracking line search (Armijo, shrink factor 0.5 from step 1.0);
    the gradient is E_p[phi] - targets, so its max-norm at termination is
    exactly the constraint residual. Raises FeasibilityError when a target
    falls outside the support's reachable box, ConvergenceError (carrying
    the partial solution) when max_iter is hit first.
    """
    if len(prior.support) == 0:
        raise DataError("empty support")
    features = feature_matrix(prior.support, constraints)
    targets = constraints.targets
    fmin, fmax = features.min(axis=0), features.max(axis=0)
    slack = 1e-12
    bad = np.flatnonzero((targets < fmin - slack) | (targets > fmax + slack))
    if len(bad):
        j = int(bad[0])
        raise FeasibilityError(
            f"target {targets[j]:.6g} for constraint {j} outside support range "
            f"[{fmin[j]:.6g}, {fmax[j]:.6g}]"
        )

    log_q = np.log(prior.probs)
    lam = np.zeros(features.shape[1])
    value = _dual_value(lam, log_q, features, targets)
    trace = [value]
    iterations = 0
    converged = False
    grad = features.T @ _dual_probs(lam, log_q, features) - targets
    while iterations < max_iter:
        if np.abs(grad).max() <= tol:
            converged = True
            break
        step = 1.0
        gnorm2 = float(grad @ grad)
        while True:
            candidate = lam - step * grad
            cand_value = _dual_value(candidate, log_q, features, targets)
            if cand_value <= value - 1e-4 * step * gnorm2:
                break
            step *= 0.5
            if step < 1e-20:
                candidate = None  # descent direction numerically exhausted
                break
        if candidate is None:
            break
        lam, value = candidate, cand_value
        trace.append(value)
        grad = features.T @ _dual_probs(lam, log_q, features) - targets
        iterations += 1

    probs = _dual_probs(lam, log_q, features)
    residual = float(np.abs(features.T @ probs - targets).max())
    converged = converged or residual <= tol
    solution = MaxEntSolution(
        lam=lam,
        theta=np.asarray(constraints.theta, dtype=np.float64),
        distribution=DiscreteDistribution(prior.support, probs),
        residual=residual,
        iterations=iterations,
        converged=converged,
        objective_trace=np.asarray(trace),
    )
    if not converged:
        raise ConvergenceError(
            f"max-entropy dual not converged after {iterations} iterations "
            f"(residual {residual:.3g} > tol {tol:.3g})",
            solution=solution,
        )
    return solution


def sample_codes(distribution: DiscreteDistribution, k: int, seed: int) -> np.ndarray:
    """k codes with cell counts allocated by largest remainder, then shuffled.

    Deterministic counts reproduce the distribution up to 1/k per cell;
    i.i.d. draws would stack binomial noise on top of the solved
    re-weighting and every downstream stage would inherit it.
    """
    if k < 1:
        raise DataError("k must be >= 1")
    rng = np.random.default_rng(seed)
    share = distribution.probs * k
    counts = np.floor(share).astype(np.int64)
    short = k - int(counts.sum())
    if short > 0:
        order = np.argsort(-(share - counts), kind="stable")
        counts[order[:short]] += 1
    idx = np.repeat(np.arange(len(counts)), counts)
    rng.shuffle(idx)
    return distribution.support[idx].copy()
