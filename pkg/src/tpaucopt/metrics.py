"""Exact empirical ranking metrics: AUC, one-way and two-way partial AUC.

Conventions used throughout:

* a tied pair (score difference exactly 0) counts as a ranking error;
* hard positives are the lowest-scored positives, hard negatives the
  highest-scored negatives, with ties broken by ascending original index;
* hard-set sizes floor(n * fraction) are computed with a tiny relative
  epsilon so decimal fractions like 0.3 floor as intended.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ScorePair

__all__ = [
    "TpaucSpec",
    "HardSets",
    "hard_count",
    "empirical_auc",
    "select_hard_sets",
    "empirical_tpauc",
    "empirical_opauc",
    "find_inconsistency",
]


def hard_count(n: int, fraction: float) -> int:
    """floor(n * fraction), robust to binary rounding of the product."""
    x = n * fraction
    return int(np.floor(x + 1e-9 * max(1.0, abs(x))))


@dataclass(frozen=True)
class TpaucSpec:
    """Truncation fractions for the two-way partial AUC."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha!r}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta!r}")

    def n_pos_hard(self, n_pos: int) -> int:
        return hard_count(n_pos, self.alpha)

    def n_neg_hard(self, n_neg: int) -> int:
        return hard_count(n_neg, self.beta)


@dataclass(frozen=True)
class HardSets:
    """Indices and boundary thresholds of the hard positive/negative pools."""

    pos_hard: np.ndarray  # indices of the lowest-scored positives
    neg_hard: np.ndarray  # indices of the highest-scored negatives
    t_pos: float
    t_neg: float

    @property
    def n_pos_hard(self) -> int:
        return int(self.pos_hard.size)

    @property
    def n_neg_hard(self) -> int:
        return int(self.neg_hard.size)


def _pairwise_error_count(pos: np.ndarray, neg: np.ndarray) -> int:
    """Number of (positive, negative) pairs ranked wrongly, ties included."""
    diff = pos[:, None] - neg[None, :]
    return int(np.count_nonzero(diff <= 0.0))


def empirical_auc(scores: ScorePair) -> float:
    """Fraction of correctly ranked positive/negative pairs."""
    count = _pairwise_error_count(scores.pos_scores, scores.neg_scores)
    return 1.0 - count / (scores.n_pos * scores.n_neg)


def select_hard_sets(scores: ScorePair, spec: TpaucSpec) -> HardSets:
    """Pick the hard positives/negatives defined by the truncation spec."""
    k_pos = spec.n_pos_hard(scores.n_pos)
    k_neg = spec.n_neg_hard(scores.n_neg)
    if k_pos < 1:
        raise ValueError(f"alpha={spec.alpha} selects no hard positives")
    if k_neg < 1:
        raise ValueError(f"beta={spec.beta} selects no hard negatives")
    asc_pos = np.argsort(scores.pos_scores, kind="stable")
    desc_neg = np.argsort(-scores.neg_scores, kind="stable")
    pos_hard = asc_pos[:k_pos]
    neg_hard = desc_neg[:k_neg]
    return HardSets(
        pos_hard=pos_hard,
        neg_hard=neg_hard,
        t_pos=float(scores.pos_scores[pos_hard[-1]]),
        t_neg=float(scores.neg_scores[neg_hard[-1]]),
    )


def empirical_tpauc(scores: ScorePair, spec: TpaucSpec) -> float:
    """Pairwise ranking accuracy restricted to hard positives x hard negatives.

    Normalized by the hard-pair count so the value spans [0, 1].
    """
    hs = select_hard_sets(scores, spec)
    count = _pairwise_error_count(
        scores.pos_scores[hs.pos_hard], scores.neg_scores[hs.neg_hard]
    )
    return 1.0 - count / (hs.n_pos_hard * hs.n_neg_hard)


def empirical_opauc(scores: ScorePair, beta: float) -> float:
    """One-way partial AUC over the low-FPR range [0, beta].

    All positives against the top-scored floor(n_neg * beta) negatives,
    normalized by that pair count.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta!r}")
    k_neg = hard_count(scores.n_neg, beta)
    if k_neg < 1:
        raise ValueError(f"beta={beta} selects no negatives")
    desc_neg = np.argsort(-scores.neg_scores, kind="stable")[:k_neg]
    count = _pairwise_error_count(scores.pos_scores, scores.neg_scores[desc_neg])
    return 1.0 - count / (scores.n_pos * k_neg)


def find_inconsistency(
    seed: int,
    trials: int,
    n_pos: int = 50,
    n_neg: int = 50,
    alpha: float = 0.4,
    beta: float = 0.6,
):
    """Search for two scorers that the one-way and two-way metrics order
    oppositely.

    Draws random score pairs and returns the first (A, B) with
    OPAUC(A) < OPAUC(B) while TPAUC(A) > TPAUC(B), or None if no witness
    appears within ``trials`` attempts.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec = TpaucSpec(alpha, beta)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        a = ScorePair(rng.uniform(size=n_pos), rng.uniform(size=n_neg))
        b = ScorePair(rng.uniform(size=n_pos), rng.uniform(size=n_neg))
        if empirical_opauc(a, beta) < empirical_opauc(b, beta) and empirical_tpauc(
            a, spec
        ) > empirical_tpauc(b, spec):
            return a, b
    return None
