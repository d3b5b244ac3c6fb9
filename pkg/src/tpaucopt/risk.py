"""Pairwise surrogate risks and the soft-weighting upper-bound machinery.

Three empirical risks over (positive, negative) score pairs, all
normalized by the full pair count n_pos * n_neg:

* truncated risk: surrogate loss summed over hard positives x hard
  negatives only;
* zero-one truncated risk: same restriction with the 0-1 ranking loss;
* weighted risk: surrogate loss over all pairs, each weighted by
  psi(1 - f_pos) * psi(f_neg).

``check_sufficient_condition`` evaluates a computable certificate that the
weighted risk upper-bounds the truncated risk on a given sample: it scans
conjugate exponent pairs (p, q = -p/(1-p)) and reports the best margin
between a weight-mass ratio and a loss-mass ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .data import ScorePair
from .metrics import TpaucSpec, select_hard_sets
from .weighting import WeightScheme, psi

__all__ = [
    "square_loss",
    "zero_one_loss",
    "PairRiskBreakdown",
    "BoundCheckReport",
    "truncated_risk",
    "bilevel_weights",
    "weighted_risk",
    "check_sufficient_condition",
    "BoundGapTrace",
    "bound_gap_trace",
    "write_bound_gap_csv",
]

# Pairs with surrogate loss below this are dropped from negative-power
# averages, where they would diverge.
ZERO_LOSS_TOL = 1e-12


def square_loss(t):
    """(1 - t)**2; dominates the 0-1 ranking loss for scores in [0, 1]."""
    t = np.asarray(t, dtype=float)
    return (1.0 - t) ** 2


def zero_one_loss(t):
    """1 where t <= 0 (ties count as errors), else 0."""
    t = np.asarray(t, dtype=float)
    return (t <= 0.0).astype(float)


@dataclass(frozen=True)
class PairRiskBreakdown:
    """The weighted, truncated, and 0-1 risks of one sample, plus weights."""

    r_weighted: float
    r_truncated: float
    r_zero_one: float
    v_pos: np.ndarray
    v_neg: np.ndarray


@dataclass(frozen=True)
class BoundCheckReport:
    """Outcome of the upper-bound sufficient condition on one sample."""

    p_values: np.ndarray
    rho: np.ndarray
    xi: np.ndarray
    best_margin: float
    holds: bool
    direct_gap: float
    indeterminate: bool = False
    excluded_pairs: int = 0


def _loss_matrix(scores: ScorePair, loss) -> np.ndarray:
    return loss(scores.pos_scores[:, None] - scores.neg_scores[None, :])


def truncated_risk(
    scores: ScorePair, spec: TpaucSpec, loss: Callable = square_loss
) -> float:
    """Mean loss over hard pairs, normalized by the full pair count."""
    hs = select_hard_sets(scores, spec)
    diff = (
        scores.pos_scores[hs.pos_hard][:, None]
        - scores.neg_scores[hs.neg_hard][None, :]
    )
    return float(np.sum(loss(diff))) / (scores.n_pos * scores.n_neg)


def bilevel_weights(scores: ScorePair, spec: TpaucSpec):
    """0/1 weight vectors marking the hard positives and hard negatives.

    These are the unique maximizers of the linear inner selection problems
    (weights in [0,1], L1 budget = hard-set size) when scores are tie-free.
    """
    hs = select_hard_sets(scores, spec)
    v_pos = np.zeros(scores.n_pos)
    v_neg = np.zeros(scores.n_neg)
    v_pos[hs.pos_hard] = 1.0
    v_neg[hs.neg_hard] = 1.0
    return v_pos, v_neg


def pair_weights(
    scores: ScorePair,
    scheme: WeightScheme,
    scheme_neg: WeightScheme | None = None,
):
    """Soft difficulty weights: psi(1 - f_pos) and psi(f_neg)."""
    v_pos = psi(scheme, 1.0 - scores.pos_scores)
    v_neg = psi(scheme_neg or scheme, scores.neg_scores)
    return v_pos, v_neg


def weighted_risk(
    scores: ScorePair,
    scheme: WeightScheme,
    spec: TpaucSpec,
    loss: Callable = square_loss,
    scheme_neg: WeightScheme | None = None,
) -> PairRiskBreakdown:
    """Soft-weighted pairwise risk, with the truncated risks it relaxes."""
    v_pos, v_neg = pair_weights(scores, scheme, scheme_neg)
    losses = _loss_matrix(scores, loss)
    r_weighted = float(np.mean(v_pos[:, None] * v_neg[None, :] * losses))
    return PairRiskBreakdown(
        r_weighted=r_weighted,
        r_truncated=truncated_risk(scores, spec, loss),
        r_zero_one=truncated_risk(scores, spec, zero_one_loss),
        v_pos=v_pos,
        v_neg=v_neg,
    )


def _power_mean(values: np.ndarray, power: float) -> float:
    """(mean(values**power))**(1/power), evaluated in log space.

    ``values`` must be nonnegative; zeros are fine for power in (0, 1).
    """
    with np.errstate(divide="ignore"):
        log_values = np.log(values)
    log_mean = logsumexp(power * log_values) - np.log(values.size)
    return float(np.exp(log_mean / power))


def check_sufficient_condition(
    scores: ScorePair,
    scheme: WeightScheme,
    spec: TpaucSpec,
    p_grid: int = 99,
    loss: Callable = square_loss,
    scheme_neg: WeightScheme | None = None,
    xi_index_sets: str = "proof",
) -> BoundCheckReport:
    """Scan exponent pairs for a certificate that the weighted risk
    upper-bounds the truncated risk on this sample.

    For each p on an interior grid with conjugate q = -p/(1-p):

    * rho_p compares the soft weight mass outside the hard block against
      the weight deficit inside it;
    * xi_q compares the loss mass inside the hard block against the loss
      mass outside it, scaled by the hard-pair fraction.

    ``holds`` means some grid point has rho_p >= xi_q, which implies the
    reported ``direct_gap`` is nonnegative.  ``xi_index_sets="swapped"``
    evaluates the variant with the two loss averages exchanged, kept for
    side-by-side comparison only (no soundness claim).
    """
    if p_grid < 2:
        raise ValueError("p_grid must be >= 2")
    if xi_index_sets not in ("proof", "swapped"):
        raise ValueError(f"unknown xi_index_sets {xi_index_sets!r}")

    hs = select_hard_sets(scores, spec)
    v_pos, v_neg = pair_weights(scores, scheme, scheme_neg)
    weights = v_pos[:, None] * v_neg[None, :]
    losses = _loss_matrix(scores, loss)

    hard_block = np.zeros(weights.shape, dtype=bool)
    hard_block[np.ix_(hs.pos_hard, hs.neg_hard)] = True
    if hard_block.all():
        raise ValueError("hard sets cover every pair; nothing to compare")

    w_hard, l_hard = weights[hard_block], losses[hard_block]
    w_rest, l_rest = weights[~hard_block], losses[~hard_block]

    n_pairs = weights.size
    hard_fraction = w_hard.size / n_pairs  # empirical alpha*beta
    scale = hard_fraction / (1.0 - hard_fraction)

    r_weighted = float(np.mean(weights * losses))
    r_truncated = float(np.sum(l_hard)) / n_pairs
    direct_gap = r_weighted - r_truncated

    if xi_index_sets == "proof":
        l_sq_pool, l_q_pool = l_hard, l_rest
    else:
        l_sq_pool, l_q_pool = l_rest, l_hard
    kept = l_q_pool[l_q_pool >= ZERO_LOSS_TOL]
    excluded = int(l_q_pool.size - kept.size)

    ps = np.arange(1, p_grid + 1) / (p_grid + 1)
    rho = np.empty(p_grid)
    xi = np.empty(p_grid)
    deficit = float(np.sqrt(np.mean((1.0 - w_hard) ** 2)))
    xi_numer = scale * float(np.sqrt(np.mean(l_sq_pool**2)))
    indeterminate = kept.size == 0
    for i, p in enumerate(ps):
        q = -p / (1.0 - p)
        with np.errstate(divide="ignore"):
            rho[i] = np.inf if deficit == 0.0 else _power_mean(w_rest, p) / deficit
        xi[i] = np.nan if indeterminate else xi_numer / _power_mean(kept, q)

    if indeterminate:
        best_margin = float("nan")
        holds = False
    else:
        margin = rho - xi
        best_margin = float(np.max(margin))
        holds = bool(best_margin >= 0.0)

    return BoundCheckReport(
        p_values=ps,
        rho=rho,
        xi=xi,
        best_margin=best_margin,
        holds=holds,
        direct_gap=direct_gap,
        indeterminate=indeterminate,
        excluded_pairs=excluded,
    )


@dataclass(frozen=True)
class BoundGapTrace:
    """Per-epoch (weighted, truncated, zero-one) risk triples."""

    rows: tuple
    bound_held_every_epoch: bool

    def summary(self) -> str:
        if self.bound_held_every_epoch:
            return "bound held at every epoch"
        broken = sum(1 for _, r_psi, r_sur, _ in self.rows if r_psi < r_sur)
        return f"bound violated at {broken}/{len(self.rows)} epochs"


def bound_gap_trace(history: Sequence[PairRiskBreakdown]) -> BoundGapTrace:
    """Tabulate a risk history for plotting or CSV export."""
    if len(history) == 0:
        raise ValueError("history is empty")
    rows = tuple(
        (epoch, rb.r_weighted, rb.r_truncated, rb.r_zero_one)
        for epoch, rb in enumerate(history)
    )
    held = all(rb.r_weighted >= rb.r_truncated for rb in history)
    return BoundGapTrace(rows=rows, bound_held_every_epoch=held)


def write_bound_gap_csv(trace: BoundGapTrace, path) -> None:
    """Write a trace as CSV with header epoch,r_psi,r_surrogate,r_zero_one."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,r_psi,r_surrogate,r_zero_one\n")
        for epoch, r_psi, r_sur, r_01 in trace.rows:
            fh.write(f"{epoch},{r_psi!r},{r_sur!r},{r_01!r}\n")
