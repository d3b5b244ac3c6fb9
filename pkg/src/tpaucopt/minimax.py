"""Instance-wise minimax form of the soft-weighted square-loss risk.

The pairwise objective mean_ij[v+_i v-_j (1 - (f+_i - f-_j))^2] expands
into six products of per-class averages.  Each product w*z is rewritten
through the identity w*z = min_a max_b of a quadratic, which yields a
10-vector ``a`` (min player) and an 8-vector ``b`` (max player), both box
constrained, and the objective

    a . zeta1 + b . zeta2 + ||scale_a * a||^2 - ||scale_b * b||^2

whose saddle value equals the pairwise risk exactly.  Training alternates
projected gradient descent on ``a`` with ascent on ``b`` while the scorer
parameters follow the chain rule through the per-class averages.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import ScorePair
from .weighting import WeightScheme, psi, psi_prime

__all__ = [
    "BatchStatistics",
    "MinimaxState",
    "SCALE_A",
    "SCALE_B",
    "batch_statistics",
    "zeta_vectors",
    "objective",
    "inner_optimum",
    "pairwise_square_risk",
    "grad_ab",
    "sgda_step",
    "per_example_output_grads",
]

_SQRT2 = np.sqrt(2.0)

# Quadratic scaling masks: ||SCALE_A * a||^2 carries coefficient 1/2 on the
# components whose product identity contributes half a square, 1 on the rest.
SCALE_A = np.array([1, 1, _SQRT2, _SQRT2, _SQRT2, 1, 1, 1, 1, _SQRT2]) / _SQRT2
SCALE_B = np.array([1, _SQRT2, _SQRT2, _SQRT2, 1, 1, _SQRT2, _SQRT2]) / _SQRT2
SCALE_A.setflags(write=False)
SCALE_B.setflags(write=False)


@dataclass(frozen=True)
class BatchStatistics:
    """Per-class weighted score averages feeding the minimax objective.

    c_* average the weights themselves, f_* the weighted scores, f_*2 the
    weighted squared scores.
    """

    c_pos: float
    c_neg: float
    f_pos: float
    f_neg: float
    f_pos2: float
    f_neg2: float


def box_bounds(v_inf: float, f_inf: float = 1.0):
    """Componentwise upper bounds for the two auxiliary vectors."""
    v, f = float(v_inf), float(f_inf)
    c_a = np.array([v, v, v + f, v, f, v, f * f, v, f * f, 2 * f])
    c_b = np.array([2 * v, v, f, v + f, v + f * f, v + f * f, f, f])
    return c_a, c_b


@dataclass(frozen=True)
class MinimaxState:
    """Auxiliary min/max vectors with their feasibility boxes."""

    a: np.ndarray
    b: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    v_inf: float
    f_inf: float = 1.0

    def __post_init__(self):
        for name, size in (("a", 10), ("b", 8), ("c_a", 10), ("c_b", 8)):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (size,):
                raise ValueError(f"{name} must have shape ({size},)")
            object.__setattr__(self, name, arr)
        if np.any(self.a < 0) or np.any(self.a > self.c_a):
            raise ValueError("a violates its box bounds")
        if np.any(self.b < 0) or np.any(self.b > self.c_b):
            raise ValueError("b violates its box bounds")

    @classmethod
    def zeros(cls, v_inf: float, f_inf: float = 1.0) -> "MinimaxState":
        c_a, c_b = box_bounds(v_inf, f_inf)
        return cls(
            a=np.zeros(10), b=np.zeros(8), c_a=c_a, c_b=c_b, v_inf=v_inf, f_inf=f_inf
        )


def batch_statistics(
    scores: ScorePair,
    scheme: WeightScheme,
    scheme_neg: WeightScheme | None = None,
) -> BatchStatistics:
    """Compute the six weighted averages in one pass per class."""
    s_pos, s_neg = scores.pos_scores, scores.neg_scores
    v_pos = psi(scheme, 1.0 - s_pos)
    v_neg = psi(scheme_neg or scheme, s_neg)
    return BatchStatistics(
        c_pos=float(np.mean(v_pos)),
        c_neg=float(np.mean(v_neg)),
        f_pos=float(np.mean(v_pos * s_pos)),
        f_neg=float(np.mean(v_neg * s_neg)),
        f_pos2=float(np.mean(v_pos * s_pos**2)),
        f_neg2=float(np.mean(v_neg * s_neg**2)),
    )


def zeta_vectors(stats: BatchStatistics):
    """Linear coefficient vectors of the min and max players."""
    cp, cn = stats.c_pos, stats.c_neg
    fp, fn = stats.f_pos, stats.f_neg
    fp2, fn2 = stats.f_pos2, stats.f_neg2
    zeta1 = -np.array(
        [cp, cn, 2 * (fp + cn), 2 * cp, 2 * fn, cn, fp2, cp, fn2, 2 * (fp + fn)]
    )
    zeta2 = np.array(
        [cp + cn, 2 * cn, 2 * fp, 2 * (fn + cp), cn + fp2, cp + fn2, 2 * fp, 2 * fn]
    )
    return zeta1, zeta2


def objective(stats: BatchStatistics, state: MinimaxState) -> float:
    """Saddle objective value at the given auxiliary vectors."""
    zeta1, zeta2 = zeta_vectors(stats)
    quad_a = np.sum((SCALE_A * state.a) ** 2)
    quad_b = np.sum((SCALE_B * state.b) ** 2)
    return float(state.a @ zeta1 + state.b @ zeta2 + quad_a - quad_b)


def inner_optimum(
    stats: BatchStatistics, v_inf: float, f_inf: float = 1.0
) -> MinimaxState:
    """Closed-form saddle point of the objective at fixed statistics."""
    cp, cn = stats.c_pos, stats.c_neg
    fp, fn = stats.f_pos, stats.f_neg
    fp2, fn2 = stats.f_pos2, stats.f_neg2
    a_star = np.array([cp, cn, cn + fp, cp, fn, cn, fp2, cp, fn2, fp + fn])
    b_star = np.array([cp + cn, cn, fp, cp + fn, cn + fp2, cp + fn2, fp, fn])
    c_a, c_b = box_bounds(v_inf, f_inf)
    return MinimaxState(
        a=a_star, b=b_star, c_a=c_a, c_b=c_b, v_inf=v_inf, f_inf=f_inf
    )


def pairwise_square_risk(scores: ScorePair, scheme, scheme_neg=None) -> float:
    """Soft-weighted square-loss risk computed directly over all pairs."""
    v_pos = psi(scheme, 1.0 - scores.pos_scores)
    v_neg = psi(scheme_neg or scheme, scores.neg_scores)
    diff = scores.pos_scores[:, None] - scores.neg_scores[None, :]
    return float(np.mean(v_pos[:, None] * v_neg[None, :] * (1.0 - diff) ** 2))


def grad_ab(stats: BatchStatistics, state: MinimaxState):
    """Gradients of the objective in a (descent) and b (ascent) directions."""
    zeta1, zeta2 = zeta_vectors(stats)
    g_a = zeta1 + 2.0 * SCALE_A**2 * state.a
    g_b = zeta2 - 2.0 * SCALE_B**2 * state.b
    return g_a, g_b


def sgda_step(
    stats: BatchStatistics, state: MinimaxState, lr_a: float, lr_b: float
) -> MinimaxState:
    """One projected descent step on a and ascent step on b."""
    if lr_a < 0 or lr_b < 0:
        raise ValueError("step sizes must be >= 0")
    g_a, g_b = grad_ab(stats, state)
    a_new = np.clip(state.a - lr_a * g_a, 0.0, state.c_a)
    b_new = np.clip(state.b + lr_b * g_b, 0.0, state.c_b)
    return replace(state, a=a_new, b=b_new)


def per_example_output_grads(
    scores: ScorePair,
    scheme: WeightScheme,
    state: MinimaxState,
    scheme_neg: WeightScheme | None = None,
):
    """Gradient of the objective w.r.t. each score, holding (a, b) fixed.

    The objective depends on scores only through the six batch statistics;
    this applies the product rule through weight = psi(difficulty) and the
    score powers, then weighs each statistic's sensitivity by the total
    coefficient the auxiliary vectors place on it.
    """
    a, b = state.a, state.b
    # Sensitivity of the objective to each batch statistic.
    d_c_pos = -a[0] - 2 * a[3] - a[7] + b[0] + 2 * b[3] + b[5]
    d_c_neg = -a[1] - 2 * a[2] - a[5] + b[0] + 2 * b[1] + b[4]
    d_f_pos = -2 * a[2] - 2 * a[9] + 2 * b[2] + 2 * b[6]
    d_f_neg = -2 * a[4] - 2 * a[9] + 2 * b[3] + 2 * b[7]
    d_f_pos2 = -a[6] + b[4]
    d_f_neg2 = -a[8] + b[5]

    s_pos, s_neg = scores.pos_scores, scores.neg_scores
    neg_scheme = scheme_neg or scheme

    w_pos = psi(scheme, 1.0 - s_pos)
    dw_pos = -psi_prime(scheme, 1.0 - s_pos)  # d/ds of psi(1 - s)
    d_pos = (
        d_c_pos * dw_pos
        + d_f_pos * (dw_pos * s_pos + w_pos)
        + d_f_pos2 * (dw_pos * s_pos**2 + 2.0 * w_pos * s_pos)
    ) / scores.n_pos

    w_neg = psi(neg_scheme, s_neg)
    dw_neg = psi_prime(neg_scheme, s_neg)
    d_neg = (
        d_c_neg * dw_neg
        + d_f_neg * (dw_neg * s_neg + w_neg)
        + d_f_neg2 * (dw_neg * s_neg**2 + 2.0 * w_neg * s_neg)
    ) / scores.n_neg

    return d_pos, d_neg
