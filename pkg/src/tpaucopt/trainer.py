"""Training loops: a plain ranking warm-up phase followed by one of the
partial-AUC objectives, all driven by hand-rolled SGD.

Modes
-----
* ``auc``: unweighted pairwise square loss.
* ``pairwise-tpauc``: soft weights on both classes (the relaxed objective).
* ``pairwise-opauc``: soft weights on negatives only.
* ``minimax-tpauc``: the instance-wise saddle objective with projected
  descent/ascent on the auxiliary vectors.
* ``trunc-tpauc`` / ``trunc-opauc``: hard truncation to the per-epoch hard
  sets instead of soft weights.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import BatchSpec, Dataset, ScorePair, sample_batch
from .metrics import TpaucSpec, empirical_tpauc, select_hard_sets
from .minimax import (
    MinimaxState,
    batch_statistics,
    per_example_output_grads,
    sgda_step,
)
from .risk import weighted_risk
from .scorer import ScorerParams, backward, forward
from .weighting import WeightScheme, psi, psi_prime

__all__ = [
    "MODES",
    "TrainConfig",
    "EpochRecord",
    "dataset_scores",
    "pairwise_output_grads",
    "truncated_baseline_step",
    "train",
    "evaluate",
    "write_training_log",
]

MODES = (
    "auc",
    "pairwise-tpauc",
    "minimax-tpauc",
    "trunc-tpauc",
    "trunc-opauc",
    "pairwise-opauc",
)


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run depends on besides the data and model."""

    mode: str = "pairwise-tpauc"
    scheme: WeightScheme = field(default_factory=lambda: WeightScheme("poly", 3.0))
    scheme_neg: WeightScheme | None = None
    spec: TpaucSpec = field(default_factory=lambda: TpaucSpec(0.5, 0.5))
    warmup_epochs: int = 0
    epochs: int = 100
    batch: BatchSpec = field(default_factory=lambda: BatchSpec(128))
    lr_theta: float = 0.5
    lr_a: float = 0.05
    lr_b: float = 0.05
    lr_decay: float = 0.99
    weight_decay: float = 1e-5
    seed: int = 0
    theta_grad: str = "saddle"  # minimax mode: "saddle" or "pairwise"
    early_stop_patience: int = 20  # 0 disables early stopping
    rerank_per_batch: bool = False  # truncated modes re-rank inside each batch

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.theta_grad not in ("saddle", "pairwise"):
            raise ValueError(f"unknown theta_grad {self.theta_grad!r}")
        if self.warmup_epochs < 0 or self.warmup_epochs > self.epochs:
            raise ValueError("need 0 <= warmup_epochs <= epochs")
        if min(self.lr_theta, self.lr_a, self.lr_b) < 0:
            raise ValueError("learning rates must be >= 0")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must be in (0, 1]")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


@dataclass(frozen=True)
class EpochRecord:
    """Risks on training data plus the validation metric for one epoch."""

    epoch: int
    r_psi: float
    r_surrogate: float
    r_zero_one: float
    tpauc_val: float
    wall_ms: int


def dataset_scores(model: ScorerParams, ds: Dataset) -> ScorePair:
    """Forward a dataset and split the scores by class."""
    s = forward(model, ds.features)
    return ScorePair(s[ds.pos_index], s[ds.neg_index])


def pairwise_output_grads(
    s_pos: np.ndarray,
    s_neg: np.ndarray,
    scheme_pos: WeightScheme | None,
    scheme_neg: WeightScheme | None,
):
    """Per-example score gradients of the weighted pairwise square risk.

    A ``None`` scheme means weight 1 on that class, which degrades the
    objective to plain (one-way, or full) ranking risk.
    """
    n_pos, n_neg = s_pos.size, s_neg.size
    if scheme_pos is None:
        w_pos = np.ones(n_pos)
        dw_pos = np.zeros(n_pos)
    else:
        w_pos = psi(scheme_pos, 1.0 - s_pos)
        dw_pos = -psi_prime(scheme_pos, 1.0 - s_pos)
    if scheme_neg is None:
        w_neg = np.ones(n_neg)
        dw_neg = np.zeros(n_neg)
    else:
        w_neg = psi(scheme_neg, s_neg)
        dw_neg = psi_prime(scheme_neg, s_neg)

    margin = 1.0 - s_pos[:, None] + s_neg[None, :]
    losses = margin**2
    scale = 1.0 / (n_pos * n_neg)
    d_pos = scale * (dw_pos * (losses @ w_neg) - 2.0 * w_pos * (margin @ w_neg))
    d_neg = scale * (dw_neg * (losses.T @ w_pos) + 2.0 * w_neg * (margin.T @ w_pos))
    return d_pos, d_neg


def truncated_baseline_step(
    scores: ScorePair,
    spec: TpaucSpec,
    mode: str,
    pos_hard_mask: np.ndarray | None = None,
    neg_hard_mask: np.ndarray | None = None,
):
    """Square-loss score gradients restricted to hard pairs.

    Masks mark which of the given scores belong to the hard sets of the
    ranking pool; omitted masks are derived by ranking the given scores
    themselves.  ``trunc-opauc`` keeps every positive; ``trunc-tpauc``
    restricts both classes.  If the restriction leaves no pair in this
    batch, the gradients are zero.
    """
    if mode not in ("trunc-tpauc", "trunc-opauc"):
        raise ValueError(f"not a truncated mode: {mode!r}")
    if pos_hard_mask is None or neg_hard_mask is None:
        hs = select_hard_sets(scores, spec)
        pos_hard_mask = np.zeros(scores.n_pos, dtype=bool)
        neg_hard_mask = np.zeros(scores.n_neg, dtype=bool)
        pos_hard_mask[hs.pos_hard] = True
        neg_hard_mask[hs.neg_hard] = True
    if mode == "trunc-opauc":
        pos_hard_mask = np.ones(scores.n_pos, dtype=bool)

    d_pos = np.zeros(scores.n_pos)
    d_neg = np.zeros(scores.n_neg)
    sel_pos = np.flatnonzero(pos_hard_mask)
    sel_neg = np.flatnonzero(neg_hard_mask)
    if sel_pos.size == 0 or sel_neg.size == 0:
        return d_pos, d_neg
    margin = (
        1.0 - scores.pos_scores[sel_pos][:, None] + scores.neg_scores[sel_neg][None, :]
    )
    scale = 1.0 / margin.size
    d_pos[sel_pos] = scale * (-2.0 * margin.sum(axis=1))
    d_neg[sel_neg] = scale * (2.0 * margin.sum(axis=0))
    return d_pos, d_neg


def _mode_grads(active_mode, batch, cfg, state, hard_rows):
    """Dispatch per-example output gradients for the active objective."""
    if active_mode == "auc":
        return pairwise_output_grads(batch.pos_scores, batch.neg_scores, None, None)
    if active_mode == "pairwise-tpauc":
        return pairwise_output_grads(
            batch.pos_scores, batch.neg_scores, cfg.scheme, cfg.scheme_neg or cfg.scheme
        )
    if active_mode == "pairwise-opauc":
        return pairwise_output_grads(
            batch.pos_scores, batch.neg_scores, None, cfg.scheme_neg or cfg.scheme
        )
    if active_mode == "minimax-tpauc":
        if cfg.theta_grad == "pairwise":
            return pairwise_output_grads(
                batch.pos_scores,
                batch.neg_scores,
                cfg.scheme,
                cfg.scheme_neg or cfg.scheme,
            )
        return per_example_output_grads(batch, cfg.scheme, state, cfg.scheme_neg)
    # truncated modes
    return truncated_baseline_step(batch, cfg.spec, active_mode, *hard_rows)


def train(
    ds_train: Dataset,
    ds_val: Dataset,
    model: ScorerParams,
    cfg: TrainConfig,
):
    """Run the configured training loop.

    Returns (parameters with the best validation metric, per-epoch
    records).  The input model is not mutated.
    """
    model = model.copy()
    steps_per_epoch = max(
        1, (ds_train.n_pos + ds_train.n_neg) // cfg.batch.batch_size
    )
    v_inf = cfg.scheme.sup_weight
    if cfg.scheme_neg is not None:
        v_inf = max(v_inf, cfg.scheme_neg.sup_weight)
    state = MinimaxState.zeros(v_inf)

    records: list[EpochRecord] = []
    best_val = -np.inf
    best_params = model.copy()
    best_epoch = -1

    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        active_mode = "auc" if epoch < cfg.warmup_epochs else cfg.mode
        lr = cfg.lr_theta * cfg.lr_decay**epoch

        pos_hard_rows = neg_hard_rows = None
        if active_mode in ("trunc-tpauc", "trunc-opauc") and not cfg.rerank_per_batch:
            hs = select_hard_sets(dataset_scores(model, ds_train), cfg.spec)
            pos_hard_rows = np.zeros(len(ds_train.labels), dtype=bool)
            neg_hard_rows = np.zeros(len(ds_train.labels), dtype=bool)
            pos_hard_rows[ds_train.pos_index[hs.pos_hard]] = True
            neg_hard_rows[ds_train.neg_index[hs.neg_hard]] = True

        for step in range(steps_per_epoch):
            pos_rows, neg_rows = sample_batch(ds_train, cfg.batch, epoch, step)
            x = np.vstack([ds_train.features[pos_rows], ds_train.features[neg_rows]])
            s = forward(model, x)
            batch = ScorePair(s[: pos_rows.size], s[pos_rows.size :])
            hard_rows = (
                (pos_hard_rows[pos_rows], neg_hard_rows[neg_rows])
                if pos_hard_rows is not None
                else (None, None)
            )
            d_pos, d_neg = _mode_grads(active_mode, batch, cfg, state, hard_rows)
            if active_mode == "minimax-tpauc":
                stats = batch_statistics(batch, cfg.scheme, cfg.scheme_neg)
                state = sgda_step(stats, state, cfg.lr_a, cfg.lr_b)
            grad = backward(model, x, np.concatenate([d_pos, d_neg]))
            grad += cfg.weight_decay * model.theta
            model.theta = model.theta - lr * grad
            if not np.isfinite(model.theta).all():
                raise RuntimeError(
                    f"non-finite parameters at epoch {epoch} step {step}; "
                    f"lower the learning rates (lr_theta={cfg.lr_theta})"
                )

        train_scores = dataset_scores(model, ds_train)
        breakdown = weighted_risk(
            train_scores, cfg.scheme, cfg.spec, scheme_neg=cfg.scheme_neg
        )
        tpauc_val = empirical_tpauc(dataset_scores(model, ds_val), cfg.spec)
        wall_ms = int(round((time.perf_counter() - t0) * 1000))
        record = EpochRecord(
            epoch=epoch,
            r_psi=breakdown.r_weighted,
            r_surrogate=breakdown.r_truncated,
            r_zero_one=breakdown.r_zero_one,
            tpauc_val=tpauc_val,
            wall_ms=wall_ms,
        )
        numeric = (record.r_psi, record.r_surrogate, record.r_zero_one, tpauc_val)
        if not all(np.isfinite(numeric)):
            raise RuntimeError(
                f"non-finite training state at epoch {epoch}: "
                f"r_psi={record.r_psi}, r_surrogate={record.r_surrogate}, "
                f"tpauc_val={tpauc_val}"
            )
        records.append(record)

        if tpauc_val > best_val:
            best_val = tpauc_val
            best_params = model.copy()
            best_epoch = epoch
        elif (
            cfg.early_stop_patience > 0
            and epoch - best_epoch >= cfg.early_stop_patience
        ):
            break

    return best_params, records


def evaluate(model: ScorerParams, ds: Dataset, specs) -> list[tuple[float, float, float]]:
    """Tabulate the two-way partial metric at each requested truncation."""
    scores = dataset_scores(model, ds)
    table = []
    for spec in specs:
        if not isinstance(spec, TpaucSpec):
            spec = TpaucSpec(*spec)
        table.append((spec.alpha, spec.beta, empirical_tpauc(scores, spec)))
    return table


def write_training_log(records, path) -> None:
    """Write epoch records as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,r_psi,r_surrogate,r_zero_one,tpauc_val,wall_ms\n")
        for r in records:
            fh.write(
                f"{r.epoch},{r.r_psi!r},{r.r_surrogate!r},"
                f"{r.r_zero_one!r},{r.tpauc_val!r},{r.wall_ms}\n"
            )
