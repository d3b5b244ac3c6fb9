"""Two-way partial AUC estimation and optimization toolkit."""

from .data import (
    BatchSpec,
    Dataset,
    ScorePair,
    gen_gaussian_features,
    gen_gaussian_scores,
    load_csv,
    load_scores_csv,
    sample_batch,
    save_csv,
    save_scores_csv,
)
from .metrics import (
    HardSets,
    TpaucSpec,
    empirical_auc,
    empirical_opauc,
    empirical_tpauc,
    find_inconsistency,
    select_hard_sets,
)
from .minimax import (
    BatchStatistics,
    MinimaxState,
    batch_statistics,
    grad_ab,
    inner_optimum,
    objective,
    pairwise_square_risk,
    per_example_output_grads,
    sgda_step,
    zeta_vectors,
)
from .risk import (
    BoundCheckReport,
    PairRiskBreakdown,
    bilevel_weights,
    bound_gap_trace,
    check_sufficient_condition,
    square_loss,
    truncated_risk,
    weighted_risk,
    zero_one_loss,
)
from .scorer import ScorerParams, backward, forward, init
from .trainer import EpochRecord, TrainConfig, evaluate, train
from .weighting import (
    WeightScheme,
    calibration_check,
    dual_check,
    phi,
    phi_prime,
    psi,
    psi_prime,
)

__version__ = "0.1.0"
