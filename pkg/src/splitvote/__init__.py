"""Split-vote disagreement and calibration toolkit for case-outcome models.

Quantifies human label variation in judicial decisions (vote splits parsed
out of judgment conclusions) and measures how well a classifier's confidence
lines up both with its own accuracy and with the judges' vote distribution.
"""

from .calibration import (
    Temperature,
    TemperatureGrid,
    apply_temperature,
    fit_temperature,
    nll,
    scale_records,
)
from .dataio import (
    ConclusionDoc,
    JoinReport,
    VoteRecord,
    default_articles,
    join_votes,
    load_predictions,
    load_vote_records,
)
from .difficulty import (
    GroupDifficultyReport,
    PviRecord,
    dataset_pvi,
    pvi,
    pvi_entropy_correlation,
)
from .distributions import (
    Histogram,
    SoftLabel,
    VoteDistribution,
    entropy,
    entropy_from_probs,
    entropy_histogram,
    is_single_dissent,
    soft_label,
)
from .metrics import (
    EceReport,
    F1Report,
    PairedHistograms,
    PredictionRecord,
    confidence_histogram,
    dist_ce,
    ece,
    ece_from_bins,
    f1_suite,
    mean_dist_ce,
    softmax,
)
from .pipeline import RunConfig, run_pipeline
from .softtrain import (
    LinearSoftModel,
    SoftTrainProblem,
    TrainConfig,
    gradient,
    mean_soft_cross_entropy,
    predict_proba,
    soft_cross_entropy,
    train,
    train_hard,
)
from .stats import (
    CorrResult,
    ProxyAssociation,
    TTestResult,
    pearson,
    proxy_association,
    t_cdf,
    t_test,
)
from .votes import (
    BenchFormation,
    ExtractionScore,
    InconsistentVoteSum,
    VoteExtraction,
    normalize_numeral,
    parse_conclusion,
    render_conclusion,
    resolve_bench,
    score_extraction,
)

__version__ = "0.1.0"
