"""Bias audit engine for face-identification prediction logs.

Computes per-group error rates (accuracy, FNMR, FMR) from ranked
prediction logs, converts them into impact-weighted risks of bias and
per-subject ensemble risks, and supports what-if reasoning over a causal
network of bias attributes with exact inference.
"""

from .beliefnet import (
    BeliefNetwork,
    CategoricalDistribution,
    CPT,
    brute_force_joint,
    build_network,
    conditional_rates,
    estimate_prior,
    infer,
)
from .dataset import (
    AttributeSchema,
    Dataset,
    PredictionRecord,
    SubjectAttributes,
    attribute_slice,
    default_schema,
    parse_dataset,
    serialize_dataset,
)
from .errors import (
    BiaslensError,
    DegenerateRateError,
    InconsistentEvidenceError,
    ParseError,
    ValidationError,
)
from .metrics import (
    ConfusionCounts,
    DecisionPolicy,
    GroupMetrics,
    MetricsReport,
    Trial,
    confusion_counts,
    generate_trials,
    group_metrics,
    rank_accuracy,
    softmax,
)
from .risk import (
    ImpactProfile,
    RiskEntry,
    RiskReport,
    SweepPoint,
    ensemble_risk,
    risk_of_bias,
    risk_report,
    whatif_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "BeliefNetwork",
    "BiaslensError",
    "CPT",
    "CategoricalDistribution",
    "ConfusionCounts",
    "Dataset",
    "DecisionPolicy",
    "DegenerateRateError",
    "GroupMetrics",
    "ImpactProfile",
    "InconsistentEvidenceError",
    "MetricsReport",
    "ParseError",
    "PredictionRecord",
    "RiskEntry",
    "RiskReport",
    "SubjectAttributes",
    "SweepPoint",
    "Trial",
    "ValidationError",
    "attribute_slice",
    "brute_force_joint",
    "build_network",
    "conditional_rates",
    "confusion_counts",
    "default_schema",
    "ensemble_risk",
    "estimate_prior",
    "generate_trials",
    "group_metrics",
    "infer",
    "parse_dataset",
    "rank_accuracy",
    "risk_of_bias",
    "risk_report",
    "serialize_dataset",
    "softmax",
    "whatif_sweep",
]
