"""cascadekit: simulate, evaluate, and tune model cascades.

Works entirely from precomputed per-model prediction records: load (or
synthesize) an evaluation bundle, execute sequential or routing cascades
under a confidence policy, sweep thresholds into accuracy-cost curves, and
analyze per-model contributions or tune thresholds to a computation budget.
"""

__version__ = "0.1.0"

from .analysis import (
    ContributionReport,
    ImprovementReport,
    ModelContribution,
    TunedOperatingPoint,
    contribution,
    improvement_report,
    tune,
)
from .cascade import (
    CascadeConfig,
    CascadeOutcome,
    Mode,
    PreparedCascade,
    RunSummary,
    aggregate,
    run,
    run_routing,
    run_sequential,
)
from .confidence import (
    Policy,
    dtu,
    heuristic_conf,
    max_prob,
    policy_range,
    random_conf,
    stage_confidence,
)
from .ingest import load_bundle, write_bundle
from .records import (
    EvaluationBundle,
    InstanceRecord,
    ModelProfile,
    PredictionRecord,
    build_bundle,
    instance_cost,
    make_prediction,
    normalize_scores,
)
from .sweep import (
    CurvePoint,
    CurveSummary,
    MatchedCost,
    StandaloneStat,
    auc,
    matched_cost,
    max_accuracy_gain,
    pareto_frontier,
    standalone_stats,
    summarize,
    sweep,
    threshold_grid,
)
from .synth import SynthModel, SynthSpec, default_cost_table, generate

__all__ = [
    "__version__",
    "CascadeConfig",
    "CascadeOutcome",
    "ContributionReport",
    "CurvePoint",
    "CurveSummary",
    "EvaluationBundle",
    "ImprovementReport",
    "InstanceRecord",
    "MatchedCost",
    "Mode",
    "ModelContribution",
    "ModelProfile",
    "Policy",
    "PredictionRecord",
    "PreparedCascade",
    "RunSummary",
    "StandaloneStat",
    "SynthModel",
    "SynthSpec",
    "TunedOperatingPoint",
    "aggregate",
    "auc",
    "build_bundle",
    "contribution",
    "default_cost_table",
    "dtu",
    "generate",
    "heuristic_conf",
    "improvement_report",
    "instance_cost",
    "load_bundle",
    "make_prediction",
    "matched_cost",
    "max_accuracy_gain",
    "max_prob",
    "normalize_scores",
    "pareto_frontier",
    "policy_range",
    "random_conf",
    "run",
    "run_routing",
    "run_sequential",
    "stage_confidence",
    "standalone_stats",
    "summarize",
    "sweep",
    "threshold_grid",
    "tune",
    "write_bundle",
]
