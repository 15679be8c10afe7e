"""gridsense: multi-scale temporal failure-prediction pipeline for PMU data."""

from .balance import smote
from .evaluation import (
    EvalReport,
    FoldPlan,
    confusion_matrix,
    cross_validate,
    holdout_validate,
    metrics_from_confusion,
    stratified_kfold,
)
from .features import extract_multiscale, extract_single_scale
from .matrix import FeatureMatrix, apply_minmax, minmax_scale_columns
from .selection import SelectionResult, report_top_features, rfe
from .signal import (
    DisturbanceLog,
    PmuChannel,
    Segment,
    SegmentLabel,
    WindowSpec,
    ingest_csv,
    reject_outlier_segments,
    segment_by_events,
    slice_windows,
)
from .synth import ScenarioConfig, default_scenario, generate

__version__ = "0.1.0"

__all__ = [
    "PmuChannel",
    "DisturbanceLog",
    "Segment",
    "SegmentLabel",
    "WindowSpec",
    "ingest_csv",
    "segment_by_events",
    "reject_outlier_segments",
    "slice_windows",
    "FeatureMatrix",
    "minmax_scale_columns",
    "apply_minmax",
    "extract_single_scale",
    "extract_multiscale",
    "smote",
    "rfe",
    "SelectionResult",
    "report_top_features",
    "stratified_kfold",
    "FoldPlan",
    "confusion_matrix",
    "metrics_from_confusion",
    "cross_validate",
    "holdout_validate",
    "EvalReport",
    "ScenarioConfig",
    "default_scenario",
    "generate",
    "__version__",
]
