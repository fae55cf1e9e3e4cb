"""Measure words along culturally meaningful axes of a word-embedding space
and validate the measurements against survey-based belief data.

The core algorithm is transform-shaped and exposed both as plain functions
(:func:`build_direction`, :func:`score`, :func:`run_measurement`, ...) and as
scikit-learn compatible estimators (:class:`AxisScorer`, :class:`BinomialGLM`).
"""

__version__ = "0.1.0"

from .axes import (
    MEASURES,
    AxisDirection,
    DimensionSpec,
    MulticlassSpec,
    PositionMeasure,
    build_direction,
    load_dimension_specs,
    prepare_model,
    resolve_multiclass,
    score,
    swinger_score,
)
from .embeddings import (
    EmbeddingModel,
    WordVector,
    load_embeddings,
    lookup,
    resolve,
    save_embeddings,
    unit_normalize,
)
from .errors import (
    ConfigError,
    DegenerateDataError,
    EmbeddingParseError,
    MeasurementError,
    SchemaError,
    WordaxesError,
    ZeroVectorError,
)
from .estimators import AxisScorer, BinomialGLM
from .evaluation import (
    BeliefRankingScore,
    DimensionAccuracy,
    FactorRegressionResult,
    MeasurementRun,
    RunKey,
    SalienceResult,
    belief_factor_regression,
    belief_ranking_score,
    dimension_accuracy,
    fit_salience,
    grand_mean_accuracy,
    rank_all_beliefs,
    run_measurement,
    salience_accuracy_correlation,
    select_best_settings,
)
from .stats import (
    BootstrapCI,
    FitResult,
    average_ranks,
    bootstrap_ci,
    first_principal_component,
    fit_binomial,
    pearson,
    substream_rng,
)
from .survey import (
    SCHEMAS,
    BeliefMatrix,
    BeliefStats,
    LabelingObservation,
    build_belief_matrix,
    dimension_summary,
    load_labeling,
    load_survey,
    save_survey,
)

__all__ = [
    "__version__",
    "MEASURES",
    "SCHEMAS",
    "AxisDirection",
    "AxisScorer",
    "BeliefMatrix",
    "BeliefRankingScore",
    "BeliefStats",
    "BinomialGLM",
    "BootstrapCI",
    "ConfigError",
    "DegenerateDataError",
    "DimensionAccuracy",
    "DimensionSpec",
    "EmbeddingModel",
    "EmbeddingParseError",
    "FactorRegressionResult",
    "FitResult",
    "LabelingObservation",
    "MeasurementError",
    "MeasurementRun",
    "MulticlassSpec",
    "PositionMeasure",
    "RunKey",
    "SalienceResult",
    "SchemaError",
    "WordVector",
    "WordaxesError",
    "ZeroVectorError",
    "average_ranks",
    "belief_factor_regression",
    "belief_ranking_score",
    "bootstrap_ci",
    "build_belief_matrix",
    "build_direction",
    "dimension_accuracy",
    "dimension_summary",
    "first_principal_component",
    "fit_binomial",
    "fit_salience",
    "grand_mean_accuracy",
    "load_dimension_specs",
    "load_embeddings",
    "load_labeling",
    "load_survey",
    "lookup",
    "pearson",
    "prepare_model",
    "rank_all_beliefs",
    "resolve",
    "resolve_multiclass",
    "run_measurement",
    "salience_accuracy_correlation",
    "save_embeddings",
    "save_survey",
    "score",
    "select_best_settings",
    "substream_rng",
    "swinger_score",
    "unit_normalize",
]
