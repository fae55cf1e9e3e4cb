"""Accuracy analyses: dimension-level correlation, belief-level ranking,
best-settings selection, labeling-salience regressions, and the belief-level
factor regression.

Orientation handling: the position measures score toward the left pole while
survey scales run toward the right pole, so before ranking evaluation a run's
scores are sign-aligned to the survey.  The flip decision uses the rank
(Spearman) correlation, which makes every ranking score exactly invariant
under strictly increasing transforms of the embedding scores; the reported
Pearson accuracy always keeps its original sign.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .axes import (
    DimensionSpec,
    PositionMeasure,
    build_direction,
    get_measure,
    prepare_model,
    resolve_pole_rows,
    score,
    set_cosine_gap,
)
from .embeddings import EmbeddingModel, resolve
from .errors import DegenerateDataError, MeasurementError
from .stats import (
    BootstrapCI,
    FitResult,
    average_ranks,
    bootstrap_fit_cis,
    fit_binomial,
    pearson,
)
from .survey import BeliefMatrix, BeliefStats, LabelingObservation

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class RunKey:
    """Identifies one measurement run: embedding x dimension x wordset x measure."""

    embedding: str
    dimension: str
    wordset_source: str
    measure: str


@dataclass(frozen=True)
class SkippedWord:
    word: str
    reason: str


@dataclass(frozen=True, eq=False)
class MeasurementRun:
    """Per-identity scores for one run, plus the identities that could not be scored."""

    key: RunKey
    scores: dict[str, float]
    skipped: tuple[SkippedWord, ...]


@dataclass(frozen=True)
class DimensionAccuracy:
    """Pearson correlation between a run's scores and one survey's means."""

    key: RunKey
    pearson_r: float
    n_identities: int
    dataset: str = ""


@dataclass(frozen=True)
class BeliefRankingScore:
    """Ranking accuracy for one (identity, dimension) belief.

    ``n_gated`` counts comparison identities whose survey interval clears this
    identity's interval (in either direction); ``n_correct`` counts those the
    aligned embedding scores order the same way, ties counting as incorrect.
    ``accuracy`` is None when no comparison survives the gate.
    """

    identity: str
    dimension: str
    n_gated: int
    n_correct: int
    accuracy: float | None


@dataclass(frozen=True, eq=False)
class SalienceResult:
    """Per-dimension labeling-salience coefficients and their importance.

    ``importance`` is the larger coefficient magnitude across the two question
    types.  Confidence intervals come from a seeded nonparametric bootstrap
    over observations.
    """

    dimensions: tuple[str, ...]
    isa: FitResult
    seenwith: FitResult
    isa_cis: tuple[BootstrapCI, ...]
    seenwith_cis: tuple[BootstrapCI, ...]
    importance: dict[str, float]


@dataclass(frozen=True, eq=False)
class FactorRegressionResult:
    """Weighted binomial GLM of ranking accuracy on belief-level factors."""

    factors: tuple[str, ...]
    fit: FitResult
    coefficient_cis: tuple[BootstrapCI, ...]
    n_beliefs: int


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


def run_measurement(
    model: EmbeddingModel,
    spec: DimensionSpec,
    measure: str | PositionMeasure,
    identities: Sequence[str],
) -> MeasurementRun:
    """Score every resolvable identity on one axis with one measure.

    The model is normalized (on a cached copy) or kept raw to match the
    measure.  Unresolvable identities land in the skipped list; direction
    build failures propagate.
    """
    m = get_measure(measure)
    if spec.multiclass is not None:
        raise MeasurementError(
            f"dimension '{spec.name}' is multiclass; resolve it to binary axes first"
        )
    variant = prepare_model(model, m)
    direction = None
    pole_rows = None
    if m.direction_method is not None:
        direction = build_direction(spec, m.direction_method, variant)
    else:
        pole_rows = resolve_pole_rows(spec, variant)

    key = RunKey(model.name, spec.name, spec.wordset_source, m.id)
    scores: dict[str, float] = {}
    skipped: list[SkippedWord] = []
    for identity in identities:
        resolved, how = resolve(variant, identity)
        if resolved is None:
            skipped.append(SkippedWord(identity, "not in vocabulary"))
            continue
        if pole_rows is not None:
            value = set_cosine_gap(variant.row(resolved), *pole_rows)
        else:
            value = score(identity, m, direction, variant)
        scores[identity] = float(value)
        if how != "exact":
            logger.info("identity '%s' resolved via %s for %s", identity, how, key)
    if skipped:
        logger.warning(
            "%d identities skipped (out of vocabulary) for %s", len(skipped), key
        )
    return MeasurementRun(key, scores, tuple(skipped))


# ---------------------------------------------------------------------------
# Dimension-level accuracy
# ---------------------------------------------------------------------------


def _survey_index(
    survey: Iterable[BeliefStats], dimension: str
) -> dict[str, BeliefStats]:
    return {r.identity: r for r in survey if r.dimension == dimension}


def dimension_accuracy(
    run: MeasurementRun,
    survey: Iterable[BeliefStats],
    dataset: str = "",
    *,
    min_identities: int = 3,
) -> DimensionAccuracy:
    """Pearson correlation between mean survey responses and the run's scores.

    Computed over the identity intersection, which must contain at least
    ``min_identities``; a zero-variance side raises
    :class:`DegenerateDataError`.
    """
    stats = _survey_index(survey, run.key.dimension)
    common = sorted(set(run.scores) & set(stats))
    if len(common) < min_identities:
        raise DegenerateDataError(
            f"{run.key}: only {len(common)} identities shared with survey; "
            f"need {min_identities}"
        )
    survey_means = [stats[i].mean for i in common]
    run_scores = [run.scores[i] for i in common]
    return DimensionAccuracy(run.key, pearson(survey_means, run_scores), len(common), dataset)


def select_best_settings(
    accuracies: Iterable[DimensionAccuracy],
) -> dict[tuple[str, str], DimensionAccuracy]:
    """Per (dataset, dimension), the accuracy with the highest Pearson correlation.

    Non-finite correlations are excluded; ties break toward the
    lexicographically smallest (embedding, wordset, measure) key.
    """
    groups: dict[tuple[str, str], list[DimensionAccuracy]] = defaultdict(list)
    for acc in accuracies:
        if np.isfinite(acc.pearson_r):
            groups[(acc.dataset, acc.key.dimension)].append(acc)
    if not groups:
        raise DegenerateDataError("no valid accuracies to select from")
    best = {}
    for group, members in groups.items():
        members.sort(
            key=lambda a: (
                -a.pearson_r,
                a.key.embedding,
                a.key.wordset_source,
                a.key.measure,
            )
        )
        best[group] = members[0]
    return best


# ---------------------------------------------------------------------------
# Belief-level ranking
# ---------------------------------------------------------------------------


def _alignment_sign(scores: np.ndarray, means: np.ndarray) -> int:
    """-1 when the run's ranks anticorrelate with the survey's, else +1.

    Rank correlation (not raw Pearson) decides the flip so the decision, and
    hence every ranking score, is invariant under strictly increasing
    transforms of the scores.
    """
    if scores.size < 3:
        return 1
    try:
        r = pearson(average_ranks(scores), average_ranks(means))
    except DegenerateDataError:
        return 1
    return -1 if r < 0 else 1


def _ranking_arrays(
    run: MeasurementRun, survey: Iterable[BeliefStats], align: bool
) -> tuple[list[str], np.ndarray, np.ndarray, np.ndarray]:
    stats = _survey_index(survey, run.key.dimension)
    common = sorted(set(run.scores) & set(stats))
    means = np.array([stats[i].mean for i in common])
    ses = np.array([stats[i].se for i in common])
    scores = np.array([run.scores[i] for i in common])
    if align:
        scores = _alignment_sign(scores, means) * scores
    return common, means, ses, scores


def belief_ranking_score(
    identity: str,
    dimension: str,
    run: MeasurementRun,
    survey: Iterable[BeliefStats],
    *,
    align: bool = True,
) -> BeliefRankingScore:
    """Ranking accuracy of one belief against all confidently ordered peers."""
    if dimension != run.key.dimension:
        raise MeasurementError(
            f"run measures dimension '{run.key.dimension}', not '{dimension}'"
        )
    common, means, ses, scores = _ranking_arrays(run, survey, align)
    if identity not in common:
        raise MeasurementError(
            f"identity '{identity}' missing from the run/survey intersection"
        )
    i = common.index(identity)
    n_gated = 0
    n_correct = 0
    for j in range(len(common)):
        if j == i:
            continue
        if means[i] - ses[i] > means[j] + ses[j]:
            n_gated += 1
            n_correct += int(scores[i] > scores[j])
        elif means[j] - ses[j] > means[i] + ses[i]:
            n_gated += 1
            n_correct += int(scores[j] > scores[i])
    accuracy = n_correct / n_gated if n_gated else None
    return BeliefRankingScore(identity, dimension, n_gated, n_correct, accuracy)


def rank_all_beliefs(
    run: MeasurementRun, survey: Iterable[BeliefStats], *, align: bool = True
) -> list[BeliefRankingScore]:
    """Vectorized :func:`belief_ranking_score` for every identity in the intersection."""
    common, means, ses, scores = _ranking_arrays(run, survey, align)
    if not common:
        return []
    above = (means[:, None] - ses[:, None]) > (means[None, :] + ses[None, :])
    correct_above = above & (scores[:, None] > scores[None, :])
    n_gated = above.sum(axis=1) + above.sum(axis=0)
    n_correct = correct_above.sum(axis=1) + correct_above.sum(axis=0)
    out = []
    for idx, identity in enumerate(common):
        n = int(n_gated[idx])
        out.append(
            BeliefRankingScore(
                identity,
                run.key.dimension,
                n,
                int(n_correct[idx]),
                (int(n_correct[idx]) / n) if n else None,
            )
        )
    return out


def grand_mean_accuracy(scores: Iterable[BeliefRankingScore]) -> tuple[int, int, float | None]:
    """Totals over beliefs: gated comparisons, correct comparisons, and their ratio.

    Weighting each belief's accuracy by its gate count reduces to this exact
    identity, so it doubles as an internal consistency check.
    """
    total_gated = 0
    total_correct = 0
    for s in scores:
        total_gated += s.n_gated
        total_correct += s.n_correct
    ratio = (total_correct / total_gated) if total_gated else None
    return total_correct, total_gated, ratio


# ---------------------------------------------------------------------------
# Labeling salience
# ---------------------------------------------------------------------------


def _salience_design(
    observations: Sequence[LabelingObservation],
    matrix: BeliefMatrix,
    question_type: str,
    on_missing: str,
) -> tuple[np.ndarray, np.ndarray]:
    known = set(matrix.identities)
    rows = []
    outcomes = []
    dropped = 0
    for obs in observations:
        if obs.question_type != question_type:
            continue
        if obs.question_identity not in known or obs.answer_identity not in known:
            if on_missing == "drop":
                dropped += 1
                continue
            raise MeasurementError(
                f"labeling observation references identity outside the belief matrix: "
                f"({obs.question_identity!r}, {obs.answer_identity!r})"
            )
        rows.append(np.abs(matrix.row(obs.question_identity) - matrix.row(obs.answer_identity)))
        outcomes.append(obs.selected)
    if dropped:
        logger.warning(
            "%d %s observations dropped (identity outside belief matrix)",
            dropped,
            question_type,
        )
    if not rows:
        raise DegenerateDataError(f"no usable {question_type} observations")
    return np.vstack(rows), np.array(outcomes, dtype=np.float64)


def fit_salience(
    observations: Sequence[LabelingObservation],
    matrix: BeliefMatrix,
    *,
    ridge: float = 1e-6,
    level: float = 0.95,
    resamples: int = 200,
    seed: int = 0,
    on_missing: str = "error",
) -> SalienceResult:
    """Logistic regressions of answer selection on per-dimension belief distances.

    One fit per question type, features |X_question - X_answer| over the
    matrix dimensions, with intercept.  A dimension's importance is the larger
    coefficient magnitude of the two fits: a coefficient matters whether
    distance suppresses selection (negative) or encourages it (positive).
    """
    fits: dict[str, FitResult] = {}
    cis: dict[str, tuple[BootstrapCI, ...]] = {}
    for qt_index, question_type in enumerate(("IsA", "SeenWith")):
        x, y = _salience_design(observations, matrix, question_type, on_missing)

        def fit_params(idx: np.ndarray, _x=x, _y=y) -> np.ndarray:
            res = fit_binomial(_x[idx], _y[idx], ridge=ridge)
            return np.concatenate([[res.intercept], res.coefficients])

        fits[question_type] = fit_binomial(x, y, ridge=ridge)
        param_cis = bootstrap_fit_cis(
            fit_params, x.shape[0], level=level, resamples=resamples, seed=seed + qt_index
        )
        cis[question_type] = tuple(param_cis[1:])  # coefficient CIs; intercept dropped

    importance = {
        d: max(
            abs(float(fits["IsA"].coefficients[j])),
            abs(float(fits["SeenWith"].coefficients[j])),
        )
        for j, d in enumerate(matrix.dimensions)
    }
    return SalienceResult(
        dimensions=matrix.dimensions,
        isa=fits["IsA"],
        seenwith=fits["SeenWith"],
        isa_cis=cis["IsA"],
        seenwith_cis=cis["SeenWith"],
        importance=importance,
    )


def salience_accuracy_correlation(
    salience: SalienceResult | Mapping[str, float],
    accuracy_effects: Mapping[str, float],
) -> float:
    """Pearson correlation between a per-dimension statistic and accuracy effects.

    The statistic is either a salience result's importance or any mapping such
    as per-dimension survey variance; at least 3 shared dimensions required.
    """
    values = salience.importance if isinstance(salience, SalienceResult) else salience
    shared = sorted(set(values) & set(accuracy_effects))
    if len(shared) < 3:
        raise DegenerateDataError(
            f"only {len(shared)} dimensions shared; need at least 3"
        )
    return pearson([values[d] for d in shared], [accuracy_effects[d] for d in shared])


# ---------------------------------------------------------------------------
# Belief-level factor regression
# ---------------------------------------------------------------------------

FACTOR_COLUMNS = ("sd", "distance_to_median", "log_frequency", "synsets")


def belief_factor_regression(
    scores: Sequence[BeliefRankingScore],
    survey: Iterable[BeliefStats],
    *,
    ridge: float = 1e-6,
    level: float = 0.95,
    resamples: int = 200,
    seed: int = 0,
    min_beliefs: int = 20,
) -> FactorRegressionResult:
    """Binomial GLM of ranking accuracy on belief-level factors.

    Outcome is (correct out of gated) per belief, which weights each belief
    by its gate count through the binomial likelihood; beliefs with no gated
    comparisons contribute nothing and are excluded.  Factors are the survey
    sd, the distance of the mean to its dimension median, and, when present
    for every retained belief, logged frequency and synset count.
    """
    stats_by_key: dict[tuple[str, str], BeliefStats] = {}
    means_by_dim: dict[str, list[float]] = defaultdict(list)
    for r in survey:
        stats_by_key[(r.identity, r.dimension)] = r
        means_by_dim[r.dimension].append(r.mean)
    medians = {d: float(np.median(v)) for d, v in means_by_dim.items()}

    candidates = []
    for s in scores:
        if s.n_gated <= 0:
            continue
        stat = stats_by_key.get((s.identity, s.dimension))
        if stat is None:
            continue
        candidates.append((s, stat))
    if len(candidates) < min_beliefs:
        raise DegenerateDataError(
            f"need at least {min_beliefs} beliefs with covariates, got {len(candidates)}"
        )

    factors = ["sd", "distance_to_median"]
    if all(stat.log_frequency is not None for _, stat in candidates):
        factors.append("log_frequency")
    else:
        logger.warning("log_frequency missing for some beliefs; factor excluded")
    if all(stat.synsets is not None for _, stat in candidates):
        factors.append("synsets")
    else:
        logger.warning("synsets missing for some beliefs; factor excluded")

    def factor_row(s: BeliefRankingScore, stat: BeliefStats) -> list[float]:
        row = [stat.sd, abs(stat.mean - medians[s.dimension])]
        if "log_frequency" in factors:
            row.append(float(stat.log_frequency))
        if "synsets" in factors:
            row.append(float(stat.synsets))
        return row

    x = np.array([factor_row(s, stat) for s, stat in candidates])
    successes = np.array([float(s.n_correct) for s, _ in candidates])
    trials = np.array([float(s.n_gated) for s, _ in candidates])

    def fit_params(idx: np.ndarray) -> np.ndarray:
        res = fit_binomial(x[idx], (successes[idx], trials[idx]), ridge=ridge)
        return np.concatenate([[res.intercept], res.coefficients])

    fit = fit_binomial(x, (successes, trials), ridge=ridge)
    param_cis = bootstrap_fit_cis(
        fit_params, x.shape[0], level=level, resamples=resamples, seed=seed
    )
    return FactorRegressionResult(
        factors=tuple(factors),
        fit=fit,
        coefficient_cis=tuple(param_cis[1:]),
        n_beliefs=len(candidates),
    )
