"""Axis directions and word-position measures.

A dimension of social meaning is specified by two pole word lists (the
dimension-inducing word sets).  A direction-specification method turns the
poles into a concrete axis, and a position measure maps a word vector to a
scalar along that axis.  Seven measures are provided; by convention every one
of them scores higher the closer a word sits to the LEFT pole.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingModel, lookup
from .errors import MeasurementError, ZeroVectorError
from .stats import first_principal_component

logger = logging.getLogger(__name__)

WORDSET_SOURCES = ("survey-matched", "survey-augmented", "prior-work")

METHOD_MEAN_PAIR_DIFFERENCE = "mean-pair-difference"
METHOD_PRINCIPAL_COMPONENT = "principal-component"
METHOD_CENTROIDS = "centroids"
DIRECTION_METHODS = (
    METHOD_MEAN_PAIR_DIFFERENCE,
    METHOD_PRINCIPAL_COMPONENT,
    METHOD_CENTROIDS,
)


@dataclass(frozen=True)
class MulticlassSpec:
    """Category word lists for a dimension with more than two categories.

    ``default`` names the category every other category is paired against
    under pair-based measures; the default itself is measured against
    ``contrast``.
    """

    categories: tuple[tuple[str, tuple[str, ...]], ...]
    default: str
    contrast: str

    def __post_init__(self):
        cats = tuple((str(n), tuple(ws)) for n, ws in self.categories)
        object.__setattr__(self, "categories", cats)
        names = [n for n, _ in cats]
        if len(set(names)) != len(names):
            raise ValueError("duplicate multiclass category names")
        for n, ws in cats:
            if not ws:
                raise ValueError(f"multiclass category '{n}' has no words")
        if self.default == self.contrast:
            raise ValueError("multiclass default and contrast categories must differ")
        for role, cat in (("default", self.default), ("contrast", self.contrast)):
            if cat not in names:
                raise ValueError(f"multiclass {role} category '{cat}' is not listed")

    @property
    def category_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.categories)

    def words_for(self, category: str) -> tuple[str, ...]:
        for n, ws in self.categories:
            if n == category:
                return ws
        raise KeyError(category)


@dataclass(frozen=True)
class DimensionSpec:
    """A named dimension plus its dimension-inducing word sets.

    Pole convention: the right pole is the high end of the survey scale
    (good, powerful, female, old); the left pole is the low end.  Explicit
    ``pairs`` override index pairing for pair-based direction methods.  A
    ``multiclass`` block replaces the poles and must be resolved to binary
    specs before measuring.
    """

    name: str
    left_words: tuple[str, ...] = ()
    right_words: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] | None = None
    wordset_source: str = "survey-matched"
    multiclass: MulticlassSpec | None = None
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "left_words", tuple(self.left_words))
        object.__setattr__(self, "right_words", tuple(self.right_words))
        if self.pairs is not None:
            object.__setattr__(
                self, "pairs", tuple((str(a), str(b)) for a, b in self.pairs)
            )
        if self.wordset_source not in WORDSET_SOURCES:
            raise ValueError(
                f"unknown wordset source {self.wordset_source!r}; "
                f"expected one of {WORDSET_SOURCES}"
            )
        if self.multiclass is None:
            if not self.left_words or not self.right_words:
                raise ValueError(f"dimension '{self.name}': both poles must be nonempty")
        elif self.left_words or self.right_words:
            raise ValueError(
                f"dimension '{self.name}': give either poles or a multiclass block, not both"
            )


@dataclass(frozen=True)
class PositionMeasure:
    """One word-position measurement model.

    ``requires_normalized`` records whether the measure operates on a
    unit-normalized model (false only for the projection-based family).
    ``direction_method`` is None for the set-based measure that keeps word
    sets instead of a direction vector.
    """

    id: str
    requires_normalized: bool
    direction_method: str | None
    multiclass_native: bool


MEASURES: dict[str, PositionMeasure] = {
    m.id: m
    for m in (
        PositionMeasure("ethayarajh", False, METHOD_PRINCIPAL_COMPONENT, False),
        PositionMeasure("kozlowski", True, METHOD_MEAN_PAIR_DIFFERENCE, False),
        PositionMeasure("bolukbasi", True, METHOD_PRINCIPAL_COMPONENT, False),
        PositionMeasure("swinger", True, None, True),
        PositionMeasure("garg", True, METHOD_CENTROIDS, True),
        PositionMeasure("ethayarajh+garg", False, METHOD_CENTROIDS, False),
        PositionMeasure("ethayarajh+kozlowski", False, METHOD_MEAN_PAIR_DIFFERENCE, False),
    )
}


def get_measure(measure: str | PositionMeasure) -> PositionMeasure:
    if isinstance(measure, PositionMeasure):
        return measure
    try:
        return MEASURES[measure]
    except KeyError:
        raise ValueError(
            f"unknown measure {measure!r}; expected one of {sorted(MEASURES)}"
        ) from None


@dataclass(frozen=True, eq=False)
class AxisDirection:
    """A concrete direction for one dimension under one direction method.

    ``vector`` points toward the left pole.  For the centroids method the
    per-pole average vectors are kept as well and ``vector`` is their
    difference.
    """

    dimension: DimensionSpec
    method: str
    vector: np.ndarray
    left_centroid: np.ndarray | None = None
    right_centroid: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Pole resolution
# ---------------------------------------------------------------------------


def _resolve_pole(
    model: EmbeddingModel, words: tuple[str, ...], pole: str, dimension: str
) -> np.ndarray:
    vectors = []
    missing = []
    for w in words:
        wv = lookup(model, w)
        if wv is None:
            missing.append(w)
        else:
            vectors.append(wv.values)
    if missing:
        logger.warning(
            "dimension '%s': %s pole words missing from '%s': %s",
            dimension,
            pole,
            model.name,
            ", ".join(missing),
        )
    if not vectors:
        raise MeasurementError(
            f"dimension '{dimension}': no resolvable words in the {pole} pole "
            f"for model '{model.name}'"
        )
    return np.vstack(vectors)


def _resolve_pairs(spec: DimensionSpec, model: EmbeddingModel) -> tuple[np.ndarray, np.ndarray]:
    """Left/right vector matrices for paired direction methods, one row per pair."""
    if spec.pairs is not None:
        word_pairs = list(spec.pairs)
    else:
        if len(spec.left_words) != len(spec.right_words):
            logger.warning(
                "dimension '%s': unpaired poles of length %d and %d; "
                "pairing by index after truncation",
                spec.name,
                len(spec.left_words),
                len(spec.right_words),
            )
        word_pairs = list(zip(spec.left_words, spec.right_words))

    lefts, rights = [], []
    for lw, rw in word_pairs:
        lv = lookup(model, lw)
        rv = lookup(model, rw)
        if lv is None or rv is None:
            logger.warning(
                "dimension '%s': dropping pair (%s, %s); missing from '%s'",
                spec.name,
                lw,
                rw,
                model.name,
            )
            continue
        lefts.append(lv.values)
        rights.append(rv.values)
    if not lefts:
        raise MeasurementError(
            f"dimension '{spec.name}': no resolvable word pairs for model '{model.name}'"
        )
    return np.vstack(lefts), np.vstack(rights)


# ---------------------------------------------------------------------------
# Direction building
# ---------------------------------------------------------------------------


def build_direction(
    spec: DimensionSpec, method: str, model: EmbeddingModel
) -> AxisDirection:
    """Build an axis for ``spec`` with one of the three direction methods.

    mean-pair-difference averages (left_i - right_i) over pairs;
    principal-component takes the dominant direction of the pair-centered
    pole vectors, sign-oriented so left-pole words project higher;
    centroids averages each pole separately.
    """
    if spec.multiclass is not None:
        raise MeasurementError(
            f"dimension '{spec.name}' is multiclass; resolve it to binary axes first"
        )
    if method not in DIRECTION_METHODS:
        raise ValueError(f"unknown direction method {method!r}")

    left_centroid = right_centroid = None
    if method == METHOD_MEAN_PAIR_DIFFERENCE:
        lefts, rights = _resolve_pairs(spec, model)
        vector = (lefts - rights).mean(axis=0)
    elif method == METHOD_PRINCIPAL_COMPONENT:
        lefts, rights = _resolve_pairs(spec, model)
        mid = 0.5 * (lefts + rights)
        centered = np.vstack([lefts - mid, rights - mid])
        vector = first_principal_component(centered)
        if float((lefts @ vector).mean()) < float((rights @ vector).mean()):
            vector = -vector
    else:
        left_centroid = _resolve_pole(model, spec.left_words, "left", spec.name).mean(axis=0)
        right_centroid = _resolve_pole(model, spec.right_words, "right", spec.name).mean(
            axis=0
        )
        vector = left_centroid - right_centroid

    if float(np.linalg.norm(vector)) < 1e-12:
        raise ZeroVectorError(
            f"dimension '{spec.name}': degenerate direction (norm < 1e-12)"
        )
    return AxisDirection(spec, method, vector, left_centroid, right_centroid)


# ---------------------------------------------------------------------------
# Position formulas (pure vector math; scoring ops wrap these)
# ---------------------------------------------------------------------------


def projection_position(w: np.ndarray, b: np.ndarray) -> float:
    return float(w @ b) / float(np.linalg.norm(b))


def cosine_position(w: np.ndarray, b: np.ndarray) -> float:
    return float(w @ b) / (float(np.linalg.norm(b)) * float(np.linalg.norm(w)))


def centroid_gap_position(w: np.ndarray, b_left: np.ndarray, b_right: np.ndarray) -> float:
    return float(np.linalg.norm(w - b_right)) - float(np.linalg.norm(w - b_left))


def set_cosine_gap(w: np.ndarray, left_rows: np.ndarray, right_rows: np.ndarray) -> float:
    wn = float(np.linalg.norm(w))
    left = left_rows @ w / (np.linalg.norm(left_rows, axis=1) * wn)
    right = right_rows @ w / (np.linalg.norm(right_rows, axis=1) * wn)
    return float(left.mean() - right.mean())


# ---------------------------------------------------------------------------
# Scoring operations
# ---------------------------------------------------------------------------


def prepare_model(model: EmbeddingModel, measure: str | PositionMeasure) -> EmbeddingModel:
    """The model variant a measure operates on.

    Measures that require normalization get a cached unit-normalized copy;
    measures that require raw vectors reject a model that has already been
    normalized, because the original magnitudes are gone.
    """
    m = get_measure(measure)
    if m.requires_normalized:
        return model.unit()
    if model.normalized:
        raise MeasurementError(
            f"measure '{m.id}' requires raw (unnormalized) vectors but model "
            f"'{model.name}' is normalized"
        )
    return model


def score(
    word: str,
    measure: str | PositionMeasure,
    direction: AxisDirection,
    model: EmbeddingModel,
) -> float | None:
    """Position of ``word`` on an axis; None when the word is out of vocabulary.

    Higher scores mean closer to the left pole under every measure.  The
    model's normalization state must match the measure's requirement.
    """
    m = get_measure(measure)
    if m.id == "swinger":
        raise ValueError("the set-based measure has no direction; use swinger_score")
    if model.normalized != m.requires_normalized:
        state = "normalized" if m.requires_normalized else "unnormalized"
        raise MeasurementError(
            f"measure '{m.id}' requires a {state} model, got the opposite"
        )
    wv = lookup(model, word)
    if wv is None:
        return None
    if m.id in ("kozlowski", "bolukbasi"):
        return cosine_position(wv.values, direction.vector)
    if m.id == "garg":
        return centroid_gap_position(
            wv.values, direction.left_centroid, direction.right_centroid
        )
    return projection_position(wv.values, direction.vector)


def resolve_pole_rows(
    spec: DimensionSpec, model: EmbeddingModel
) -> tuple[np.ndarray, np.ndarray]:
    """Resolved (left, right) pole vector matrices for set-based scoring.

    Resolve once and reuse when scoring many words; each call re-warns about
    unresolvable pole words.
    """
    if spec.multiclass is not None:
        raise MeasurementError(
            f"dimension '{spec.name}' is multiclass; resolve it to binary axes first"
        )
    return (
        _resolve_pole(model, spec.left_words, "left", spec.name),
        _resolve_pole(model, spec.right_words, "right", spec.name),
    )


def swinger_score(
    word: str, spec: DimensionSpec, model: EmbeddingModel
) -> float | None:
    """Mean cosine to the left-pole words minus mean cosine to the right-pole words."""
    if not model.normalized:
        raise MeasurementError("the set-based measure operates on a normalized model")
    left_rows, right_rows = resolve_pole_rows(spec, model)
    wv = lookup(model, word)
    if wv is None:
        return None
    return set_cosine_gap(wv.values, left_rows, right_rows)


# ---------------------------------------------------------------------------
# Multiclass resolution
# ---------------------------------------------------------------------------


def resolve_multiclass(
    spec: DimensionSpec, measure: str | PositionMeasure
) -> list[DimensionSpec]:
    """Reduce a multiclass dimension to binary axes, one per category.

    Pair-based measures pair each category against the default category, and
    the default category against its designated contrast.  Natively
    multiclass measures get one-vs-rest axes instead.  Resolved specs take
    the category name as their dimension name.
    """
    m = get_measure(measure)
    if spec.multiclass is None:
        raise ValueError(f"dimension '{spec.name}' has no multiclass block")
    mc = spec.multiclass

    resolved = []
    for category, words in mc.categories:
        if m.multiclass_native:
            rest: list[str] = []
            for other, other_words in mc.categories:
                if other != category:
                    rest.extend(other_words)
            right = tuple(rest)
        elif category == mc.default:
            right = mc.words_for(mc.contrast)
        else:
            right = mc.words_for(mc.default)
        resolved.append(
            DimensionSpec(
                name=category,
                left_words=words,
                right_words=right,
                wordset_source=spec.wordset_source,
                notes=f"resolved from multiclass dimension '{spec.name}'",
            )
        )
    return resolved


# ---------------------------------------------------------------------------
# Dimension-spec files
# ---------------------------------------------------------------------------


def load_dimension_specs(path) -> list[DimensionSpec]:
    """Load dimension specs from a JSON file.

    The file holds ``{"dimensions": [...]}`` where each entry has ``name``,
    either ``left``/``right`` word lists (with optional ``pairs``) or a
    ``multiclass`` block (``categories`` mapping, ``default``, ``contrast``),
    plus optional ``source`` and ``notes``.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    entries = payload.get("dimensions")
    if not isinstance(entries, list) or not entries:
        raise ValueError(f"{path}: expected a nonempty 'dimensions' list")

    specs = []
    for i, entry in enumerate(entries):
        where = f"{path}: dimensions[{i}]"
        try:
            name = entry["name"]
        except (TypeError, KeyError):
            raise ValueError(f"{where}: missing 'name'") from None
        multiclass = None
        if "multiclass" in entry:
            block = entry["multiclass"]
            try:
                multiclass = MulticlassSpec(
                    categories=tuple(
                        (cat, tuple(words)) for cat, words in block["categories"].items()
                    ),
                    default=block["default"],
                    contrast=block["contrast"],
                )
            except (TypeError, KeyError, ValueError) as exc:
                raise ValueError(f"{where}: bad multiclass block: {exc}") from None
        pairs = entry.get("pairs")
        try:
            specs.append(
                DimensionSpec(
                    name=name,
                    left_words=tuple(entry.get("left", ())),
                    right_words=tuple(entry.get("right", ())),
                    pairs=tuple((a, b) for a, b in pairs) if pairs else None,
                    wordset_source=entry.get("source", "survey-matched"),
                    multiclass=multiclass,
                    notes=entry.get("notes", ""),
                )
            )
        except ValueError as exc:
            raise ValueError(f"{where}: {exc}") from None
    return specs
