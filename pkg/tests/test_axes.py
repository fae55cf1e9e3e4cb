"""Tests for axis directions, position measures, and multiclass resolution."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from wordaxes.axes import (
    MEASURES,
    DimensionSpec,
    MulticlassSpec,
    build_direction,
    centroid_gap_position,
    cosine_position,
    get_measure,
    load_dimension_specs,
    prepare_model,
    projection_position,
    resolve_multiclass,
    score,
    set_cosine_gap,
    swinger_score,
)
from wordaxes.embeddings import EmbeddingModel
from wordaxes.errors import MeasurementError, ZeroVectorError
from wordaxes.evaluation import run_measurement
from wordaxes.stats import substream_rng
from wordaxes.synthetic import planted_axis_data


def model_from(words: dict[str, tuple]) -> EmbeddingModel:
    vocab = {w: i for i, w in enumerate(words)}
    return EmbeddingModel("adhoc", vocab, np.array([list(v) for v in words.values()], dtype=float))


# ---------------------------------------------------------------------------
# measure registry
# ---------------------------------------------------------------------------


def test_measure_registry():
    assert set(MEASURES) == {
        "ethayarajh",
        "kozlowski",
        "bolukbasi",
        "swinger",
        "garg",
        "ethayarajh+garg",
        "ethayarajh+kozlowski",
    }
    for m in MEASURES.values():
        assert m.requires_normalized == (not m.id.startswith("ethayarajh"))
    assert {m.id for m in MEASURES.values() if m.multiclass_native} == {"swinger", "garg"}
    with pytest.raises(ValueError, match="unknown measure"):
        get_measure("pca")


# ---------------------------------------------------------------------------
# build_direction
# ---------------------------------------------------------------------------


def test_mean_pair_difference_single_pair():
    model = model_from({"l": (1.0, 0.0), "r": (0.0, 1.0)})
    spec = DimensionSpec("d", ("l",), ("r",))
    direction = build_direction(spec, "mean-pair-difference", model)
    assert np.array_equal(direction.vector, [1.0, -1.0])


def test_centroids_are_pole_means():
    model = model_from({"a": (1.0, 0.0), "b": (3.0, 0.0), "r": (0.0, 1.0)})
    spec = DimensionSpec("d", ("a", "b"), ("r",))
    direction = build_direction(spec, "centroids", model)
    assert np.array_equal(direction.left_centroid, [2.0, 0.0])
    assert np.array_equal(direction.right_centroid, [0.0, 1.0])
    assert np.array_equal(direction.vector, [2.0, -1.0])


def test_swapping_poles_negates_mean_pair_difference():
    model = model_from({"l": (0.3, 0.8), "r": (-0.4, 0.1)})
    fwd = build_direction(DimensionSpec("d", ("l",), ("r",)), "mean-pair-difference", model)
    rev = build_direction(DimensionSpec("d", ("r",), ("l",)), "mean-pair-difference", model)
    assert np.array_equal(rev.vector, -fwd.vector)


def test_principal_component_orientation(tiny_model, tiny_spec):
    direction = build_direction(tiny_spec, "principal-component", tiny_model)
    lefts = np.vstack([tiny_model.row("l0"), tiny_model.row("l1")])
    rights = np.vstack([tiny_model.row("r0"), tiny_model.row("r1")])
    assert (lefts @ direction.vector).mean() > (rights @ direction.vector).mean()
    assert np.linalg.norm(direction.vector) == pytest.approx(1.0, abs=1e-12)


def test_unpaired_poles_truncate_with_warning(caplog):
    model = model_from({"l0": (1.0, 0.0), "l1": (0.9, 0.1), "r0": (-1.0, 0.0)})
    spec = DimensionSpec("d", ("l0", "l1"), ("r0",))
    with caplog.at_level(logging.WARNING, logger="wordaxes.axes"):
        direction = build_direction(spec, "mean-pair-difference", model)
    assert np.array_equal(direction.vector, [2.0, 0.0])
    assert any("pairing by index" in r.message for r in caplog.records)


def test_unresolvable_pair_dropped_with_warning(caplog):
    model = model_from({"l0": (1.0, 0.0), "r0": (-1.0, 0.0), "l1": (0.8, 0.0)})
    spec = DimensionSpec("d", ("l0", "l1"), ("r0", "gone"), pairs=(("l0", "r0"), ("l1", "gone")))
    with caplog.at_level(logging.WARNING, logger="wordaxes.axes"):
        direction = build_direction(spec, "mean-pair-difference", model)
    assert np.array_equal(direction.vector, [2.0, 0.0])
    assert any("dropping pair" in r.message for r in caplog.records)


def test_empty_pole_is_error():
    model = model_from({"l": (1.0, 0.0)})
    spec = DimensionSpec("d", ("l",), ("absent",))
    with pytest.raises(MeasurementError, match="no resolvable"):
        build_direction(spec, "centroids", model)


def test_degenerate_direction_is_error():
    model = model_from({"l": (1.0, 1.0), "r": (1.0, 1.0)})
    spec = DimensionSpec("d", ("l",), ("r",))
    with pytest.raises(ZeroVectorError, match="degenerate"):
        build_direction(spec, "mean-pair-difference", model)


def test_multiclass_spec_must_be_resolved_first():
    model = model_from({"a": (1.0, 0.0)})
    spec = DimensionSpec(
        "race",
        multiclass=MulticlassSpec(
            categories=(("A", ("a",)), ("B", ("b",))), default="A", contrast="B"
        ),
    )
    with pytest.raises(MeasurementError, match="resolve"):
        build_direction(spec, "centroids", model)


# ---------------------------------------------------------------------------
# position formulas
# ---------------------------------------------------------------------------


def test_projection_example():
    assert projection_position(np.array([2.0, 0.0]), np.array([1.0, 0.0])) == 2.0


def test_cosine_orthogonal_is_zero():
    assert cosine_position(np.array([0.0, 1.0]), np.array([1.0, 0.0])) == 0.0


def test_centroid_gap_symmetric_point_is_zero():
    w = np.array([0.0, 1.0])
    assert centroid_gap_position(w, np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == 0.0


def test_swinger_examples():
    model = model_from({"l": (1.0, 0.0), "r": (0.0, 1.0), "w": (1.0, 0.0)})
    spec = DimensionSpec("d", ("l",), ("r",))
    unit = model.unit()
    assert swinger_score("l", spec, unit) == pytest.approx(1.0, abs=1e-12)
    assert swinger_score("r", spec, unit) == pytest.approx(-1.0, abs=1e-12)
    s = 2.0 ** -0.5
    diag = model_from({"l": (1.0, 0.0), "r": (0.0, 1.0), "w": (s, s)}).unit()
    assert swinger_score("w", spec, diag) == pytest.approx(0.0, abs=1e-12)


def test_swinger_requires_normalized_model(tiny_model, tiny_spec):
    with pytest.raises(MeasurementError, match="normalized"):
        swinger_score("probe", tiny_spec, tiny_model)


def test_score_normalization_mismatch(tiny_model, tiny_spec):
    direction = build_direction(tiny_spec, "mean-pair-difference", tiny_model.unit())
    with pytest.raises(MeasurementError, match="normalized"):
        score("probe", "kozlowski", direction, tiny_model)
    raw_direction = build_direction(tiny_spec, "principal-component", tiny_model)
    with pytest.raises(MeasurementError, match="unnormalized"):
        score("probe", "ethayarajh", raw_direction, tiny_model.unit())


def test_score_oov_returns_none(tiny_model, tiny_spec):
    direction = build_direction(tiny_spec, "principal-component", tiny_model)
    assert score("unicorn", "ethayarajh", direction, tiny_model) is None


def test_prepare_model_rejects_normalized_for_raw_measures(tiny_model):
    assert prepare_model(tiny_model, "kozlowski").normalized
    assert prepare_model(tiny_model, "ethayarajh") is tiny_model
    with pytest.raises(MeasurementError, match="raw"):
        prepare_model(tiny_model.unit(), "ethayarajh")


# ---------------------------------------------------------------------------
# scale invariance / non-invariance
# ---------------------------------------------------------------------------


def test_scale_invariance_suite():
    rng = substream_rng(31)
    for _ in range(20):
        w = rng.standard_normal(6)
        b = rng.standard_normal(6)
        left = rng.standard_normal((3, 6))
        right = rng.standard_normal((3, 6))
        for c in (0.5, 3.0, 1e4):
            assert cosine_position(c * w, b) == pytest.approx(
                cosine_position(w, b), abs=1e-12
            )
            assert set_cosine_gap(c * w, left, right) == pytest.approx(
                set_cosine_gap(w, left, right), abs=1e-12
            )
            assert projection_position(c * w, b) == pytest.approx(
                c * projection_position(w, b), rel=1e-12
            )


def test_garg_scale_non_invariance_regression_case():
    b_left = np.array([1.0, 0.0])
    b_right = np.array([-1.0, 0.0])
    w = np.array([0.5, 1.0])
    base = centroid_gap_position(w, b_left, b_right)
    doubled = centroid_gap_position(2.0 * w, b_left, b_right)
    assert doubled != base
    assert doubled != 2.0 * base


def test_garg_monotone_in_centroid_difference_projection():
    # unit w restricted to span(delta, n) with n orthogonal to both centroids
    # keeps <w, b_l + b_r> fixed, where the gap score is strictly monotone
    rng = substream_rng(17)
    b_left = rng.standard_normal(5)
    b_right = rng.standard_normal(5)
    b_right *= np.linalg.norm(b_left) / np.linalg.norm(b_right)  # equal norms
    delta = b_left - b_right
    sigma = b_left + b_right
    n = rng.standard_normal(5)
    for basis in (sigma, delta):
        n -= (n @ basis) / (basis @ basis) * basis
    n /= np.linalg.norm(n)
    delta_hat = delta / np.linalg.norm(delta)

    angles = np.sort(rng.uniform(-1.4, 1.4, size=25))
    scores = []
    projections = []
    for t in angles:
        w = np.sin(t) * delta_hat + np.cos(t) * n
        scores.append(centroid_gap_position(w, b_left, b_right))
        projections.append(float(w @ (b_left - b_right)))
    assert all(a < b for a, b in zip(projections, projections[1:]))
    assert all(a < b for a, b in zip(scores, scores[1:]))


# ---------------------------------------------------------------------------
# antisymmetry under pole swap
# ---------------------------------------------------------------------------


def swapped(spec: DimensionSpec) -> DimensionSpec:
    return DimensionSpec(
        name=spec.name,
        left_words=spec.right_words,
        right_words=spec.left_words,
        pairs=tuple((b, a) for a, b in spec.pairs) if spec.pairs else None,
        wordset_source=spec.wordset_source,
    )


@pytest.mark.parametrize("measure", sorted(MEASURES))
def test_pole_swap_negates_scores(measure, tiny_model, tiny_spec):
    words = ["probe", "east", "north", "diag"]
    fwd = run_measurement(tiny_model, tiny_spec, measure, words)
    rev = run_measurement(tiny_model, swapped(tiny_spec), measure, words)
    exact = MEASURES[measure].direction_method != "principal-component"
    for w in words:
        if exact:
            assert rev.scores[w] == -fwd.scores[w]
        else:
            assert rev.scores[w] == pytest.approx(-fwd.scores[w], abs=1e-12)


# ---------------------------------------------------------------------------
# planted-axis ranking recovery
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_planted_axis_rank_recovery_all_measures(seed):
    data = planted_axis_data(seed=seed)
    truth = np.argsort([data.positions[i] for i in data.identities])
    for measure in sorted(MEASURES):
        run = run_measurement(data.model, data.spec, measure, data.identities)
        got = np.argsort([run.scores[i] for i in data.identities])
        assert np.array_equal(got, truth), measure


# ---------------------------------------------------------------------------
# multiclass resolution
# ---------------------------------------------------------------------------


RACE = DimensionSpec(
    "race",
    multiclass=MulticlassSpec(
        categories=(
            ("White", ("white",)),
            ("Hispanic", ("hispanic", "latino")),
            ("Asian", ("asian",)),
            ("MiddleEastern", ("arab",)),
            ("Black", ("black",)),
        ),
        default="White",
        contrast="Black",
    ),
)


def test_multiclass_default_pairing_for_pair_based_measures():
    specs = resolve_multiclass(RACE, "kozlowski")
    layout = [(s.name, s.left_words, s.right_words) for s in specs]
    assert layout == [
        ("White", ("white",), ("black",)),
        ("Hispanic", ("hispanic", "latino"), ("white",)),
        ("Asian", ("asian",), ("white",)),
        ("MiddleEastern", ("arab",), ("white",)),
        ("Black", ("black",), ("white",)),
    ]


def test_multiclass_default_category_uses_contrast():
    institutions = DimensionSpec(
        "institutions",
        multiclass=MulticlassSpec(
            categories=(("family", ("family",)), ("politics", ("politics",)),
                        ("justice", ("justice",))),
            default="family",
            contrast="politics",
        ),
    )
    specs = resolve_multiclass(institutions, "bolukbasi")
    family = next(s for s in specs if s.name == "family")
    assert family.left_words == ("family",)
    assert family.right_words == ("politics",)


def test_multiclass_one_vs_rest_for_native_measures():
    specs = resolve_multiclass(RACE, "garg")
    assert len(specs) == 5
    hispanic = next(s for s in specs if s.name == "Hispanic")
    assert hispanic.left_words == ("hispanic", "latino")
    assert hispanic.right_words == ("white", "asian", "arab", "black")


def test_resolve_multiclass_requires_block(tiny_spec):
    with pytest.raises(ValueError, match="no multiclass"):
        resolve_multiclass(tiny_spec, "garg")


def test_multiclass_validation():
    with pytest.raises(ValueError, match="must differ"):
        MulticlassSpec(categories=(("A", ("a",)),), default="A", contrast="A")
    with pytest.raises(ValueError, match="not listed"):
        MulticlassSpec(categories=(("A", ("a",)),), default="A", contrast="Z")
    with pytest.raises(ValueError, match="no words"):
        MulticlassSpec(categories=(("A", ()), ("B", ("b",))), default="A", contrast="B")


# ---------------------------------------------------------------------------
# spec files and validation
# ---------------------------------------------------------------------------


def test_dimension_spec_validation():
    with pytest.raises(ValueError, match="nonempty"):
        DimensionSpec("d", ("l",), ())
    with pytest.raises(ValueError, match="wordset source"):
        DimensionSpec("d", ("l",), ("r",), wordset_source="guesswork")
    with pytest.raises(ValueError, match="not both"):
        DimensionSpec(
            "d",
            ("l",),
            ("r",),
            multiclass=MulticlassSpec(
                categories=(("A", ("a",)), ("B", ("b",))), default="A", contrast="B"
            ),
        )


def test_bundled_dimension_file_loads():
    from importlib.resources import files

    specs = load_dimension_specs(files("wordaxes").joinpath("data/dimensions.json"))
    names = [(s.name, s.wordset_source) for s in specs]
    assert ("gender", "survey-matched") in names
    assert ("gender", "prior-work") in names
    race = next(s for s in specs if s.name == "race")
    assert race.multiclass.default == "White"
    assert race.multiclass.contrast == "Black"
    institutions = next(s for s in specs if s.name == "institutions")
    assert institutions.multiclass.default == "family"
    evaluation = next(
        s for s in specs if s.name == "evaluation" and s.wordset_source == "survey-matched"
    )
    assert evaluation.left_words == ("bad", "awful")
    assert evaluation.right_words == ("good", "nice")


def test_malformed_dimension_file(tmp_path):
    bad = tmp_path / "dims.json"
    bad.write_text('{"dimensions": [{"left": ["a"], "right": ["b"]}]}')
    with pytest.raises(ValueError, match="missing 'name'"):
        load_dimension_specs(bad)
    bad.write_text('{"dimensions": []}')
    with pytest.raises(ValueError, match="nonempty"):
        load_dimension_specs(bad)
