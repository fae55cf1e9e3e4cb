"""Shared fixtures: a tiny handcrafted model, the planted-axis dataset, and a
complete runnable CLI fixture directory."""

from __future__ import annotations

import json

import numpy as np
import pytest

from wordaxes.axes import DimensionSpec
from wordaxes.embeddings import EmbeddingModel, save_embeddings
from wordaxes.stats import substream_rng
from wordaxes.survey import save_survey
from wordaxes.synthetic import PlantedAxisData, planted_axis_data


@pytest.fixture
def tiny_model() -> EmbeddingModel:
    """2-d model with hand-placed pole words and probe words."""
    words = {
        "l0": (1.0, 0.1),
        "l1": (0.9, -0.1),
        "r0": (-1.0, 0.1),
        "r1": (-0.9, -0.1),
        "probe": (0.5, 0.5),
        "east": (1.0, 0.0),
        "north": (0.0, 1.0),
        "diag": (1.0, 1.0),
    }
    vocab = {w: i for i, w in enumerate(words)}
    matrix = np.array(list(words.values()))
    return EmbeddingModel("tiny", vocab, matrix)


@pytest.fixture
def tiny_spec() -> DimensionSpec:
    return DimensionSpec(
        name="axis",
        left_words=("l0", "l1"),
        right_words=("r0", "r1"),
        pairs=(("l0", "r0"), ("l1", "r1")),
    )


@pytest.fixture(scope="session")
def planted() -> PlantedAxisData:
    return planted_axis_data(seed=0)


def write_planted_labeling(data: PlantedAxisData, path, n_questions=40, seed=2) -> None:
    """Deterministic labeling data: the closest survey mean wins."""
    means = {r.identity: r.mean for r in data.survey}
    rng = substream_rng(seed)
    identities = list(data.identities)
    lines = [
        "question_id,question_type,question_identity,answer_1,answer_2,answer_3,answer_4,selected"
    ]
    for q in range(n_questions):
        qtype = "IsA" if q % 2 == 0 else "SeenWith"
        question = identities[int(rng.integers(len(identities)))]
        others = [i for i in identities if i != question]
        rng.shuffle(others)
        answers = others[:4]
        if q % 10 == 9:
            chosen = "all-equally-unlikely"
        else:
            chosen = min(answers, key=lambda a: abs(means[a] - means[question]))
        lines.append(f"q{q:03d},{qtype},{question},{','.join(answers)},{chosen}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_planted_workdir(root, seed=1, config_seed=11) -> None:
    """Write a complete runnable fixture directory around the planted-axis data."""
    data = planted_axis_data(seed=seed)
    save_embeddings(data.model, root / "vectors.txt", "word2vec-text")
    save_survey(list(data.survey), root / "survey.csv")
    write_planted_labeling(data, root / "labeling.csv")
    spec = {
        "dimensions": [
            {
                "name": data.spec.name,
                "left": list(data.spec.left_words),
                "right": list(data.spec.right_words),
                "pairs": [list(p) for p in data.spec.pairs],
                "source": data.spec.wordset_source,
            }
        ]
    }
    (root / "dimensions.json").write_text(json.dumps(spec), encoding="utf-8")
    (root / "config.toml").write_text(
        f"""
seed = {config_seed}
out = "out"
dimensions = "dimensions.json"
labeling = "labeling.csv"

[[embeddings]]
name = "planted"
path = "vectors.txt"
format = "word2vec-text"

[[surveys]]
name = "planted-survey"
path = "survey.csv"
schema = "this-paper"

[options]
bootstrap_resamples = 100
""",
        encoding="utf-8",
    )


@pytest.fixture
def planted_workdir(tmp_path):
    build_planted_workdir(tmp_path)
    return tmp_path
