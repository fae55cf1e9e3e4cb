"""Synthetic fixtures with a planted axis, for tests and demos.

Words are placed at ``mu + s * b + eps`` for a random unit direction ``b``, a
base point ``mu`` orthogonal to it, and small noise ``eps``.  Pole words sit
at ``s = +1`` (left) and ``s = -1`` (right); identities get evenly spaced
planted coordinates.  The companion survey assigns means that increase with
the planted coordinate, so a faithful measure correlates positively with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axes import DimensionSpec
from .embeddings import EmbeddingModel
from .stats import substream_rng
from .survey import BeliefStats


@dataclass(frozen=True, eq=False)
class PlantedAxisData:
    """A toy embedding model with known per-identity axis positions."""

    model: EmbeddingModel
    spec: DimensionSpec
    identities: tuple[str, ...]
    positions: dict[str, float]
    survey: tuple[BeliefStats, ...]


def _noise(rng: np.random.Generator, dim: int, scale: float) -> np.ndarray:
    g = rng.standard_normal(dim)
    return g * (scale / float(np.linalg.norm(g)))


def planted_axis_data(
    n_identities: int = 20,
    dim: int = 16,
    n_pairs: int = 4,
    seed: int = 0,
    noise: float = 0.01,
    spread: float = 1.0,
    name: str = "planted",
) -> PlantedAxisData:
    """Build a model, dimension spec, and survey with a known planted axis.

    ``noise`` bounds the Euclidean norm of each word's off-axis perturbation;
    with the default spread the planted coordinates are separated widely
    enough that every measure must reproduce their ranking exactly.
    """
    rng = substream_rng(seed, 7)
    b = rng.standard_normal(dim)
    b /= np.linalg.norm(b)
    mu = rng.standard_normal(dim)
    mu -= (mu @ b) * b
    mu /= np.linalg.norm(mu)

    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []

    def add(word: str, vector: np.ndarray) -> None:
        vocab[word] = len(rows)
        rows.append(vector)

    left_words = tuple(f"{name}_l{i}" for i in range(n_pairs))
    right_words = tuple(f"{name}_r{i}" for i in range(n_pairs))
    for word in left_words:
        add(word, mu + b + _noise(rng, dim, noise))
    for word in right_words:
        add(word, mu - b + _noise(rng, dim, noise))

    identities = tuple(f"id{i:02d}" for i in range(n_identities))
    coords = np.linspace(-0.5 * spread, 0.5 * spread, n_identities)
    positions = {}
    for word, s in zip(identities, coords):
        add(word, mu + s * b + _noise(rng, dim, noise))
        positions[word] = float(s)

    for i in range(5):
        add(f"filler{i}", rng.standard_normal(dim))

    model = EmbeddingModel(name, vocab, np.vstack(rows), normalized=False)
    spec = DimensionSpec(
        name=name,
        left_words=left_words,
        right_words=right_words,
        pairs=tuple(zip(left_words, right_words)),
        wordset_source="survey-matched",
        notes="synthetic planted axis",
    )

    survey = []
    for word, s in positions.items():
        mean = 0.5 + 0.84 * (s / spread)
        survey.append(
            BeliefStats(
                identity=word,
                dimension=name,
                mean=mean,
                sd=0.05,
                n=15,
                se=0.05 / np.sqrt(15),
                log_frequency=float(rng.uniform(2.0, 6.0)),
                synsets=int(rng.integers(1, 10)),
            )
        )
    return PlantedAxisData(model, spec, identities, positions, tuple(survey))
