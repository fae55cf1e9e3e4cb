"""Parsing, writing, and in-memory handling of text word-embedding files.

Supports the two common whitespace-separated text layouts: word2vec-style
files with a leading ``<count> <dim>`` header and headerless GloVe-style
files.  Vectors are always parsed as float64.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .errors import EmbeddingParseError, ZeroVectorError

logger = logging.getLogger(__name__)

FORMAT_WORD2VEC = "word2vec-text"
FORMAT_GLOVE = "glove-text"
FORMAT_AUTO = "auto"
FORMATS = (FORMAT_WORD2VEC, FORMAT_GLOVE, FORMAT_AUTO)


@dataclass(frozen=True, eq=False)
class WordVector:
    """One vocabulary entry: the vocabulary word that resolved and its row."""

    word: str
    values: np.ndarray


class EmbeddingModel:
    """Immutable vocabulary-to-vector matrix for one corpus/algorithm combination.

    The matrix is float64 and marked read-only, and the vocabulary mapping is
    exposed through a read-only proxy, so a model can be shared freely across
    threads after construction.
    """

    def __init__(self, name: str, vocab: dict[str, int], matrix, normalized: bool = False):
        mat = np.ascontiguousarray(matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError(f"matrix must be 2-d, got shape {mat.shape}")
        if len(vocab) != mat.shape[0]:
            raise ValueError(
                f"vocab size {len(vocab)} does not match row count {mat.shape[0]}"
            )
        if sorted(vocab.values()) != list(range(mat.shape[0])):
            raise ValueError("vocab must map words to the row indices 0..n-1 exactly once")
        if not np.all(np.isfinite(mat)):
            raise ValueError("matrix contains non-finite values")
        if normalized:
            norms = np.linalg.norm(mat, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise ValueError("normalized flag set but some rows are not unit norm")
        mat.setflags(write=False)
        self._name = name
        self._vocab = dict(vocab)
        self._matrix = mat
        self._normalized = bool(normalized)
        self._unit_variant: EmbeddingModel | None = None

    @property
    def name(self) -> str:
        return self._name

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def vocab(self):
        return MappingProxyType(self._vocab)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def normalized(self) -> bool:
        return self._normalized

    def __len__(self) -> int:
        return self._matrix.shape[0]

    def __contains__(self, word: str) -> bool:
        return word in self._vocab

    def __repr__(self) -> str:
        return (
            f"EmbeddingModel(name={self._name!r}, words={len(self)}, dim={self.dim}, "
            f"normalized={self._normalized})"
        )

    def row(self, word: str) -> np.ndarray:
        """Exact-match row for ``word``; raises KeyError on miss."""
        return self._matrix[self._vocab[word]]

    def unit(self) -> "EmbeddingModel":
        """This model if already normalized, else a cached unit-normalized copy.

        The lazy cache may be computed twice under a benign race; both results
        are identical.
        """
        if self._normalized:
            return self
        if self._unit_variant is None:
            self._unit_variant = unit_normalize(self)
        return self._unit_variant


def resolve(model: EmbeddingModel, word: str) -> tuple[str | None, str]:
    """Resolve a query word to a vocabulary entry.

    Tries exact match, then the casefolded form, then the casefolded form with
    spaces replaced by underscores (for multiword identities in concept-style
    vocabularies).  Returns ``(vocab_word, how)`` where ``how`` is one of
    ``exact``, ``casefold``, ``underscore``, or ``missing``.
    """
    if word in model.vocab:
        return word, "exact"
    folded = word.casefold()
    if folded in model.vocab:
        return folded, "casefold"
    underscored = folded.replace(" ", "_")
    if underscored in model.vocab:
        return underscored, "underscore"
    return None, "missing"


def lookup(model: EmbeddingModel, word: str) -> WordVector | None:
    """Look up a word with the :func:`resolve` fallback chain; None if absent."""
    resolved, _ = resolve(model, word)
    if resolved is None:
        return None
    return WordVector(resolved, model.row(resolved))


def unit_normalize(model: EmbeddingModel) -> EmbeddingModel:
    """New model with every row divided by its Euclidean norm.

    Idempotent: a model already flagged normalized is returned as-is.  Any
    zero-norm row is rejected with the offending word named.
    """
    if model.normalized:
        return model
    norms = np.linalg.norm(model.matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        index_to_word = {i: w for w, i in model.vocab.items()}
        raise ZeroVectorError(
            f"cannot normalize zero-norm row for word '{index_to_word[int(zero[0])]}'"
        )
    return EmbeddingModel(
        model.name, dict(model.vocab), model.matrix / norms[:, None], normalized=True
    )


def _looks_like_header(tokens: list[str]) -> bool:
    if len(tokens) != 2:
        return False
    try:
        int(tokens[0])
        int(tokens[1])
    except ValueError:
        return False
    return True


def load_embeddings(
    path, format_hint: str = FORMAT_AUTO, name: str | None = None
) -> EmbeddingModel:
    """Parse a text embedding file into an :class:`EmbeddingModel`.

    In ``auto`` mode a first line of exactly two integer tokens is treated as
    a word2vec-style count/dim header; otherwise the dimension is inferred
    from the first data line.  Duplicate words keep their first occurrence
    with a warning.  Inconsistent column counts and non-numeric values fail
    with the offending line number.
    """
    if format_hint not in FORMATS:
        raise ValueError(f"unknown format hint {format_hint!r}; expected one of {FORMATS}")
    path = Path(path)
    model_name = name if name is not None else path.stem

    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    declared_count: int | None = None

    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if line_no == 1:
                if format_hint == FORMAT_WORD2VEC:
                    if not _looks_like_header(tokens):
                        raise EmbeddingParseError(
                            f"{path}: line 1: expected a '<count> <dim>' header"
                        )
                    declared_count, dim = int(tokens[0]), int(tokens[1])
                    continue
                if format_hint == FORMAT_AUTO and _looks_like_header(tokens):
                    declared_count, dim = int(tokens[0]), int(tokens[1])
                    continue
            word, values = tokens[0], tokens[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise EmbeddingParseError(f"{path}: line {line_no}: no vector values")
            elif len(values) != dim:
                raise EmbeddingParseError(
                    f"{path}: line {line_no}: inconsistent column count "
                    f"(expected {dim} values, got {len(values)})"
                )
            try:
                vec = np.array(values, dtype=np.float64)
            except ValueError:
                raise EmbeddingParseError(
                    f"{path}: line {line_no}: non-numeric value"
                ) from None
            if not np.all(np.isfinite(vec)):
                raise EmbeddingParseError(f"{path}: line {line_no}: non-finite value")
            if word in vocab:
                logger.warning(
                    "%s: line %d: duplicate word '%s'; keeping first occurrence",
                    path,
                    line_no,
                    word,
                )
                continue
            vocab[word] = len(rows)
            rows.append(vec)

    if not rows:
        raise EmbeddingParseError(f"{path}: empty file (no data rows)")
    if declared_count is not None and declared_count != len(rows):
        logger.warning(
            "%s: header declares %d words but %d rows were parsed",
            path,
            declared_count,
            len(rows),
        )
    return EmbeddingModel(model_name, vocab, np.vstack(rows), normalized=False)


def save_embeddings(model: EmbeddingModel, path, file_format: str = FORMAT_GLOVE) -> None:
    """Write a model back to text, round-trippable bit-exactly via ``repr`` floats."""
    if file_format not in (FORMAT_WORD2VEC, FORMAT_GLOVE):
        raise ValueError(f"cannot write format {file_format!r}")
    path = Path(path)
    words = sorted(model.vocab, key=model.vocab.__getitem__)
    with open(path, "w", encoding="utf-8") as fh:
        if file_format == FORMAT_WORD2VEC:
            fh.write(f"{len(model)} {model.dim}\n")
        for word in words:
            values = " ".join(repr(float(v)) for v in model.row(word))
            fh.write(f"{word} {values}\n")
