"""scikit-learn compatible estimators wrapping the scoring and GLM kernels.

These exist so the measurement core composes with the wider ecosystem
(pipelines, ``clone``, ``get_params``/``set_params``); the underlying math
lives in :mod:`wordaxes.axes` and :mod:`wordaxes.stats`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .axes import (
    DimensionSpec,
    build_direction,
    get_measure,
    prepare_model,
    resolve_pole_rows,
    score,
    set_cosine_gap,
)
from .embeddings import EmbeddingModel, lookup
from .stats import fit_binomial
from .validation import as_matrix


class AxisScorer(BaseEstimator):
    """Score words along one dimension of meaning.

    Parameters
    ----------
    dimension : DimensionSpec
        Binary dimension (multiclass specs must be resolved first).
    measure : str
        One of the registered position measures.
    on_missing : {"nan", "error"}
        What to do with out-of-vocabulary words at transform time.

    ``fit`` takes an :class:`EmbeddingModel` and learns the axis direction
    from the dimension-inducing word sets (normalizing a model copy when the
    measure needs it); ``transform`` maps an iterable of words to a 1-d array
    of positions, higher meaning closer to the left pole.  There is no
    ``fit_transform``: fit consumes a model, transform consumes words.
    """

    def __init__(self, dimension: DimensionSpec | None = None, measure: str = "kozlowski",
                 on_missing: str = "nan"):
        self.dimension = dimension
        self.measure = measure
        self.on_missing = on_missing

    def fit(self, X: EmbeddingModel, y=None):
        if not isinstance(X, EmbeddingModel):
            raise TypeError("fit expects an EmbeddingModel")
        if self.dimension is None:
            raise ValueError("dimension must be set before fitting")
        if self.on_missing not in ("nan", "error"):
            raise ValueError("on_missing must be 'nan' or 'error'")
        measure = get_measure(self.measure)
        model = prepare_model(X, measure)
        self.model_ = model
        self.measure_ = measure
        if measure.direction_method is not None:
            self.direction_ = build_direction(self.dimension, measure.direction_method, model)
            self.pole_rows_ = None
        else:
            self.direction_ = None
            self.pole_rows_ = resolve_pole_rows(self.dimension, model)
        return self

    def _score_word(self, word: str) -> float | None:
        if self.pole_rows_ is not None:
            wv = lookup(self.model_, word)
            if wv is None:
                return None
            return set_cosine_gap(wv.values, *self.pole_rows_)
        return score(word, self.measure_, self.direction_, self.model_)

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise NotFittedError("AxisScorer is not fitted yet")
        words = list(X)
        out = np.empty(len(words), dtype=np.float64)
        for i, word in enumerate(words):
            value = self._score_word(word)
            if value is None:
                if self.on_missing == "error":
                    raise KeyError(f"word {word!r} not in vocabulary of '{self.model_.name}'")
                value = np.nan
            out[i] = value
        return out


class BinomialGLM(BaseEstimator):
    """Ridge-penalized binomial regression with a logit link, fitted by IRLS.

    Accepts a 0/1 outcome vector or a two-column (successes, trials) array;
    ``sample_weight`` multiplies each observation.  The intercept is never
    penalized.  Fitted attributes follow scikit-learn conventions
    (``coef_``, ``intercept_``, ``n_iter_``) plus ``converged_``,
    ``log_likelihood_``, and the full ``result_``.
    """

    def __init__(self, ridge: float = 1e-6, max_iter: int = 100, tol: float = 1e-8):
        self.ridge = ridge
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y, sample_weight=None):
        result = fit_binomial(
            X, y, weights=sample_weight, ridge=self.ridge,
            max_iter=self.max_iter, tol=self.tol,
        )
        self.result_ = result
        self.coef_ = result.coefficients
        self.intercept_ = result.intercept
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        self.log_likelihood_ = result.log_likelihood
        return self

    def decision_function(self, X) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise NotFittedError("BinomialGLM is not fitted yet")
        return self.intercept_ + as_matrix(X, "X") @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        eta = self.decision_function(X)
        p = np.where(eta >= 0, 1.0 / (1.0 + np.exp(-np.abs(eta))),
                     np.exp(-np.abs(eta)) / (1.0 + np.exp(-np.abs(eta))))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(int)
