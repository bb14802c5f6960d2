"""Estimator-style wrappers around the solvers.

``fit(X)`` takes pass probabilities (or an :class:`Instance`) and stores the
chosen batch sequence. ``labels_[i]`` is the 0-based position of the batch
that runs test ``i + 1``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .core import Instance, expected_cost
from .exact import exact_oracles, exact_optimum
from .greedy import enumerate_truncations, plain_greedy, select_truncation
from .validation import check_cost_model, check_instance, check_is_fitted


def _labels(instance: Instance, sequence) -> np.ndarray:
    labels = np.empty(instance.n, dtype=int)
    for pos, batch in enumerate(sequence):
        for i in batch:
            labels[i - 1] = pos
    return labels


class _SequenceEstimator(BaseEstimator):
    def _finish(self, instance, sequence):
        self.sequence_ = sequence
        self.labels_ = _labels(instance, sequence)
        self.expected_cost_ = expected_cost(instance, sequence, self.cost_model)
        self.n_tests_ = instance.n
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_

    def predict(self, X=None):
        check_is_fitted(self, "sequence_")
        return self.labels_


class ModifiedGreedy(_SequenceEstimator):
    """Greedy plus the best truncation.

    ``oracles="model"`` uses the cost model's own ratio/value oracles;
    ``"exact"`` uses enumeration (``rho = gamma = 1``, small ``n`` only).
    """

    def __init__(self, cost_model=None, oracles: str = "model"):
        self.cost_model = cost_model
        self.oracles = oracles

    def _oracles(self, instance):
        if self.oracles == "exact":
            return exact_oracles(instance, self.cost_model)
        if self.oracles == "model":
            return self.cost_model.ratio_oracle(instance), self.cost_model.value_oracle()
        raise ValueError(f"oracles must be 'model' or 'exact', got {self.oracles!r}")

    def fit(self, X, y=None):
        instance = check_cost_model(self.cost_model, check_instance(X))
        ratio, value = self._oracles(instance)
        self.trace_ = plain_greedy(instance, ratio)
        self.truncations_ = enumerate_truncations(instance, self.trace_, value)
        best = select_truncation(self.truncations_)
        self.truncation_index_ = best.k
        self.upper_bound_ = best.upper_bound
        return self._finish(instance, best.executable_sequence(instance))


class PlainGreedy(ModifiedGreedy):
    """Min-ratio greedy without truncation."""

    def fit(self, X, y=None):
        instance = check_cost_model(self.cost_model, check_instance(X))
        ratio, _ = self._oracles(instance)
        self.trace_ = plain_greedy(instance, ratio)
        return self._finish(instance, self.trace_.sequence)


class ExactSST(_SequenceEstimator):
    """Optimal sequence by exhaustive DP (``n <= 20``)."""

    def __init__(self, cost_model=None):
        self.cost_model = cost_model

    def fit(self, X, y=None):
        instance = check_cost_model(self.cost_model, check_instance(X))
        result = exact_optimum(instance, self.cost_model)
        self.optimum_ = result.opt_cost
        return self._finish(instance, result.opt_sequence)
