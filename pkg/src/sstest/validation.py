from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_is_fitted

from .core import Instance
from .costs import CostModel
from .exceptions import InputError


def check_instance(X) -> Instance:
    """Accept an :class:`Instance` or a 1-d array of pass probabilities."""
    if isinstance(X, Instance):
        return X
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("expected a nonempty 1-d array of pass probabilities")
    return Instance.from_pass_probs(list(arr))


def check_cost_model(cost_model, instance: Instance) -> Instance:
    """Validate the pairing; returns the instance with the model's batch family."""
    if not isinstance(cost_model, CostModel):
        raise InputError("cost_model must be a CostModel instance")
    return cost_model.bind(instance)


def check_epsilon(epsilon) -> float:
    eps = float(epsilon)
    if not eps > 0:
        raise InputError("epsilon must be positive")
    return eps


__all__ = ["check_cost_model", "check_epsilon", "check_instance", "check_is_fitted"]
