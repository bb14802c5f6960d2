from __future__ import annotations

import math
from abc import ABC, abstractmethod
from functools import partial

from ..core import ALL, BatchFamily, Instance
from ..exact import MAX_EXACT_N
from ..exceptions import InputError


class CostModel(ABC):
    """A subadditive batch cost with its two oracles.

    ``cost(S)`` is the true cost of performing ``S`` as one step (the
    cheapest collection of family batches covering ``S``). ``value(S)``
    is the value oracle: an upper bound within ``gamma`` of ``cost(S)``
    plus the cover achieving it. ``ratio(instance, U)`` is the ratio
    oracle: a batch inside ``U`` whose ``bound / (1 - P)`` is within
    ``rho`` of the best ratio, plus the certified cost bound.
    """

    tag = ""
    family: BatchFamily = ALL

    def __init__(self, n: int):
        if n < 1:
            raise InputError("a cost model needs at least one test")
        self.n = n

    def __call__(self, subset) -> float:
        return self.cost(frozenset(subset))

    @abstractmethod
    def cost(self, subset: frozenset) -> float: ...

    @abstractmethod
    def ratio(self, instance: Instance, U) -> tuple: ...

    @abstractmethod
    def to_dict(self) -> dict: ...

    def value(self, subset) -> tuple:
        subset = frozenset(subset)
        return self.cost(subset), ([subset] if subset else [])

    def exact_value(self, subset) -> tuple:
        subset = frozenset(subset)
        return self.cost(subset), ([subset] if subset else [])

    @property
    def gamma(self) -> float:
        return 1.0

    @property
    def rho(self) -> float:
        return 1.0

    @property
    def implied_bound(self) -> float:
        return 4 * self.rho + self.gamma

    def ratio_oracle(self, instance: Instance):
        return partial(self.ratio, instance)

    def value_oracle(self):
        return self.value

    def check_tests(self, subset) -> frozenset:
        subset = frozenset(subset)
        for i in subset:
            if not 1 <= i <= self.n:
                raise InputError(f"test id {i} out of range 1..{self.n}")
        return subset

    def check_instance(self, instance: Instance):
        if instance.n != self.n:
            raise InputError(f"cost model has {self.n} tests but the instance has {instance.n}")

    def bind(self, instance: Instance) -> Instance:
        """``instance`` checked against this model, carrying the model's
        batch family when the instance does not restrict batches itself."""
        self.check_instance(instance)
        if instance.batch_family.kind == "all" and self.family.kind != "all":
            return Instance(instance.fail_probs, self.family)
        return instance


def split_epsilon(eps: float, parts: int) -> float:
    """Per-stage slack so that ``parts`` stages compound to exactly ``1 + eps``."""
    if eps <= 0:
        raise InputError("epsilon must be positive")
    return (1 + eps) ** (1 / parts) - 1


def small_enough_for_exact(n: int) -> bool:
    return n <= MAX_EXACT_N


def harmonic(n: int) -> float:
    return math.fsum(1 / k for k in range(1, n + 1))
