from __future__ import annotations

import math

from ..core import Instance
from ..exact import check_concave_table, sorted_by_pass_prob
from .base import CostModel


class ConcaveCardinalityCost(CostModel):
    """``c(S) = g(|S|)`` for a monotone concave table ``g(0..n)``.

    All batches of a given size cost the same, so the best batch of size
    ``k`` is the ``k`` tests most likely to fail; the ratio oracle scans
    those prefixes and is exact.
    """

    tag = "concave_cardinality"

    def __init__(self, g):
        g = list(g)
        super().__init__(len(g) - 1)
        self.g = tuple(check_concave_table(g, self.n))

    def cost(self, subset):
        return self.g[len(subset)] if subset else 0.0

    def cost_table(self):
        return [self.g[m.bit_count()] if m else 0.0 for m in range(1 << self.n)]

    def ratio(self, instance: Instance, U):
        U = self.check_tests(U)
        order = sorted_by_pass_prob(instance, U)
        family = instance.batch_family
        best, best_k = math.inf, 1
        log_p = 0.0
        for k, i in enumerate(order, start=1):
            if not family.allows_size(k):
                break
            log_p += instance.log_pass(i)
            r = self.g[k] / -math.expm1(log_p)
            if r < best:
                best, best_k = r, k
        return frozenset(order[:best_k]), self.g[best_k]

    def to_dict(self):
        return {"type": self.tag, "g": list(self.g)}
