"""Additive costs, with or without a fixed per-batch setup charge."""

from __future__ import annotations

import math

from ..core import Instance
from ..exceptions import InputError
from ..quota import BicriteriaSolver, QuotaProblem, ratio_from_quota
from .base import CostModel


def _check_costs(costs) -> tuple:
    costs = tuple(float(c) for c in costs)
    if any(not (math.isfinite(c) and c >= 0) for c in costs):
        raise InputError("costs must be finite and nonnegative")
    return costs


class AdditiveCost(CostModel):
    """``c(S) = sum of c_i``. The best single test is always a min-ratio batch."""

    tag = "additive"

    def __init__(self, costs):
        costs = _check_costs(costs)
        super().__init__(len(costs))
        self.costs = costs

    def cost(self, subset):
        return math.fsum(self.costs[i - 1] for i in subset)

    def cost_table(self):
        table = [0.0] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = (m & -m).bit_length() - 1
            table[m] = table[m & (m - 1)] + self.costs[low]
        return table

    def ratio(self, instance: Instance, U):
        # sum c / (1 - prod p) >= sum c / sum q >= min c_i / q_i
        U = self.check_tests(U)
        i = min(sorted(U), key=lambda i: self.costs[i - 1] / instance.fail_probs[i - 1])
        return frozenset([i]), self.costs[i - 1]

    def to_dict(self):
        return {"type": self.tag, "costs": list(self.costs)}


def pareto_knapsack(items: list) -> list:
    """Nondominated ``(cost, reward, members)`` over all subsets of ``items``.

    ``items`` holds ``(id, cost, reward)``. The frontier is sorted by cost
    with strictly increasing reward.
    """
    frontier = [(0.0, 0.0, frozenset())]
    for i, c, r in items:
        merged = frontier + [(fc + c, fr + r, fm | {i}) for fc, fr, fm in frontier]
        merged.sort(key=lambda t: (t[0], -t[1], sorted(t[2])))
        frontier = []
        for point in merged:
            if not frontier or point[1] > frontier[-1][1]:
                frontier.append(point)
    return frontier


class BatchSetupCost(CostModel):
    """``c(S) = setup + sum of c_i`` for nonempty ``S``.

    The ratio oracle runs the quota grid over an exact covering-knapsack
    solver (Pareto frontier of cost against reward), so ``rho = 1 + eps``.
    """

    tag = "batch_setup"

    def __init__(self, setup: float, costs, epsilon: float = 0.1):
        costs = _check_costs(costs)
        super().__init__(len(costs))
        if not (math.isfinite(setup) and setup >= 0):
            raise InputError("setup cost must be finite and nonnegative")
        self.setup = float(setup)
        self.costs = costs
        self.epsilon = epsilon

    def cost(self, subset):
        if not subset:
            return 0.0
        return self.setup + math.fsum(self.costs[i - 1] for i in subset)

    def cost_table(self):
        table = AdditiveCost(self.costs).cost_table()
        return [0.0] + [c + self.setup for c in table[1:]]

    @property
    def rho(self):
        return 1 + self.epsilon

    def quota_solver(self, U) -> BicriteriaSolver:
        frontier = None

        def solve(problem: QuotaProblem):
            nonlocal frontier
            if frontier is None:
                items = [(i, self.costs[i - 1], problem.rewards[i]) for i in sorted(problem.ground)]
                frontier = pareto_knapsack(items)
            tol = 1e-12 * max(1.0, problem.quota)
            for c, r, members in frontier:
                if members and r >= problem.quota - tol:
                    return members, self.cost(members)
            return None

        return BicriteriaSolver(solve, 1.0, 1.0, "knapsack", self.cost)

    def ratio(self, instance: Instance, U):
        U = self.check_tests(U)
        batch, _, bound = ratio_from_quota(instance, U, self.quota_solver(U), self.epsilon)
        return batch, bound

    def to_dict(self):
        return {"type": self.tag, "setup": self.setup, "costs": list(self.costs)}
