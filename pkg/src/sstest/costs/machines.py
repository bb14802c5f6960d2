from __future__ import annotations

import math

from ..core import Instance, fail_prob, to_mask
from ..exact import MAX_EXACT_N
from ..exceptions import CapacityError, InputError
from .base import CostModel, harmonic


class MachineActivationCost(CostModel):
    """Machines with activation costs, each able to run a fixed set of tests.

    The cost of a batch is the cheapest set of machines whose test sets
    cover it (weighted set cover). The value oracle is greedy set cover;
    the ratio oracle is exact because some single machine's trace on the
    residual always attains the best ratio.
    """

    tag = "machines"

    def __init__(self, machines, n: int | None = None):
        parsed = []
        for j, m in enumerate(machines):
            try:
                c, tests = (m["cost"], m["tests"]) if isinstance(m, dict) else m
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"machines[{j}]: expected fields cost and tests") from exc
            c = float(c)
            if not (math.isfinite(c) and c >= 0):
                raise InputError(f"machines[{j}]: cost must be finite and nonnegative")
            parsed.append((c, frozenset(int(i) for i in tests)))
        if not parsed:
            raise InputError("need at least one machine")
        top = max((max(t) for _, t in parsed if t), default=0)
        super().__init__(n if n is not None else top)
        for j, (_, tests) in enumerate(parsed):
            bad = [i for i in tests if not 1 <= i <= self.n]
            if bad:
                raise InputError(f"machines[{j}]: test ids {sorted(bad)} out of range 1..{self.n}")
        covered = frozenset().union(*(t for _, t in parsed))
        missing = sorted(set(range(1, self.n + 1)) - covered)
        if missing:
            raise InputError(f"tests {missing} are not run by any machine")
        self.costs = tuple(c for c, _ in parsed)
        self.tests_of = tuple(t for _, t in parsed)
        self._masks = tuple(to_mask(t) for t in self.tests_of)

    @property
    def gamma(self):
        return harmonic(self.n)

    def _cover_dp(self, full: int) -> list:
        # best[m]: cheapest machine set covering m, for all m inside full
        best = {0: 0.0}

        def solve(m):
            if m in best:
                return best[m]
            low = m & -m
            b = math.inf
            for c, mask in zip(self.costs, self._masks):
                if mask & low:
                    b = min(b, c + solve(m & ~mask))
            best[m] = b
            return b

        solve(full)
        return best

    def cost(self, subset):
        subset = self.check_tests(subset)
        if len(subset) > MAX_EXACT_N:
            raise CapacityError(f"exact set cover handles at most {MAX_EXACT_N} tests")
        m = to_mask(subset)
        return self._cover_dp(m)[m]

    def cost_table(self):
        full = (1 << self.n) - 1
        table = [0.0] * (full + 1)
        for m in range(1, full + 1):
            low = m & -m
            b = math.inf
            for c, mask in zip(self.costs, self._masks):
                if mask & low:
                    v = c + table[m & ~mask]
                    if v < b:
                        b = v
            table[m] = b
        return table

    def exact_value(self, subset):
        subset = self.check_tests(subset)
        if not subset:
            return 0.0, []
        m = to_mask(subset)
        best = self._cover_dp(m)
        cover, paid = [], []
        while m:
            low = m & -m
            for j, (c, mask) in enumerate(zip(self.costs, self._masks)):
                if mask & low and math.isclose(c + best[m & ~mask], best[m], rel_tol=1e-12, abs_tol=1e-12):
                    cover.append(self.tests_of[j] & subset)
                    paid.append(c)
                    m &= ~mask
                    break
        return math.fsum(paid), cover

    def value(self, subset):
        cost, chosen = greedy_set_cover(self, subset)
        return cost, [self.tests_of[j] & frozenset(subset) for j in chosen]

    def ratio(self, instance: Instance, U):
        U = self.check_tests(U)
        best = None
        for j, tests in enumerate(self.tests_of):
            batch = tests & U
            if not batch:
                continue
            r = self.costs[j] / fail_prob(instance, batch)
            if best is None or r < best[0]:
                best = (r, batch, self.costs[j])
        if best is None:
            raise InputError("no machine runs any remaining test")
        return best[1], best[2]

    def to_dict(self):
        return {
            "type": self.tag,
            "machines": [{"cost": c, "tests": sorted(t)} for c, t in zip(self.costs, self.tests_of)],
        }


def greedy_set_cover(model: MachineActivationCost, subset) -> tuple:
    """Greedy weighted set cover: repeatedly take the machine with the
    lowest cost per newly covered test (lowest index on ties).

    Returns ``(total cost, machine indices in pick order)``.
    """
    remaining = model.check_tests(subset)
    chosen, total = [], []
    while remaining:
        best, arg = math.inf, None
        for j, tests in enumerate(model.tests_of):
            gain = len(tests & remaining)
            if gain and model.costs[j] / gain < best:
                best, arg = model.costs[j] / gain, j
        if arg is None:
            raise InputError(f"tests {sorted(remaining)} are not run by any machine")
        chosen.append(arg)
        total.append(model.costs[arg])
        remaining = remaining - model.tests_of[arg]
    return math.fsum(total), chosen


def machine_value(model: MachineActivationCost, subset) -> tuple:
    return model.value(subset)


def machine_ratio(model: MachineActivationCost, instance: Instance, U) -> tuple:
    return model.ratio(instance, U)
