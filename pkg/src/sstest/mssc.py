"""Min-sum set cover: greedy with pluggable (possibly approximate) choices.

Also builds the MSSC instance whose elements are the nonzero outcome
vectors of a testing instance. Greedy on that instance picks the same
batches as min-ratio greedy on the tests, which is what ties the expected
testing cost to a set-cover objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import Instance, from_mask
from .exceptions import CapacityError, ContractViolation, InputError

MAX_SST_TO_MSSC_N = 12


@dataclass(frozen=True)
class MsscInstance:
    """Weighted elements ``0..len(weights)-1`` and costed sets of them."""

    weights: tuple
    sets: tuple
    costs: tuple
    labels: tuple | None = None  # optional name per set, e.g. the batch it encodes

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        sets = tuple(frozenset(s) for s in self.sets)
        costs = tuple(float(c) for c in self.costs)
        if len(sets) != len(costs):
            raise InputError("need one cost per set")
        for w in weights:
            if not (math.isfinite(w) and w >= 0):
                raise InputError("element weights must be finite and nonnegative")
        for c in costs:
            if not (math.isfinite(c) and c >= 0):
                raise InputError("set costs must be finite and nonnegative")
        m = len(weights)
        for j, s in enumerate(sets):
            if any(not (0 <= e < m) for e in s):
                raise InputError(f"set {j} names an element outside 0..{m - 1}")
        covered = frozenset().union(*sets) if sets else frozenset()
        missing = [e for e in range(m) if e not in covered]
        if missing:
            raise InputError(f"element(s) {missing[:5]} belong to no set")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "costs", costs)

    def weight(self, elements) -> float:
        return math.fsum(self.weights[e] for e in sorted(elements))

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "sets": [{"members": sorted(s), "cost": c} for s, c in zip(self.sets, self.costs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MsscInstance":
        try:
            weights = data["weights"]
            sets = [s["members"] for s in data["sets"]]
            costs = [s["cost"] for s in data["sets"]]
        except KeyError as exc:
            raise InputError(f"MSSC file: missing field {exc}") from exc
        except TypeError as exc:
            raise InputError("MSSC file: 'sets' must be an array of {members, cost} objects") from exc
        return cls(tuple(weights), tuple(sets), tuple(costs))


@dataclass(frozen=True)
class MsscSolution:
    order: tuple
    cover_times: dict
    objective: float


def _scores(instance: MsscInstance, uncovered: frozenset) -> dict:
    """Cost per newly covered weight for every set that covers something.

    A tiny gain can overflow the score to inf; such sets stay eligible.
    """
    out = {}
    for j, members in enumerate(instance.sets):
        gain = instance.weight(members & uncovered)
        if gain > 0:
            out[j] = instance.costs[j] / gain
    return out


def exact_choice(instance: MsscInstance, uncovered: frozenset) -> int:
    """Set with the smallest cost per newly covered weight; lowest index on ties."""
    scores = _scores(instance, uncovered)
    return min(scores, key=lambda j: (scores[j], j), default=None)


def degraded_choice(rho: float) -> Callable:
    """A choice rule that is only a ``rho``-approximation: among sets whose
    score is within ``rho`` of the best, it takes the worst one."""
    if rho < 1:
        raise InputError("rho must be >= 1")

    def choose(instance: MsscInstance, uncovered: frozenset) -> int:
        scores = _scores(instance, uncovered)
        if not scores:
            return None
        best = min(scores.values())
        ok = [j for j, s in scores.items() if s <= rho * best]
        return max(ok, key=lambda j: (scores[j], -j))

    return choose


def mssc_greedy(instance: MsscInstance, choice: Callable = exact_choice) -> MsscSolution:
    """Repeatedly take ``choice(instance, uncovered)`` until nothing is left.

    Zero-weight elements are ignored; they never change the objective.
    """
    uncovered = frozenset(e for e, w in enumerate(instance.weights) if w > 0)
    order = []
    cover_times = {}
    elapsed = 0.0
    objective = 0.0
    while uncovered:
        j = choice(instance, uncovered)
        gained = instance.sets[j] & uncovered if j is not None else frozenset()
        if not gained:
            raise ContractViolation(f"choice picked set {j}, which covers no remaining element")
        elapsed += instance.costs[j]
        order.append(j)
        for e in gained:
            cover_times[e] = elapsed
        objective += elapsed * instance.weight(gained)
        uncovered = uncovered - gained
    return MsscSolution(tuple(order), cover_times, objective)


def cover_time(solution: MsscSolution, element: int) -> float:
    try:
        return solution.cover_times[element]
    except KeyError:
        raise InputError(f"element {element} is not covered by the solution") from None


def objective(instance: MsscInstance, order) -> float:
    """Weighted cover time of ``order``; elements left uncovered make it infinite."""
    uncovered = frozenset(e for e, w in enumerate(instance.weights) if w > 0)
    elapsed = total = 0.0
    for j in order:
        elapsed += instance.costs[j]
        gained = instance.sets[j] & uncovered
        total += elapsed * instance.weight(gained)
        uncovered -= gained
    return math.inf if uncovered else total


def build_mssc_from_sst(instance: Instance, cost, family=None) -> MsscInstance:
    """Elements are nonzero failure patterns ``x`` (bitmask, bit ``i-1`` set
    when test ``i`` fails) stored at index ``x - 1``; there is one set per
    allowed batch ``B``, in increasing bitmask order, holding the patterns
    where some test of ``B`` fails, with cost ``cost(B)``.
    """
    n = instance.n
    if n > MAX_SST_TO_MSSC_N:
        raise CapacityError(f"outcome-vector MSSC needs n <= {MAX_SST_TO_MSSC_N}")
    family = family or instance.batch_family
    q = instance.fail_probs
    full = 1 << n
    weights = []
    for x in range(1, full):
        w = 1.0
        for i in range(n):
            w *= q[i] if x >> i & 1 else 1.0 - q[i]
        weights.append(w)
    sets, costs, batches = [], [], []
    for B in range(1, full):
        if not family.allows_size(B.bit_count()):
            continue
        sets.append(frozenset(x - 1 for x in range(1, full) if x & B))
        costs.append(cost(from_mask(B)))
        batches.append(from_mask(B))
    return MsscInstance(tuple(weights), tuple(sets), tuple(costs), tuple(batches))


@dataclass(frozen=True)
class PriceStep:
    remaining_weight: float  # w(R_i)
    covered_weight: float  # w(X_i)
    cumulative_cost: float  # s_i
    price: float  # c_i * w(R_i) / w(X_i)
    score: float  # c_i / w(X_i), the greedy criterion at this step


def price_audit(instance: MsscInstance, solution: MsscSolution) -> list:
    """Per-step prices of a greedy run.

    Spreading each step's price over the weight it covers reproduces the
    objective: ``sum_i w(X_i) * P_i == objective``.
    """
    uncovered = frozenset(e for e, w in enumerate(instance.weights) if w > 0)
    steps = []
    elapsed = 0.0
    for j in solution.order:
        gained = instance.sets[j] & uncovered
        w_r = instance.weight(uncovered)
        w_x = instance.weight(gained)
        elapsed += instance.costs[j]
        c = instance.costs[j]
        steps.append(PriceStep(w_r, w_x, elapsed, c * w_r / w_x, c / w_x))
        uncovered -= gained
    return steps
