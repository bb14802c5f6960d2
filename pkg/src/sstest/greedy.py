"""Min-ratio greedy and its truncated ("modified") variant.

Plain greedy keeps picking the batch of remaining tests with the best cost
to failure-probability ratio. That can be a factor ``sqrt(n)/2`` off: it
never considers simply running everything that is left in one go. The
modified algorithm takes the greedy order, and for every prefix length ``k``
prices the solution "first ``k`` greedy batches, then all remaining tests
together" using only certified cost bounds, returning the cheapest.

Oracles are plain callables:

* ``ratio_oracle(U) -> (batch, cost_bound)`` for a nonempty residual ``U``;
* ``value_oracle(S) -> (cost_bound, cover)`` where ``cover`` is a list of
  batches whose union contains ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .core import BatchSequence, Instance, expected_cost, fail_prob, log_pass_prob
from .exact import MAX_EXACT_N, exact_optimum
from .exceptions import ContractViolation


@dataclass(frozen=True)
class GreedyTrace:
    batches: tuple
    bounds: tuple  # C_j, certified upper bounds on each batch's cost
    residuals: tuple  # residual set before step j
    ratios: tuple  # C_j / (1 - P(B_j))

    @property
    def sequence(self) -> BatchSequence:
        return BatchSequence(self.batches)

    def __len__(self):
        return len(self.batches)


@dataclass(frozen=True)
class TruncatedSolution:
    """First ``k`` greedy batches, then one batch with everything left."""

    k: int
    sequence: BatchSequence
    final_bound: float  # D_k
    final_cover: tuple
    upper_bound: float  # G_k

    def executable_sequence(self, instance: Instance) -> BatchSequence:
        """``sequence`` with the final batch split into its cover's batches
        when the instance's family does not allow it as a single batch.

        Splitting can only lower the expected cost, so ``upper_bound`` still
        holds.
        """
        batches = list(self.sequence)
        if batches and self.k < len(batches) and not instance.batch_family.allows(batches[-1]):
            last = batches.pop()
            seen = frozenset()
            for part in self.final_cover:
                part = frozenset(part) & last - seen
                if part:
                    batches.append(part)
                    seen |= part
        return BatchSequence(tuple(batches))


def plain_greedy(instance: Instance, ratio_oracle: Callable) -> GreedyTrace:
    """Greedy min-ratio batching until every test is scheduled."""
    residual = instance.tests
    batches, bounds, residuals, ratios = [], [], [], []
    while residual:
        batch, bound = ratio_oracle(residual)
        batch = frozenset(batch)
        if not batch:
            raise ContractViolation("ratio oracle returned an empty batch")
        if not batch <= residual:
            raise ContractViolation(
                f"ratio oracle returned tests {sorted(batch - residual)} that were already scheduled"
            )
        denom = fail_prob(instance, batch)
        if denom <= 0:
            raise ContractViolation("ratio oracle returned a batch that can never fail")
        if not bound >= 0:
            raise ContractViolation(f"ratio oracle returned an invalid cost bound {bound!r}")
        residuals.append(residual)
        batches.append(batch)
        bounds.append(float(bound))
        ratios.append(bound / denom)
        residual = residual - batch
    return GreedyTrace(tuple(batches), tuple(bounds), tuple(residuals), tuple(ratios))


def enumerate_truncations(instance: Instance, trace: GreedyTrace, value_oracle: Callable) -> list:
    """All ``len(trace) + 1`` truncated solutions with their cost upper bounds."""
    out = []
    log_reach = 0.0
    prefix = 0.0  # sum_{j<=k} P(B_1..B_{j-1}) * C_j
    scheduled = frozenset()
    for k in range(len(trace) + 1):
        if k > 0:
            prefix += math.exp(log_reach) * trace.bounds[k - 1]
            log_reach += log_pass_prob(instance, trace.batches[k - 1])
            scheduled |= trace.batches[k - 1]
        rest = instance.tests - scheduled
        if rest:
            bound, cover = value_oracle(rest)
            cover = tuple(frozenset(b) for b in cover)
            covered = frozenset().union(*cover) if cover else frozenset()
            if not rest <= covered:
                raise ContractViolation(
                    f"value oracle cover misses tests {sorted(rest - covered)}"
                )
            batches = trace.batches[:k] + (rest,)
        else:
            bound, cover = 0.0, ()
            batches = trace.batches[:k]
        G = prefix + math.exp(log_reach) * bound
        out.append(TruncatedSolution(k, BatchSequence(batches), float(bound), cover, G))
    return out


def select_truncation(truncations: list) -> TruncatedSolution:
    """Smallest upper bound; the smallest ``k`` among ties."""
    return min(truncations, key=lambda t: (t.upper_bound, t.k))


def modified_greedy(instance: Instance, ratio_oracle: Callable, value_oracle: Callable) -> tuple:
    """Returns ``(best truncated solution, greedy trace)``."""
    trace = plain_greedy(instance, ratio_oracle)
    return select_truncation(enumerate_truncations(instance, trace, value_oracle)), trace


class GapReport(NamedTuple):
    plain: float
    modified: float
    exact: float | None


def gap_report(instance: Instance, cost, ratio_oracle: Callable, value_oracle: Callable) -> GapReport:
    """Expected cost of plain greedy, modified greedy, and the optimum.

    The optimum is ``None`` when no exact solver applies (``n > 20`` and
    ``cost`` is not a concave-cardinality cost).
    """
    best, trace = modified_greedy(instance, ratio_oracle, value_oracle)
    plain = expected_cost(instance, trace.sequence, cost)
    modified = expected_cost(instance, best.sequence, cost)
    exact = None
    if instance.n <= MAX_EXACT_N or getattr(cost, "g", None) is not None:
        exact = exact_optimum(instance, cost).opt_cost
    return GapReport(plain, modified, exact)
