"""Brute-force and dynamic-programming ground truth.

Everything here enumerates subsets as bitmasks and is meant for desk-scale
audits only (``n <= 20``). Ties are always broken toward the numerically
smallest batch bitmask so results are reproducible.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

from .core import ALL, BatchFamily, BatchSequence, Instance, from_mask, to_mask
from .exceptions import CapacityError, InputError

MAX_EXACT_N = 20
MAX_EXACT_MSSC_SETS = 8


class CostTable:
    """Cost of every subset of ``1..n``, indexed by bitmask.

    Wraps any subset cost function. Cost models may expose a faster
    ``cost_table()`` returning the full list, which is used when present.
    """

    def __init__(self, cost, n: int):
        if n > MAX_EXACT_N:
            raise CapacityError(f"cost table needs n <= {MAX_EXACT_N}, got {n}")
        self.n = n
        if isinstance(cost, CostTable):
            self.values = cost.values
        elif hasattr(cost, "cost_table"):
            self.values = list(cost.cost_table())
        else:
            self.values = [cost(from_mask(m)) for m in range(1 << n)]
        if len(self.values) != 1 << n:
            raise InputError("cost table has the wrong size")

    def __call__(self, subset) -> float:
        return self.values[to_mask(subset)]

    def by_mask(self, mask: int) -> float:
        return self.values[mask]


def _table(cost, n: int) -> CostTable:
    if isinstance(cost, CostTable) and cost.n == n:
        return cost
    return CostTable(cost, n)


def _pass_table(instance: Instance) -> list:
    n = instance.n
    p = instance.pass_probs
    table = [1.0] * (1 << n)
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        table[m] = table[m & (m - 1)] * p[low]
    return table


def _allowed(family: BatchFamily, mask: int) -> bool:
    return family.kind != "max_size" or mask.bit_count() <= family.k


def _submasks_ascending(mask: int):
    subs = []
    sub = mask
    while sub:
        subs.append(sub)
        sub = (sub - 1) & mask
    subs.reverse()
    return subs


class _SubsetTable(Mapping):
    """Read-only view of a bitmask-indexed list keyed by frozensets."""

    def __init__(self, values: list, n: int):
        self._values = values
        self._n = n

    def __getitem__(self, subset):
        mask = to_mask(subset)
        if mask >= len(self._values):
            raise KeyError(subset)
        return self._values[mask]

    def __iter__(self):
        return (from_mask(m) for m in range(len(self._values)))

    def __len__(self):
        return len(self._values)


@dataclass(frozen=True)
class ExactSolveResult:
    opt_cost: float
    opt_sequence: BatchSequence
    subset_table: Mapping


def exact_sst(instance: Instance, cost, family: BatchFamily | None = None) -> ExactSolveResult:
    """Optimal batch sequence by DP over residual test sets.

    ``OPT(U) = min_B cost(B) + P(B) * OPT(U - B)`` over nonempty allowed
    ``B`` inside ``U``. Runs in ``O(3^n)``.
    """
    n = instance.n
    if n > MAX_EXACT_N:
        raise CapacityError(f"exact_sst handles n <= {MAX_EXACT_N}, got n = {n}")
    family = family or instance.batch_family
    costs = _table(cost, n).values
    P = _pass_table(instance)
    full = (1 << n) - 1
    limited = family.kind == "max_size"
    k = family.k

    opt = [0.0] * (1 << n)
    choice = [0] * (1 << n)
    for U in range(1, full + 1):
        best = math.inf
        best_b = 0
        sub = U
        while sub:
            if not limited or sub.bit_count() <= k:
                v = costs[sub] + P[sub] * opt[U ^ sub]
                if v < best or (v == best and sub < best_b):
                    best = v
                    best_b = sub
            sub = (sub - 1) & U
        opt[U] = best
        choice[U] = best_b

    batches = []
    U = full
    while U:
        batches.append(from_mask(choice[U]))
        U ^= choice[U]
    return ExactSolveResult(opt[full], BatchSequence(tuple(batches)), _SubsetTable(opt, n))


def exact_ratio(instance: Instance, U, cost, family: BatchFamily | None = None) -> tuple:
    """Batch ``B`` inside ``U`` minimizing ``cost(B) / (1 - P(B))``."""
    U = instance.check_subset(U)
    if not U:
        raise InputError("exact_ratio needs a nonempty residual set")
    if len(U) > MAX_EXACT_N:
        raise CapacityError(f"exact_ratio handles |U| <= {MAX_EXACT_N}")
    family = family or instance.batch_family
    table = cost if isinstance(cost, CostTable) else None
    logs = instance._log_pass
    best = math.inf
    best_b = 0
    for sub in _submasks_ascending(to_mask(U)):
        if not _allowed(family, sub):
            continue
        subset = from_mask(sub)
        c = table.by_mask(sub) if table is not None else cost(subset)
        denom = -math.expm1(math.fsum(logs[i - 1] for i in subset))
        r = c / denom
        if r < best:
            best = r
            best_b = sub
    return from_mask(best_b), best


def exact_qp(rewards: Mapping, cost, Q: float, family: BatchFamily | None = None):
    """Cheapest subset of ``rewards``' keys with total reward at least ``Q``.

    Returns ``None`` when even the whole ground set falls short.
    """
    ground = sorted(rewards)
    if len(ground) > MAX_EXACT_N:
        raise CapacityError(f"exact_qp handles ground sets of size <= {MAX_EXACT_N}")
    family = family or ALL
    tol = 1e-12 * max(1.0, abs(Q))
    if Q <= tol:
        return frozenset()
    r = [rewards[i] for i in ground]
    if math.fsum(r) < Q - tol:
        return None
    m = len(ground)
    best = math.inf
    best_set = None
    for mask in range(1, 1 << m):
        if not family.allows_size(mask.bit_count()):
            continue
        members = [ground[j] for j in range(m) if mask >> j & 1]
        if math.fsum(rewards[i] for i in members) < Q - tol:
            continue
        c = cost(frozenset(members))
        if c < best:
            best = c
            best_set = frozenset(members)
    return best_set


def exact_mssc(instance) -> tuple:
    """Optimal min-sum set cover order by enumerating set sequences.

    Sequences that add no new positive-weight element are pruned. Returns
    ``(order, objective)``.
    """
    sets = instance.sets
    if len(sets) > MAX_EXACT_MSSC_SETS:
        raise CapacityError(f"exact_mssc handles at most {MAX_EXACT_MSSC_SETS} sets")
    live = frozenset(e for e, w in enumerate(instance.weights) if w > 0)
    if not live <= frozenset().union(*sets):
        raise InputError("some positive-weight element is in no set")

    best = [math.inf, ()]

    def extend(order, uncovered, elapsed, acc):
        if not uncovered:
            if acc < best[0]:
                best[0] = acc
                best[1] = tuple(order)
            return
        if acc >= best[0]:
            return
        for i, s in enumerate(sets):
            gained = uncovered & s
            if not gained:
                continue
            t = elapsed + instance.costs[i]
            order.append(i)
            extend(order, uncovered - gained, t,
                   acc + t * math.fsum(instance.weights[e] for e in gained))
            order.pop()

    extend([], live, 0.0, 0.0)
    return best[1], best[0]


def check_concave_table(g, n: int) -> list:
    g = [float(x) for x in g]
    if len(g) != n + 1:
        raise InputError(f"concave cost table needs n + 1 = {n + 1} entries, got {len(g)}")
    if any(x < 0 or not math.isfinite(x) for x in g):
        raise InputError("concave cost table entries must be finite and nonnegative")
    tol = 1e-12 * max(1.0, max(g))
    for k in range(n):
        if g[k + 1] < g[k] - tol:
            raise InputError(f"cost table is not monotone at k = {k}")
    for k in range(1, n):
        if g[k + 1] - g[k] > g[k] - g[k - 1] + tol:
            raise InputError(f"cost table is not concave at k = {k}")
    return g


def sorted_by_pass_prob(instance: Instance, tests=None) -> list:
    """Tests ordered by increasing pass probability (largest failure first)."""
    tests = instance.tests if tests is None else tests
    return sorted(tests, key=lambda i: (-instance.fail_probs[i - 1], i))


def exact_concave_cardinality_sst(instance: Instance, g) -> ExactSolveResult:
    """Optimum for ``c(S) = g(|S|)``, concave ``g``, in ``O(n^2)``.

    Some optimal solution batches the tests in order of increasing pass
    probability, so a DP over suffixes of that order suffices.
    """
    n = instance.n
    g = check_concave_table(g, n)
    order = sorted_by_pass_prob(instance)
    logs = [instance.log_pass(i) for i in order]
    family = instance.batch_family
    # best[i]: optimal cost of testing order[i:], given we reach it
    best = [math.inf] * (n + 1)
    cut = [n] * (n + 1)
    best[n] = 0.0
    for i in range(n - 1, -1, -1):
        log_p = 0.0
        for j in range(i + 1, n + 1):
            log_p += logs[j - 1]
            if not family.allows_size(j - i):
                break
            v = g[j - i] + math.exp(log_p) * best[j]
            if v < best[i]:
                best[i] = v
                cut[i] = j
    batches = []
    i = 0
    while i < n:
        batches.append(frozenset(order[i:cut[i]]))
        i = cut[i]
    table = {frozenset(order[i:]): best[i] for i in range(n + 1)}
    return ExactSolveResult(best[0], BatchSequence(tuple(batches)), table)


def exact_optimum(instance: Instance, cost) -> ExactSolveResult:
    """Pick the right exact solver for ``cost``.

    Concave-cardinality costs use the ``O(n^2)`` DP at any size; everything
    else goes through :func:`exact_sst`.
    """
    g = getattr(cost, "g", None)
    if g is not None:
        return exact_concave_cardinality_sst(instance, g)
    return exact_sst(instance, cost)


def exact_value(cost, subset) -> tuple:
    """Exact value-oracle answer ``(cost, cover)`` for a subset."""
    if hasattr(cost, "exact_value"):
        return cost.exact_value(subset)
    subset = frozenset(subset)
    return cost(subset), [subset] if subset else []


def exact_oracles(instance: Instance, cost):
    """Ratio and value oracles with ``rho = gamma = 1`` built by enumeration.

    The subset cost table is built once per call and shared by both oracles.
    """
    table = CostTable(cost, instance.n)

    def ratio(U):
        batch, value = exact_ratio(instance, U, table)
        return batch, table(batch)

    def value(S):
        return exact_value(cost, S)

    return ratio, value

