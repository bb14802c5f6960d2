"""Independent brute-force references for the test suite.

Deliberately naive: plain itertools enumeration and direct formulas, sharing
no code with the package's DP solvers.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations


def prod(xs):
    out = 1.0
    for x in xs:
        out *= x
    return out


def subsets(items, nonempty=True):
    items = sorted(items)
    for k in range(1 if nonempty else 0, len(items) + 1):
        for c in combinations(items, k):
            yield frozenset(c)


def seq_cost(p, seq, cost):
    """sum_j prod_{l<j} P(B_l) * cost(B_j), with p a dict or 1-based list."""
    total, reach = 0.0, 1.0
    for b in seq:
        total += reach * cost(frozenset(b))
        reach *= prod(p[i - 1] for i in b)
    return total


def ordered_partitions(items):
    items = frozenset(items)
    if not items:
        yield []
        return
    for first in subsets(items):
        for rest in ordered_partitions(items - first):
            yield [first] + rest


def brute_sst(p, cost, max_batch=None):
    n = len(p)
    best = math.inf
    for seq in ordered_partitions(range(1, n + 1)):
        if max_batch and any(len(b) > max_batch for b in seq):
            continue
        best = min(best, seq_cost(p, seq, cost))
    return best


def brute_ratio(p, U, cost, max_batch=None):
    best = math.inf
    for b in subsets(U):
        if max_batch and len(b) > max_batch:
            continue
        best = min(best, cost(b) / (1 - prod(p[i - 1] for i in b)))
    return best


def brute_mssc(weights, sets, costs):
    """Optimal min-sum set cover by trying every order of every subset of sets."""
    m = len(weights)
    best = math.inf
    idx = range(len(sets))
    for k in range(1, len(sets) + 1):
        for chosen in combinations(idx, k):
            if set().union(*(sets[j] for j in chosen)) < {e for e in range(m) if weights[e] > 0}:
                continue
            for order in permutations(chosen):
                t, total, seen = 0.0, 0.0, set()
                for j in order:
                    t += costs[j]
                    new = set(sets[j]) - seen
                    total += t * sum(weights[e] for e in new)
                    seen |= new
                if {e for e in range(m) if weights[e] > 0} <= seen:
                    best = min(best, total)
    return best


def brute_set_cover(machines, S):
    """machines: list of (cost, set). Cheapest machine subset covering S."""
    S = set(S)
    if not S:
        return 0.0
    best = math.inf
    for k in range(1, len(machines) + 1):
        for chosen in combinations(machines, k):
            if S <= set().union(*(t for _, t in chosen)):
                best = min(best, sum(c for c, _ in chosen))
    return best


def brute_tour(dist, root, stops):
    stops = list(stops)
    if not stops:
        return 0.0
    best = math.inf
    for order in permutations(stops):
        walk = [root, *order, root]
        best = min(best, sum(dist[a][b] for a, b in zip(walk, walk[1:])))
    return best


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for j in range(len(part)):
            yield part[:j] + [part[j] | {first}] + part[j + 1:]
        yield part + [frozenset([first])]


def brute_grouping(batch_cost, S, k):
    best = math.inf
    for part in set_partitions(sorted(S)):
        if all(len(g) <= k for g in part):
            best = min(best, sum(batch_cost(frozenset(g)) for g in part))
    return best


def tree_path_weight(parent, weight, leaves):
    nodes = set()
    for v in leaves:
        while v is not None:
            nodes.add(v)
            v = parent[v]
    return sum(weight[v] for v in nodes)


def brute_dre(vertices, edges, r):
    for k in range(0, vertices + 1):
        for A in combinations(range(vertices), k):
            A = set(A)
            if sum(1 for u, v in edges if u in A and v in A) >= r:
                return k
    return None
