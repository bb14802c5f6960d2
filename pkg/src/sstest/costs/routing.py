"""Routing costs: a batch costs the shortest closed tour from a root through
its tests' locations."""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse.csgraph import depth_first_order, minimum_spanning_tree

from ..core import Instance, fail_prob
from ..exceptions import CapacityError, InputError
from ..quota import BicriteriaSolver, QuotaProblem, ratio_from_quota
from .base import CostModel, split_epsilon

MAX_HELD_KARP = 14


def held_karp_table(dist: np.ndarray) -> np.ndarray:
    """Optimal tour length from vertex 0 through every subset of ``1..m``.

    ``dist`` is ``(m+1) x (m+1)``; entry ``mask`` of the result is the tour
    through the vertices ``j + 1`` for bits ``j`` of ``mask``.
    """
    m = dist.shape[0] - 1
    if m > MAX_HELD_KARP:
        raise CapacityError(f"Held-Karp handles at most {MAX_HELD_KARP} stops")
    D = dist[1:, 1:]
    size = 1 << m
    path = np.full((size, m), np.inf)  # path[mask, j]: root -> ... -> j covering mask
    for j in range(m):
        path[1 << j, j] = dist[0, j + 1]
    bits = np.arange(m)
    for mask in range(1, size):
        row = path[mask]
        if not np.isfinite(row).any():
            continue
        out = ~(mask >> bits & 1).astype(bool)
        if not out.any():
            continue
        nxt = (row[:, None] + D).min(axis=0)
        targets = bits[out]
        idx = mask | (1 << targets)
        path[idx, targets] = np.minimum(path[idx, targets], nxt[targets])
    tours = np.zeros(size)
    if m:
        tours[1:] = (path[1:] + dist[1:, 0][None, :]).min(axis=1)
    return tours


def double_mst_tour(dist: np.ndarray) -> float:
    """Shortcut preorder walk of a minimum spanning tree rooted at vertex 0;
    at most twice the optimal tour on a metric."""
    if dist.shape[0] <= 1:
        return 0.0
    # zero-length edges vanish in sparse form; nudge them to stay connected
    graph = np.where(dist > 0, dist, 1e-300)
    np.fill_diagonal(graph, 0.0)
    tree = minimum_spanning_tree(graph)
    order = depth_first_order(tree, 0, directed=False, return_predecessors=False)
    walk = list(order) + [0]
    return math.fsum(float(dist[a, b]) for a, b in zip(walk, walk[1:]))


class RoutingCost(CostModel):
    """Tests live at points of a metric; a batch costs the shortest closed
    tour from the root through all of its points.

    ``dist`` includes the root; test ``i`` is the ``i``-th non-root index.
    Tours are exact (Held-Karp) for up to 14 stops and double-MST
    (factor 2) beyond.
    """

    tag = "routing"

    def __init__(self, dist, root: int = 0, epsilon: float = 0.1, check_metric: bool = True):
        try:
            D = np.array(dist, dtype=float)
        except (TypeError, ValueError) as exc:
            raise InputError("dist must be a numeric square matrix") from exc
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 2:
            raise InputError("dist must be a square matrix with at least two points")
        if not 0 <= root < D.shape[0]:
            raise InputError(f"root {root} out of range")
        if not np.isfinite(D).all() or (D < 0).any():
            raise InputError("distances must be finite and nonnegative")
        if np.abs(np.diag(D)).max() > 0:
            raise InputError("dist must have a zero diagonal")
        if not np.allclose(D, D.T, rtol=0, atol=1e-12):
            raise InputError("dist must be symmetric")
        if check_metric:
            tol = 1e-9 * max(1.0, float(D.max()))
            # d(u,w) <= d(u,v) + d(v,w) for every v
            via = (D[:, :, None] + D[None, :, :]).min(axis=1)
            if (D > via + tol).any():
                raise InputError("dist violates the triangle inequality")
        super().__init__(D.shape[0] - 1)
        self.root = root
        self.epsilon = epsilon
        self.dist = D
        self.order = [root] + [v for v in range(D.shape[0]) if v != root]
        self._full = D[np.ix_(self.order, self.order)]

    def _sub(self, tests) -> np.ndarray:
        idx = [0] + sorted(tests)
        return self._full[np.ix_(idx, idx)]

    @property
    def gamma(self):
        return 1.0 if self.n <= MAX_HELD_KARP else 2.0

    @property
    def rho(self):
        return 1 + self.epsilon

    def cost(self, subset):
        subset = self.check_tests(subset)
        if not subset:
            return 0.0
        if len(subset) > MAX_HELD_KARP:
            raise CapacityError(f"exact tour cost handles at most {MAX_HELD_KARP} stops")
        return float(held_karp_table(self._sub(subset))[-1])

    def cost_table(self):
        return [float(x) for x in held_karp_table(self._full)]

    def value(self, subset):
        subset = self.check_tests(subset)
        if not subset:
            return 0.0, []
        if len(subset) <= MAX_HELD_KARP:
            return self.cost(subset), [subset]
        return double_mst_tour(self._sub(subset)), [subset]

    def exact_value(self, subset):
        subset = self.check_tests(subset)
        return self.cost(subset), ([subset] if subset else [])

    def quota_solver(self, U, delta: float) -> BicriteriaSolver:
        """k-TSP by enumeration over subsets of ``U`` with rewards rounded
        down to whole copies of ``r0 = min(Q/n^2, delta*Q/n)``."""
        tests = sorted(U)
        m = len(tests)
        tours = held_karp_table(self._sub(tests))
        n = self.n

        def solve(problem: QuotaProblem):
            Q = problem.quota
            r0 = min(Q / n**2, delta * Q / n)
            copies = np.array([math.floor(problem.rewards[i] / r0) for i in tests], dtype=np.int64)
            counts = np.zeros(1 << m, dtype=np.int64)
            for j in range(m):
                step = 1 << j
                counts.reshape(-1, 2 * step)[:, step:] += copies[j]
            # any set meeting the quota loses less than one copy per test
            need = Q / r0 - m
            feasible = np.nonzero((counts >= need - 1e-9) & (np.arange(1 << m) > 0))[0]
            if feasible.size == 0:
                return None
            best = feasible[np.argmin(tours[feasible])]
            chosen = frozenset(tests[j] for j in range(m) if best >> j & 1)
            return chosen, float(tours[best])

        return BicriteriaSolver(solve, 1.0, 1.0 / (1.0 - delta), "k-tsp", self.cost)

    def ratio(self, instance: Instance, U):
        U = self.check_tests(U)
        if len(U) > MAX_HELD_KARP:
            return nearest_neighbor_ratio(self, instance, U)
        half = split_epsilon(self.epsilon, 2)
        delta = 1 - 1 / (1 + half)
        batch, _, bound = ratio_from_quota(instance, U, self.quota_solver(U, delta), half)
        return batch, bound

    def to_dict(self):
        return {"type": self.tag, "root": self.root, "dist": self.dist.tolist()}


def nearest_neighbor_ratio(model: RoutingCost, instance: Instance, U) -> tuple:
    """Unaudited fallback for large residuals: grow a nearest-neighbor path
    from the root and keep the prefix with the best double-MST ratio."""
    left = set(U)
    here = 0
    taken, best = [], None
    while left:
        here = min(sorted(left), key=lambda i: model._full[here, i])
        left.remove(here)
        taken.append(here)
        batch = frozenset(taken)
        bound = double_mst_tour(model._sub(batch))
        r = bound / fail_prob(instance, batch)
        if best is None or r < best[0]:
            best = (r, batch, bound)
    return best[1], best[2]


def routing_value(model: RoutingCost, subset) -> tuple:
    return model.value(subset)


def routing_ratio(model: RoutingCost, instance: Instance, U, eps: float | None = None) -> tuple:
    if eps is not None and eps != model.epsilon:
        clone = object.__new__(RoutingCost)
        clone.__dict__.update(model.__dict__)
        clone.epsilon = eps
        model = clone
    return model.ratio(instance, U)
