"""Hierarchical (tree) costs, with and without a batch-size cap.

Each test sits at a leaf. Running a batch activates every node on the paths
from the root to the batch's leaves, paying each node's weight once. The
ratio oracle solves the reward-quota problem with a budgeted tree DP over
costs rounded down to multiples of ``mu = eps' * budget / m`` (``m`` =
number of positive-weight nodes), guessing the budget on a geometric grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import BatchFamily, Instance
from ..exceptions import CapacityError, InputError
from ..quota import BicriteriaSolver, QuotaProblem, ratio_from_quota
from .base import CostModel, split_epsilon

MAX_EXACT_GROUPING = 12


@dataclass(frozen=True)
class TreeNode:
    id: object
    weight: float
    parent: object = None


def _parse_nodes(nodes) -> list:
    out = []
    for k, node in enumerate(nodes):
        if isinstance(node, TreeNode):
            out.append(node)
        elif isinstance(node, dict):
            try:
                out.append(TreeNode(node["id"], float(node["weight"]), node.get("parent")))
            except KeyError as exc:
                raise InputError(f"nodes[{k}]: missing field {exc}") from exc
        else:
            nid, w, parent = node
            out.append(TreeNode(nid, float(w), parent))
    return out


class TreeCost(CostModel):
    """Cost of a batch = total weight of the subtree its leaves induce."""

    tag = "tree"

    def __init__(self, nodes, leaf_of_test, epsilon: float = 0.1):
        nodes = _parse_nodes(nodes)
        super().__init__(len(leaf_of_test))
        self.epsilon = epsilon
        self.nodes = tuple(nodes)
        self.leaf_of_test = tuple(leaf_of_test)

        index = {}
        for k, node in enumerate(nodes):
            if node.id in index:
                raise InputError(f"nodes[{k}]: duplicate node id {node.id!r}")
            if not (math.isfinite(node.weight) and node.weight >= 0):
                raise InputError(f"nodes[{k}]: weight must be finite and nonnegative")
            index[node.id] = k
        roots = [k for k, node in enumerate(nodes) if node.parent is None]
        if len(roots) != 1:
            raise InputError(f"tree needs exactly one root (parent null), found {len(roots)}")
        self.root = roots[0]
        self.parent = [None] * len(nodes)
        self.children = [[] for _ in nodes]
        for k, node in enumerate(nodes):
            if node.parent is not None:
                if node.parent not in index:
                    raise InputError(f"nodes[{k}]: unknown parent {node.parent!r}")
                self.parent[k] = index[node.parent]
                self.children[index[node.parent]].append(k)
        self.weights = [node.weight for node in nodes]

        self.paths = []  # node-index bitmask of each test's root path
        for t, leaf in enumerate(leaf_of_test, start=1):
            if leaf not in index:
                raise InputError(f"leaf_of_test[{t}]: unknown node {leaf!r}")
            v = index[leaf]
            if self.children[v]:
                raise InputError(f"leaf_of_test[{t}]: node {leaf!r} is not a leaf")
            mask, seen = 0, 0
            while v is not None:
                if seen > len(nodes):
                    raise InputError("tree contains a cycle")
                mask |= 1 << v
                v = self.parent[v]
                seen += 1
            self.paths.append(mask)
        self.test_node = [index[leaf] for leaf in leaf_of_test]

    # -- value side -------------------------------------------------------

    def _node_weight(self, node_mask: int) -> float:
        return math.fsum(self.weights[v] for v in range(len(self.weights)) if node_mask >> v & 1)

    def _nodes_of(self, subset) -> int:
        mask = 0
        for i in subset:
            mask |= self.paths[i - 1]
        return mask

    def cost(self, subset):
        subset = self.check_tests(subset)
        return self._node_weight(self._nodes_of(subset))

    def tree_table(self) -> list:
        nodes = [0] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = (m & -m).bit_length() - 1
            nodes[m] = nodes[m & (m - 1)] | self.paths[low]
        return [self._node_weight(x) for x in nodes]

    def cost_table(self):
        return self.tree_table()

    # -- ratio side -------------------------------------------------------

    @property
    def rho(self):
        return 1 + self.epsilon

    def quota_solver(self, instance: Instance, U, cap: int | None = None) -> BicriteriaSolver:
        eps_grid = split_epsilon(self.epsilon, 3)
        solver = _TreeQuotaSolver(self, U, eps_grid, eps_grid, cap)
        alpha = (1 + eps_grid) ** 2
        return BicriteriaSolver(solver.solve, alpha, 1.0, "tree-dp", self.cost)

    def ratio(self, instance: Instance, U, cap: int | None = None):
        U = self.check_tests(U)
        eps_grid = split_epsilon(self.epsilon, 3)
        solver = self.quota_solver(instance, U, cap)
        batch, _, bound = ratio_from_quota(instance, U, solver, eps_grid)
        return batch, bound

    def to_dict(self):
        return {
            "type": self.tag,
            "nodes": [{"id": n.id, "weight": n.weight, "parent": n.parent} for n in self.nodes],
            "leaf_of_test": list(self.leaf_of_test),
        }


def tree_value(model: TreeCost, subset) -> tuple:
    subset = model.check_tests(subset)
    return model.cost(subset), ([subset] if subset else [])


def tree_ratio(model: TreeCost, instance: Instance, U, eps: float | None = None) -> tuple:
    if eps is not None and eps != model.epsilon:
        model = _with_epsilon(model, eps)
    return model.ratio(instance, U)


def _with_epsilon(model, eps):
    clone = object.__new__(type(model))
    clone.__dict__.update(model.__dict__)
    clone.epsilon = eps
    return clone


class _TreeQuotaSolver:
    """Budgeted reward maximization on the tree, reused across quotas.

    The tree is restricted to the paths of the residual tests and padded to
    a binary tree with zero-weight nodes. A virtual super-root sits above the
    real root so that every node's weight is the weight of the edge into it.
    For each budget guess the DP returns the whole frontier of (rounded
    cost, tests, reward) points, which answers every quota at once.
    """

    def __init__(self, model: TreeCost, U, eps_budget: float, eps_round: float, cap):
        self.model = model
        self.U = frozenset(U)
        self.eps_budget = eps_budget
        self.eps_round = eps_round
        self.cap = cap
        self._frontiers = {}
        self._build()

    def _build(self):
        model = self.model
        relevant = 0
        for i in self.U:
            relevant |= model.paths[i - 1]
        weights, children, tests_at = [], [], []
        index = {}

        def add(w):
            weights.append(w)
            children.append([])
            tests_at.append([])
            return len(weights) - 1

        def copy(v):
            k = add(model.weights[v])
            index[v] = k
            kids = [copy(c) for c in model.children[v] if relevant >> c & 1]
            # pad wide nodes into a binary chain of zero-weight nodes
            node = k
            while len(kids) > 2:
                pad = add(0.0)
                children[node] = [kids[0], pad]
                kids = kids[1:]
                node = pad
            children[node] = kids
            return k

        self.top = copy(model.root)
        for i in sorted(self.U):
            tests_at[index[model.test_node[i - 1]]].append(i)
        self.weights = weights
        self.children = children
        self.tests_at = tests_at
        positive = [w for w in weights if w > 0]
        self.m_pos = len(positive)
        self.w_min = min(positive) if positive else 0.0
        self.w_total = math.fsum(positive)
        self.budgets = []
        if positive:
            b = self.w_min
            while True:
                self.budgets.append(b)
                if b >= self.w_total:
                    break
                b *= 1 + self.eps_budget

    def _frontier(self, j: int, rewards) -> list:
        """Root frontier for budget index ``j`` (``-1`` means budget 0)."""
        if j in self._frontiers:
            return self._frontiers[j]
        if j < 0 or self.m_pos == 0:
            K = 0
            units = [0 if w == 0 else 1 for w in self.weights]
        else:
            K = math.floor(self.m_pos / self.eps_round + 1e-9)
            mu = self.eps_round * self.budgets[j] / self.m_pos
            units = [math.floor(w / mu) for w in self.weights]
        cap = self.cap

        def prune(points):
            points.sort(key=lambda p: (p[0], p[1], -p[2]))
            kept = []
            if cap is None:
                for p in points:
                    if not kept or p[2] > kept[-1][2]:
                        kept.append(p)
                return kept
            best_by_count = [-math.inf] * (cap + 1)
            for p in points:
                if max(best_by_count[: p[1] + 1]) >= p[2]:
                    continue
                kept.append(p)
                best_by_count[p[1]] = max(best_by_count[p[1]], p[2])
            return kept

        def solve(v):
            # points: (units below v, tests taken, reward, tests) with v active
            local = sorted(self.tests_at[v], key=lambda i: (-rewards[i], i))
            if cap is None:
                points = [(0, 0, math.fsum(rewards[i] for i in local), frozenset(local))]
            else:
                points = [
                    (0, h, math.fsum(rewards[i] for i in local[:h]), frozenset(local[:h]))
                    for h in range(min(cap, len(local)) + 1)
                ]
            for c in self.children[v]:
                options = [(0, 0, 0.0, frozenset())]
                for u, h, r, t in solve(c):
                    if units[c] + u <= K:
                        options.append((units[c] + u, h, r, t))
                merged = []
                for u1, h1, r1, t1 in points:
                    for u2, h2, r2, t2 in options:
                        if u1 + u2 <= K and (cap is None or h1 + h2 <= cap):
                            merged.append((u1 + u2, h1 + h2, r1 + r2, t1 | t2))
                points = prune(merged)
            return points

        top = [(units[self.top] + u, h, r, t) for u, h, r, t in solve(self.top)
               if units[self.top] + u <= K]
        self._frontiers[j] = top
        return top

    def _best(self, frontier, Q):
        tol = 1e-12 * max(1.0, Q)
        hits = [t for _, _, r, t in frontier if t and r >= Q - tol]
        if not hits:
            return None
        costs = [(self.model.cost(t), sorted(t)) for t in hits]
        c, members = min(costs)
        return frozenset(members), c

    def solve(self, problem: QuotaProblem):
        rewards = problem.rewards
        Q = problem.quota
        found = self._best(self._frontier(-1, rewards), Q)
        if found is not None or not self.budgets:
            return found
        last = len(self.budgets) - 1
        if self._best(self._frontier(last, rewards), Q) is None:
            return None
        lo, hi = -1, last  # lo infeasible (budget 0 failed), hi feasible
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._best(self._frontier(mid, rewards), Q) is None:
                lo = mid
            else:
                hi = mid
        return self._best(self._frontier(hi, rewards), Q)


class CapacitatedTreeCost(TreeCost):
    """Tree costs where a single batch holds at most ``k`` tests.

    The cost of an arbitrary set is the cheapest split into groups of at
    most ``k`` tests (a capacitated vehicle-routing problem on the tree),
    solved exactly by subset DP for up to 12 tests. Larger sets fall back
    to grouping leaves in depth-first order, reported without a guarantee.
    """

    tag = "tree_capacitated"

    def __init__(self, nodes, leaf_of_test, k: int, epsilon: float = 0.1):
        super().__init__(nodes, leaf_of_test, epsilon)
        if not isinstance(k, int) or k < 1:
            raise InputError("capacity k must be an integer >= 1")
        self.k = min(k, self.n)
        self.capacity = k
        self.family = BatchFamily.max_size(k)

    def batch_cost(self, subset) -> float:
        return super().cost(subset)

    def _grouping(self, subset):
        """Exact min-cost split of ``subset`` into groups of size <= k."""
        tests = sorted(subset)
        m = len(tests)
        if m > MAX_EXACT_GROUPING:
            raise CapacityError(f"exact capacitated grouping handles at most {MAX_EXACT_GROUPING} tests")
        full = (1 << m) - 1
        single = [0.0] * (1 << m)
        for s in range(1, full + 1):
            single[s] = self.batch_cost(t for j, t in enumerate(tests) if s >> j & 1)
        best = [0.0] * (1 << m)
        pick = [0] * (1 << m)
        for s in range(1, full + 1):
            low = s & -s
            rest = s ^ low
            b, arg = math.inf, 0
            sub = rest
            while True:
                g = sub | low
                if g.bit_count() <= self.k:
                    v = single[g] + best[s ^ g]
                    if v < b:
                        b, arg = v, g
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            best[s], pick[s] = b, arg
        groups = []
        s = full
        while s:
            g = pick[s]
            groups.append(frozenset(t for j, t in enumerate(tests) if g >> j & 1))
            s ^= g
        return best[full], groups

    def _dfs_groups(self, subset):
        order = []

        def walk(v):
            order.extend(sorted(i for i in subset if self.test_node[i - 1] == v))
            for c in self.children[v]:
                walk(c)

        walk(self.root)
        return [frozenset(order[j:j + self.k]) for j in range(0, len(order), self.k)]

    def cost(self, subset):
        subset = self.check_tests(subset)
        if len(subset) <= self.k:
            return self.batch_cost(subset)
        return self._grouping(subset)[0]

    def exact_value(self, subset):
        subset = self.check_tests(subset)
        if not subset:
            return 0.0, []
        if len(subset) <= self.k:
            return self.batch_cost(subset), [subset]
        c, groups = self._grouping(subset)
        return c, groups

    def value(self, subset):
        subset = self.check_tests(subset)
        if len(subset) <= MAX_EXACT_GROUPING:
            return self.exact_value(subset)
        groups = self._dfs_groups(subset)
        return math.fsum(self.batch_cost(g) for g in groups), groups

    def cost_table(self):
        if self.n > 16:
            raise CapacityError("capacitated cost table handles n <= 16")
        single = self.tree_table()
        full = (1 << self.n) - 1
        best = [0.0] * (full + 1)
        for s in range(1, full + 1):
            low = s & -s
            rest = s ^ low
            b = math.inf
            sub = rest
            while True:
                g = sub | low
                if g.bit_count() <= self.k:
                    v = single[g] + best[s ^ g]
                    if v < b:
                        b = v
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            best[s] = b
        return best

    @property
    def gamma(self):
        return 1.0 if self.n <= MAX_EXACT_GROUPING else math.inf

    def ratio(self, instance: Instance, U):
        return super().ratio(instance, U, cap=self.k)

    def to_dict(self):
        out = super().to_dict()
        out["type"] = self.tag
        out["k"] = self.capacity
        return out


def capacitated_tree_model(model: TreeCost, k: int) -> CapacitatedTreeCost:
    return CapacitatedTreeCost(model.nodes, model.leaf_of_test, k, model.epsilon)

