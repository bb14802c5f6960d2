"""Seeded instance generators. Same arguments, same instance."""

from __future__ import annotations

import math
from decimal import Decimal, localcontext

import numpy as np

from .core import Instance
from .costs import (
    AdditiveCost,
    BatchSetupCost,
    CapacitatedTreeCost,
    ConcaveCardinalityCost,
    MachineActivationCost,
    RoutingCost,
    TreeCost,
)
from .exceptions import InputError
from .hardness import DreInstance


def _check_n(n: int):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError("n must be a positive integer")


def _random_pass_probs(rng, n: int, low: float = 0.05, high: float = 0.95) -> Instance:
    probs = [f"{p:.4f}" for p in rng.uniform(low, high, n)]
    return Instance.from_pass_probs(probs)


def bad_greedy_pass_probs(n: int) -> list:
    """Exact decimal strings ``1 - 2^-(i+1)`` for ``i = 1..n``."""
    with localcontext() as ctx:
        ctx.prec = n + 50
        return [str(1 - Decimal(2) ** -(i + 1)) for i in range(1, n + 1)]


def bad_greedy(n: int, seed=None) -> tuple:
    """Greedy's worst case: ``q_i = 2^-(i+1)``, ``c(S) = min(|S|, sqrt n)``."""
    _check_n(n)
    root = math.isqrt(n)
    if root * root != n:
        raise InputError(f"bad_greedy needs n to be a perfect square, got {n}")
    instance = Instance(tuple(math.ldexp(1.0, -(i + 1)) for i in range(1, n + 1)))
    model = ConcaveCardinalityCost([min(k, root) for k in range(n + 1)])
    return instance, model


def random_additive(n: int, seed: int = 0) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    return instance, AdditiveCost(np.round(rng.uniform(0.1, 10.0, n), 3).tolist())


def random_batch_setup(n: int, seed: int = 0, epsilon: float = 0.1) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    setup = round(float(rng.uniform(0.5, 10.0)), 3)
    return instance, BatchSetupCost(setup, np.round(rng.uniform(0.1, 5.0, n), 3).tolist(), epsilon)


def random_concave(n: int, seed: int = 0) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    steps = np.sort(np.round(rng.uniform(0.0, 3.0, n), 3))[::-1]
    g = [0.0] + np.cumsum(steps).round(6).tolist()
    return instance, ConcaveCardinalityCost(g)


def _random_tree_nodes(rng, n: int) -> tuple:
    internal = max(1, n - 1)
    nodes = [{"id": 0, "weight": round(float(rng.uniform(0.0, 2.0)), 3), "parent": None}]
    for v in range(1, internal):
        nodes.append({"id": v, "weight": round(float(rng.uniform(0.0, 5.0)), 3),
                      "parent": int(rng.integers(0, v))})
    leaves = []
    for i in range(n):
        leaf = internal + i
        nodes.append({"id": leaf, "weight": round(float(rng.uniform(0.0, 5.0)), 3),
                      "parent": int(rng.integers(0, internal))})
        leaves.append(leaf)
    return nodes, leaves


def random_tree(n: int, seed: int = 0, epsilon: float = 0.1) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    nodes, leaves = _random_tree_nodes(rng, n)
    return instance, TreeCost(nodes, leaves, epsilon)


def random_capacitated_tree(n: int, k: int, seed: int = 0, epsilon: float = 0.1) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    nodes, leaves = _random_tree_nodes(rng, n)
    model = CapacitatedTreeCost(nodes, leaves, k, epsilon)
    return Instance(instance.fail_probs, model.family), model


def random_machines(n: int, seed: int = 0) -> tuple:
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    m = max(2, n // 2 + 1)
    member = rng.random((m, n)) < 0.4
    for i in range(n):
        if not member[:, i].any():
            member[int(rng.integers(0, m)), i] = True
    costs = np.round(rng.uniform(1.0, 5.0, m), 3)
    machines = [{"cost": float(costs[j]), "tests": [i + 1 for i in range(n) if member[j, i]]}
                for j in range(m)]
    return instance, MachineActivationCost(machines, n)


def random_metric(n: int, seed: int = 0, epsilon: float = 0.1) -> tuple:
    """Root plus ``n`` points in the unit square, Euclidean distances."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    instance = _random_pass_probs(rng, n)
    pts = rng.uniform(0.0, 1.0, (n + 1, 2))
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    return instance, RoutingCost(dist, 0, epsilon)


def random_graph(vertices: int, seed: int = 0, density: float = 0.5) -> DreInstance:
    """Erdos-Renyi graph with a target ``r`` just above ``ln |E|``."""
    rng = np.random.default_rng(seed)
    while True:
        edges = [(u, v) for u in range(vertices) for v in range(u + 1, vertices)
                 if rng.random() < density]
        if len(edges) >= 2:
            break
    low = math.floor(math.log(len(edges))) + 1
    r = int(rng.integers(low, len(edges) + 1))
    return DreInstance(vertices, tuple(edges), r)


GENERATORS = {
    "bad_greedy": bad_greedy,
    "random_additive": random_additive,
    "random_tree": random_tree,
    "random_machines": random_machines,
    "random_metric": random_metric,
}
