"""Ratio oracles from quota solvers.

With rewards ``r_i = -ln p_i`` the failure probability of a batch is
``d(r(B))`` where ``d(x) = 1 - exp(-x)``, so minimizing
``cost(B) / (1 - P(B))`` becomes a search over reward quotas: for each quota
on a geometric grid, ask a (possibly bicriteria) quota solver for a cheap set
meeting it, and keep the best ratio seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .core import ALL, BatchFamily, Instance
from .exact import MAX_EXACT_N, exact_qp
from .exceptions import CapacityError, ContractViolation, InputError


def d(x: float) -> float:
    """``1 - exp(-x)``: failure probability of a batch with total reward ``x``."""
    if x < 0:
        raise InputError("d is defined for nonnegative rewards only")
    return -math.expm1(-x)


def rewards(instance: Instance, tests=None) -> dict:
    """Map test id to its reward ``-ln p_i`` (strictly positive)."""
    tests = instance.tests if tests is None else tests
    return {i: -instance.log_pass(i) for i in tests}


def ratio_value(instance: Instance, batch, cost) -> float:
    batch = instance.check_subset(batch)
    if not batch:
        raise InputError("ratio of an empty batch is undefined")
    r = math.fsum(-instance.log_pass(i) for i in batch)
    return cost(batch) / d(r)


@dataclass(frozen=True)
class QuotaProblem:
    """Minimize ``cost(S)`` over ``S`` inside ``ground`` with ``r(S) >= quota``."""

    ground: frozenset
    rewards: Mapping
    quota: float
    cost: Callable

    def reward(self, subset) -> float:
        return math.fsum(self.rewards[i] for i in subset)


@dataclass(frozen=True)
class BicriteriaSolver:
    """Quota solver with cost within ``alpha`` of optimal and reward at least
    ``quota / beta``.

    ``solve`` returns ``(subset, cost_bound)`` with ``cost_bound`` a certified
    upper bound on the subset's cost, or ``None`` if it finds nothing.
    """

    solve: Callable
    alpha: float = 1.0
    beta: float = 1.0
    name: str = "solver"
    cost: Callable | None = None


def exact_qp_solver(cost, family: BatchFamily | None = None) -> BicriteriaSolver:
    """Enumeration solver, ``alpha = beta = 1``.

    The quota grid asks about the same ground set many times, so the reward
    and cost of every subset are tabulated once per ground set and each
    quota is answered by a vectorized scan (ties go to the smallest bitmask).
    """
    family = family or ALL
    tables = {}

    def table(rewards):
        ground = tuple(sorted(rewards))
        key = (ground, tuple(rewards[i] for i in ground))
        if key not in tables:
            m = len(ground)
            if m > MAX_EXACT_N:
                raise CapacityError(f"exact quota solver handles ground sets of size <= {MAX_EXACT_N}")
            masks = np.arange(1 << m)
            reward = np.zeros(1 << m)
            size = np.zeros(1 << m, dtype=np.int64)
            for j, i in enumerate(ground):
                has = (masks >> j) & 1 == 1
                reward[has] += rewards[i]
                size[has] += 1
            price = np.array([cost(_members(ground, mask)) for mask in range(1 << m)])
            allowed = np.array([family.allows_size(k) for k in range(m + 1)])
            tables[key] = (ground, reward, price, allowed[size] & (masks > 0))
        return tables[key]

    def solve(problem: QuotaProblem):
        Q = problem.quota
        if Q <= 1e-12 * max(1.0, abs(Q)):
            return None
        ground, reward, price, usable = table(problem.rewards)
        feasible = np.flatnonzero(usable & (reward >= Q - 1e-12 * max(1.0, abs(Q))))
        if feasible.size == 0:
            return None
        best = int(feasible[np.argmin(price[feasible])])
        return _members(ground, best), float(price[best])

    return BicriteriaSolver(solve, 1.0, 1.0, "exact", cost)


def _members(ground, mask: int) -> frozenset:
    """Members of ``ground`` selected by the bits of ``mask``."""
    return frozenset(t for j, t in enumerate(ground) if mask >> j & 1)


def quota_grid(r_min: float, r_max: float, eps: float) -> list:
    """Quotas ``r_min * (1 + eps)**i`` for ``i = 0..L``, the last one >= ``r_max``."""
    if eps <= 0:
        raise InputError("epsilon must be positive")
    L = max(0, math.ceil(math.log(r_max / r_min) / math.log1p(eps)))
    while r_min * (1 + eps) ** L < r_max:
        L += 1
    return [r_min * (1 + eps) ** i for i in range(L + 1)]


def ratio_from_quota(instance: Instance, U, solver: BicriteriaSolver, eps: float,
                     audit: bool = False) -> tuple:
    """Approximate min-ratio batch inside ``U`` via a quota solver.

    Returns ``(batch, ratio, cost_bound)``; the ratio is within
    ``(1 + eps) * alpha * beta`` of the best batch. Grid points where the
    solver finds nothing are skipped. With ``audit`` each solver answer is
    also compared against :func:`exact_qp` (small ``U`` only).
    """
    U = instance.check_subset(U)
    if not U:
        raise InputError("ratio oracle needs a nonempty residual set")
    if eps <= 0:
        raise InputError("epsilon must be positive")
    r = rewards(instance, U)

    def pick(batch, bound):
        return batch, bound / d(math.fsum(r[i] for i in batch)), bound

    if len(U) == 1:
        (i,) = U
        single = frozenset(U)
        result = solver.solve(QuotaProblem(single, r, r[i], solver.cost))
        if result is not None:
            return pick(single, result[1])

    r_min = min(instance.fail_probs[i - 1] for i in U)
    r_max = math.fsum(r.values())
    best = None
    for Q in quota_grid(r_min, r_max, eps):
        problem = QuotaProblem(U, r, Q, solver.cost)
        result = solver.solve(problem)
        if result is None:
            continue
        S, bound = result
        S = frozenset(S)
        _check_answer(problem, S, bound, solver, audit)
        cand = pick(S, bound)
        if best is None or cand[1] < best[1]:
            best = cand
    if best is None:
        raise ContractViolation(f"{solver.name} quota solver found no batch at any quota")
    return best


def _check_answer(problem: QuotaProblem, S, bound, solver, audit):
    if not S:
        raise ContractViolation(f"{solver.name} returned an empty set")
    if not S <= problem.ground:
        raise ContractViolation(f"{solver.name} returned tests {sorted(S - problem.ground)} outside the residual")
    need = problem.quota / solver.beta
    if problem.reward(S) < need * (1 - 1e-9):
        raise ContractViolation(
            f"{solver.name} reward {problem.reward(S):.10g} below quota/beta = {need:.10g}"
        )
    if audit and problem.cost is not None and len(problem.ground) <= MAX_EXACT_N:
        opt = exact_qp(problem.rewards, problem.cost, problem.quota)
        if opt is not None and bound > solver.alpha * problem.cost(opt) * (1 + 1e-9) + 1e-12:
            raise ContractViolation(
                f"{solver.name} cost {bound:.10g} exceeds alpha * OPT = {solver.alpha * problem.cost(opt):.10g}"
            )
        if problem.cost(S) > bound * (1 + 1e-9) + 1e-12:
            raise ContractViolation(f"{solver.name} cost bound {bound:.10g} below the true cost")

