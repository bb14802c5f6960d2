"""Densest-r-edges (DrE) reduction to series testing.

Every edge becomes a test that needs both of its endpoint "machines" and
fails with probability ``ln|E| / r``. A batch costs the number of distinct
endpoints it touches. Any cheap testing sequence yields a small vertex set
inducing many edges, and a bicriteria DrE solver can be amplified into a
full solution by re-running it on what is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

from .core import Instance, expected_cost, log_pass_prob
from .costs.base import CostModel
from .exact import MAX_EXACT_N, exact_ratio, exact_sst
from .exceptions import CapacityError, ContractViolation, InputError

MAX_AUDIT_EDGES = 12


@dataclass(frozen=True)
class DreInstance:
    vertices: int
    edges: tuple
    r: int

    def __post_init__(self):
        if not isinstance(self.vertices, int) or self.vertices < 0:
            raise InputError("vertices must be a nonnegative integer")
        edges = []
        seen = set()
        for k, e in enumerate(self.edges):
            try:
                u, v = (int(x) for x in e)
            except (TypeError, ValueError) as exc:
                raise InputError(f"edges[{k}]: expected a pair of vertex ids") from exc
            if u == v:
                raise InputError(f"edges[{k}]: self-loop at vertex {u}")
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise InputError(f"edges[{k}]: vertex out of range 0..{self.vertices - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"edges[{k}]: duplicate edge {key}")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "edges", tuple(edges))
        if not isinstance(self.r, int) or self.r < 1:
            raise InputError("target r must be an integer >= 1")
        if self.r > len(edges):
            raise InputError(f"target r = {self.r} exceeds the number of edges {len(edges)}")

    def induced(self, S) -> int:
        return induced_edges(self.edges, S)

    def to_dict(self) -> dict:
        return {"vertices": self.vertices, "edges": [list(e) for e in self.edges], "r": self.r}

    @classmethod
    def from_dict(cls, data: dict) -> "DreInstance":
        for name in ("vertices", "edges", "r"):
            if name not in data:
                raise InputError(f"graph: missing field {name!r}")
        return cls(data["vertices"], tuple(data["edges"]), data["r"])


def induced_edges(edges, S) -> int:
    S = set(S)
    return sum(1 for u, v in edges if u in S and v in S)


class AndCoverageCost(CostModel):
    """``c(B) = |union of M_i over i in B|``: a test needs all of its machines."""

    tag = "and_coverage"

    def __init__(self, machine_sets):
        sets = tuple(frozenset(m) for m in machine_sets)
        super().__init__(len(sets))
        self.machine_sets = sets
        self._table = None

    def cost(self, subset):
        subset = self.check_tests(subset)
        return float(len(frozenset().union(*(self.machine_sets[i - 1] for i in subset))))

    def cost_table(self):
        if self.n > MAX_EXACT_N:
            raise CapacityError(f"cost table needs n <= {MAX_EXACT_N}")
        if self._table is None:
            ids = {m: k for k, m in enumerate(sorted(frozenset().union(*self.machine_sets)))}
            bits = [sum(1 << ids[m] for m in s) for s in self.machine_sets]
            union = [0] * (1 << self.n)
            for mask in range(1, 1 << self.n):
                low = (mask & -mask).bit_length() - 1
                union[mask] = union[mask & (mask - 1)] | bits[low]
            self._table = [float(u.bit_count()) for u in union]
        return self._table

    def ratio(self, instance: Instance, U):
        batch, _ = exact_ratio(instance, U, self)
        return batch, self.cost(batch)

    def to_dict(self):
        return {"type": self.tag, "machine_sets": [sorted(m) for m in self.machine_sets]}


def dre_to_sst(dre: DreInstance) -> tuple:
    """Reduced ``(Instance, AndCoverageCost)``: one test per edge."""
    m = len(dre.edges)
    if m <= 1:
        raise InputError("reduction needs at least two edges (ln|E| = 0 gives a test that never fails)")
    if dre.r <= math.log(m):
        raise InputError(
            f"reduction requires r > ln|E| = {math.log(m):.10g}; for smaller r a "
            "trivial logarithmic approximation already exists"
        )
    q = math.log(m) / dre.r
    instance = Instance(tuple([q] * m))
    return instance, AndCoverageCost([set(e) for e in dre.edges])


@dataclass(frozen=True)
class Recovery:
    vertices: frozenset
    prefix: int  # number of leading batches used
    induced: int
    sequence_cost: float
    size_ok: bool  # |S| <= 2 * expected cost
    edges_ok: bool  # E(S) >= r ln 2 / ln|E|
    half_edges_ok: bool  # E(S) >= r / (2 ln|E|)

    @property
    def ok(self) -> bool:
        return self.size_ok and self.edges_ok

    @property
    def proven_ok(self) -> bool:
        """The pair of bounds that always holds for this recovery rule.

        From ``(1 - q)^t < 1/2`` one only gets ``t > ln 2 / -ln(1 - q)``,
        which is below ``ln 2 / q``, so ``edges_ok`` can fail; it is never
        below ``1 / (2q)``.
        """
        return self.size_ok and self.half_edges_ok


def recover_dre(instance: Instance, sequence, dre: DreInstance, cost=None) -> Recovery:
    """Vertex set from the batches run while the pass probability stays >= 1/2."""
    cost = cost if cost is not None else AndCoverageCost([set(e) for e in dre.edges])
    batches = [frozenset(b) for b in sequence]
    j, log_reach = 0, 0.0
    log_half = math.log(0.5)
    for b in batches:
        if log_reach < log_half - 1e-12:
            break
        j += 1
        log_reach += log_pass_prob(instance, b)
    S = frozenset(x for b in batches[:j] for i in b for x in dre.edges[i - 1])
    c = expected_cost(instance, batches, cost)
    induced = dre.induced(S)
    log_m = math.log(len(dre.edges))
    sharp = dre.r * math.log(2) / log_m
    half = dre.r / (2 * log_m)
    return Recovery(S, j, induced, c, len(S) <= 2 * c * (1 + 1e-12),
                    induced >= sharp * (1 - 1e-12), induced >= half * (1 - 1e-12))


def brute_force_dre(dre: DreInstance, target: int | None = None) -> frozenset:
    """Smallest vertex set inducing at least ``target`` edges (default ``r``);
    lexicographically first among ties."""
    target = dre.r if target is None else target
    if target <= 0:
        return frozenset()
    touched = sorted({x for e in dre.edges for x in e})
    if len(touched) > 24:
        raise CapacityError("brute-force DrE handles at most 24 non-isolated vertices")
    for k in range(2, len(touched) + 1):
        for A in combinations(touched, k):
            if induced_edges(dre.edges, A) >= target:
                return frozenset(A)
    raise InputError(f"no vertex set induces {target} edges")


@dataclass(frozen=True)
class LowerBoundAudit:
    opt_sst: float
    opt_dre: int
    passed: bool  # opt_sst <= 2 * opt_dre


def lb_dre_audit(dre: DreInstance) -> LowerBoundAudit:
    if len(dre.edges) > MAX_AUDIT_EDGES:
        raise CapacityError(f"lower-bound audit handles at most {MAX_AUDIT_EDGES} edges")
    instance, cost = dre_to_sst(dre)
    opt_sst = exact_sst(instance, cost).opt_cost
    opt_dre = len(brute_force_dre(dre))
    return LowerBoundAudit(opt_sst, opt_dre, opt_sst <= 2 * opt_dre * (1 + 1e-12))


def brute_force_solver(beta: float = 1.0) -> Callable:
    """Synthetic ``(1, beta)``-bicriteria DrE solver: an optimal set for the
    reduced target ``ceil(r / beta)``."""

    def solve(dre: DreInstance) -> frozenset:
        return brute_force_dre(dre, math.ceil(dre.r / beta - 1e-12))

    solve.alpha, solve.beta = 1.0, beta
    return solve


@dataclass(frozen=True)
class Amplification:
    vertices: frozenset
    induced: int
    rounds: int


def amplify_bicriteria(dre: DreInstance, solver: Callable) -> Amplification:
    """Repeat a bicriteria solver on the edges not yet induced, with the
    target lowered by what is already covered, until ``r`` edges are induced.

    The residual keeps every vertex (chosen vertices stay usable) so that
    edges between old and new vertices count.
    """
    S = frozenset()
    rounds = 0
    while dre.induced(S) < dre.r:
        got = dre.induced(S)
        rest = tuple(e for e in dre.edges if not (e[0] in S and e[1] in S))
        residual = DreInstance(dre.vertices, rest, dre.r - got)
        picked = frozenset(solver(residual))
        rounds += 1
        grown = S | picked
        if dre.induced(grown) <= got:
            raise ContractViolation("DrE solver added no induced edges")
        S = grown
    return Amplification(S, dre.induced(S), rounds)


def amplification_bound(dre: DreInstance, alpha: float, beta: float, opt: int) -> tuple:
    """``(max rounds, max vertices)`` allowed for an ``(alpha, beta)`` solver."""
    rounds = math.ceil(beta * math.log(dre.r)) + 1
    return rounds, alpha * opt * rounds


__all__ = [
    "AndCoverageCost",
    "Amplification",
    "DreInstance",
    "LowerBoundAudit",
    "Recovery",
    "amplification_bound",
    "amplify_bicriteria",
    "brute_force_dre",
    "brute_force_solver",
    "dre_to_sst",
    "induced_edges",
    "lb_dre_audit",
    "recover_dre",
]
