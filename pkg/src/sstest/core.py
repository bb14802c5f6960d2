"""Instances, batch sequences, and evaluation of the expected testing cost.

Tests are identified by 1-based integer ids. Subsets of tests are passed
around as ``frozenset`` objects; the exact solvers convert them to bitmasks
(bit ``i - 1`` for test ``i``) with :func:`to_mask` / :func:`from_mask`.

An :class:`Instance` stores *failure* probabilities ``q_i = 1 - p_i``. The
adversarial instances used to separate plain and modified greedy have
``q_i = 2**-(i+1)``, and for ``i >= 53`` the pass probability ``1 - q_i`` is
not representable as a double while ``q_i`` itself is exact. All products of
pass probabilities are therefore accumulated as sums of ``log1p(-q_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import InputError

Cost = Callable[[frozenset], float]

# direct products are exact enough below this size; beyond it we go through logs
_LOG_SPACE_THRESHOLD = 32


def to_mask(tests: Iterable[int]) -> int:
    mask = 0
    for i in tests:
        mask |= 1 << (i - 1)
    return mask


def from_mask(mask: int) -> frozenset:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class BatchFamily:
    """Which batches may be performed together.

    ``kind`` is ``"all"``, ``"max_size"`` (batches of at most ``k`` tests) or
    ``"model_defined"``. The last one is enforced by the cost model, so the
    core treats it like ``"all"``.
    """

    kind: str = "all"
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "max_size", "model_defined"):
            raise InputError(f"unknown batch family type {self.kind!r}")
        if self.kind == "max_size" and (self.k is None or self.k < 1):
            raise InputError("max_size batch family needs an integer k >= 1")

    @classmethod
    def max_size(cls, k: int) -> "BatchFamily":
        return cls("max_size", int(k))

    def allows(self, batch) -> bool:
        if self.kind == "max_size":
            return len(batch) <= self.k
        return True

    def allows_size(self, size: int) -> bool:
        return self.kind != "max_size" or size <= self.k

    def to_dict(self) -> dict:
        if self.kind == "max_size":
            return {"type": "max_size", "k": self.k}
        return {"type": self.kind}

    @classmethod
    def from_dict(cls, data: dict) -> "BatchFamily":
        if not isinstance(data, dict) or "type" not in data:
            raise InputError("batch_family: expected an object with a 'type' field")
        if data["type"] == "max_size":
            if "k" not in data:
                raise InputError("batch_family.k: missing for type max_size")
            return cls.max_size(data["k"])
        return cls(data["type"])


ALL = BatchFamily("all")


def _fail_prob_from_pass(p) -> float:
    """Failure probability ``1 - p`` computed without cancellation.

    Strings and Decimals are subtracted in decimal arithmetic, so an input
    like ``"0.96875"`` yields exactly ``0.03125``.
    """
    if isinstance(p, (str, Decimal)):
        text = str(p).strip()
        try:
            with localcontext() as ctx:
                ctx.prec = max(50, len(text) + 10)
                return float(1 - Decimal(text))
        except ArithmeticError as exc:
            raise InputError(f"cannot parse probability {p!r}") from exc
    return 1.0 - float(p)


@dataclass(frozen=True)
class Instance:
    """``n`` independent tests with known failure probabilities.

    Build one with :meth:`from_pass_probs` when you have pass probabilities
    (the usual input form) or pass failure probabilities directly.
    """

    fail_probs: tuple
    batch_family: BatchFamily = ALL
    _log_pass: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        q = tuple(float(x) for x in self.fail_probs)
        if len(q) < 1:
            raise InputError("instance needs at least one test (n >= 1)")
        for i, qi in enumerate(q, start=1):
            if not math.isfinite(qi) or qi < 0.0 or qi > 1.0:
                raise InputError(f"pass_probs[{i}]: probability outside [0, 1]")
            if qi == 0.0:
                raise InputError(
                    f"pass_probs[{i}]: test {i} never fails (p_i = 1); "
                    "such tests carry no information and must be removed"
                )
            if qi == 1.0:
                raise InputError(f"pass_probs[{i}]: p_i = 0 is not supported")
        object.__setattr__(self, "fail_probs", q)
        object.__setattr__(self, "_log_pass", tuple(math.log1p(-x) for x in q))

    @classmethod
    def from_pass_probs(cls, pass_probs: Sequence, batch_family: BatchFamily = ALL):
        return cls(tuple(_fail_prob_from_pass(p) for p in pass_probs), batch_family)

    @property
    def n(self) -> int:
        return len(self.fail_probs)

    @property
    def pass_probs(self) -> tuple:
        return tuple(1.0 - q for q in self.fail_probs)

    @property
    def tests(self) -> frozenset:
        return frozenset(range(1, self.n + 1))

    def log_pass(self, i: int) -> float:
        return self._log_pass[i - 1]

    def check_subset(self, batch) -> frozenset:
        batch = frozenset(batch)
        for i in batch:
            if not isinstance(i, (int, np.integer)) or not 1 <= i <= self.n:
                raise InputError(f"test id {i!r} out of range 1..{self.n}")
        return batch


@dataclass(frozen=True)
class BatchSequence:
    """An ordered list of batches; a solution when it partitions the tests."""

    batches: tuple

    def __post_init__(self):
        object.__setattr__(self, "batches", tuple(frozenset(b) for b in self.batches))

    def __iter__(self):
        return iter(self.batches)

    def __len__(self):
        return len(self.batches)

    def __getitem__(self, j):
        return self.batches[j]

    def to_lists(self) -> list:
        return [sorted(b) for b in self.batches]


@dataclass(frozen=True)
class CostedSequence:
    sequence: BatchSequence
    batch_cost_bounds: tuple

    def __post_init__(self):
        bounds = tuple(float(c) for c in self.batch_cost_bounds)
        if len(bounds) != len(self.sequence):
            raise InputError("need exactly one cost bound per batch")
        if any(c < 0 or math.isnan(c) for c in bounds):
            raise InputError("cost bounds must be nonnegative")
        object.__setattr__(self, "batch_cost_bounds", bounds)


@dataclass(frozen=True)
class Violation:
    kind: str  # "range", "empty", "overlap", "coverage", "family"
    tests: tuple
    batch_index: int | None
    message: str


def log_pass_prob(instance: Instance, batch) -> float:
    return math.fsum(instance.log_pass(i) for i in batch)


def pass_prob(instance: Instance, batch) -> float:
    """Probability that every test in ``batch`` passes."""
    batch = instance.check_subset(batch)
    if len(batch) > _LOG_SPACE_THRESHOLD:
        return math.exp(log_pass_prob(instance, batch))
    return float(math.prod(1.0 - instance.fail_probs[i - 1] for i in batch))


def fail_prob(instance: Instance, batch) -> float:
    """Probability that at least one test in ``batch`` fails, ``1 - P(batch)``."""
    batch = instance.check_subset(batch)
    return -math.expm1(log_pass_prob(instance, batch))


def validate_partition(instance: Instance, seq) -> list:
    """Return every way ``seq`` fails to be a valid solution; empty if valid."""
    violations = []
    seen: dict = {}
    for j, batch in enumerate(seq):
        batch = frozenset(batch)
        bad = sorted(i for i in batch if not (isinstance(i, (int, np.integer)) and 1 <= i <= instance.n))
        if bad:
            violations.append(Violation("range", tuple(bad), j, f"batch {j}: ids {bad} out of range 1..{instance.n}"))
        if not batch:
            violations.append(Violation("empty", (), j, f"batch {j} is empty"))
        overlap = sorted(i for i in batch if i in seen)
        if overlap:
            violations.append(
                Violation("overlap", tuple(overlap), j,
                          f"batch {j} repeats test(s) {overlap} already in batch {seen[overlap[0]]}")
            )
        for i in batch:
            seen.setdefault(i, j)
        if not instance.batch_family.allows(batch):
            violations.append(
                Violation("family", tuple(sorted(batch)), j,
                          f"batch {j} has {len(batch)} tests; family allows at most {instance.batch_family.k}")
            )
    missing = sorted(set(range(1, instance.n + 1)) - set(seen))
    if missing:
        violations.append(Violation("coverage", tuple(missing), None, f"test(s) {missing} missing from every batch"))
    return violations


def _as_sequence(seq) -> BatchSequence:
    return seq if isinstance(seq, BatchSequence) else BatchSequence(tuple(seq))


def _require_partition(instance: Instance, seq) -> BatchSequence:
    seq = _as_sequence(seq)
    problems = validate_partition(instance, seq)
    if problems:
        raise InputError("invalid batch sequence: " + "; ".join(v.message for v in problems))
    return seq


def _discounted_sum(instance: Instance, batches, costs) -> float:
    total = 0.0
    log_reach = 0.0
    for batch, c in zip(batches, costs):
        total += math.exp(log_reach) * c
        log_reach += log_pass_prob(instance, batch)
    return total


def expected_cost(instance: Instance, seq, cost: Cost) -> float:
    """Expected cost of running ``seq`` until the first batch with a failure."""
    seq = _require_partition(instance, seq)
    return _discounted_sum(instance, seq, [cost(b) for b in seq])


def expected_cost_upper(instance: Instance, cs: CostedSequence) -> float:
    """Same sum as :func:`expected_cost` with the certified bounds as costs."""
    seq = _require_partition(instance, cs.sequence)
    return _discounted_sum(instance, seq, cs.batch_cost_bounds)


def monte_carlo_cost(instance: Instance, seq, cost: Cost, trials: int, seed: int,
                     chunk: int = 100_000) -> tuple:
    """Sampled estimate of the expected cost; returns ``(mean, stderr)``."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    seq = _require_partition(instance, seq)
    rng = np.random.default_rng(seed)
    q = np.asarray(instance.fail_probs)
    batch_costs = np.array([cost(b) for b in seq], dtype=float)
    prefix = np.cumsum(batch_costs)
    index = [np.array(sorted(b)) - 1 for b in seq]

    samples = []
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        failed = rng.random((m, instance.n)) < q
        batch_failed = np.stack([failed[:, idx].any(axis=1) for idx in index], axis=1)
        # batches run up to and including the first one containing a failure
        stop = np.where(batch_failed.any(axis=1), batch_failed.argmax(axis=1), len(seq) - 1)
        samples.append(prefix[stop])
        done += m
    incurred = np.concatenate(samples)
    lo, hi = incurred.min(), incurred.max()
    if lo == hi:
        return float(lo), 0.0
    return float(incurred.mean()), float(incurred.std(ddof=1) / math.sqrt(trials))
