"""Batched series testing with subadditive costs.

The main entry points are :func:`modified_greedy` (approximation with any
cost model's oracles) and :func:`exact_sst` (optimal sequence for small
instances). Cost models live in :mod:`sstest.costs`.
"""

from .core import (
    ALL,
    BatchFamily,
    BatchSequence,
    Instance,
    expected_cost,
    fail_prob,
    monte_carlo_cost,
    pass_prob,
    validate_partition,
)
from .estimators import ExactSST, ModifiedGreedy, PlainGreedy
from .exact import exact_mssc, exact_optimum, exact_oracles, exact_qp, exact_ratio, exact_sst
from .exceptions import CapacityError, ContractViolation, InputError, SSTError
from .greedy import gap_report, modified_greedy, plain_greedy

__version__ = "0.1.0"

__all__ = [
    "ALL",
    "BatchFamily",
    "BatchSequence",
    "CapacityError",
    "ContractViolation",
    "ExactSST",
    "InputError",
    "Instance",
    "ModifiedGreedy",
    "PlainGreedy",
    "SSTError",
    "exact_mssc",
    "exact_optimum",
    "exact_oracles",
    "exact_qp",
    "exact_ratio",
    "exact_sst",
    "expected_cost",
    "fail_prob",
    "gap_report",
    "modified_greedy",
    "monte_carlo_cost",
    "pass_prob",
    "plain_greedy",
    "validate_partition",
]
