"""Exception hierarchy.

The CLI maps each class to a distinct exit code, so scripts can tell a bad
input file from an instance that is simply too large for an exact solver.
"""


class SSTError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(SSTError, ValueError):
    """Malformed or out-of-domain input (bad ids, probabilities, files)."""

    exit_code = 2


class CapacityError(SSTError):
    """Instance exceeds the size an exact/desk-scale routine accepts."""

    exit_code = 3


class ContractViolation(SSTError):
    """An oracle or solver broke the contract it was declared to satisfy."""

    exit_code = 4
