"""Exception types shared across the package.

Each exception carries the process exit code the command line tool maps it
to: 1 for input and validation problems, 2 for infeasible optimization
set-ups, 3 for internal invariant failures.
"""

from __future__ import annotations


class RiskPoolsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class DataValidationError(RiskPoolsError):
    """Malformed or inconsistent input data or configuration."""

    exit_code = 1


class InfeasibleError(RiskPoolsError):
    """No allocation satisfies the membership constraints."""

    exit_code = 2


class InternalInvariantError(RiskPoolsError):
    """A result violated an invariant the implementation must uphold."""

    exit_code = 3
