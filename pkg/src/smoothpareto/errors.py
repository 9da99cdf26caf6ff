"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input problems exit with 2, guard
refusals with 3 and invariant failures with 4.
"""


class ParetoError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(ParetoError, ValueError):
    """An argument broke an operation's precondition."""


class GuardError(ParetoError, ValueError):
    """A size guard refused the request (e.g. exponential enumeration)."""

    def __init__(self, what: str, value: int, limit: int):
        super().__init__(f"{what}={value} exceeds the limit of {limit}")
        self.what = what
        self.value = value
        self.limit = limit


class DomainError(ParetoError, ValueError):
    """A value lies outside the domain where an operation is defined."""


class InfeasibleError(ParetoError, ValueError):
    """No feasible solution exists."""


class ParseError(ParetoError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class InvariantError(ParetoError, AssertionError):
    """An internal consistency check failed; indicates a bug."""
