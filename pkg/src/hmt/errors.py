"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: invalid arguments -> 2,
capacity/budget limits -> 3, numerical failures -> 4.
"""


class HmtError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(HmtError, ValueError):
    """A caller violated a precondition (bad k, odd order, malformed input)."""


class CapacityError(HmtError):
    """A configured cap or budget would be exceeded; try a cheaper method."""


class NumericError(HmtError):
    """A numerical routine failed to reach its accuracy contract."""
