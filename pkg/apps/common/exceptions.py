"""
Error taxonomy shared by every latmap app.

Management commands map these onto exit codes: input problems exit with 2,
runtime/numeric failures with 1 (see apps.cli.management.base).
"""


class LatmapError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(LatmapError, ValueError):
    """A caller passed a value outside the operation's domain."""


class FormatError(InvalidArgument):
    """An on-disk document does not match its schema."""


class InvalidState(LatmapError, RuntimeError):
    """An object is not in a state that permits the operation (e.g. a stale tape)."""


class NumericError(LatmapError, ArithmeticError):
    """NaN/inf appeared where finite values are required."""


class DegenerateWeights(NumericError):
    """Every importance weight underflowed; the caller should reinitialise particles."""


class UnsupportedOperation(LatmapError, NotImplementedError):
    """The configured variant does not provide this operation."""


class NoPathFound(LatmapError):
    def __init__(self, message: str, expanded_nodes: int = 0):
        super().__init__(message)
        self.expanded_nodes = expanded_nodes


class NoPoseFound(LatmapError):
    """Every start of the pose search diverged."""
