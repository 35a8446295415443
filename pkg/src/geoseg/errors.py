"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: parameter/format problems exit 2,
topology/initialization/numerical failures exit 3.
"""


class GeosegError(Exception):
    exit_code = 1


class ParameterError(GeosegError):
    """Invalid argument value or out-of-range configuration."""
    exit_code = 2


class FormatError(ParameterError):
    """Unreadable or unsupported file content."""
    exit_code = 2


class InitializationError(GeosegError):
    """The region-initialization stage cannot produce a usable result
    (e.g. the homogeneity boundary never meets the positive cut ray)."""
    exit_code = 3


class TopologyError(GeosegError):
    """A geodesic solve cannot reach its stopping set, or a contour fails
    its closure contract."""
    exit_code = 3


class NumericalError(GeosegError):
    """Descent stalled or a solver produced an inconsistent state."""
    exit_code = 3


class DegenerateRegionError(InitializationError):
    """The initial shape is empty or covers the whole domain."""
    exit_code = 3
