"""Exception hierarchy for the onemedian package."""


class OneMedianError(Exception):
    """Base class for all domain errors raised by this package."""


class GraphError(OneMedianError):
    """Invalid graph construction input."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class NegativeCostError(GraphError):
    """Edge cost is negative (or not a finite number)."""


class NodeIdOutOfRangeError(GraphError):
    pass


class DisconnectedGraphError(OneMedianError):
    """Instance construction requires a connected graph."""


class InstanceError(OneMedianError):
    """Invalid customer set or weights."""


class TargetUnreachableError(OneMedianError):
    """Truncated Dijkstra exhausted the queue before covering its targets."""


class ParseError(OneMedianError):
    """Malformed graph/instance text. Carries the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FeasibilityError(OneMedianError):
    """Generator parameters violate a family's feasibility constraints."""


class CapExceededError(OneMedianError):
    """A configured size cap was exceeded."""


class NonIntegerWeightError(OneMedianError):
    """Weight expansion requires positive integer customer weights."""


class SizeGuardError(OneMedianError):
    """Instance is too large for the brute-force oracle."""


class EmptyInputError(OneMedianError):
    pass


class ConfigError(OneMedianError):
    """Invalid benchmark suite configuration (treated as a usage error by the CLI)."""
