"""Exception types raised across the package.

Everything derives from MlapError so callers can catch one base class.
The CLI maps InvariantViolation to exit code 1 and every other MlapError
(bad inputs, unreadable files, oversized searches) to exit code 2.
"""


class MlapError(Exception):
    """Base class for all package errors."""


class BadParams(MlapError):
    """Arguments outside an operation's documented domain."""


class CycleDetected(BadParams):
    """Parent links do not form a tree rooted at node 0."""


class NonPositiveWeight(BadParams):
    """A non-root node has weight <= 0 (or the root has weight != 0)."""


class MultipleRootChildren(BadParams):
    """Root has more than one child while a single-child root was required."""


class UnknownNode(BadParams):
    """A request or service names a node id outside the tree."""


class InvalidService(MlapError):
    """A service's node set is not a root-containing connected subtree."""


class InfeasibleSchedule(MlapError):
    """A schedule leaves a request unserved or served after its deadline."""


class UnsupportedCostKind(MlapError):
    """Operation applied to a cost shape it does not handle."""


class NonMonotoneSamples(BadParams):
    """Discrete cost samples decrease somewhere."""


class MissingGap(BadParams):
    """Time-stretch was asked to smooth a jump with no gap scheduled at it."""


class AlgorithmStall(MlapError):
    """An online run ended with pending requests at the horizon."""


class InvariantViolation(MlapError):
    """A runtime self-check (guaranteed bound or ordering) failed."""


class OracleTooLarge(MlapError):
    """Exhaustive search would exceed the configured size limits."""


class UnstabbableInterval(MlapError):
    """No candidate point can hit an interval in a hitting-set call."""


class OverflowGuard(BadParams):
    """Requested construction would overflow exact float arithmetic."""
