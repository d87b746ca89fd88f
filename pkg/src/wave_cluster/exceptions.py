"""
Error hierarchy for wave-cluster.

Every error raised by the library derives from WaveClusterError and carries
the process exit status the command-line interface reports for it.
"""


class WaveClusterError(Exception):
    """Base class for all wave-cluster errors."""

    exit_code = 1


class ValidationError(WaveClusterError, ValueError):
    """Invalid input: graph, configuration or argument out of range."""

    exit_code = 2


class GraphValidationError(ValidationError):
    """Edge list or adjacency violates a graph invariant."""


class NonSymmetricError(GraphValidationError):
    pass


class SelfLoopError(GraphValidationError):
    pass


class NonPositiveWeightError(GraphValidationError):
    pass


class IsolatedNodeError(GraphValidationError):
    pass


class DuplicateEdgeError(GraphValidationError):
    pass


class NodeIndexError(GraphValidationError, IndexError):
    pass


class EdgeListFormatError(GraphValidationError):
    """Malformed line in an edge-list file."""


class DisconnectedGraphError(ValidationError):
    """Graph has more than one connected component (lambda_2 = 0)."""


class InvalidSpeedError(ValidationError):
    """Wave speed outside the stable range 0 < c < sqrt(2)."""


class DomainError(ValidationError):
    """Argument outside the domain of a closed-form expression."""


class MixingTimeUndefinedError(DomainError):
    """Mixing time requested for lambda_2 >= 1."""


class TooShortError(ValidationError):
    """History too short for a meaningful spectrum."""


class TooLargeError(ValidationError):
    """Graph exceeds the dense-solver node limit."""


class SizeMismatchError(ValidationError):
    pass


class GeneratorSpecError(ValidationError):
    """Unknown generator name or malformed generator arguments."""


class NumericalError(WaveClusterError, ArithmeticError):
    """A numerical procedure failed or produced an unusable result."""

    exit_code = 3


class NumericalDivergenceError(NumericalError):
    """Wave amplitude exceeded the divergence guard."""


class InsufficientPeaksError(NumericalError):
    """Fewer spectral peaks than requested clusters need."""


class NoisyFloorError(NumericalError):
    """No spectral bin rises above the noise floor."""


class ZeroComponentError(NumericalError):
    """Node sits on a nodal line: coefficient too small to carry a sign."""


class NotConvergedError(NumericalError):
    """Eigen-decomposition residual above tolerance."""


class CholeskyError(NumericalError):
    """Gram matrix not positive definite after restarts."""


class BudgetExceededError(WaveClusterError):
    """Horizon or round budget exhausted before convergence."""

    exit_code = 4


class DegenerateEigengapWarning(UserWarning):
    """Requested cut falls inside a (near-)repeated eigenvalue."""
