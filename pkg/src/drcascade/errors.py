"""Exception hierarchy and warnings shared across the package."""


class DrCascadeError(Exception):
    """Base class for all errors raised by drcascade."""


class GraphError(DrCascadeError):
    """Base class for graph construction errors."""


class DisconnectedGraph(GraphError):
    """The edge set does not connect all nodes."""


class SelfLoop(GraphError):
    """An edge connects a node to itself."""


class DuplicateEdge(GraphError):
    """The same unordered node pair appears more than once."""


class NonpositiveWeight(GraphError):
    """An edge weight is zero or negative."""


class InvalidRadius(GraphError):
    """Circulant neighborhood radius outside 1..floor((n-1)/2)."""


class EigenFailure(DrCascadeError):
    """The symmetric eigensolver failed to converge."""


class KernelMismatch(DrCascadeError):
    """Laplacian kernel is not exactly span{1}: lambda_1 not ~0, or lambda_2 ~0."""


class UnstableDelay(DrCascadeError):
    """Time delay violates tau < pi/(2*lambda_n); network dynamics unstable."""


class DegenerateMarginal(DrCascadeError):
    """Pairwise correlation numerically at +-1; covariance is broken."""


class OutOfRange(DrCascadeError):
    """A scalar parameter is outside its admissible interval."""


class PerturbationTooLarge(DrCascadeError):
    """Weight perturbation has ||Delta L0^+|| >= 1; no finite ambiguity radius."""


class RegimeStraddle(DrCascadeError):
    """Perturbed spectrum straddles the critical eigenvalue; no bound available."""


class NumericalUnderflow(DrCascadeError):
    """Tail probability underflowed in double precision; use the approximate path."""


class QuadratureNonconvergence(DrCascadeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class TooFewSamples(DrCascadeError):
    """Not enough samples for the requested estimate."""


class ConfigError(DrCascadeError):
    """Invalid simulation or scenario configuration."""


class ConditioningWarning(UserWarning):
    """Results are formally defined but extremely ill-conditioned."""
