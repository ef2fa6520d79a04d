"""Exception hierarchy. Every error the kernel raises derives from GKError."""


class GKError(Exception):
    pass


class MixedRing(GKError):
    pass


class DegreeError(GKError):
    pass


class EvaluationError(GKError):
    pass


class LinearAlgebraError(GKError):
    pass


class NotPure(GKError):
    pass


class NotNondegenerate(GKError):
    pass


class Unsolvable(GKError):
    pass


class NonCommuting(GKError):
    pass


class NotTensorial(GKError):
    pass


class PathMismatch(GKError):
    pass


class NotIntegrable(GKError):
    pass


class NonzeroConstantTerm(GKError):
    pass


class LiftFailure(GKError):
    pass


class NotExact(GKError):
    """A right-hand side is not in the image of d on some Fourier mode."""


class NotInK2(GKError):
    pass


class KerSolveFailure(GKError):
    pass


class SupportError(GKError):
    """Mode support would exceed the configured mode cap."""
