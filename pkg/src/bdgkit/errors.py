"""Exception types shared across the toolkit."""


class BdgError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class NonConvergence(BdgError):
    pass


class SingularBlowup(BdgError):
    pass


class QuadratureFailure(BdgError):
    pass


class OutOfChart(BdgError):
    pass


class BoundaryTooClose(BdgError):
    pass


class GridTooCoarse(BdgError):
    pass


class NewtonDiverged(BdgError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = list(trace or [])


class LinearSolveFailure(BdgError):
    pass


class IndefiniteSystem(BdgError):
    pass


class FocalDistanceExceeded(BdgError):
    pass


class OutsideCollar(BdgError):
    pass


class StencilOutOfDomain(BdgError):
    pass


class MissingArtifact(BdgError):
    pass


class ConfigInvalid(BdgError):
    pass
