"""Exceptions and warnings raised by gpdisc."""


class GPDiscError(Exception):
    pass


class PhaseOutOfWindow(GPDiscError):
    pass


class GridTooCoarse(GPDiscError):
    pass


class NoConvergence(GPDiscError):
    def __init__(self, iterations, residual, message=""):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message or f"no convergence after {iterations} iterations "
                                    f"(residual {residual:.3e})")


class NotNormalized(GPDiscError):
    pass


class CutoffOutOfRange(GPDiscError):
    pass


class DensityTooSmall(GPDiscError):
    pass


class ThresholdInvalid(GPDiscError):
    pass


class ZeroOnCircle(GPDiscError):
    pass


class EmptyBulk(GPDiscError):
    pass


class DegenerateWeight(GPDiscError):
    pass


class BisectionFailed(GPDiscError):
    pass


class MaxNotFound(GPDiscError):
    pass


class NotUnimodal(GPDiscError):
    pass


class ParseError(GPDiscError):
    def __init__(self, line, msg):
        self.line = line
        self.msg = msg
        super().__init__(f"line {line}: {msg}")


class ValidationError(GPDiscError):
    def __init__(self, field, msg):
        self.field = field
        self.msg = msg
        super().__init__(f"{field}: {msg}")


class IoError(GPDiscError):
    def __init__(self, path, msg=""):
        self.path = str(path)
        super().__init__(f"{path}: {msg}" if msg else str(path))


class RegimeWarning(UserWarning):
    """Rotation speed beyond the regime where the estimates are known to hold."""


class NotUnimodalWarning(UserWarning):
    """Phase search found non-monotone flanks and fell back to a scan."""
