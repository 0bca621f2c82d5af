"""Exception hierarchy shared by every stage of the pipeline."""


class RibbonError(Exception):
    """Base class for all library errors."""


class DegenerateChart(RibbonError):
    pass


class UnknownSurface(RibbonError):
    pass


class BadParams(RibbonError):
    pass


class IrregularCurve(RibbonError):
    pass


class ClosureMismatch(RibbonError):
    """A curve declared closed does not close (or vice versa)."""


class SpeedMismatch(RibbonError):
    pass


class InitialConditionMismatch(RibbonError):
    pass


class VanishingNormalCurvature(RibbonError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class TooFewSamples(RibbonError):
    pass


class GridMismatch(RibbonError):
    pass


class UndefinedStriction(RibbonError):
    pass


class NoIntersection(RibbonError):
    pass


class NonTransversalContact(RibbonError):
    def __init__(self, message, t_range=None):
        super().__init__(message)
        self.t_range = t_range


class AmbiguousCluster(RibbonError):
    pass


class MissingAngles(RibbonError):
    pass


class ParseError(RibbonError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(RibbonError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class IoError(RibbonError):
    pass
