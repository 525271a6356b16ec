"""Exception hierarchy shared by all nady modules."""


class NadyError(Exception):
    """Base class for every error raised by this package."""


class NeutralityViolation(NadyError):
    pass


class NonPositiveMass(NadyError):
    pass


class DimensionMismatch(NadyError):
    pass


class ConstraintViolation(NadyError):
    pass


class SingularityApproach(NadyError):
    """Two particles came closer than the minimum-separation guard."""


class InapplicableApproximation(NadyError):
    pass


class StepLimitReached(NadyError):
    pass


class RangeError(NadyError):
    pass


class QuadratureNonConvergence(NadyError):
    pass


class NonHermitianInput(NadyError):
    pass


class ConfigError(NadyError):
    """Invalid scenario configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class NoOverlap(NadyError):
    pass
