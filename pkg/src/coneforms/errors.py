"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class Inhomogeneous(EngineError):
    """Input mixes homogeneity degrees."""


class ChartViolation(EngineError):
    """Denominator vanishes identically on the cone chart."""


class NotDivisible(EngineError):
    """Polynomial is not a multiple of the cone quadric."""


class DegreeOutOfRange(EngineError):
    """Form degree outside the valid range for an operator atom."""


class WeightUndeclared(EngineError):
    """Operation requires a declared homogeneity weight."""


class DegenerateScale(EngineError):
    """Scale has vanishing differential on the working chart."""


class NotProportional(EngineError):
    """Expected proportionality to the identity failed."""


class ProportionalityFailure(EngineError):
    """Two operators expected proportional are not."""


class NoWitness(EngineError):
    """No rational witness constants exist."""


class NotTangential(EngineError):
    """Operator fails the tangentiality requirement."""


class EigenvalueConventionMismatch(EngineError):
    """Engine eigenvalue disagrees with the anchored closed form."""


class ConfigError(EngineError):
    """Invalid run configuration."""


class CacheCorruption(EngineError):
    """Cache entry failed its integrity hash."""
