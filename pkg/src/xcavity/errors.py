"""Exception hierarchy shared by all modules."""


class CavityError(Exception):
    """Base class for all errors raised by xcavity."""


class ConfigError(CavityError):
    """Invalid user input: bad stack, unknown names, malformed files."""


class NumericalError(CavityError):
    """A numerical procedure failed on otherwise valid input."""


class UnknownMaterial(ConfigError, KeyError):
    pass


class UnknownIsotope(ConfigError, KeyError):
    pass


class EnergyOutOfRange(ConfigError, ValueError):
    pass


class NonPositiveThickness(ConfigError, ValueError):
    pass


class ResonantLayerZero(ConfigError, ValueError):
    pass


class IsotopeMismatch(ConfigError, ValueError):
    pass


class OutOfBounds(ConfigError, ValueError):
    pass


class DegenerateInterface(NumericalError, ZeroDivisionError):
    pass


class ZeroBackground(NumericalError):
    """Electronic reflectivity vanishes so the Fano phase is undefined."""


class NoConvergence(NumericalError):
    pass


class EmptyWindow(NumericalError):
    pass


class ContourDisagreement(NumericalError):
    pass


class AllInfeasible(NumericalError):
    pass


class TargetUnreachable(NumericalError):
    pass
