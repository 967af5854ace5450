"""Exception hierarchy shared across the package."""


class DriftwinError(Exception):
    """Base class for all domain errors raised by this package."""


class EmptyInput(DriftwinError):
    pass


class DegenerateWindow(DriftwinError):
    pass


class TooLarge(DriftwinError):
    pass


class NullWindowMass(DriftwinError):
    pass


class ConstantWDS(DriftwinError):
    pass


class UnchainableAtom(DriftwinError):
    pass


class DimensionMismatch(DriftwinError):
    pass


class UncoveredAtom(DriftwinError):
    pass


class NonFiniteObjective(DriftwinError):
    pass


class InsufficientReadings(DriftwinError):
    pass
