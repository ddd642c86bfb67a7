"""Exception hierarchy shared by every module of the package."""


class TeleportError(Exception):
    """Base class for all errors raised by qudit_teleport."""


class InvalidDimensionError(TeleportError, ValueError):
    pass


class InsufficientQubitsError(TeleportError, ValueError):
    pass


class CapacityError(TeleportError, ValueError):
    pass


class RegisterIndexError(TeleportError, IndexError):
    pass


class ShapeError(TeleportError, ValueError):
    pass


class NormalizationError(TeleportError, ValueError):
    pass


class ImpossibleOutcomeError(TeleportError, ValueError):
    pass


class DistributionError(TeleportError, ValueError):
    pass
