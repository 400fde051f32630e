"""Exception types shared across the package."""


class EtcLabError(Exception):
    """Base class for all etclab errors."""


class DimensionError(EtcLabError):
    """Matrix or vector dimensions are inconsistent."""


class ConfigError(EtcLabError):
    """A trigger, simulation or CLI configuration is invalid."""


class DomainError(EtcLabError):
    """A state lies outside the set where the operation is defined."""


class CertificateError(EtcLabError):
    """A stability certificate is malformed or infeasible."""


class DesignInfeasibleError(EtcLabError):
    """The constructive certificate design cannot proceed."""


class DivergenceError(EtcLabError):
    """A simulation left the blow-up guard region.

    Carries the partial solution computed so far (``partial``) and the
    offending state (``state``) so callers can inspect what happened.
    """

    def __init__(self, message, partial=None, state=None):
        super().__init__(message)
        self.partial = partial
        self.state = state
