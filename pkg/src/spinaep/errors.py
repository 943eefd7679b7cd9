"""Exception types shared across the package."""


class SpinAepError(Exception):
    """Base class for all package-specific errors."""


class QubitCapError(SpinAepError):
    """A requested volume would exceed the configured qubit cap."""


class CapabilityError(SpinAepError):
    """An exhaustive search would exceed its configured bound."""


class NumericError(SpinAepError):
    """A numerical routine violated its accuracy contract."""


class ConfigError(SpinAepError):
    """An experiment config document failed to parse or validate."""


class EmptySubspaceError(SpinAepError, ValueError):
    """A codebook was requested for a typical subspace with no states."""


class InvalidCodewordError(SpinAepError, ValueError):
    """A codeword lies outside the image of the compression map."""
