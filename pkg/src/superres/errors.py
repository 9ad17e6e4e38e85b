"""Exception and warning types shared across the package."""


class SuperresError(Exception):
    """Base class for domain errors raised by superres operations."""


class DegenerateSignalError(SuperresError):
    """Signal has duplicate nodes or inconsistent parameter lengths."""


class PositivityError(SuperresError):
    """Positive amplitudes were required but an amplitude fails to qualify."""


class InfeasibleGeometryError(SuperresError):
    """A clustered configuration cannot be realized; message names the violated inequality."""


class RankDeficientPencilError(SuperresError):
    """Truncated Hankel pencil is numerically rank-deficient at the requested order."""


class PencilInversionError(SuperresError):
    """Reduced pencil matrix could not be inverted."""


class VandermondeError(SuperresError):
    """Amplitude least-squares system is numerically rank-deficient."""


class RegimeExceededError(SuperresError):
    """Adversarial construction was attempted outside its constructible regime."""


class AliasingRangeWarning(UserWarning):
    """A recovered node sits at the boundary of the unambiguous range."""


class ResolutionWarning(UserWarning):
    """Search grid too coarse to resolve any spread."""
