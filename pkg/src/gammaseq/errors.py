"""Exception hierarchy shared by all modules.

Domain errors map to CLI exit status 2, bound errors to exit status 3.
"""


class GammaSeqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GammaSeqError):
    pass


class BoundsError(GammaSeqError):
    pass


class LiteralError(GammaSeqError, ValueError):
    """A group literal or document could not be parsed."""


class ShapeMismatch(DomainError, ValueError):
    pass


class IllDefined(DomainError, ValueError):
    """A matrix does not define a homomorphism between the given groups."""


class InfiniteAutGroup(DomainError):
    pass


class NotEnumerable(DomainError):
    pass


class InvalidCertificate(DomainError):
    pass


class NotOrder4(DomainError):
    pass


class NoInvolution(DomainError):
    pass


class WrongN(DomainError):
    pass


class TooLarge(BoundsError):
    pass


class BoundsTooLarge(BoundsError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InternalError(GammaSeqError, AssertionError):
    """An internal consistency check failed; indicates a bug, never bad input."""
