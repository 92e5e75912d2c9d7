"""
DESCRIPTION:
    Exception hierarchy. Validation failures subclass ValueError so callers
    that only know about ValueError still catch them.
"""


class RFIError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(RFIError, ValueError):
    """Input does not describe a valid object (bad permutation, shape, file...)."""


class GroupTooLargeError(ValidationError):
    """The group closure or a subgroup search exceeded the element cap."""


class NotARepresentationError(ValidationError):
    """Generator matrices do not define a homomorphism of the given group."""


class AmbiguousMatchError(RFIError):
    """Two basis elements lie within tolerance of the same conjugate."""


class CertificationError(RFIError):
    """A constructed object failed its verification oracle."""


class InfeasibleError(RFIError):
    """A character is not a non-negative integer sum of basic permutation characters."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ConstructionFailedError(RFIError):
    """The randomized basis search ran out of retries. Not a proof of nonexistence."""
