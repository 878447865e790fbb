"""Exception hierarchy shared by every module."""


class ModAttackError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ModAttackError, ValueError):
    """Shape, length, or modulus mismatch between operands."""


class DomainError(ModAttackError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class ValidationError(ModAttackError, ValueError):
    """A structure violates its own invariant (e.g. a non-bijective permutation)."""


class GenerationError(ModAttackError, RuntimeError):
    """A keystream or randomness source ran out of values."""


class SeedError(ModAttackError, ValueError):
    """A seed cannot be decoded into valid generator parameters."""


class ConfigurationError(ModAttackError, ValueError):
    """Cipher spec and key material do not fit together."""


class PresetNotFound(ModAttackError, KeyError):
    pass


class ProtocolError(ModAttackError, RuntimeError):
    """An oracle answered with inconsistent dimensions."""


class FixtureMissError(ModAttackError, KeyError):
    """A fixture oracle was asked for a ciphertext it has no answer for."""


class ScaleError(ModAttackError, ValueError):
    """An exhaustive check was requested on an instance that is too large."""


class NotADTFError(ModAttackError, ValueError):
    """The differential response depends on the base image.

    Carries the offending differential and the two disagreeing responses.
    """

    def __init__(self, message, delta=None, responses=None):
        super().__init__(message)
        self.delta = delta
        self.responses = responses


class FormatError(ModAttackError, ValueError):
    """A file could not be parsed in the requested format."""
