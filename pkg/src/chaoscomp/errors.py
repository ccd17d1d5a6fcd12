"""Exception hierarchy shared by every layer of the toolkit."""


class ChaosCompError(Exception):
    """Base class for all errors raised by chaoscomp."""


class QFormatMismatch(ChaosCompError, ValueError):
    """Fixed-point operands carry different Q formats."""


class DivergentTrajectory(ChaosCompError):
    """A cipher map saturated its fixed-point range (the key is unusable)."""


class NumericalError(ChaosCompError, ArithmeticError):
    """A characterization instrument met a non-finite value."""


class KeyGenFailure(ChaosCompError):
    """Rejection sampling did not find a valid key."""


class InvalidKey(ChaosCompError, ValueError):
    """A key failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid key: " + "; ".join(self.violations))


class KeyFormatError(ChaosCompError, ValueError):
    """A serialized key could not be parsed."""


class CodecUnavailable(ChaosCompError):
    """The requested codec is not available in this environment."""


class DecodeError(ChaosCompError, ValueError):
    """A compressed payload is corrupt.

    ``offset`` is the byte offset into the payload where decoding failed,
    or -1 when the failure is detected only after decoding (checksum).
    """

    def __init__(self, message, offset=-1):
        self.detail = message
        self.offset = offset
        if offset >= 0:
            message = f"{message} (at payload offset {offset})"
        super().__init__(message)


class FormatError(ChaosCompError, ValueError):
    """A container header is malformed or unsupported."""


class IntegrityMismatch(ChaosCompError):
    """Decrypted output does not have the length the container promises."""


class EmptyInput(ChaosCompError, ValueError):
    """Zero-length plaintexts are rejected."""


class UndefinedCorrelation(ChaosCompError, ValueError):
    """Pearson correlation of a constant sequence."""


class UndefinedSimilarity(ChaosCompError, ValueError):
    """Cosine similarity involving an all-zero vector."""


class SensitivityUnavailable(ChaosCompError):
    """No valid flipped key could be found near the requested bit."""


class InsufficientData(ChaosCompError, ValueError):
    """A statistical test was given fewer bits than it needs."""
