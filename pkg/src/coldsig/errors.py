"""Exception hierarchy.

Every error raised by this package derives from :class:`ColdSigError`.
The four subtrees map onto the CLI exit-code classes: configuration (2),
integrity/policy (3), cryptographic verification (4), and I/O (5).
"""


class ColdSigError(Exception):
    """Base class for all coldsig errors."""

    exit_code = 1


class ConfigError(ColdSigError):
    """Invalid configuration, parameters, or preconditions."""

    exit_code = 2


class IntegrityError(ColdSigError):
    """Tampered, malformed, or inconsistent data detected before signing."""

    exit_code = 3


class PolicyError(IntegrityError):
    """Transaction rejected by the core-side policy."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EnvelopeError(IntegrityError):
    """Envelope bytes failed to decode."""


class BadMagicError(EnvelopeError):
    pass


class VersionMismatchError(EnvelopeError):
    pass


class ChecksumError(EnvelopeError):
    pass


class TruncatedError(EnvelopeError):
    pass


class OversizeFieldError(EnvelopeError):
    pass


class UnknownTagError(EnvelopeError):
    pass


class DuplicateTagError(EnvelopeError):
    pass


class MalformedFieldError(EnvelopeError):
    """A field decoded structurally but its value is invalid (bad point, out-of-range scalar, ...)."""


class StorageFormatError(IntegrityError):
    """Share or session file has an unrecognized or corrupt header."""


class StorageAuthError(IntegrityError):
    """Authenticated decryption of a share or session file failed (wrong passphrase or tampered file)."""


class VerifyError(ColdSigError):
    """A cryptographic check failed: bad signature, inconsistent share, degenerate values."""

    exit_code = 4


class ZeroKeyError(VerifyError):
    pass


class DegenerateNonceError(VerifyError):
    """Fixed-nonce signing hit r=0 / s=0, or random retries were exhausted."""


class InconsistentShareError(VerifyError):
    """A share's public point does not match its secret scalar."""


class NonceReuseError(VerifyError):
    """A signing session was asked to produce a second signature."""


class MalformedCiphertextError(VerifyError):
    """Paillier ciphertext outside Z*_{n^2}."""


class StorageIOError(ColdSigError):
    """Filesystem-level failure (missing file, unwritable path)."""

    exit_code = 5
