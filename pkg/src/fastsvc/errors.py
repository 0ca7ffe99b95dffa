"""Exception hierarchy. Every error carries a machine-readable ``kind``
string that the CLI emits as ``error.kind=<kind>``."""


class FastSVCError(Exception):
    kind = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InvalidInputError(FastSVCError):
    kind = "invalid-input"


class ShapeError(FastSVCError):
    kind = "shape"


class ConfigError(FastSVCError):
    kind = "config"

    def __init__(self, message: str, field: str | None = None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class LengthMismatchError(FastSVCError):
    kind = "length-mismatch"


class UnknownIdError(FastSVCError):
    """Out-of-range embedding id or unknown speaker name."""

    kind = "lookup"


class UnsupportedFormatError(FastSVCError):
    kind = "unsupported-format"


class BundleError(FastSVCError):
    kind = "bundle"


class BundleFormatError(BundleError):
    kind = "format"


class BundleVersionError(BundleError):
    kind = "version"


class BundleChecksumError(BundleError):
    kind = "checksum"


class BundleValidationError(BundleError):
    kind = "validation"
