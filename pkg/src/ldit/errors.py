"""Exception hierarchy for the L-DIT pipeline."""


class LDITError(Exception):
    """Base class for all pipeline errors."""

    kind = "ldit-error"


class TLEError(LDITError):
    kind = "tle-error"

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ChecksumMismatch(TLEError):
    kind = "checksum-mismatch"


class FieldOutOfRange(TLEError):
    kind = "field-out-of-range"

    def __init__(self, field, line_no=None, detail=""):
        self.field = field
        msg = f"field {field!r} out of range"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg, line_no)


class TruncatedGroup(TLEError):
    kind = "truncated-group"


class DuplicateStation(LDITError):
    kind = "duplicate-station"


class CoordinateOutOfRange(LDITError):
    kind = "coordinate-out-of-range"


class InputFormatError(LDITError):
    kind = "input-format"


class InsufficientOverlap(LDITError):
    kind = "insufficient-overlap"


class DegenerateVariance(LDITError):
    kind = "degenerate-variance"


class DegenerateRange(LDITError):
    kind = "degenerate-range"


class DecayedOrbit(LDITError):
    kind = "decayed-orbit"


class EpochTooFar(LDITError):
    kind = "epoch-too-far"


class PropagationError(LDITError):
    kind = "propagation-error"


class TooFewPoints(LDITError):
    kind = "too-few-points"


class NoStations(LDITError):
    kind = "no-stations"


class MissingComponent(LDITError):
    kind = "missing-component"


class CorruptChain(LDITError):
    kind = "corrupt-chain"


class OfflineError(LDITError):
    kind = "offline-conflict"
