"""Exception types shared across the package."""


class PbcError(Exception):
    """Base class for all pbc errors."""


class AllWildcards(PbcError):
    """A pattern must contain at least one literal byte."""


class NonConforming(PbcError):
    """A field value does not satisfy its encoder's character class."""


class Truncated(PbcError):
    """A byte stream ended in the middle of a value."""


class Overflow(PbcError):
    """A variable-length integer exceeded 64 bits."""


class EmptyPattern(PbcError):
    """A cluster pattern string with zero tokens was passed to the DP."""


class TooLarge(PbcError):
    """Input exceeds the size cap of the exhaustive oracle."""


class InsufficientSample(PbcError):
    """Fewer distinct sample records than requested clusters."""


class UnknownPatternId(PbcError):
    """A compressed record references a pattern id not in the dictionary."""


class MalformedPayload(PbcError):
    """A compressed record's field payload does not parse."""


class BadMagic(PbcError):
    """A serialized file does not start with the expected magic bytes."""


class UnsupportedVersion(PbcError):
    """A serialized file carries an unknown format version."""


class ChecksumMismatch(PbcError):
    """A serialized file failed its CRC-32 integrity check."""


class MalformedToken(PbcError):
    """A serialized dictionary contains an undecodable token or section."""


class IndexOutOfRange(PbcError):
    """A container lookup index is outside [0, record_count)."""


class EmptyStats(PbcError):
    """A rate was requested from stats with zero records."""
