"""Domain types: patterns, field encoders, clusters, dictionaries.

All types here are immutable after construction and carry no algorithms
beyond validation. Records are raw bytes; no text encoding is assumed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import AllWildcards

# Sentinel symbol used in cluster pattern strings for a wildcard field.
# Pattern strings are sequences over 0..255 (literal bytes) plus WILDCARD.
WILDCARD = 256

# Raw-escape pattern id; real patterns get dense ids starting at 1.
RAW_ESCAPE_ID = 0


class EncoderKind(enum.Enum):
    VARCHAR = "varchar"
    VARINT = "varint"
    CHAR = "char"
    INT = "int"


def int_byte_width(n_digits: int) -> int:
    """Minimal byte count m with 10**n - 1 <= 2**(8m) - 1."""
    limit = 10 ** n_digits - 1
    m = 1
    while limit > (1 << (8 * m)) - 1:
        m += 1
    return m


@dataclass(frozen=True)
class FieldEncoder:
    kind: EncoderKind
    n: int = 0  # digit/char count for CHAR and INT
    m: int = 0  # encoded byte width for INT

    def __post_init__(self):
        if self.kind is EncoderKind.CHAR and self.n < 1:
            raise ValueError("CHAR requires n >= 1")
        if self.kind is EncoderKind.INT:
            if not 1 <= self.n <= 19:
                raise ValueError("INT requires 1 <= n <= 19")
            if self.m != int_byte_width(self.n):
                raise ValueError("INT byte width m must be minimal for n digits")

    def __repr__(self):
        if self.kind is EncoderKind.CHAR:
            return f"CHAR({self.n})"
        if self.kind is EncoderKind.INT:
            return f"INT({self.n},{self.m})"
        return self.kind.name


VARCHAR = FieldEncoder(EncoderKind.VARCHAR)
VARINT = FieldEncoder(EncoderKind.VARINT)


def char_encoder(n: int) -> FieldEncoder:
    return FieldEncoder(EncoderKind.CHAR, n=n)


def int_encoder(n: int) -> FieldEncoder:
    return FieldEncoder(EncoderKind.INT, n=n, m=int_byte_width(n))


@dataclass(frozen=True)
class Literal:
    byte: int

    def __post_init__(self):
        if not 0 <= self.byte <= 255:
            raise ValueError("literal token carries exactly one byte")


@dataclass(frozen=True)
class Field:
    encoder: FieldEncoder = VARCHAR


PatternToken = Union[Literal, Field]


@dataclass(frozen=True)
class Pattern:
    """Alternating literal/field token sequence with a dictionary id."""

    tokens: tuple
    id: int = 0

    @property
    def field_count(self) -> int:
        return sum(1 for t in self.tokens if isinstance(t, Field))

    @property
    def literal_count(self) -> int:
        return sum(1 for t in self.tokens if isinstance(t, Literal))

    @property
    def field_encoders(self) -> tuple:
        return tuple(t.encoder for t in self.tokens if isinstance(t, Field))

    def pattern_string(self) -> tuple:
        """The token sequence over 0..255 plus WILDCARD, for the DP."""
        return tuple(
            t.byte if isinstance(t, Literal) else WILDCARD for t in self.tokens
        )


def validate_pattern(tokens: Sequence[PatternToken], pattern_id: int = 0) -> Pattern:
    """Collapse adjacent fields into one VARCHAR field and validate.

    Raises AllWildcards if no literal token remains.
    """
    collapsed = []
    for tok in tokens:
        if isinstance(tok, Field) and collapsed and isinstance(collapsed[-1], Field):
            # Adjacent wildcards are ambiguous to extract; merge into one
            # variable-length field.
            collapsed[-1] = Field(VARCHAR)
            continue
        collapsed.append(tok)
    if not any(isinstance(t, Literal) for t in collapsed):
        raise AllWildcards("pattern has no literal token")
    return Pattern(tokens=tuple(collapsed), id=pattern_id)


def pattern_from_string(symbols: Sequence[int], pattern_id: int = 0) -> Pattern:
    """Build a Pattern from a WILDCARD-marked symbol sequence (VARCHAR fields)."""
    tokens = [Field(VARCHAR) if s == WILDCARD else Literal(s) for s in symbols]
    return validate_pattern(tokens, pattern_id)


@dataclass(frozen=True)
class CostModel:
    """Byte-cost parameters of the clustering-time encoding model.

    Clustering prices every field as VARCHAR with a fixed per-field header;
    richer encoders enter only at post-clustering inference.
    """

    header_bytes_per_field: int = 1
    pattern_id_bytes: int = 1


@dataclass(frozen=True)
class Cluster:
    """A set of sample records sharing one pattern.

    ``members`` holds (record, multiplicity) pairs: duplicates in the sample
    collapse into one entry. ``cached_el`` is the minimal encoding length of
    the cluster's residuals under the clustering cost model.
    """

    members: tuple  # ((bytes, count), ...)
    pattern_string: tuple  # symbols over 0..255 plus WILDCARD
    size: int
    cached_el: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("cluster size must be >= 1")
        if self.size != sum(c for _, c in self.members):
            raise ValueError("size must equal total member multiplicity")


@dataclass(frozen=True)
class PatternDictionary:
    """Id-ordered pattern set, optional post-coder, training metadata.

    Ids are dense 1..K; 0 is reserved for the raw escape. ``post_coder`` is
    either None or a codec.HuffmanTable.
    """

    patterns: tuple
    post_coder: Optional[object] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, p in enumerate(self.patterns):
            if p.id != i + 1:
                raise ValueError("pattern ids must be dense 1..K")

    def __len__(self):
        return len(self.patterns)

    def get(self, pattern_id: int) -> Optional[Pattern]:
        if 1 <= pattern_id <= len(self.patterns):
            return self.patterns[pattern_id - 1]
        return None


@dataclass(frozen=True)
class CompressedRecord:
    """Either Encoded(pattern_id, field payload) or Raw(original bytes)."""

    pattern_id: int
    payload: bytes  # encoded field bytes, or the raw record for id 0
    post_coded: bool = False

    @property
    def is_raw(self) -> bool:
        return self.pattern_id == RAW_ESCAPE_ID


def entropy_bits(counts) -> float:
    """Shannon entropy (base 2) of a frequency vector; 0*log0 == 0."""
    total = float(sum(counts))
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h
