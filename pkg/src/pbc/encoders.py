"""Residual field value encoding and per-field encoder inference.

Byte layouts here are normative and bit-exact; they are part of the
compressed-stream wire format:

* VarUInt: little-endian base-128 with continuation bit, minimal length,
  values up to 2**64 - 1.
* VARCHAR: VarUInt(length) then the raw bytes.
* CHAR(n): the n raw bytes.
* INT(n, m): the numeric value as m big-endian bytes (leading zeros of the
  digit string are restored on decode by re-padding to n digits).
* VARINT: VarUInt of the numeric value (digit strings with leading zeros
  are not eligible: they could not be restored losslessly).
"""

from __future__ import annotations

from typing import Iterable, Tuple

from .errors import NonConforming, Overflow, Truncated
from .model import (
    VARCHAR,
    VARINT,
    EncoderKind,
    FieldEncoder,
    char_encoder,
    int_encoder,
)

U64_MAX = (1 << 64) - 1


def encode_varuint(value: int) -> bytes:
    if value < 0 or value > U64_MAX:
        raise Overflow(f"varuint out of range: {value}")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_varuint(buf, pos: int = 0) -> Tuple[int, int]:
    """Return (value, next position). Raises Truncated/Overflow."""
    value = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise Truncated("varuint ended mid-value")
        b = buf[pos]
        pos += 1
        value |= (b & 0x7F) << shift
        if not b & 0x80:
            if value > U64_MAX:
                raise Overflow("varuint exceeds 64 bits")
            return value, pos
        shift += 7
        if shift > 63:
            raise Overflow("varuint exceeds 64 bits")


def varuint_size(value: int) -> int:
    size = 1
    while value > 0x7F:
        value >>= 7
        size += 1
    return size


def _is_digits(value: bytes) -> bool:
    return len(value) > 0 and all(0x30 <= b <= 0x39 for b in value)


def _conforms(value: bytes, enc: FieldEncoder) -> bool:
    if enc.kind is EncoderKind.VARCHAR:
        return True
    if enc.kind is EncoderKind.CHAR:
        return len(value) == enc.n
    if enc.kind is EncoderKind.INT:
        return len(value) == enc.n and _is_digits(value)
    # VARINT: 1..19 digits, no leading zero unless the value is exactly "0"
    if not _is_digits(value) or len(value) > 19:
        return False
    return value == b"0" or value[0] != 0x30


def encode_field(value: bytes, enc: FieldEncoder) -> bytes:
    if not _conforms(value, enc):
        raise NonConforming(f"value {value!r} does not fit {enc!r}")
    if enc.kind is EncoderKind.VARCHAR:
        return encode_varuint(len(value)) + value
    if enc.kind is EncoderKind.CHAR:
        return value
    if enc.kind is EncoderKind.INT:
        return int(value).to_bytes(enc.m, "big")
    return encode_varuint(int(value))


def decode_field(buf, pos: int, enc: FieldEncoder) -> Tuple[bytes, int]:
    """Decode one field value at ``pos``; returns (original bytes, next pos)."""
    if enc.kind is EncoderKind.VARCHAR:
        length, pos = decode_varuint(buf, pos)
        if pos + length > len(buf):
            raise Truncated("varchar payload ended mid-value")
        return bytes(buf[pos : pos + length]), pos + length
    if enc.kind is EncoderKind.CHAR:
        if pos + enc.n > len(buf):
            raise Truncated("char payload ended mid-value")
        return bytes(buf[pos : pos + enc.n]), pos + enc.n
    if enc.kind is EncoderKind.INT:
        if pos + enc.m > len(buf):
            raise Truncated("int payload ended mid-value")
        num = int.from_bytes(buf[pos : pos + enc.m], "big")
        return str(num).rjust(enc.n, "0").encode("ascii"), pos + enc.m
    num, pos = decode_varuint(buf, pos)
    return str(num).encode("ascii"), pos


def encoded_size(value: bytes, enc: FieldEncoder) -> int:
    if enc.kind is EncoderKind.VARCHAR:
        return varuint_size(len(value)) + len(value)
    if enc.kind is EncoderKind.CHAR:
        return enc.n
    if enc.kind is EncoderKind.INT:
        return enc.m
    return varuint_size(int(value))


def infer_encoder(values: Iterable[bytes]) -> FieldEncoder:
    """Pick the encoder minimizing total bytes over one field's sample values.

    Eligibility follows the character classes above; VARCHAR is the
    universal fallback. Ties break by the fixed order INT > VARINT > CHAR >
    VARCHAR.
    """
    values = list(values)
    if not values:
        raise ValueError("infer_encoder needs at least one value")

    lengths = {len(v) for v in values}
    all_digits = all(_is_digits(v) for v in values)
    fixed_len = lengths.pop() if len(lengths) == 1 else None

    candidates = []
    if all_digits and fixed_len is not None and fixed_len <= 19:
        candidates.append(int_encoder(fixed_len))
    if all_digits and max(len(v) for v in values) <= 19 and all(
        v == b"0" or v[0] != 0x30 for v in values
    ):
        candidates.append(VARINT)
    if fixed_len is not None and fixed_len >= 1:
        candidates.append(char_encoder(fixed_len))
    candidates.append(VARCHAR)

    # list order encodes the tie-break; min() keeps the first minimum
    return min(candidates, key=lambda e: sum(encoded_size(v, e) for v in values))
