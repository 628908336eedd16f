"""Portable on-disk dictionary format.

Layout: magic "PBCD", version byte, post-coder tag byte (low bits: 0 none,
1 huffman; bit 7 flags an optional length-prefixed metadata section),
metadata (if flagged), VarUInt pattern count, patterns, optional Huffman
section (257 code lengths), trailing CRC-32 (big-endian) over all
preceding bytes. The checksum is verified before anything is parsed.
"""

from __future__ import annotations

import json
import zlib

from .codec import HuffmanTable
from .encoders import decode_varuint, encode_varuint
from .errors import (
    BadMagic,
    ChecksumMismatch,
    MalformedToken,
    Truncated,
    UnsupportedVersion,
)
from .model import (
    EncoderKind,
    Field,
    FieldEncoder,
    Literal,
    Pattern,
    PatternDictionary,
    VARCHAR,
    VARINT,
    char_encoder,
    int_encoder,
)

MAGIC = b"PBCD"
VERSION = 1
_META_FLAG = 0x80

_ENC_TAGS = {
    EncoderKind.VARCHAR: 0,
    EncoderKind.VARINT: 1,
    EncoderKind.CHAR: 2,
    EncoderKind.INT: 3,
}


def _write_token(out: bytearray, tok) -> None:
    if isinstance(tok, Literal):
        out += bytes([0x00, tok.byte])
        return
    enc: FieldEncoder = tok.encoder
    out += bytes([0x01, _ENC_TAGS[enc.kind]])
    if enc.kind is EncoderKind.CHAR:
        out += encode_varuint(enc.n)
    elif enc.kind is EncoderKind.INT:
        out += encode_varuint(enc.n)
        out += encode_varuint(enc.m)


def _read_token(buf, pos: int):
    if pos >= len(buf):
        raise MalformedToken("token stream ended early")
    tag = buf[pos]
    pos += 1
    if tag == 0x00:
        if pos >= len(buf):
            raise MalformedToken("literal token missing its byte")
        return Literal(buf[pos]), pos + 1
    if tag != 0x01:
        raise MalformedToken(f"unknown token tag {tag:#x}")
    if pos >= len(buf):
        raise MalformedToken("field token missing its encoder tag")
    etag = buf[pos]
    pos += 1
    if etag == 0:
        return Field(VARCHAR), pos
    if etag == 1:
        return Field(VARINT), pos
    try:
        if etag == 2:
            n, pos = decode_varuint(buf, pos)
            return Field(char_encoder(n)), pos
        if etag == 3:
            n, pos = decode_varuint(buf, pos)
            m, pos = decode_varuint(buf, pos)
            enc = int_encoder(n)
            if enc.m != m:
                raise MalformedToken(f"INT({n}) cannot need {m} bytes")
            return Field(enc), pos
    except MalformedToken:
        raise
    except Exception as exc:
        raise MalformedToken(str(exc)) from exc
    raise MalformedToken(f"unknown encoder tag {etag:#x}")


def write_dict(dictionary: PatternDictionary) -> bytes:
    out = bytearray(MAGIC)
    out.append(VERSION)
    tag = 0 if dictionary.post_coder is None else 1
    meta = b""
    if dictionary.metadata:
        meta = json.dumps(dictionary.metadata, sort_keys=True).encode("utf-8")
        tag |= _META_FLAG
    out.append(tag)
    if meta:
        out += encode_varuint(len(meta)) + meta
    out += encode_varuint(len(dictionary.patterns))
    for pattern in dictionary.patterns:
        out += encode_varuint(len(pattern.tokens))
        for tok in pattern.tokens:
            _write_token(out, tok)
    if dictionary.post_coder is not None:
        out += bytes(dictionary.post_coder.lengths)
    out += zlib.crc32(bytes(out)).to_bytes(4, "big")
    return bytes(out)


def read_dict(data) -> PatternDictionary:
    data = bytes(data)
    if len(data) < len(MAGIC) + 2 + 4:
        raise BadMagic("file too short to be a dictionary")
    if data[: len(MAGIC)] != MAGIC:
        raise BadMagic("bad magic")
    body, crc = data[:-4], int.from_bytes(data[-4:], "big")
    if zlib.crc32(body) != crc:
        raise ChecksumMismatch("dictionary checksum does not match")
    version = body[4]
    if version != VERSION:
        raise UnsupportedVersion(f"dictionary format version {version}")
    try:
        return _parse_body(body)
    except Truncated as exc:
        raise MalformedToken(str(exc)) from exc


def _parse_body(body: bytes) -> PatternDictionary:
    tag = body[5]
    pos = 6
    metadata = {}
    if tag & _META_FLAG:
        mlen, pos = decode_varuint(body, pos)
        if pos + mlen > len(body):
            raise MalformedToken("metadata section ended early")
        try:
            metadata = json.loads(body[pos : pos + mlen].decode("utf-8"))
        except ValueError as exc:
            raise MalformedToken("metadata section is not valid JSON") from exc
        pos += mlen
    post_tag = tag & ~_META_FLAG
    if post_tag not in (0, 1):
        raise MalformedToken(f"unknown post-coder tag {post_tag}")
    count, pos = decode_varuint(body, pos)
    patterns = []
    for i in range(count):
        ntok, pos = decode_varuint(body, pos)
        tokens = []
        for _ in range(ntok):
            tok, pos = _read_token(body, pos)
            tokens.append(tok)
        patterns.append(Pattern(tokens=tuple(tokens), id=i + 1))
    post_coder = None
    if post_tag == 1:
        if pos + 257 > len(body):
            raise MalformedToken("huffman section ended early")
        post_coder = HuffmanTable(list(body[pos : pos + 257]))
        pos += 257
    if pos != len(body):
        raise MalformedToken("trailing bytes after the dictionary body")
    return PatternDictionary(
        patterns=tuple(patterns), post_coder=post_coder, metadata=metadata
    )
