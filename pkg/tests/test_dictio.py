import random

import pytest

from pbc.codec import train_postcoder
from pbc.dictio import read_dict, write_dict
from pbc.errors import (
    BadMagic,
    ChecksumMismatch,
    MalformedToken,
    PbcError,
    Truncated,
    UnsupportedVersion,
)
from pbc.model import (
    Field,
    Literal,
    Pattern,
    PatternDictionary,
    VARCHAR,
    VARINT,
    char_encoder,
    int_encoder,
    pattern_from_string,
)


def abc_dict():
    return PatternDictionary(patterns=(pattern_from_string(tuple(b"abc"), 1),))


def kitchen_sink_dict(post_coder=None, metadata=None):
    p1 = Pattern(
        tokens=(
            Literal(ord("x")),
            Field(VARCHAR),
            Literal(ord("=")),
            Field(VARINT),
        ),
        id=1,
    )
    p2 = Pattern(
        tokens=(
            Field(char_encoder(4)),
            Literal(ord(":")),
            Field(int_encoder(7)),
            Literal(0xFF),
        ),
        id=2,
    )
    return PatternDictionary(
        patterns=(p1, p2), post_coder=post_coder, metadata=metadata or {}
    )


def test_minimal_dictionary_is_18_bytes():
    blob = write_dict(abc_dict())
    assert len(blob) == 18
    assert blob[:4] == b"PBCD"
    assert blob[4] == 1  # version
    assert blob[5] == 0  # no post-coder, no metadata


def test_roundtrip_all_encoder_kinds():
    d = kitchen_sink_dict(metadata={"k": 2, "criterion": "el"})
    d2 = read_dict(write_dict(d))
    assert len(d2.patterns) == 2
    assert d2.patterns[0].tokens == d.patterns[0].tokens
    assert d2.patterns[1].tokens == d.patterns[1].tokens
    assert d2.metadata == {"k": 2, "criterion": "el"}
    assert d2.post_coder is None


def test_roundtrip_with_postcoder():
    table = train_postcoder([b"hello world" * 20])
    d = kitchen_sink_dict(post_coder=table)
    d2 = read_dict(write_dict(d))
    assert d2.post_coder is not None
    payload = b"hello"
    assert d2.post_coder.decode(table.encode(payload))[0] == payload
    assert d2.post_coder.encode(payload) == table.encode(payload)


def test_serialization_is_canonical():
    d = kitchen_sink_dict(metadata={"b": 1, "a": 2})
    blob = write_dict(d)
    assert write_dict(read_dict(blob)) == blob


def test_bad_magic():
    blob = bytearray(write_dict(abc_dict()))
    blob[0] ^= 0xFF
    with pytest.raises((BadMagic, ChecksumMismatch)):
        read_dict(bytes(blob))
    with pytest.raises(BadMagic):
        read_dict(b"PB")


def test_unsupported_version():
    blob = bytearray(write_dict(abc_dict()))
    blob[4] = 99
    import zlib

    body = bytes(blob[:-4])
    blob = body + zlib.crc32(body).to_bytes(4, "big")
    with pytest.raises(UnsupportedVersion):
        read_dict(blob)


def test_checksum_catches_every_single_byte_flip():
    blob = write_dict(kitchen_sink_dict(metadata={"k": 2}))
    for i in range(len(blob)):
        corrupted = bytearray(blob)
        corrupted[i] ^= 0x01
        with pytest.raises(PbcError):
            read_dict(bytes(corrupted))


def test_truncations_raise_typed_errors():
    blob = write_dict(kitchen_sink_dict())
    for cut in range(len(blob)):
        with pytest.raises(PbcError):
            read_dict(blob[:cut])


def test_trailing_garbage_rejected():
    blob = write_dict(abc_dict())
    with pytest.raises(PbcError):
        read_dict(blob + b"\x00")


def test_fuzzed_dictionaries_roundtrip():
    rng = random.Random(81)
    for _ in range(200):
        pats = []
        for pid in range(1, rng.randint(2, 6)):
            toks = [Literal(rng.randrange(256))]
            for _ in range(rng.randint(0, 5)):
                choice = rng.randrange(4)
                if choice == 0:
                    toks.append(Field(VARCHAR))
                elif choice == 1:
                    toks.append(Field(VARINT))
                elif choice == 2:
                    toks.append(Field(char_encoder(rng.randint(1, 40))))
                else:
                    toks.append(Field(int_encoder(rng.randint(1, 19))))
                toks.append(Literal(rng.randrange(256)))
            pats.append(Pattern(tokens=tuple(toks), id=pid))
        d = PatternDictionary(patterns=tuple(pats))
        blob = write_dict(d)
        d2 = read_dict(blob)
        assert write_dict(d2) == blob
        assert [p.tokens for p in d2.patterns] == [p.tokens for p in pats]
