import random

import pytest

from pbc.encoders import (
    decode_field,
    decode_varuint,
    encode_field,
    encode_varuint,
    encoded_size,
    infer_encoder,
    varuint_size,
)
from pbc.errors import NonConforming, Overflow, Truncated
from pbc.model import EncoderKind, VARCHAR, VARINT, char_encoder, int_encoder


def test_varuint_sizes():
    assert len(encode_varuint(0)) == 1
    assert len(encode_varuint(127)) == 1
    assert len(encode_varuint(128)) == 2
    assert len(encode_varuint(16383)) == 2
    assert len(encode_varuint(16384)) == 3


def test_varuint_roundtrip_fuzz():
    rng = random.Random(1)
    for _ in range(2000):
        v = rng.randrange(2**64)
        buf = encode_varuint(v)
        assert varuint_size(v) == len(buf)
        got, pos = decode_varuint(buf)
        assert (got, pos) == (v, len(buf))


def test_varuint_monotone_length():
    rng = random.Random(2)
    for _ in range(500):
        a = rng.randrange(2**64)
        b = rng.randrange(2**64)
        a, b = min(a, b), max(a, b)
        assert varuint_size(a) <= varuint_size(b)


def test_varuint_rejects_non_minimal_and_overflow():
    with pytest.raises(Overflow):
        encode_varuint(2**64)
    # 0x80 0x00 is a redundant two-byte encoding of 0
    with pytest.raises(Overflow):
        decode_varuint(bytes([0x80]) * 10 + bytes([0x02]))
    with pytest.raises(Truncated):
        decode_varuint(b"\x80")


def test_encode_field_examples():
    assert encode_field(b"42", int_encoder(2)) == bytes([0x2A])
    assert encode_field(b"", VARCHAR) == bytes([0x00])
    assert encode_field(b"300", VARINT) == bytes([0xAC, 0x02])


def test_decode_field_examples():
    assert decode_field(bytes([0x07]), 0, int_encoder(2)) == (b"07", 1)
    assert decode_field(bytes([0x00]), 0, VARCHAR) == (b"", 1)
    assert decode_field(bytes([0xAC, 0x02]), 0, VARINT) == (b"300", 2)


def test_encode_field_nonconforming():
    with pytest.raises(NonConforming):
        encode_field(b"4x", int_encoder(2))
    with pytest.raises(NonConforming):
        encode_field(b"007", VARINT)
    with pytest.raises(NonConforming):
        encode_field(b"abc", char_encoder(2))


def test_field_roundtrip_fuzz():
    rng = random.Random(3)
    for _ in range(500):
        kind = rng.choice(list(EncoderKind))
        if kind is EncoderKind.VARCHAR:
            enc = VARCHAR
            value = bytes(rng.randrange(256) for _ in range(rng.randrange(40)))
        elif kind is EncoderKind.CHAR:
            n = rng.randint(1, 20)
            enc = char_encoder(n)
            value = bytes(rng.randrange(256) for _ in range(n))
        elif kind is EncoderKind.INT:
            n = rng.randint(1, 19)
            enc = int_encoder(n)
            value = "".join(str(rng.randrange(10)) for _ in range(n)).encode()
        else:
            enc = VARINT
            value = str(rng.randrange(10**19)).encode()
        buf = encode_field(value, enc)
        assert len(buf) == encoded_size(value, enc)
        got, pos = decode_field(buf, 0, enc)
        assert got == value and pos == len(buf)


def test_decode_field_truncated():
    with pytest.raises(Truncated):
        decode_field(b"\x05ab", 0, VARCHAR)
    with pytest.raises(Truncated):
        decode_field(b"a", 0, char_encoder(2))


def test_infer_encoder_examples():
    enc = infer_encoder([b"23", b"95", b"17", b"42"])
    assert (enc.kind, enc.n, enc.m) == (EncoderKind.INT, 2, 1)
    enc = infer_encoder([b"B", b"S", b"B"])
    assert (enc.kind, enc.n) == (EncoderKind.CHAR, 1)
    assert infer_encoder([b"7", b"007"]).kind is EncoderKind.VARCHAR


def test_infer_encoder_never_nonconforming_and_beats_varchar():
    rng = random.Random(4)
    for _ in range(200):
        values = []
        style = rng.randrange(3)
        for _ in range(rng.randint(1, 8)):
            if style == 0:
                values.append(str(rng.randrange(10**rng.randint(1, 6))).encode())
            elif style == 1:
                values.append(bytes(rng.randrange(65, 91) for _ in range(5)))
            else:
                values.append(bytes(rng.randrange(256) for _ in range(rng.randrange(6))))
        enc = infer_encoder(values)
        total = 0
        for v in values:
            total += len(encode_field(v, enc))  # must not raise
        baseline = sum(encoded_size(v, VARCHAR) for v in values)
        assert total <= baseline
