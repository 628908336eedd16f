import random

import pytest

from pbc.codec import (
    Codec,
    CodecStats,
    HuffmanTable,
    outlier_rate,
    should_retrain,
    train_postcoder,
)
from pbc.encoders import varuint_size
from pbc.errors import EmptyStats, UnknownPatternId
from pbc.model import (
    Field,
    Literal,
    Pattern,
    PatternDictionary,
    VARCHAR,
    WILDCARD,
    int_encoder,
    pattern_from_string,
)


def pat(s, id=1):
    return pattern_from_string(
        tuple(WILDCARD if c == "*" else ord(c) for c in s), pattern_id=id
    )


def simple_dict(post_coder=None):
    return PatternDictionary(
        patterns=(pat("foobar", id=1), pat("*ooba*", id=2)),
        post_coder=post_coder,
    )


def test_zero_field_record_is_one_byte():
    codec = Codec(simple_dict())
    assert codec.compress_record(b"foobar") == b"\x01"
    assert codec.decompress_record(b"\x01") == (b"foobar", 1)


def test_outlier_framing():
    codec = Codec(simple_dict())
    raw = b"no pattern matches this"
    out = codec.compress_record(raw)
    assert out == b"\x00" + bytes([len(raw)]) + raw
    assert len(out) == 1 + varuint_size(len(raw)) + len(raw)
    assert codec.decompress_record(out) == (raw, len(out))


def test_field_record_framing():
    codec = Codec(simple_dict())
    out = codec.compress_record(b"zoobaz")
    # id 2, flags 0, VARCHAR("z") twice
    assert out == b"\x02\x00" + b"\x01z" + b"\x01z"
    assert codec.decompress_record(out)[0] == b"zoobaz"


def test_roundtrip_fuzz_with_expansion_bound():
    codec = Codec(simple_dict())
    rng = random.Random(61)
    for _ in range(500):
        n = rng.randint(0, 200)
        rec = bytes(rng.randrange(256) for _ in range(n))
        out = codec.compress_record(rec)
        assert codec.decompress_record(out)[0] == rec
        assert len(out) <= len(rec) + 1 + varuint_size(len(rec))


def test_unknown_pattern_id():
    codec = Codec(simple_dict())
    with pytest.raises(UnknownPatternId):
        codec.decompress_record(b"\x63\x00")


def test_int_field_repads_leading_zeros():
    d = PatternDictionary(
        patterns=(Pattern(tokens=(Literal(ord("q")), Field(int_encoder(3))), id=1),)
    )
    codec = Codec(d)
    out = codec.compress_record(b"q007")
    assert codec.decompress_record(out)[0] == b"q007"
    assert len(out) == 1 + 1 + 2  # id + flags + 2-byte int


def test_self_framing_concatenation():
    codec = Codec(simple_dict())
    records = [b"foobar", b"zoobaz", b"???", b"foobar"]
    blob = b"".join(codec.compress_record(r) for r in records)
    assert codec.decompress_all(blob) == records


def test_fixed_width_ids_roundtrip():
    codec = Codec(simple_dict(), fixed_width_ids=True)
    for rec in (b"foobar", b"zoobaz", b"other"):
        out = codec.compress_record(rec)
        assert codec.decompress_record(out)[0] == rec


def test_huffman_skews_toward_frequent_symbols():
    table = train_postcoder([b"a" * 1000 + bytes(range(256))])
    coded = table.encode(b"a" * 800)
    assert len(coded) < 800 // 4  # ~1 bit per byte plus framing
    assert table.decode(coded)[0] == b"a" * 800


def test_huffman_roundtrip_fuzz():
    rng = random.Random(71)
    sample = [bytes(rng.randrange(256) for _ in range(rng.randint(1, 100)))
              for _ in range(50)]
    table = train_postcoder(sample)
    for payload in sample + [b"", b"\x00", bytes(range(256))]:
        coded = table.encode(payload)
        assert table.decode(coded) == (payload, len(coded))


def test_postcoder_skipped_when_not_smaller():
    # uniform payload distribution: Huffman output is not smaller, so the
    # flags byte must stay 0 and the payload stays plain
    table = train_postcoder([bytes(range(256)) * 4])
    d = simple_dict(post_coder=table)
    codec = Codec(d)
    out = codec.compress_record(b"zoobaz")
    assert out[1] & 1 == 0
    assert codec.decompress_record(out)[0] == b"zoobaz"


def test_postcoder_applied_when_smaller():
    table = train_postcoder([b"z" * 1000])
    d = PatternDictionary(patterns=(pat("head*", id=1),), post_coder=table)
    codec = Codec(d)
    rec = b"head" + b"z" * 64
    out = codec.compress_record(rec)
    assert out[1] & 1 == 1
    assert len(out) < 2 + 1 + 64
    assert codec.decompress_record(out)[0] == rec


def test_stats_conservation_and_merge():
    codec = Codec(simple_dict())
    records = [b"foobar"] * 3 + [b"zoobaz"] * 2 + [b"misc"] * 5
    for r in records:
        codec.compress_record(r)
    s = codec.stats
    assert s.records_total == 10
    assert s.records_outlier == 5
    assert sum(s.pattern_hits.values()) + s.records_outlier == s.records_total
    assert s.pattern_hits == {1: 3, 2: 2}
    assert s.bytes_in == sum(len(r) for r in records)

    other = CodecStats()
    other.records_total = 4
    other.records_outlier = 1
    other.pattern_hits = {2: 3}
    merged = s.merge(other)
    assert merged.records_total == 14
    assert merged.pattern_hits == {1: 3, 2: 5}


def test_outlier_rate_and_retrain_boundaries():
    s = CodecStats()
    s.records_total = 100
    s.records_outlier = 5
    assert outlier_rate(s) == 0.05
    assert should_retrain(s, 0.05) is True
    s.records_outlier = 4
    assert should_retrain(s, 0.05) is False
    assert should_retrain(s, 0.0) is True  # threshold zero always retrains

    empty = CodecStats()
    with pytest.raises(EmptyStats):
        outlier_rate(empty)
    with pytest.raises(EmptyStats):
        empty.compression_ratio()
