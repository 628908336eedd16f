"""Random-access container: per-record lookup without block decompression.

Layout: magic "PBCC", version byte, flags byte (bit0: 32-bit offsets
instead of 64-bit), VarUInt dictionary length + embedded DictFile, VarUInt
record count, offset index (big-endian, offsets into the payload region),
payload region, trailing CRC-32 over everything preceding it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import List, Sequence, Tuple
import zlib

from .codec import Codec
from .dictio import read_dict, write_dict
from .encoders import decode_varuint, encode_varuint
from .errors import (
    BadMagic,
    ChecksumMismatch,
    IndexOutOfRange,
    Truncated,
    UnsupportedVersion,
)
from .model import PatternDictionary

MAGIC = b"PBCC"
VERSION = 1


def build_container(
    records: Sequence[bytes],
    dictionary: PatternDictionary,
    *,
    narrow_offsets: bool = False,
) -> bytes:
    """Compress ``records`` into a self-contained random-access container."""
    codec = Codec(dictionary)
    payload = bytearray()
    offsets: List[int] = []
    for rec in records:
        offsets.append(len(payload))
        payload += codec.compress_record(rec)
    offsets.append(len(payload))  # sentinel: end of the last record
    width = 4 if narrow_offsets else 8
    if narrow_offsets and len(payload) > 0xFFFFFFFF:
        raise OverflowError("payload too large for 32-bit offsets")
    out = bytearray(MAGIC)
    out.append(VERSION)
    out.append(1 if narrow_offsets else 0)
    dict_bytes = write_dict(dictionary)
    out += encode_varuint(len(dict_bytes)) + dict_bytes
    out += encode_varuint(len(records))
    for off in offsets:
        out += off.to_bytes(width, "big")
    out += payload
    out += zlib.crc32(bytes(out)).to_bytes(4, "big")
    return bytes(out)


class ContainerReader:
    """Reader over a container buffer; counts bytes touched per lookup.

    A lookup reads two adjacent index entries and the record's payload
    slice only, so its byte footprint does not grow with the container.
    """

    def __init__(self, data, *, verify: bool = True):
        self._data = bytes(data)
        data = self._data
        if len(data) < 10 or data[:4] != MAGIC:
            raise BadMagic("not a container file")
        if verify:
            crc = int.from_bytes(data[-4:], "big")
            if zlib.crc32(data[:-4]) != crc:
                raise ChecksumMismatch("container checksum does not match")
        if data[4] != VERSION:
            raise UnsupportedVersion(f"container format version {data[4]}")
        self.offset_width = 4 if data[5] & 1 else 8
        pos = 6
        dlen, pos = decode_varuint(data, pos)
        self.dictionary = read_dict(data[pos : pos + dlen])
        self._dict_bytes = dlen
        pos += dlen
        self.record_count, pos = decode_varuint(data, pos)
        self._index_start = pos
        self._payload_start = pos + (self.record_count + 1) * self.offset_width
        if self._payload_start > len(data) - 4:
            raise Truncated("container ended inside the offset index")
        self._codec = Codec(self.dictionary)
        self.bytes_touched = 0

    def __len__(self) -> int:
        return self.record_count

    def _offset(self, i: int) -> int:
        w = self.offset_width
        start = self._index_start + i * w
        self.bytes_touched += w
        return int.from_bytes(self._data[start : start + w], "big")

    def lookup(self, i: int) -> bytes:
        """Return record ``i``; touches only its index entries and slice."""
        if not 0 <= i < self.record_count:
            raise IndexOutOfRange(f"record {i} of {self.record_count}")
        begin = self._offset(i)
        end = self._offset(i + 1)
        self.bytes_touched += end - begin
        start = self._payload_start + begin
        rec, _ = self._codec.decompress_record(
            self._data[start : start + (end - begin)], 0
        )
        return rec

    def lookup_all(self) -> List[bytes]:
        return [self.lookup(i) for i in range(self.record_count)]

    def block_lookup(self, i: int, block_records: int) -> bytes:
        """Baseline arm: decompress record i's whole block to reach it."""
        if not 0 <= i < self.record_count:
            raise IndexOutOfRange(f"record {i} of {self.record_count}")
        first = (i // block_records) * block_records
        last = min(first + block_records, self.record_count)
        begin = self._offset(first)
        end = self._offset(last)
        self.bytes_touched += end - begin
        start = self._payload_start + begin
        buf = self._data[start : start + (end - begin)]
        pos = 0
        rec = b""
        for j in range(first, last):
            rec, pos = self._codec.decompress_record(buf, pos)
            if j == i:
                return rec
        return rec  # pragma: no cover


@dataclass(frozen=True)
class BenchResult:
    lookups: int
    seconds: float
    lookups_per_sec: float
    bytes_per_lookup: float


def bench_random_access(
    reader: ContainerReader,
    sample_fraction: float,
    *,
    seed: int = 0,
    block_records: int = 0,
) -> BenchResult:
    """Timed uniform random lookups; ``block_records`` > 0 switches to the
    simulated block-decompress baseline."""
    n = reader.record_count
    count = max(1, int(round(n * sample_fraction)))
    rng = random.Random(seed)
    if sample_fraction >= 1.0:
        indices = list(range(n))
    else:
        indices = [rng.randrange(n) for _ in range(count)]
    reader.bytes_touched = 0
    t0 = time.perf_counter()
    for i in indices:
        if block_records > 0:
            reader.block_lookup(i, block_records)
        else:
            reader.lookup(i)
    dt = time.perf_counter() - t0
    return BenchResult(
        lookups=len(indices),
        seconds=dt,
        lookups_per_sec=len(indices) / dt if dt > 0 else float("inf"),
        bytes_per_lookup=reader.bytes_touched / len(indices),
    )


def lookup(container_bytes, i: int) -> bytes:
    return ContainerReader(container_bytes).lookup(i)
