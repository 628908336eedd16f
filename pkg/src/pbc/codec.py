"""Per-record compression: pattern match, field encoding, outlier escape.

Wire format (bit-exact):
  matched, pattern with fields:  VarUInt(id), flags byte (bit0: payload is
                                 Huffman post-coded), field payload
  matched, all-literal pattern:  VarUInt(id) only
  outlier:                       VarUInt(0), VarUInt(length), raw bytes

Every record consumes exactly its own bytes, so concatenated records frame
themselves and random access only needs offsets.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterable, List, Optional, Tuple

from .encoders import decode_field, decode_varuint, encode_field, encode_varuint
from .errors import (
    EmptyStats,
    MalformedPayload,
    Truncated,
    UnknownPatternId,
)
from .matcher import compile_dictionary, select_pattern
from .model import Field, Literal, PatternDictionary, RAW_ESCAPE_ID

EOB = 256  # end-of-payload marker symbol for the per-record post-coder


class HuffmanTable:
    """Canonical Huffman code over 256 byte symbols plus an end marker.

    Add-one smoothing gives unseen symbols a (long) code, so any byte
    string remains encodable. The end marker makes each coded payload
    self-framing: decoding stops at the marker and consumes padding up to
    the byte boundary.
    """

    def __init__(self, lengths: List[int]):
        if len(lengths) != 257:
            raise ValueError("expected 257 code lengths")
        self.lengths = list(lengths)
        self._codes = _canonical_codes(self.lengths)
        # decoding tables per canonical convention: first code and symbol
        # index at each length
        order = sorted(range(257), key=lambda s: (self.lengths[s], s))
        self._order = order
        self._first_code: Dict[int, int] = {}
        self._first_index: Dict[int, int] = {}
        code = 0
        prev_len = 0
        for idx, sym in enumerate(order):
            length = self.lengths[sym]
            if length == 0:
                continue
            code <<= length - prev_len
            if length not in self._first_code:
                self._first_code[length] = code
                self._first_index[length] = idx
            code += 1
            prev_len = length

    @classmethod
    def train(cls, payloads: Iterable[bytes]) -> "HuffmanTable":
        freqs = [1] * 257  # add-one smoothing, covers EOB too
        for payload in payloads:
            for b in payload:
                freqs[b] += 1
        return cls(_huffman_lengths(freqs))

    def encode(self, payload: bytes) -> bytes:
        acc = 0
        nbits = 0
        out = bytearray()
        for sym in list(payload) + [EOB]:
            code, length = self._codes[sym]
            acc = (acc << length) | code
            nbits += length
            while nbits >= 8:
                nbits -= 8
                out.append((acc >> nbits) & 0xFF)
        if nbits:
            out.append((acc << (8 - nbits)) & 0xFF)
        return bytes(out)

    def decode(self, buf, pos: int = 0) -> Tuple[bytes, int]:
        """Decode one payload starting at ``pos``; returns (bytes, next pos)."""
        out = bytearray()
        code = 0
        length = 0
        bitpos = pos * 8
        total_bits = len(buf) * 8
        while True:
            if bitpos >= total_bits:
                raise Truncated("post-coded payload ended before end marker")
            byte = buf[bitpos >> 3]
            bit = (byte >> (7 - (bitpos & 7))) & 1
            bitpos += 1
            code = (code << 1) | bit
            length += 1
            if length > 256:
                raise MalformedPayload("post-coded payload is not decodable")
            first = self._first_code.get(length)
            if first is not None and code >= first:
                idx = self._first_index[length] + (code - first)
                if idx < 257 and self.lengths[self._order[idx]] == length:
                    sym = self._order[idx]
                    if sym == EOB:
                        return bytes(out), (bitpos + 7) >> 3
                    out.append(sym)
                    code = 0
                    length = 0


def _huffman_lengths(freqs: List[int]) -> List[int]:
    """Optimal prefix-code lengths via the standard heap construction."""
    heap: List[tuple] = [(f, sym, sym) for sym, f in enumerate(freqs) if f > 0]
    heapq.heapify(heap)
    if len(heap) == 1:
        return [1 if freqs[s] > 0 else 0 for s in range(len(freqs))]
    tick = len(freqs)
    while len(heap) > 1:
        fa, _, a = heapq.heappop(heap)
        fb, _, b = heapq.heappop(heap)
        heapq.heappush(heap, (fa + fb, tick, (a, b)))
        tick += 1
    lengths = [0] * len(freqs)
    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, tuple):
            stack.append((node[0], depth + 1))
            stack.append((node[1], depth + 1))
        else:
            lengths[node] = depth
    return lengths


def _canonical_codes(lengths: List[int]) -> Dict[int, Tuple[int, int]]:
    order = sorted(
        (s for s in range(len(lengths)) if lengths[s] > 0),
        key=lambda s: (lengths[s], s),
    )
    codes: Dict[int, Tuple[int, int]] = {}
    code = 0
    prev = 0
    for sym in order:
        code <<= lengths[sym] - prev
        codes[sym] = (code, lengths[sym])
        code += 1
        prev = lengths[sym]
    return codes


def train_postcoder(payloads: Iterable[bytes]) -> HuffmanTable:
    return HuffmanTable.train(payloads)


@dataclass
class CodecStats:
    """Monotone counters; merge-able so workers can accumulate privately."""

    records_total: int = 0
    records_outlier: int = 0
    bytes_in: int = 0
    bytes_out: int = 0
    pattern_hits: Dict[int, int] = dc_field(default_factory=dict)

    def merge(self, other: "CodecStats") -> "CodecStats":
        hits = dict(self.pattern_hits)
        for pid, n in other.pattern_hits.items():
            hits[pid] = hits.get(pid, 0) + n
        return CodecStats(
            records_total=self.records_total + other.records_total,
            records_outlier=self.records_outlier + other.records_outlier,
            bytes_in=self.bytes_in + other.bytes_in,
            bytes_out=self.bytes_out + other.bytes_out,
            pattern_hits=hits,
        )

    @property
    def compression_ratio(self) -> float:
        if self.bytes_in == 0:
            raise EmptyStats("no records seen")
        return self.bytes_out / self.bytes_in


def outlier_rate(stats: CodecStats) -> float:
    if stats.records_total == 0:
        raise EmptyStats("no records seen")
    return stats.records_outlier / stats.records_total


def should_retrain(stats: CodecStats, threshold: float = 0.05) -> bool:
    return outlier_rate(stats) >= threshold


class Codec:
    """Stateful wrapper binding a dictionary, its matcher, and counters."""

    def __init__(self, dictionary: PatternDictionary, *, fixed_width_ids: bool = False):
        self.dictionary = dictionary
        self.compiled = compile_dictionary(dictionary)
        self.post_coder: Optional[HuffmanTable] = dictionary.post_coder
        self.fixed_width_ids = fixed_width_ids
        self.stats = CodecStats()

    def _emit_id(self, pid: int) -> bytes:
        if self.fixed_width_ids:
            return pid.to_bytes(4, "big")
        return encode_varuint(pid)

    def _read_id(self, buf, pos: int) -> Tuple[int, int]:
        if self.fixed_width_ids:
            if pos + 4 > len(buf):
                raise Truncated("record ended inside the pattern id")
            return int.from_bytes(buf[pos : pos + 4], "big"), pos + 4
        return decode_varuint(buf, pos)

    def compress_record(self, record) -> bytes:
        record = bytes(record)
        hit = select_pattern(record, self.compiled)
        if hit is None:
            out = (
                self._emit_id(RAW_ESCAPE_ID)
                + encode_varuint(len(record))
                + record
            )
            self.stats.records_outlier += 1
        else:
            pid, values = hit
            pattern = self.dictionary.get(pid)
            out = self._emit_id(pid)
            if pattern.field_count:
                payload = b"".join(
                    encode_field(v, e) for v, e in zip(values, pattern.field_encoders)
                )
                flags = 0
                if self.post_coder is not None:
                    coded = self.post_coder.encode(payload)
                    if len(coded) < len(payload):
                        payload = coded
                        flags = 1
                out += bytes([flags]) + payload
            self.stats.pattern_hits[pid] = self.stats.pattern_hits.get(pid, 0) + 1
        self.stats.records_total += 1
        self.stats.bytes_in += len(record)
        self.stats.bytes_out += len(out)
        return out

    def decompress_record(self, buf, pos: int = 0) -> Tuple[bytes, int]:
        """Decode one record at ``pos``; returns (record, next pos)."""
        pid, pos = self._read_id(buf, pos)
        if pid == RAW_ESCAPE_ID:
            length, pos = decode_varuint(buf, pos)
            if pos + length > len(buf):
                raise Truncated("raw record ended mid-payload")
            return bytes(buf[pos : pos + length]), pos + length
        pattern = self.dictionary.get(pid)
        if pattern is None:
            raise UnknownPatternId(f"pattern id {pid} not in dictionary")
        if pattern.field_count == 0:
            return bytes(t.byte for t in pattern.tokens), pos
        if pos >= len(buf):
            raise Truncated("record ended before the flags byte")
        flags = buf[pos]
        pos += 1
        if flags & 1:
            if self.post_coder is None:
                raise MalformedPayload("post-coded payload but no post-coder")
            plain, pos = self.post_coder.decode(buf, pos)
            values, used = self._decode_fields(plain, 0, pattern)
            if used != len(plain):
                raise MalformedPayload("trailing bytes after the last field")
        else:
            values, pos = self._decode_fields(buf, pos, pattern)
        out = bytearray()
        it = iter(values)
        for tok in pattern.tokens:
            if isinstance(tok, Literal):
                out.append(tok.byte)
            else:
                out += next(it)
        return bytes(out), pos

    @staticmethod
    def _decode_fields(buf, pos, pattern) -> Tuple[List[bytes], int]:
        values = []
        for enc in pattern.field_encoders:
            value, pos = decode_field(buf, pos, enc)
            values.append(value)
        return values, pos

    def decompress_all(self, buf) -> List[bytes]:
        pos = 0
        out = []
        while pos < len(buf):
            rec, pos = self.decompress_record(buf, pos)
            out.append(rec)
        return out


def compress_record(record, dictionary: PatternDictionary) -> bytes:
    return Codec(dictionary).compress_record(record)


def decompress_record(buf, dictionary: PatternDictionary) -> bytes:
    rec, _ = Codec(dictionary).decompress_record(buf, 0)
    return rec
