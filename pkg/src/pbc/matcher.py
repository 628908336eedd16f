"""Record-to-pattern matching with deterministic lazy extraction.

A pattern's literal runs must occur in the record in order and
contiguously; whatever lies between consecutive runs becomes the field
values. Fields take the shortest feasible substring first, so the reported
segmentation is the lexicographically earliest one, and the encoder's
character class acts as a guard during the search (a non-digit value kills
an INT field instead of failing later at encode time).
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .encoders import _conforms
from .model import EncoderKind, FieldEncoder, Literal, Pattern, PatternDictionary


class CompiledPattern:
    """A pattern prepared for matching: literal runs plus field guards."""

    def __init__(self, pattern: Pattern):
        self.pattern = pattern
        items: List[Tuple[str, object]] = []
        run = bytearray()
        for tok in pattern.tokens:
            if isinstance(tok, Literal):
                run.append(tok.byte)
            else:
                if run:
                    items.append(("L", bytes(run)))
                    run = bytearray()
                items.append(("F", tok.encoder))
        if run:
            items.append(("L", bytes(run)))
        self._items = items
        self.literal_bytes = sum(len(v) for k, v in items if k == "L")
        self.field_count = sum(1 for k, _ in items if k == "F")
        runs = [v for k, v in items if k == "L"]
        self.longest_literal = max(runs, key=len) if runs else b""

    def _field_lengths(self, ti: int, record: bytes, pos: int):
        """Feasible field lengths, shortest first (lazy semantics).

        A VARCHAR field is always followed by a literal run (adjacent
        fields were collapsed) or is last, so its feasible lengths are
        exactly the occurrences of that run — equivalent to trying every
        length, but without scanning infeasible ones.
        """
        enc: FieldEncoder = self._items[ti][1]
        remaining = len(record) - pos
        if enc.kind is EncoderKind.VARCHAR:
            if ti + 1 == len(self._items):
                yield remaining  # last token: the field takes the rest
                return
            run = self._items[ti + 1][1]
            start = pos
            while True:
                hit = record.find(run, start)
                if hit < 0:
                    return
                yield hit - pos
                start = hit + 1
        elif enc.kind is EncoderKind.CHAR or enc.kind is EncoderKind.INT:
            if enc.n <= remaining:
                yield enc.n
        else:  # VARINT
            yield from range(1, min(19, remaining) + 1)

    def match_extract(self, record) -> Optional[List[bytes]]:
        """Field values in pattern order, or None if the record does not match.

        Iterative backtracking with a memoized failure set, so each
        (token, position) state is explored at most once.
        """
        record = bytes(record)
        items = self._items
        n = len(record)
        failed = set()
        stack: List[Tuple[int, int, object]] = []  # open field frames
        fields: List[bytes] = []
        ti = pos = 0
        while True:
            entered_field = False
            if (ti, pos) not in failed:
                if ti == len(items):
                    if pos == n:
                        return fields
                else:
                    kind, val = items[ti]
                    if kind == "L":
                        if record.startswith(val, pos):
                            ti += 1
                            pos += len(val)
                            continue
                    else:
                        stack.append((ti, pos, self._field_lengths(ti, record, pos)))
                        fields.append(b"")
                        entered_field = True
            if not entered_field:
                failed.add((ti, pos))
            # pull the next alternative from the innermost open field
            while stack:
                fti, fpos, it = stack[-1]
                enc = items[fti][1]
                resumed = False
                for length in it:
                    value = record[fpos : fpos + length]
                    if _conforms(value, enc):
                        fields[-1] = value
                        ti, pos = fti + 1, fpos + length
                        resumed = True
                        break
                if resumed:
                    break
                failed.add((fti, fpos))
                stack.pop()
                fields.pop()
            else:
                return None


def compile_dictionary(dictionary: PatternDictionary) -> List[CompiledPattern]:
    """Compile every pattern and sort into the selection precedence order."""
    compiled = [CompiledPattern(p) for p in dictionary.patterns]
    compiled.sort(key=lambda cp: (-cp.literal_bytes, cp.field_count, cp.pattern.id))
    return compiled


def select_pattern(
    record,
    compiled: Sequence[CompiledPattern],
    *,
    prefilter: bool = True,
) -> Optional[Tuple[int, List[bytes]]]:
    """First matching pattern by descending literal bytes, then fewest
    fields, then lowest id. Returns (pattern id, field values) or None for
    an outlier. The longest-literal prefilter only skips patterns that
    cannot match, so it never changes the result.
    """
    record = bytes(record)
    for cp in compiled:
        if prefilter and cp.longest_literal and cp.longest_literal not in record:
            continue
        fields = cp.match_extract(record)
        if fields is not None:
            return cp.pattern.id, fields
    return None
