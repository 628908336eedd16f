"""Command-line driver: train, compress, decompress, pack, lookup, bench,
stats, ablate, gen.

All randomness flows from --seed, so identical invocations reproduce
byte-identically. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import corpus
from .cluster import MergeCriterion, extract_patterns
from .codec import Codec, HuffmanTable, outlier_rate, should_retrain
from .dictio import read_dict, write_dict
from .encoders import decode_varuint, encode_varuint
from .errors import PbcError, Truncated
from .model import PatternDictionary
from .store import ContainerReader, bench_random_access, build_container

_CRITERIA = {
    "el": MergeCriterion.ENCODING_LENGTH,
    "entropy": MergeCriterion.ENTROPY,
    "edit": MergeCriterion.EDIT_DISTANCE,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _atomic_write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    tmp = f"{path}.tmp.{os.getpid()}"
    Path(tmp).write_bytes(data)
    os.replace(tmp, path)


def read_records(path: str, framing: str) -> List[bytes]:
    data = _read_bytes(path)
    if framing == "lines":
        if data.endswith(b"\n"):
            data = data[:-1]
        return data.split(b"\n") if data else []
    records = []
    pos = 0
    while pos < len(data):
        length, pos = decode_varuint(data, pos)
        if pos + length > len(data):
            raise Truncated("framed input ended mid-record")
        records.append(data[pos : pos + length])
        pos += length
    return records


def frame_records(records: List[bytes], framing: str) -> bytes:
    if framing == "lines":
        for rec in records:
            if b"\n" in rec:
                raise ValueError("record contains LF; use --framing framed")
        return b"\n".join(records) + (b"\n" if records else b"")
    return b"".join(encode_varuint(len(r)) + r for r in records)


def _reservoir(records: List[bytes], max_records: int, max_bytes: int, seed: int):
    """Seeded reservoir sample capped by record count, then byte budget."""
    rng = random.Random(seed)
    sample: List[bytes] = []
    for i, rec in enumerate(records):
        if i < max_records:
            sample.append(rec)
        else:
            j = rng.randrange(i + 1)
            if j < max_records:
                sample[j] = rec
    out = []
    total = 0
    for rec in sample:
        if out and total + len(rec) > max_bytes:
            break
        out.append(rec)
        total += len(rec)
    return out


def _threads() -> int:
    # PBC_THREADS caps the worker pool; the pipeline is sequential, so the
    # effective pool size is 1 regardless (order is trivially preserved).
    try:
        cap = int(os.environ.get("PBC_THREADS", "1"))
    except ValueError:
        cap = 1
    return max(1, min(cap, 1))


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value}")


def _train_dictionary(
    records: List[bytes],
    *,
    k: int,
    criterion: str,
    postcoder: str,
    seed: int,
    sample_bytes: int,
    max_sample_records: int,
    prune: bool = True,
) -> tuple:
    sample = _reservoir(records, max_sample_records, sample_bytes, seed)
    dictionary = extract_patterns(
        sample, k, _CRITERIA[criterion], prune=prune, metadata={"seed": seed}
    )
    warn = None
    if dictionary.metadata.get("distinct_records") == k:
        warn = "k equals the distinct sample count; every pattern is a singleton"
    if postcoder == "huffman":
        # train on the plain field payloads of matched sample records
        payloads = _sample_payloads(dictionary, sample)
        table = HuffmanTable.train(payloads) if payloads else None
        dictionary = PatternDictionary(
            patterns=dictionary.patterns,
            post_coder=table,
            metadata=dictionary.metadata,
        )
    return dictionary, sample, warn


def _sample_payloads(dictionary: PatternDictionary, sample: List[bytes]):
    from .encoders import encode_field
    from .matcher import compile_dictionary, select_pattern

    compiled = compile_dictionary(dictionary)
    payloads = []
    for rec in sample:
        hit = select_pattern(rec, compiled)
        if hit is None:
            continue
        pid, values = hit
        pattern = dictionary.get(pid)
        payloads.append(
            b"".join(
                encode_field(v, e) for v, e in zip(values, pattern.field_encoders)
            )
        )
    return payloads


def cmd_train(args) -> int:
    t0 = time.perf_counter()
    records = read_records(args.input, args.framing)
    dictionary, sample, warn = _train_dictionary(
        records,
        k=args.patterns,
        criterion=args.criterion,
        postcoder=args.postcoder,
        seed=args.seed,
        sample_bytes=args.sample_bytes,
        max_sample_records=args.max_sample_records,
        prune=not args.no_prune,
    )
    _atomic_write(args.out, write_dict(dictionary))
    if warn:
        print(f"warning: {warn}", file=sys.stderr)
    _emit(
        {
            "sample_records": len(sample),
            "sample_bytes": sum(len(r) for r in sample),
            "patterns": len(dictionary.patterns),
            "criterion": args.criterion,
            "postcoder": args.postcoder,
            "seconds": round(time.perf_counter() - t0, 3),
            "out": args.out,
        },
        args.json,
    )
    return 0


def cmd_compress(args) -> int:
    dictionary = read_dict(_read_bytes(args.dict))
    records = read_records(args.input, args.framing)
    codec = Codec(dictionary)
    blob = b"".join(codec.compress_record(r) for r in records)
    _atomic_write(args.output, blob)
    stats = codec.stats
    _emit(
        {
            "records": stats.records_total,
            "outliers": stats.records_outlier,
            "bytes_in": stats.bytes_in,
            "bytes_out": stats.bytes_out,
            "ratio": round(stats.bytes_out / stats.bytes_in, 4)
            if stats.bytes_in
            else None,
            "threads": _threads(),
        },
        args.json,
    )
    return 0


def cmd_decompress(args) -> int:
    dictionary = read_dict(_read_bytes(args.dict))
    codec = Codec(dictionary)
    records = codec.decompress_all(_read_bytes(args.input))
    _atomic_write(args.output, frame_records(records, args.framing))
    _emit({"records": len(records)}, args.json)
    return 0


def cmd_pack(args) -> int:
    dictionary = read_dict(_read_bytes(args.dict))
    records = read_records(args.input, args.framing)
    container = build_container(records, dictionary)
    _atomic_write(args.out, container)
    _emit(
        {"records": len(records), "container_bytes": len(container)}, args.json
    )
    return 0


def cmd_lookup(args) -> int:
    reader = ContainerReader(_read_bytes(args.container))
    record = reader.lookup(args.index)
    sys.stdout.buffer.write(record)
    sys.stdout.buffer.write(b"\n")
    return 0


def cmd_bench(args) -> int:
    reader = ContainerReader(_read_bytes(args.container))
    result = bench_random_access(reader, args.fraction, seed=args.seed)
    payload = {
        "records": reader.record_count,
        "lookups": result.lookups,
        "lookups_per_sec": round(result.lookups_per_sec, 1),
        "bytes_per_lookup": round(result.bytes_per_lookup, 1),
    }
    for block in args.block_baseline or []:
        arm = bench_random_access(
            reader, args.fraction, seed=args.seed, block_records=block
        )
        payload[f"block{block}_lookups_per_sec"] = round(arm.lookups_per_sec, 1)
        payload[f"block{block}_bytes_per_lookup"] = round(arm.bytes_per_lookup, 1)
    _emit(payload, args.json)
    return 0


def cmd_stats(args) -> int:
    dictionary = read_dict(_read_bytes(args.dict))
    records = read_records(args.input, args.framing)
    codec = Codec(dictionary)
    for rec in records:
        codec.compress_record(rec)
    stats = codec.stats
    rate = outlier_rate(stats)
    _emit(
        {
            "records": stats.records_total,
            "ratio": round(stats.bytes_out / stats.bytes_in, 4)
            if stats.bytes_in
            else None,
            "outlier_rate": round(rate, 4),
            "pattern_hits": {str(k): v for k, v in sorted(stats.pattern_hits.items())},
            "should_retrain": should_retrain(stats, args.threshold),
            "threshold": args.threshold,
        },
        args.json,
    )
    return 0


def cmd_ablate(args) -> int:
    records = read_records(args.input, args.framing)
    table = {}
    for name in args.criteria.split(","):
        name = name.strip()
        if name not in _CRITERIA:
            raise ValueError(f"unknown criterion {name!r}")
        dictionary, _, _ = _train_dictionary(
            records,
            k=args.patterns,
            criterion=name,
            postcoder="none",
            seed=args.seed,
            sample_bytes=args.sample_bytes,
            max_sample_records=args.max_sample_records,
        )
        codec = Codec(dictionary)
        for rec in records:
            codec.compress_record(rec)
        table[name] = round(codec.stats.bytes_out / codec.stats.bytes_in, 4)
    _emit({"patterns": args.patterns, "ratio": table}, args.json)
    return 0


def cmd_gen(args) -> int:
    records = corpus.generate(args.kind, args.count, args.seed)
    _atomic_write(args.out, frame_records(records, args.framing))
    _emit(
        {
            "kind": args.kind,
            "records": len(records),
            "bytes": sum(len(r) for r in records),
        },
        args.json,
    )
    return 0


def _add_common(p, *, framing=True, seed=True):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    if framing:
        p.add_argument("--framing", choices=["lines", "framed"], default="lines")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="learn a pattern dictionary from a sample")
    p.add_argument("--input", required=True)
    p.add_argument("--sample-bytes", type=int, default=4 * 1024 * 1024)
    p.add_argument("--max-sample-records", type=int, default=4096)
    p.add_argument("--patterns", type=int, default=256)
    p.add_argument("--criterion", choices=sorted(_CRITERIA), default="el")
    p.add_argument("--postcoder", choices=["none", "huffman"], default="none")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compress", help="compress a corpus with a dictionary")
    p.add_argument("--dict", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="restore the original corpus")
    p.add_argument("--dict", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("pack", help="build a random-access container")
    p.add_argument("--dict", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("lookup", help="fetch one record from a container")
    p.add_argument("--container", required=True)
    p.add_argument("--index", type=int, required=True)
    _add_common(p, framing=False, seed=False)
    p.set_defaults(func=cmd_lookup)

    p = sub.add_parser("bench", help="random-access benchmark")
    p.add_argument("--container", required=True)
    p.add_argument("--fraction", type=float, default=0.01)
    p.add_argument("--block-baseline", type=int, nargs="*", default=[])
    _add_common(p, framing=False)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="ratio, outliers, retrain advice")
    p.add_argument("--dict", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=0.05)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("ablate", help="per-criterion compression ratio table")
    p.add_argument("--input", required=True)
    p.add_argument("--patterns", type=int, default=256)
    p.add_argument("--criteria", default="el,entropy,edit")
    p.add_argument("--sample-bytes", type=int, default=4 * 1024 * 1024)
    p.add_argument("--max-sample-records", type=int, default=4096)
    _add_common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--kind", choices=sorted(corpus.GENERATORS), required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PbcError, OSError, ValueError) as exc:
        print(f"pbc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
