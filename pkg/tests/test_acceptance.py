"""End-to-end acceptance gate.

Each test prints a single PASS/FAIL line so the whole gate can be read
off a plain pytest -v run.
"""

import json
import random
import time

import pytest

from pbc.cli import main as cli_main
from pbc.cluster import (
    MergeCriterion,
    SymbolHistogram,
    extract_patterns,
    min_el_increment_fast,
    min_el_increment_oracle,
    one_gram_distance,
)
from pbc.codec import Codec, CodecStats, outlier_rate, should_retrain
from pbc.corpus import generate
from pbc.dictio import read_dict, write_dict
from pbc.encoders import varuint_size
from pbc.errors import PbcError
from pbc.model import (
    Field,
    Literal,
    Pattern,
    PatternDictionary,
    VARCHAR,
    VARINT,
    char_encoder,
    int_encoder,
)
from pbc.store import ContainerReader, bench_random_access, build_container


def verdict(n, ok, detail):
    print(f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def rand_pattern(rng, maxlen=8, wildcard_p=0.2, alpha="abcd"):
    while True:
        syms = []
        for _ in range(rng.randint(1, maxlen)):
            if syms and syms[-1] == "*":
                syms.append(rng.choice(alpha))
            elif rng.random() < wildcard_p:
                syms.append("*")
            else:
                syms.append(rng.choice(alpha))
        if any(s != "*" for s in syms):
            return "".join(syms)


def test_acceptance_01_golden_increment():
    inc, merged = min_el_increment_fast("a", "ab", 3, 2)
    verdict(1, inc == 7, f"merge increment for ('a' x3, 'ab' x2) = {inc}, want 7")


def test_acceptance_02_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(1234)
    agree = 0
    for _ in range(200):
        x = rand_pattern(rng)
        y = rand_pattern(rng)
        sx, sy = rng.randint(1, 5), rng.randint(1, 5)
        fast, _ = min_el_increment_fast(x, y, sx, sy)
        if fast == min_el_increment_oracle(x, y, sx, sy):
            agree += 1
    elapsed = time.perf_counter() - t0
    verdict(
        2,
        agree == 200 and elapsed < 10,
        f"fast DP == oracle on {agree}/200 seeded pairs in {elapsed:.1f}s",
    )


def _fuzz_records(rng, n=10_000):
    return [
        bytes(rng.randrange(256) for _ in range(rng.randint(0, 1000)))
        for _ in range(n)
    ]


def test_acceptance_03_losslessness():
    t0 = time.perf_counter()
    rng = random.Random(55)
    templated = generate("trade", 2000, seed=2)
    dictionary = extract_patterns(templated[:256], k=16)
    codec = Codec(dictionary)
    ok = True
    for rec in _fuzz_records(rng) + templated:
        out = codec.compress_record(rec)
        if codec.decompress_record(out) != (rec, len(out)):
            ok = False
            break
        if len(out) > len(rec) + 1 + varuint_size(len(rec)):
            ok = False
            break
    elapsed = time.perf_counter() - t0
    verdict(
        3,
        ok and elapsed < 30,
        f"12,000 records round-trip within the expansion bound in {elapsed:.1f}s",
    )


def test_acceptance_04_lower_bound():
    rng = random.Random(77)
    violations = 0
    for _ in range(1000):
        x = rand_pattern(rng, maxlen=16, wildcard_p=0.3)
        y = rand_pattern(rng, maxlen=16, wildcard_p=0.3)
        sx, sy = rng.randint(1, 6), rng.randint(1, 6)
        lb = one_gram_distance(
            SymbolHistogram.from_symbols(x), SymbolHistogram.from_symbols(y), sx, sy
        )
        fast, _ = min_el_increment_fast(x, y, sx, sy)
        if not 0 <= lb <= fast:
            violations += 1
    verdict(4, violations == 0, f"0 <= 1-gram <= increment, {violations} violations in 1000 pairs")


def test_acceptance_05_pruning_transparency_and_speedup():
    sample = generate("multi8", 2048, seed=42)
    t0 = time.perf_counter()
    d_pruned = extract_patterns(sample, k=16, prune=True)
    t_pruned = time.perf_counter() - t0
    t0 = time.perf_counter()
    d_plain = extract_patterns(sample, k=16, prune=False)
    t_plain = time.perf_counter() - t0
    identical = write_dict(d_pruned) == write_dict(d_plain)
    speedup = t_plain / t_pruned
    verdict(
        5,
        identical and speedup >= 1.5 and (t_pruned + t_plain) < 300,
        f"pruned dict byte-identical={identical}, speedup {speedup:.2f}x "
        f"({t_plain:.1f}s vs {t_pruned:.1f}s)",
    )


def test_acceptance_06_trade_ratio():
    t0 = time.perf_counter()
    records = generate("trade", 10_000, seed=6)
    dictionary = extract_patterns(records[:256], k=16)
    codec = Codec(dictionary)
    for rec in records:
        codec.compress_record(rec)
    ratio = codec.stats.bytes_out / codec.stats.bytes_in
    elapsed = time.perf_counter() - t0
    verdict(
        6,
        ratio <= 0.35 and elapsed < 30,
        f"trade corpus ratio {ratio:.3f} (<= 0.35) in {elapsed:.1f}s",
    )


def test_acceptance_07_criterion_ablation():
    t0 = time.perf_counter()
    records = generate("overlap4", 2000, seed=7)
    ratios = {}
    for crit in (MergeCriterion.ENCODING_LENGTH, MergeCriterion.ENTROPY,
                 MergeCriterion.EDIT_DISTANCE):
        dictionary = extract_patterns(records[:256], k=4, criterion=crit)
        codec = Codec(dictionary)
        for rec in records:
            codec.compress_record(rec)
        ratios[crit.value] = codec.stats.bytes_out / codec.stats.bytes_in
    elapsed = time.perf_counter() - t0
    ok = (
        ratios["el"] <= ratios["entropy"] + 0.02
        and ratios["el"] <= ratios["edit"] - 0.02
        and elapsed < 120
    )
    verdict(
        7,
        ok,
        "ratios el={el:.3f} entropy={entropy:.3f} edit={edit:.3f} in {t:.1f}s".format(
            t=elapsed, **ratios
        ),
    )


def test_acceptance_08_random_access_locality():
    t0 = time.perf_counter()
    dictionary = extract_patterns(generate("trade", 256, seed=8), k=16)
    readers = {}
    for n in (1_000, 100_000):
        records = generate("trade", n, seed=8)
        blob = build_container(records, dictionary, narrow_offsets=True)
        readers[n] = ContainerReader(blob)
    cost = {}
    for n, reader in readers.items():
        res = bench_random_access(reader, min(1.0, 200 / n), seed=1)
        cost[n] = res.bytes_per_lookup
    locality_ok = abs(cost[1_000] - cost[100_000]) <= 2 * readers[1_000].offset_width

    b1 = bench_random_access(readers[100_000], 0.001, seed=2, block_records=1)
    b100 = bench_random_access(readers[100_000], 0.001, seed=2, block_records=100)
    growth = b100.bytes_per_lookup / b1.bytes_per_lookup
    elapsed = time.perf_counter() - t0
    verdict(
        8,
        locality_ok and growth >= 50 and elapsed < 60,
        f"bytes/lookup {cost[1_000]:.1f} vs {cost[100_000]:.1f}; "
        f"block 1->100 cost grows {growth:.0f}x in {elapsed:.1f}s",
    )


def _random_dictionary(rng):
    pats = []
    for pid in range(1, rng.randint(2, 5)):
        toks = [Literal(rng.randrange(256))]
        for _ in range(rng.randint(0, 4)):
            choice = rng.randrange(4)
            if choice == 0:
                toks.append(Field(VARCHAR))
            elif choice == 1:
                toks.append(Field(VARINT))
            elif choice == 2:
                toks.append(Field(char_encoder(rng.randint(1, 30))))
            else:
                toks.append(Field(int_encoder(rng.randint(1, 19))))
            toks.append(Literal(rng.randrange(256)))
        pats.append(Pattern(tokens=tuple(toks), id=pid))
    return PatternDictionary(patterns=tuple(pats))


def test_acceptance_09_format_robustness():
    rng = random.Random(99)
    bad = 0
    for i in range(1000):
        blob = write_dict(_random_dictionary(rng))
        if write_dict(read_dict(blob)) != blob:
            bad += 1
            continue
        # one truncation and one bit flip per dictionary
        cut = rng.randrange(len(blob))
        try:
            read_dict(blob[:cut])
            bad += 1
        except PbcError:
            pass
        pos = rng.randrange(len(blob))
        flipped = bytearray(blob)
        flipped[pos] ^= 1 << rng.randrange(8)
        try:
            read_dict(bytes(flipped))
            bad += 1
        except PbcError:
            pass
    verdict(
        9,
        bad == 0,
        f"1000 fuzzed dictionaries canonical; truncation/bit-flip failures: {bad}",
    )


def test_acceptance_10_retrain_trigger(tmp_path, capsys):
    records = generate("drift", 2000, seed=10)
    dictionary = extract_patterns(records[:256], k=8)

    # streaming: should_retrain must flip exactly when the rate crosses 0.05
    codec = Codec(dictionary)
    flip_at = None
    consistent = True
    for i, rec in enumerate(records):
        codec.compress_record(rec)
        fired = should_retrain(codec.stats, 0.05)
        crossed = outlier_rate(codec.stats) >= 0.05
        if fired != crossed:
            consistent = False
        if fired and flip_at is None:
            flip_at = i
    final_rate = outlier_rate(codec.stats)

    # end-to-end via the CLI stats command
    corpus = tmp_path / "drift.txt"
    corpus.write_bytes(b"".join(r + b"\n" for r in records))
    dpath = tmp_path / "drift.pbcd"
    dpath.write_bytes(write_dict(dictionary))
    code = cli_main(
        ["stats", "--dict", str(dpath), "--input", str(corpus), "--json"]
    )
    report = json.loads(capsys.readouterr().out)
    cli_ok = code == 0 and report["should_retrain"] is True

    ok = (
        consistent
        and flip_at is not None
        and 1000 <= flip_at < 1200  # drift starts at the halfway point
        and final_rate > 0.05
        and cli_ok
    )
    verdict(
        10,
        ok,
        f"retrain flips at record {flip_at}, final outlier rate {final_rate:.2f}, "
        f"cmd_stats agrees={cli_ok}",
    )
