"""Seeded synthetic corpora for tests and benchmarks.

Every generator is a pure function of (count, seed) so runs reproduce
byte-for-byte. Records are machine-generated shapes: a fixed template with
typed value slots.
"""

from __future__ import annotations

import random
import string
from typing import List


def trade_records(count: int, seed: int = 0) -> List[bytes]:
    """88-byte JSON trade records: a 66-byte template around ~22 value bytes."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        symbol = "".join(rng.choice(string.ascii_uppercase) for _ in range(3))
        side = rng.choice("BS")
        quantity = rng.randint(100, 999)
        price = f"{rng.randint(10, 99)}.{rng.randint(0, 99):02d}"
        timestamp = rng.randint(1_600_000_000, 1_699_999_999)
        rec = (
            f'{{"symbol": "{symbol}", "side": "{side}", "quantity": {quantity},'
            f' "price": {price}, "timestamp": {timestamp}}}'
        )
        out.append(rec.encode("ascii"))
    return out


_MULTI8_TEMPLATES = [
    "WEBSRV request served route=/products/catalog/view?page={d3} status=200 bytes={d5} rt={d3}us",
    "DBPOOL connection acquired pool=primary-replica-set shard={d2} latency={d4}micros active={d2}",
    "AUTHSV token issued subject=svc-account-{d4} scope=read:write:admin expiry_epoch={ts}",
    "KAFKCN consumer lag topic=orders.settlement.v2 partition={d2} offset={d8} behind={d4}",
    "SCHEDL cron fired job=nightly-retention-sweeper run={hex12} duration_ms={d4} next_in={d5}s",
    "NETFLT dropped packet proto=tcp src_port={d4} dst_port={d4} reason=rate-limit-exceeded n={d3}",
    "GPUMGR allocation granted device=cuda:{d1} mem_mb={d5} stream={hex12} owner=trainer-worker-{d2}",
    "BILLNG charge captured invoice=INV-{d8} cents={d6} currency=usd processor=stripe-gateway-{d1}",
]


def _fill(template: str, rng: random.Random) -> bytes:
    subs = {
        "ts": str(rng.randint(1_600_000_000, 1_699_999_999)),
        "user8": "".join(rng.choice(string.ascii_lowercase) for _ in range(8)),
        "ip": ".".join(str(rng.randint(1, 254)) for _ in range(4)),
        "hex12": "".join(rng.choice("0123456789abcdef") for _ in range(12)),
        "d1": str(rng.randint(1, 9)),
        "d2": str(rng.randint(10, 99)),
        "d2c": f"{rng.randint(0, 99):02d}",
        "d3": str(rng.randint(100, 999)),
        "d4": str(rng.randint(1000, 9999)),
        "d5": str(rng.randint(10000, 99999)),
        "d6": str(rng.randint(100000, 999999)),
        "d8": str(rng.randint(10_000_000, 99_999_999)),
    }
    return template.format(**subs).encode("ascii")


def multi_template_records(count: int, seed: int = 0) -> List[bytes]:
    """Log-style records drawn uniformly from 8 fixed templates."""
    rng = random.Random(seed)
    return [_fill(rng.choice(_MULTI8_TEMPLATES), rng) for _ in range(count)]


_OVERLAP4_TEMPLATES = [
    "id={d6} op=GET  key=cache/{user8} hit=1 lat={d3}",
    "id={d6} op=PUT  key=cache/{user8} sz={d3} lat={d3}",
    "id={d6} op=GET  key=store/{user8} hit=0 lat={d3}",
    "id={d6} op=DEL  key=store/{user8} ok=1 lat={d3}",
]


def overlapping_records(count: int, seed: int = 0) -> List[bytes]:
    """4 templates over a shared alphabet and near-identical lengths.

    Edit distance on the pattern strings barely separates the templates,
    while their literal skeletons differ; criteria that ignore encoding
    cost merge across templates here.
    """
    rng = random.Random(seed)
    return [_fill(rng.choice(_OVERLAP4_TEMPLATES), rng) for _ in range(count)]


_DRIFT_TEMPLATES = [
    "metric=cpu host=web-{d2} value={d2c}.{d2c} ts={ts}",
    "metric=mem host=web-{d2} value={d4}mb ts={ts}",
]


def drifting_records(count: int, seed: int = 0) -> List[bytes]:
    """First half from two templates, second half from two unseen ones.

    Training on the first half then streaming the whole corpus drives the
    outlier rate up through any retrain threshold mid-stream.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if i < count // 2:
            out.append(_fill(rng.choice(_DRIFT_TEMPLATES), rng))
        else:
            out.append(_fill(rng.choice(_MULTI8_TEMPLATES[2:4]), rng))
    return out


GENERATORS = {
    "trade": trade_records,
    "multi8": multi_template_records,
    "overlap4": overlapping_records,
    "drift": drifting_records,
}


def generate(kind: str, count: int, seed: int = 0) -> List[bytes]:
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown corpus kind {kind!r}") from None
    return gen(count, seed)
