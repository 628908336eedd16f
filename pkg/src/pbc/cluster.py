"""Pattern extraction: encoding-length DP, 1-gram pruning, greedy merging.

The pair metric is the minimal encoding length increment of merging two
clusters, computed by an O(n*m) dynamic program over their pattern strings
under the monotone VARCHAR cost model (one header byte per field per
record). An exhaustive general DP doubles as a test oracle. The greedy
agglomerative driver keeps a lazy-bound heap so that 1-gram lower bounds
stand in for most exact DP evaluations.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from ._kernels import WILD
from .errors import AllWildcards, EmptyPattern, InsufficientSample, TooLarge
from .matcher import CompiledPattern
from .model import (
    Cluster,
    CostModel,
    Pattern,
    PatternDictionary,
    WILDCARD,
    entropy_bits,
    pattern_from_string,
)
from .encoders import infer_encoder
from .model import Field, validate_pattern

IS_PATTERN = "isPattern"
IS_RS = "isRS"


class MergeCriterion(enum.Enum):
    ENCODING_LENGTH = "el"
    ENTROPY = "entropy"
    EDIT_DISTANCE = "edit"


def _symbols(seq) -> Tuple[int, ...]:
    """Normalize a pattern string to a tuple over 0..255 plus WILDCARD.

    Accepts int sequences, bytes (no wildcards), or str where '*' marks a
    wildcard (test convenience; real patterns arrive as int tuples).
    """
    if isinstance(seq, str):
        return tuple(WILDCARD if ch == "*" else ord(ch) for ch in seq)
    if isinstance(seq, (bytes, bytearray)):
        return tuple(seq)
    return tuple(int(s) for s in seq)


def _sym(ch) -> int:
    if isinstance(ch, str):
        return WILDCARD if ch == "*" else ord(ch)
    return int(ch)


def update_state(cur_state: int, type_: str, new_char, size_x: int, size_y: int) -> int:
    """One accumulation step of the increment DP.

    Opening a field after a pattern position charges one header byte per
    record of both clusters; a literal then adds one payload byte per
    record of the contributing cluster, while a wildcard refunds the
    header bytes already counted in that cluster's own encoding length.
    """
    if type_ == IS_PATTERN:
        cur_state += size_x + size_y
    if _sym(new_char) != WILDCARD:
        cur_state += size_x
    else:
        cur_state -= size_x
    return cur_state


def min_el_increment_fast(cs_x, cs_y, size_x: int, size_y: int):
    """Minimal encoding length increment plus the merged pattern string.

    Returns (increment_bytes, merged symbol tuple). The merged pattern is
    recovered by traceback: diagonal matches emit literals, everything
    else routes the consumed symbol into a field; adjacent fields collapse.
    """
    xs = _symbols(cs_x)
    ys = _symbols(cs_y)
    if not xs or not ys:
        raise EmptyPattern("both pattern strings must be nonempty")
    ax = _kernels.pattern_array(xs)
    ay = _kernels.pattern_array(ys)
    state, typ = _kernels.el_tables(ax, ay, size_x, size_y)
    merged = _traceback(state, typ, xs, ys, size_x, size_y)
    return int(state[len(xs), len(ys)]), merged


def _traceback(state, typ, xs, ys, sx, sy) -> Tuple[int, ...]:
    i, j = len(xs), len(ys)
    rev: List[int] = []
    while i > 0 or j > 0:
        if i > 0 and j > 0 and typ[i, j] == 1:
            rev.append(xs[i - 1])
            i -= 1
            j -= 1
            continue
        v = state[i, j]
        if i > 0:
            t = IS_PATTERN if typ[i - 1, j] == 1 else IS_RS
            if update_state(int(state[i - 1, j]), t, xs[i - 1], sx, sy) == v:
                rev.append(WILDCARD)
                i -= 1
                continue
        if j > 0:
            t = IS_PATTERN if typ[i, j - 1] == 1 else IS_RS
            if update_state(int(state[i, j - 1]), t, ys[j - 1], sy, sx) == v:
                rev.append(WILDCARD)
                j -= 1
                continue
        raise AssertionError("inconsistent DP tables")  # pragma: no cover
    merged: List[int] = []
    for s in reversed(rev):
        if s == WILDCARD and merged and merged[-1] == WILDCARD:
            continue
        merged.append(s)
    return tuple(merged)


def min_el_increment_oracle(cs_x, cs_y, size_x: int, size_y: int) -> int:
    """Exhaustive general-transition DP; test oracle only (<= 12 tokens)."""
    xs = _symbols(cs_x)
    ys = _symbols(cs_y)
    if not xs or not ys:
        raise EmptyPattern("both pattern strings must be nonempty")
    n, m = len(xs), len(ys)
    if n > 12 or m > 12:
        raise TooLarge("oracle is capped at 12 tokens per side")

    def field_cost(xseg, yseg):
        # the whole pair of segments becomes one field
        cost = size_x + size_y
        for s in xseg:
            cost += size_x if s != WILDCARD else -size_x
        for s in yseg:
            cost += size_y if s != WILDCARD else -size_y
        return cost

    inf = float("inf")
    state = [[inf] * (m + 1) for _ in range(n + 1)]
    state[0][0] = 0
    for total in range(1, n + m + 1):
        for i in range(max(0, total - m), min(n, total) + 1):
            j = total - i
            best = inf
            for k in range(i + 1):
                for l in range(j + 1):
                    if k + l == 0:
                        continue
                    prev = state[i - k][j - l]
                    if prev == inf:
                        continue
                    xseg = xs[i - k : i]
                    yseg = ys[j - l : j]
                    if (
                        k == l
                        and xseg == yseg
                        and all(s != WILDCARD for s in xseg)
                    ):
                        best = min(best, prev)  # matched pattern segment
                    best = min(best, prev + field_cost(xseg, yseg))
            state[i][j] = best
    return int(state[n][m])


@dataclass(frozen=True)
class SymbolHistogram:
    """Multiset of a pattern string's symbols; wildcards counted apart."""

    counts: np.ndarray  # int64[256], non-wildcard byte counts
    wildcards: int

    @classmethod
    def from_symbols(cls, seq) -> "SymbolHistogram":
        h, w = _kernels.symbol_histogram(_symbols(seq))
        return cls(counts=h, wildcards=w)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.wildcards

    def as_dict(self) -> Dict[int, int]:
        d = {b: int(c) for b, c in enumerate(self.counts) if c > 0}
        if self.wildcards:
            d[WILDCARD] = self.wildcards
        return d


def one_gram_distance(
    h_x: SymbolHistogram, h_y: SymbolHistogram, size_x: int, size_y: int
) -> int:
    """Size-weighted unmatched-symbol mass; admissible lower bound of the DP.

    For each byte the surplus on either side is weighted by that cluster's
    size; every wildcard (from either string) acts as a joker cancelling
    one surplus unit per side. Guaranteed <= min_el_increment_fast for
    collapsed pattern strings (no adjacent wildcards).
    """
    return int(
        _kernels.one_gram(
            h_x.counts, h_x.wildcards, size_x, h_y.counts, h_y.wildcards, size_y
        )
    )


# ---------------------------------------------------------------------------
# entropy accounting


@dataclass(frozen=True)
class EntropyStats:
    """Aggregate entropy decomposition of a clustering."""

    shares: np.ndarray  # P_i, cluster share of records
    residual_entropies: np.ndarray  # per-cluster per-character entropy (bits)
    mean_residual_len: float
    alphabet_sizes: np.ndarray  # D_i, distinct residual symbols per cluster

    @property
    def pattern_entropy(self) -> float:
        return entropy_bits(self.shares)

    @property
    def residual_entropy(self) -> float:
        return float(np.dot(self.shares, self.residual_entropies))

    @property
    def bits_per_record(self) -> float:
        return self.pattern_entropy + self.mean_residual_len * self.residual_entropy


def _member_hist(members) -> Tuple[np.ndarray, int, int]:
    """(byte histogram, total bytes, total records) over weighted members."""
    h = np.zeros(256, np.int64)
    total = 0
    records = 0
    for rec, count in members:
        for b in rec:
            h[b] += count
        total += len(rec) * count
        records += count
    return h, total, records


def _literal_hist(symbols) -> Tuple[np.ndarray, int]:
    h = np.zeros(256, np.int64)
    n = 0
    for s in symbols:
        if s != WILDCARD:
            h[s] += 1
            n += 1
    return h, n


def residual_histogram(cluster: Cluster) -> Tuple[np.ndarray, int]:
    """Byte histogram and total length of a cluster's residuals.

    The pattern's literal skeleton occurs exactly once in every member, so
    the residual multiset is the member multiset minus size * literals.
    """
    mh, total, _ = _member_hist(cluster.members)
    lh, ln = _literal_hist(cluster.pattern_string)
    rh = mh - cluster.size * lh
    if (rh < 0).any():
        raise ValueError("pattern literals are not contained in members")
    return rh, total - cluster.size * ln


def compute_entropy_stats(clusters: Sequence[Cluster]) -> EntropyStats:
    total_records = sum(c.size for c in clusters)
    shares = np.array([c.size / total_records for c in clusters])
    ents = np.zeros(len(clusters))
    dsizes = np.zeros(len(clusters), np.int64)
    total_res = 0
    for i, c in enumerate(clusters):
        rh, rlen = residual_histogram(c)
        ents[i] = entropy_bits(rh)
        dsizes[i] = int((rh > 0).sum())
        total_res += rlen
    return EntropyStats(
        shares=shares,
        residual_entropies=ents,
        mean_residual_len=total_res / total_records,
        alphabet_sizes=dsizes,
    )


def entropy_of_clustering(clusters: Sequence[Cluster]) -> float:
    """Average bits per record: pattern entropy plus residual term."""
    return compute_entropy_stats(clusters).bits_per_record


# ---------------------------------------------------------------------------
# clusters and criteria


def singleton_cluster(record: bytes, count: int = 1) -> Cluster:
    return Cluster(
        members=((bytes(record), count),),
        pattern_string=tuple(record),
        size=count,
        cached_el=0,
    )


def merge_clusters(c_x: Cluster, c_y: Cluster) -> Tuple[Cluster, int]:
    inc, merged = min_el_increment_fast(
        c_x.pattern_string, c_y.pattern_string, c_x.size, c_y.size
    )
    cluster = Cluster(
        members=c_x.members + c_y.members,
        pattern_string=merged,
        size=c_x.size + c_y.size,
        cached_el=c_x.cached_el + c_y.cached_el + inc,
    )
    return cluster, inc


def criterion_delta(
    criterion: MergeCriterion,
    c_i: Cluster,
    c_j: Cluster,
    clustering: Optional[Sequence[Cluster]] = None,
):
    """Merge score for one cluster pair under the chosen criterion.

    EncodingLength and EditDistance depend only on the pair; Entropy is the
    change of the whole clustering's bits-per-record (by default the
    clustering is just the pair itself).
    """
    if criterion is MergeCriterion.ENCODING_LENGTH:
        inc, _ = min_el_increment_fast(
            c_i.pattern_string, c_j.pattern_string, c_i.size, c_j.size
        )
        return inc
    if criterion is MergeCriterion.EDIT_DISTANCE:
        return int(
            _kernels.levenshtein(
                _kernels.pattern_array(c_i.pattern_string),
                _kernels.pattern_array(c_j.pattern_string),
            )
        )
    clusters = list(clustering) if clustering is not None else [c_i, c_j]
    merged, _ = merge_clusters(c_i, c_j)
    after = [c for c in clusters if c is not c_i and c is not c_j] + [merged]
    return entropy_of_clustering(after) - entropy_of_clustering(clusters)


# ---------------------------------------------------------------------------
# greedy agglomerative driver


def _dedup_sample(
    sample: Sequence[bytes], max_distinct: int, max_record_len: int
) -> List[Tuple[bytes, int]]:
    counts: Dict[bytes, int] = {}
    order: List[bytes] = []
    for rec in sample:
        rec = bytes(rec)
        if not rec or len(rec) > max_record_len:
            continue  # unclusterable; such records compress as outliers
        if rec in counts:
            counts[rec] += 1
        else:
            if len(counts) < max_distinct:
                counts[rec] = 1
                order.append(rec)
    return [(rec, counts[rec]) for rec in order]


class _ElPairSearch:
    """Lazy-bound heap over cluster pairs for the encoding-length metric.

    With pruning, every pair enters the heap with its 1-gram lower bound;
    exact DPs run only when a bound surfaces at the top, and may abandon
    early against the next-best key. Without pruning every pair is exact
    up front. Both modes pick the identical (increment, i, j)-minimal pair.
    """

    _VBITS = 53  # key = value<<53 | i<<40 | j<<27 | exact<<26 | gi<<13 | gj

    def __init__(self, n_initial: int, max_len: int, prune: bool):
        cap = n_initial
        self.prune = prune
        self.patmat = np.zeros((cap, max_len), np.int16)
        self.lens = np.zeros(cap, np.int64)
        self.sizes = np.zeros(cap, np.int64)
        self.hists = np.zeros((cap, 256), np.int64)
        self.wilds = np.zeros(cap, np.int64)
        self.alive = np.zeros(cap, bool)
        self.gen = np.zeros(cap, np.int64)
        self.heap: List[int] = []
        self.dp_calls = 0

    def set_cluster(self, i: int, symbols, size: int):
        arr = _kernels.pattern_array(symbols)
        if arr.shape[0] > self.patmat.shape[1]:
            grown = np.zeros((self.patmat.shape[0], arr.shape[0]), np.int16)
            grown[:, : self.patmat.shape[1]] = self.patmat
            self.patmat = grown
        self.patmat[i, : arr.shape[0]] = arr
        self.lens[i] = arr.shape[0]
        self.sizes[i] = size
        h, w = _kernels.symbol_histogram(symbols)
        self.hists[i] = h
        self.wilds[i] = w
        self.alive[i] = True

    def _push(self, value: int, i: int, j: int, exact: bool):
        key = (
            (value << self._VBITS)
            | (i << 40)
            | (j << 27)
            | (int(exact) << 26)
            | (int(self.gen[i]) << 13)
            | int(self.gen[j])
        )
        heapq.heappush(self.heap, key)

    def push_pairs(self, idx: np.ndarray):
        """Seed all i<j pairs over ``idx`` (bounds when pruning, else exact)."""
        if self.prune:
            vals = _kernels.one_gram_all_pairs(self.hists, self.wilds, self.sizes, idx)
        else:
            vals = _kernels.el_value_all_pairs(self.patmat, self.lens, self.sizes, idx)
            self.dp_calls += len(vals)
        k = len(idx)
        pos = 0
        for a in range(k):
            ia = int(idx[a])
            for b in range(a + 1, k):
                jb = int(idx[b])
                lo, hi = (ia, jb) if ia < jb else (jb, ia)
                self._push(int(vals[pos]), lo, hi, not self.prune)
                pos += 1

    def push_one_vs_many(self, i: int, others: np.ndarray):
        if len(others) == 0:
            return
        if self.prune:
            vals = _kernels.one_gram_one_vs_many(
                self.hists, self.wilds, self.sizes, i, others
            )
        else:
            vals = _kernels.el_value_one_vs_many(
                self.patmat, self.lens, self.sizes, i, others
            )
            self.dp_calls += len(vals)
        for a, j in enumerate(others):
            j = int(j)
            lo, hi = (i, j) if i < j else (j, i)
            self._push(int(vals[a]), lo, hi, not self.prune)

    def _unpack(self, key: int):
        gj = key & 0x1FFF
        gi = (key >> 13) & 0x1FFF
        exact = (key >> 26) & 1
        j = (key >> 27) & 0x1FFF
        i = (key >> 40) & 0x1FFF
        value = key >> self._VBITS
        return value, i, j, bool(exact), gi, gj

    _CHUNK = 256  # inexact entries resolved per batched DP call

    def _is_live(self, i, j, gi, gj) -> bool:
        return (
            self.alive[i]
            and self.alive[j]
            and gi == (self.gen[i] & 0x1FFF)
            and gj == (self.gen[j] & 0x1FFF)
        )

    def pop_best(self) -> Tuple[int, int, int]:
        """Return the (increment, i, j)-minimal alive pair, resolving bounds.

        A live exact entry at the top is the answer. Otherwise a chunk of
        live inexact entries is popped and resolved in one batched DP call
        against the next remaining key, which either yields their exact
        values or pushes proven-higher bounds back.
        """
        while self.heap:
            value, i, j, exact, gi, gj = self._unpack(heapq.heappop(self.heap))
            if not self._is_live(i, j, gi, gj):
                continue
            if exact:
                return value, i, j
            chunk_i = [i]
            chunk_j = [j]
            while self.heap and len(chunk_i) < self._CHUNK:
                cand = self._unpack(self.heap[0])
                cvalue, ci, cj, cexact, cgi, cgj = cand
                if not self._is_live(ci, cj, cgi, cgj):
                    heapq.heappop(self.heap)
                    continue
                if cexact:
                    break
                heapq.heappop(self.heap)
                chunk_i.append(ci)
                chunk_j.append(cj)
            threshold = (self.heap[0] >> self._VBITS) if self.heap else -1
            res = _kernels.el_value_pairs(
                self.patmat,
                self.lens,
                self.sizes,
                np.array(chunk_i, np.int64),
                np.array(chunk_j, np.int64),
                threshold,
            )
            self.dp_calls += len(chunk_i)
            for a in range(len(chunk_i)):
                v = int(res[a])
                if v < 0:  # abandoned: -v is a proven lower bound > threshold
                    self._push(-v, chunk_i[a], chunk_j[a], exact=False)
                else:
                    self._push(v, chunk_i[a], chunk_j[a], exact=True)
        raise AssertionError("no alive pair left")  # pragma: no cover

    def merge(self, i: int, j: int, merged_symbols, alive_idx: np.ndarray):
        lo, hi = (i, j) if i < j else (j, i)
        size = int(self.sizes[i] + self.sizes[j])
        self.alive[hi] = False
        self.gen[lo] += 1
        self.set_cluster(lo, merged_symbols, size)
        others = alive_idx[(alive_idx != lo) & (alive_idx != hi)]
        self.push_one_vs_many(lo, others)


def _run_el_driver(entries: List[Tuple[bytes, int]], k: int, prune: bool):
    """Greedy minimal-increment merging down to k clusters."""
    n = len(entries)
    max_len = max(len(rec) for rec, _ in entries)
    search = _ElPairSearch(n, max_len, prune)
    state = {}
    for i, (rec, count) in enumerate(entries):
        state[i] = {
            "members": [(rec, count)],
            "symbols": tuple(rec),
            "size": count,
            "el": 0,
        }
        search.set_cluster(i, state[i]["symbols"], count)
    search.push_pairs(np.arange(n, dtype=np.int64))

    alive = list(range(n))
    while len(alive) > k:
        inc, i, j = search.pop_best()
        _, merged = min_el_increment_fast(
            state[i]["symbols"], state[j]["symbols"], state[i]["size"], state[j]["size"]
        )
        lo, hi = (i, j) if i < j else (j, i)
        state[lo] = {
            "members": state[lo]["members"] + state[hi]["members"],
            "symbols": merged,
            "size": state[i]["size"] + state[j]["size"],
            "el": state[i]["el"] + state[j]["el"] + inc,
        }
        del state[hi]
        alive.remove(hi)
        search.merge(i, j, merged, np.array(alive, np.int64))
    return [state[i] for i in alive]


def _run_scan_driver(
    entries: List[Tuple[bytes, int]], k: int, criterion: MergeCriterion
):
    """Full-scan greedy driver for the entropy and edit-distance criteria.

    Pair-local quantities are cached; the entropy delta additionally folds
    in the current global residual statistics each round (full discriminant,
    not the reduced length-only form).
    """
    n = len(entries)
    total_records = sum(c for _, c in entries)
    state = {}
    for i, (rec, count) in enumerate(entries):
        mh, mlen, _ = _member_hist([(rec, count)])
        lh, ln = _literal_hist(tuple(rec))
        rh = mh - count * lh
        state[i] = {
            "members": [(rec, count)],
            "symbols": tuple(rec),
            "size": count,
            "el": 0,
            "memhist": mh,
            "memlen": mlen,
            "res_chars": mlen - count * ln,
            "res_ent": entropy_bits(rh),
        }

    pair_cache: Dict[Tuple[int, int], tuple] = {}

    def pair_stats(i: int, j: int):
        key = (i, j)
        if key not in pair_cache:
            ci, cj = state[i], state[j]
            if criterion is MergeCriterion.EDIT_DISTANCE:
                pair_cache[key] = (
                    int(
                        _kernels.levenshtein(
                            _kernels.pattern_array(ci["symbols"]),
                            _kernels.pattern_array(cj["symbols"]),
                        )
                    ),
                )
            else:
                _, merged = min_el_increment_fast(
                    ci["symbols"], cj["symbols"], ci["size"], cj["size"]
                )
                lh, ln = _literal_hist(merged)
                size = ci["size"] + cj["size"]
                rh = ci["memhist"] + cj["memhist"] - size * lh
                resc = ci["memlen"] + cj["memlen"] - size * ln
                pair_cache[key] = (entropy_bits(rh), resc)
        return pair_cache[key]

    alive = list(range(n))
    while len(alive) > k:
        if criterion is MergeCriterion.ENTROPY:
            r_tot = sum(state[i]["res_chars"] for i in alive)
            er_glob = sum(
                state[i]["size"] / total_records * state[i]["res_ent"] for i in alive
            )
            rbar = r_tot / total_records
        best = None
        for a in range(len(alive)):
            for b in range(a + 1, len(alive)):
                i, j = alive[a], alive[b]
                if criterion is MergeCriterion.EDIT_DISTANCE:
                    score = pair_stats(i, j)[0]
                else:
                    er_m, resc_m = pair_stats(i, j)
                    pi = state[i]["size"] / total_records
                    pj = state[j]["size"] / total_records
                    pm = pi + pj
                    d_ep = -pm * math.log2(pm)
                    d_ep += pi * math.log2(pi) + pj * math.log2(pj)
                    er2 = (
                        er_glob
                        - pi * state[i]["res_ent"]
                        - pj * state[j]["res_ent"]
                        + pm * er_m
                    )
                    rbar2 = (
                        r_tot - state[i]["res_chars"] - state[j]["res_chars"] + resc_m
                    ) / total_records
                    score = d_ep + rbar2 * er2 - rbar * er_glob
                cand = (score, i, j)
                if best is None or cand < best:
                    best = cand
        _, i, j = best
        ci, cj = state[i], state[j]
        inc, merged = min_el_increment_fast(
            ci["symbols"], cj["symbols"], ci["size"], cj["size"]
        )
        size = ci["size"] + cj["size"]
        lh, ln = _literal_hist(merged)
        mh = ci["memhist"] + cj["memhist"]
        mlen = ci["memlen"] + cj["memlen"]
        state[i] = {
            "members": ci["members"] + cj["members"],
            "symbols": merged,
            "size": size,
            "el": ci["el"] + cj["el"] + inc,
            "memhist": mh,
            "memlen": mlen,
            "res_chars": mlen - size * ln,
            "res_ent": entropy_bits(mh - size * lh),
        }
        del state[j]
        alive.remove(j)
        for key in [key for key in pair_cache if i in key or j in key]:
            del pair_cache[key]
    return [state[i] for i in alive]


def extract_patterns(
    sample: Sequence[bytes],
    k: int,
    criterion: MergeCriterion = MergeCriterion.ENCODING_LENGTH,
    cost: CostModel = CostModel(),
    *,
    prune: bool = True,
    max_distinct: int = 4096,
    max_record_len: int = 4096,
    metadata: Optional[dict] = None,
) -> PatternDictionary:
    """Learn k patterns from a sample by greedy agglomerative merging.

    The sample is deduplicated first (duplicates collapse into one
    singleton cluster with their multiplicity); merging always uses the
    encoding-length traceback for the joint pattern, whatever criterion
    ranks the pairs. Field encoders are inferred per field afterwards from
    all member values.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    entries = _dedup_sample(sample, max_distinct, max_record_len)
    if len(entries) < k:
        raise InsufficientSample(
            f"{len(entries)} distinct clusterable records < k={k}"
        )

    if criterion is MergeCriterion.ENCODING_LENGTH:
        final = _run_el_driver(entries, k, prune)
    else:
        final = _run_scan_driver(entries, k, criterion)

    patterns = []
    for st in final:
        try:
            pattern = pattern_from_string(st["symbols"])
        except AllWildcards:
            continue  # degenerate cluster; its records stay raw
        pattern = _infer_field_encoders(pattern, st["members"])
        patterns.append(pattern)
    patterns = tuple(
        Pattern(tokens=p.tokens, id=i + 1) for i, p in enumerate(patterns)
    )
    meta = {
        "criterion": criterion.value,
        "k": k,
        "sample_bytes": sum(len(r) * c for r, c in entries),
        "distinct_records": len(entries),
    }
    if metadata:
        meta.update(metadata)
    return PatternDictionary(patterns=patterns, metadata=meta)


def _infer_field_encoders(pattern: Pattern, members) -> Pattern:
    """Replace each VARCHAR field with the cheapest encoder its values allow."""
    if pattern.field_count == 0:
        return pattern
    cp = CompiledPattern(pattern)
    values_per_field = [[] for _ in range(pattern.field_count)]
    for rec, count in members:
        fields = cp.match_extract(rec)
        if fields is None:  # pragma: no cover - merged patterns match members
            return pattern
        for slot, value in zip(values_per_field, fields):
            slot.extend([value] * count)
    encoders = [infer_encoder(vals) for vals in values_per_field]
    tokens = []
    fi = 0
    for tok in pattern.tokens:
        if isinstance(tok, Field):
            tokens.append(Field(encoders[fi]))
            fi += 1
        else:
            tokens.append(tok)
    return validate_pattern(tokens, pattern.id)
