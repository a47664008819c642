"""
Sequence blocks built from a ledger, the global enumeration n_1 < n_2 < ...
and the per-block density, gap and spacing checks.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import CheckFailed, LedgerIncomplete, OutOfBuiltRange, WindowTooLarge
from ledger import Ledger
from utils import block_survivors

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SequenceBlock:
    m: int
    lo: int
    hi: int
    d: int
    elements: np.ndarray
    deleted_per_j: Tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return int(len(self.elements))

    @property
    def min_gap(self) -> Optional[int]:
        if self.size < 2:
            return None
        return int(np.diff(self.elements).min())


def _multiples_in(q: int, lo: int, hi: int) -> int:
    return (hi - 1) // q - (lo - 1) // q if hi > lo else 0


def make_block(m: int, primes: Sequence[int], d: int, lo: int, hi: int) -> SequenceBlock:
    """Apply the deletion rule for the given progressions on [lo, hi)."""
    if m == 1 or tuple(primes) == (1,):
        elements = np.arange(lo, hi, dtype=np.int64)
        return SequenceBlock(m=m, lo=lo, hi=hi, d=d, elements=elements, deleted_per_j=(0,))
    elements = block_survivors(primes, d, lo, hi)
    deleted = tuple(
        _multiples_in(q, lo, hi) - int(np.count_nonzero(elements % q == 0)) for q in primes
    )
    return SequenceBlock(m=m, lo=lo, hi=hi, d=d, elements=elements, deleted_per_j=deleted)


def build_block(ledger: Ledger, m: int) -> SequenceBlock:
    """Build the elements of block m in [beta_{m-1}, beta_m)."""
    b = ledger.block(m)
    if b.beta is None:
        raise LedgerIncomplete(f"block {m} has no end beta_{m} yet")
    block = make_block(m, b.primes, b.d, b.beta_prev, b.beta)
    logger.debug(f"built block {m}: {block.size} elements in [{block.lo}, {block.hi})")
    return block


def brute_force_block(primes: Sequence[int], d: int, lo: int, hi: int) -> List[int]:
    """
    Literal reading of the deletion rule, one integer at a time. Used as the
    oracle for make_block.
    """
    progressions = [[x for x in range(lo, hi) if x % q == 0] for q in primes]
    survivors = set()
    for j, points in enumerate(progressions):
        others = [y for jj, pts in enumerate(progressions) if jj != j for y in pts]
        for x in points:
            if not any(abs(x - y) <= d for y in others):
                survivors.add(x)
    return sorted(survivors)


class SequenceStore:
    """
    Immutable store of built blocks with a sorted global element array.
    Range counts are binary searches over that array.
    """

    def __init__(self, blocks: Sequence[SequenceBlock]):
        self.blocks: Tuple[SequenceBlock, ...] = tuple(blocks)
        if self.blocks:
            self.elements = np.concatenate([b.elements for b in self.blocks])
        else:
            self.elements = np.array([], dtype=np.int64)
        if len(self.elements) > 1 and not np.all(np.diff(self.elements) > 0):
            raise CheckFailed("sequence elements are not strictly increasing across blocks")
        self.elements.setflags(write=False)
        self.horizon = self.blocks[-1].hi if self.blocks else 0
        self.start = self.blocks[0].lo if self.blocks else 0
        counts = [0]
        for b in self.blocks:
            counts.append(counts[-1] + b.size)
        self.nbar: Tuple[int, ...] = tuple(counts)

    @property
    def M(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return int(len(self.elements))

    def block(self, m: int) -> SequenceBlock:
        for b in self.blocks:
            if b.m == m:
                return b
        raise OutOfBuiltRange(f"block {m} is not built")

    def count_range(self, a: int, b: int) -> int:
        """Number of elements in [a, b)."""
        if b > self.horizon:
            raise OutOfBuiltRange(f"{b} exceeds the built horizon {self.horizon}")
        if b <= a:
            return 0
        return int(np.searchsorted(self.elements, b) - np.searchsorted(self.elements, a))

    def nth(self, k: int) -> int:
        """n_k, 1-based."""
        if k < 1 or k > len(self.elements):
            raise OutOfBuiltRange(f"index {k} outside 1..{len(self.elements)}")
        return int(self.elements[k - 1])

    def export_lines(self) -> str:
        return "".join(f"{x}\n" for x in self.elements.tolist())

    def block_summaries(self) -> List[dict]:
        return [
            {"m": b.m, "beta_prev": b.lo, "beta": b.hi, "size": b.size, "min_gap": b.min_gap}
            for b in self.blocks
        ]

    def summary_json(self) -> str:
        return json.dumps(self.block_summaries(), sort_keys=True, indent=2)


def build_store(ledger: Ledger, workers: int = None) -> SequenceStore:
    """Build every closed block in parallel and check the counts against the ledger."""
    workers = workers or config.WORKERS
    closed = [b.m for b in ledger.blocks if b.closed]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(lambda m: build_block(ledger, m), closed))
    for block in blocks:
        expected = ledger.block(block.m).count
        if block.size != expected:
            logger.error(f"block {block.m}: built {block.size} elements, ledger says {expected}")
            raise CheckFailed(f"block {block.m} count {block.size} differs from ledger count {expected}")
    store = SequenceStore(blocks)
    logger.info(f"store built through block {store.M}: {len(store)} elements below {store.horizon}")
    return store


@dataclass
class BlockReport:
    m: int
    windows: int = 0
    min_ratio: Optional[Fraction] = None
    max_ratio: Optional[Fraction] = None
    min_gap: Optional[int] = None
    gap_ok: bool = True
    spacing_ok: bool = True
    k1_edge: bool = False
    window_failures: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        real_failures = [w for w in self.window_failures if not w.get("edge")]
        return self.gap_ok and self.spacing_ok and not real_failures

    def to_json(self) -> dict:
        def rat(x):
            return None if x is None else str(x)
        return {
            "m": self.m,
            "windows": self.windows,
            "min_ratio": rat(self.min_ratio),
            "max_ratio": rat(self.max_ratio),
            "min_gap": self.min_gap,
            "gap_ok": self.gap_ok,
            "spacing_ok": self.spacing_ok,
            "k1_edge": self.k1_edge,
            "window_failures": self.window_failures,
            "passed": self.passed,
        }


def verify_block(ledger: Ledger, store: SequenceStore, m: int) -> BlockReport:
    """
    Check every aligned period window [beta_{m-1} + k p, beta_{m-1} + (k+1) p)
    inside block m against 1 - gamma < count / (p Q) < 1, plus the minimum gap
    and the empty first d integers of the block.
    """
    params = ledger.block(m)
    block = store.block(m)
    report = BlockReport(m=m, min_gap=block.min_gap)
    if m == 1:
        report.k1_edge = True
        report.min_ratio = report.max_ratio = Fraction(1)
        return report

    p, lo, hi = params.p, params.beta_prev, params.beta
    expected = params.p * params.Q
    report.k1_edge = params.K == 1
    nwin = (hi - lo) // p
    report.windows = nwin
    if nwin > 0:
        counts = np.bincount((block.elements - lo) // p, minlength=nwin)[:nwin]
        cmin, cmax = int(counts.min()), int(counts.max())
        report.min_ratio = Fraction(cmin) / expected
        report.max_ratio = Fraction(cmax) / expected
        lower = (1 - params.gamma) * expected
        bad = np.flatnonzero((counts <= lower) | (counts >= expected))
        for k in bad.tolist():
            count = int(counts[k])
            report.window_failures.append({
                "start": lo + k * p,
                "count": count,
                "ratio": str(Fraction(count) / expected),
                "edge": report.k1_edge and count >= expected,
            })
    if report.k1_edge:
        logger.warning(f"block {m} has a single progression; ratio 1 is the K=1 edge case")

    report.gap_ok = report.min_gap is None or report.min_gap >= params.d
    report.spacing_ok = store.count_range(lo, min(lo + params.d, hi)) == 0
    return report


@dataclass(frozen=True)
class GapRecord:
    m: int
    k: Optional[int]
    gap: Optional[int]


def gap_profile(store: SequenceStore) -> List[GapRecord]:
    """Per block: the index k and size of the smallest gap n_{k+1} - n_k inside the block."""
    out = []
    for i, b in enumerate(store.blocks):
        if b.size < 2:
            out.append(GapRecord(m=b.m, k=None, gap=None))
            continue
        diffs = np.diff(b.elements)
        j = int(np.argmin(diffs))
        out.append(GapRecord(m=b.m, k=store.nbar[i] + j + 1, gap=int(diffs[j])))
    return out


def banach_density(
    store: SequenceStore,
    L: int,
    start: int = 0,
    stop: Optional[int] = None,
    aligned: bool = False,
) -> Fraction:
    """
    Largest count of elements in a window [x, x + L) with start <= x and
    x + L <= stop, divided by L. Unaligned scans only need windows starting
    at an element; aligned scans use x = start + k L.
    """
    if L > store.horizon:
        raise WindowTooLarge(f"window {L} exceeds the built horizon {store.horizon}")
    stop = store.horizon if stop is None else stop
    e = store.elements
    if aligned:
        starts = np.arange(start, stop - L + 1, L, dtype=np.int64)
    else:
        starts = e[(e >= start) & (e + L <= stop)]
        if len(starts) == 0 and start + L <= stop:
            starts = np.array([start], dtype=np.int64)
    if len(starts) == 0:
        return Fraction(0)
    counts = np.searchsorted(e, starts + L) - np.searchsorted(e, starts)
    return Fraction(int(counts.max()), L)
