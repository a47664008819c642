"""
Measure-preserving systems at finite horizon and the averages
A(f, x, N) = (1 / N-bar_0^N) sum_{n_k < N} f(T^{n_k} x) along a built store.

Three system families: rotations of the circle in 128-bit fixed point,
rotations of Z_P and i.i.d. Bernoulli coordinates. Observables are step
functions with finitely many rational levels, so every average is an exact
Fraction computed from per-level counts.
"""
import bisect
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

import config
from errors import BadSpec, HorizonExceeded, NonpositiveLambda, TowerCoverageError, TowerTooShort
from ledger import ConstraintRecord, Ledger
from sequence import SequenceStore
from utils import make_rng, parse_rational
from zops import FiniteSignal, GridContext, opB

logger = logging.getLogger(__name__)

F = Fraction
FIXED_BITS = 128
_ONE = 1 << FIXED_BITS
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
NEAR_EDGE = 1e-12


# Observables

@dataclass(frozen=True)
class StepFunction:
    """f = levels[i] on [breaks[i-1], breaks[i]) of [0, 1), breaks strictly inside (0, 1)."""
    breaks: Tuple[Fraction, ...]
    levels: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.levels) != len(self.breaks) + 1:
            raise BadSpec(f"{len(self.breaks)} breakpoints need {len(self.breaks) + 1} levels")
        if any(not 0 < b < 1 for b in self.breaks):
            raise BadSpec(f"breakpoints must lie in (0, 1): {self.breaks}")
        if any(a >= b for a, b in zip(self.breaks, self.breaks[1:])):
            raise BadSpec(f"breakpoints must increase: {self.breaks}")

    @classmethod
    def indicator(cls, lo, hi) -> "StepFunction":
        """1 on [lo, hi) inside [0, 1)."""
        lo, hi = F(lo), F(hi)
        if not 0 <= lo < hi <= 1:
            raise BadSpec(f"indicator endpoints need 0 <= lo < hi <= 1, got [{lo}, {hi})")
        breaks, levels = [], [F(0)]
        if lo > 0:
            breaks.append(lo)
            levels.append(F(1))
        else:
            levels[0] = F(1)
        if hi < 1:
            breaks.append(hi)
            levels.append(F(0))
        return cls(tuple(breaks), tuple(levels))

    @classmethod
    def constant(cls, c) -> "StepFunction":
        return cls((), (F(c),))

    @classmethod
    def residue_indicator(cls, P: int, residues: Sequence[int]) -> "StepFunction":
        """Indicator of a set of residues of Z_P, read through x -> x / P."""
        pts = set()
        for r in residues:
            if not 0 <= r < P:
                raise BadSpec(f"residue {r} outside Z_{P}")
            pts.add(r)
        breaks, levels = [], []
        level = F(1) if 0 in pts else F(0)
        levels.append(level)
        for r in range(1, P):
            cur = F(1) if r in pts else F(0)
            if cur != level:
                breaks.append(F(r, P))
                levels.append(cur)
                level = cur
        return cls(tuple(breaks), tuple(levels))

    def code(self, x: Fraction) -> int:
        return bisect.bisect_right(self.breaks, x)

    def __call__(self, x) -> Fraction:
        return self.levels[self.code(F(x))]

    @property
    def mean(self) -> Fraction:
        edges = (F(0),) + self.breaks + (F(1),)
        return sum((lv * (b - a) for lv, a, b in zip(self.levels, edges, edges[1:])), F(0))

    @property
    def describe(self) -> str:
        return f"step({','.join(map(str, self.breaks))};{','.join(map(str, self.levels))})"


# Systems

@dataclass(frozen=True)
class IrrationalRotation:
    """x -> x + alpha mod 1, alpha held as floor(alpha 2^128)."""
    alpha_fp: int
    label: str = ""


@dataclass(frozen=True)
class CyclicRotation:
    """x -> x + 1 on Z_P."""
    P: int


@dataclass(frozen=True)
class IIDBernoulli:
    """Shift on {0,1}^Z with product Bernoulli(p) measure; the observable is the time-zero coordinate."""
    seed: int
    p: Fraction


System = Union[IrrationalRotation, CyclicRotation, IIDBernoulli]

DEFAULT_OBSERVABLE = StepFunction.indicator(0, F(1, 2))
COORDINATE = StepFunction((F(1, 2),), (F(0), F(1)))


@dataclass(frozen=True)
class SystemSpec:
    """A system and the observable read along its orbits; i.i.d. systems read their coordinate."""
    system: System
    observable: Optional[StepFunction] = None

    @property
    def f(self) -> StepFunction:
        if isinstance(self.system, IIDBernoulli):
            return COORDINATE
        return self.observable if self.observable is not None else DEFAULT_OBSERVABLE

    def validate(self) -> "SystemSpec":
        s = self.system
        if isinstance(s, IrrationalRotation) and not 0 < s.alpha_fp < _ONE:
            raise BadSpec("rotation angle must lie in (0, 1)")
        if isinstance(s, CyclicRotation) and s.P < 1:
            raise BadSpec(f"cyclic order must be positive, got {s.P}")
        if isinstance(s, IIDBernoulli) and not 0 <= s.p <= 1:
            raise BadSpec(f"Bernoulli parameter must lie in [0, 1], got {s.p}")
        if isinstance(s, IIDBernoulli) and self.observable is not None and self.observable != COORDINATE:
            raise BadSpec(f"the i.i.d. system observes its time-zero coordinate, not {self.observable.describe}")
        return self

    @property
    def tag(self) -> str:
        s = self.system
        if isinstance(s, IrrationalRotation):
            return f"rotation({s.label or hex(s.alpha_fp)})"
        if isinstance(s, CyclicRotation):
            return f"cyclic({s.P})"
        return f"iid({s.p}, seed={s.seed})"


def golden_alpha() -> int:
    """floor(((sqrt 5 - 1) / 2) 2^128)."""
    return (isqrt(5 << (2 * FIXED_BITS)) - _ONE) // 2


def continued_fraction(terms: Sequence[int]) -> Fraction:
    """[0; a1, a2, ...]."""
    value = F(0)
    for a in reversed(terms):
        if a < 1:
            raise BadSpec(f"continued fraction terms must be positive, got {a}")
        value = 1 / (a + value)
    return value


def parse_alpha(text: str) -> IrrationalRotation:
    """'golden', 'a/b', a decimal string, or 'cf:a1,a2,...'."""
    text = str(text).strip()
    if text == "golden":
        return IrrationalRotation(golden_alpha(), "golden")
    try:
        if text.startswith("cf:"):
            value = continued_fraction([int(t) for t in text[3:].split(",") if t.strip()])
        else:
            value = parse_rational(text)
    except ValueError as e:
        raise BadSpec(f"cannot read rotation angle {text!r}: {e}")
    if not 0 < value < 1:
        raise BadSpec(f"rotation angle must lie in (0, 1), got {value}")
    return IrrationalRotation(int(value * _ONE), text)


def spec_from_config(cfg: config.RunConfig) -> SystemSpec:
    """SystemSpec described by a RunConfig's experiment keys."""
    if cfg.system == "iid":
        p = parse_rational(cfg.bernoulli_p)
        return SystemSpec(IIDBernoulli(cfg.seed if cfg.seed is not None else config.SEED, p)).validate()
    if cfg.f_const is not None:
        f = StepFunction.constant(parse_rational(cfg.f_const))
    else:
        f = StepFunction.indicator(parse_rational(cfg.f_lo), parse_rational(cfg.f_hi))
    if cfg.system == "rotation":
        system = parse_alpha(cfg.alpha)
    else:
        system = CyclicRotation(cfg.period)
    return SystemSpec(system, f).validate()


# Orbits

@dataclass(frozen=True)
class OrbitSignal:
    """g[n] = f(T^n x0) for n < horizon, kept as level codes."""
    codes: np.ndarray
    levels: Tuple[Fraction, ...]
    mean_true: Fraction
    system_tag: str
    x0: str
    f_desc: str
    near_edge: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))

    @property
    def horizon(self) -> int:
        return int(len(self.codes))

    @property
    def values(self) -> np.ndarray:
        return np.array([float(v) for v in self.levels])[self.codes]

    def exact_values(self, idx: np.ndarray) -> List[Fraction]:
        return [self.levels[c] for c in self.codes[idx].tolist()]

    def exact_sum(self, idx) -> Fraction:
        counts = np.bincount(self.codes[idx], minlength=len(self.levels))
        return sum((lv * int(c) for lv, c in zip(self.levels, counts.tolist())), F(0))


def _limbs(value: int) -> List[np.uint64]:
    return [np.uint64((value >> (32 * i)) & 0xFFFFFFFF) for i in range(4)]


def rotation_limbs(alpha_fp: int, x0_fp: int, n_max: int, bits: int = 128) -> List[np.ndarray]:
    """
    x_n = x0 + n alpha mod 1 for n < n_max as four little-endian 32-bit
    limbs, each product n * limb fitting in 64 bits.
    """
    if n_max >= 1 << 32:
        raise BadSpec(f"orbit length {n_max} needs n < 2^32")
    if bits not in (64, 128):
        raise BadSpec(f"precision must be 64 or 128 bits, got {bits}")
    if bits == 64:
        keep = ~((1 << 64) - 1)
        alpha_fp, x0_fp = alpha_fp & keep, x0_fp & keep
    n = np.arange(n_max, dtype=np.uint64)
    a, x = _limbs(alpha_fp), _limbs(x0_fp % _ONE)
    carry = np.zeros(n_max, dtype=np.uint64)
    hi_prev = np.zeros(n_max, dtype=np.uint64)
    out = []
    for i in range(4):
        prod_i = n * a[i]
        s = x[i] + (prod_i & _MASK32) + hi_prev + carry
        out.append(s & _MASK32)
        carry = s >> _SHIFT32
        hi_prev = prod_i >> _SHIFT32
    return out


def _geq(limbs: List[np.ndarray], value: int) -> np.ndarray:
    b = _limbs(value)
    ge = np.ones(len(limbs[0]), dtype=bool)
    for i in range(4):
        ge = (limbs[i] > b[i]) | ((limbs[i] == b[i]) & ge)
    return ge


def _near_edges(limbs: List[np.ndarray], breaks: Sequence[Fraction]) -> np.ndarray:
    top = (limbs[3] << _SHIFT32) | limbs[2]
    thr = np.uint64(int(NEAR_EDGE * 2 ** 64))
    near = np.zeros(len(top), dtype=bool)
    for b in (F(0),) + tuple(breaks):
        edge = np.uint64((int(b * _ONE) >> 64) & 0xFFFFFFFFFFFFFFFF)
        near |= ((top - edge) < thr) | ((edge - top) < thr)
    return np.flatnonzero(near)


def sample_orbit(spec: SystemSpec, x0=0, n_max: int = 1, precision: int = 128) -> OrbitSignal:
    """Evaluate f along the orbit of x0 for n in [0, n_max)."""
    if n_max < 1:
        raise BadSpec(f"orbit length must be positive, got {n_max}")
    spec.validate()
    s, f = spec.system, spec.f
    near = np.array([], dtype=np.int64)
    if isinstance(s, IrrationalRotation):
        x0_fp = int(F(x0) * _ONE) % _ONE
        limbs = rotation_limbs(s.alpha_fp, x0_fp, n_max, precision)
        codes = np.zeros(n_max, dtype=np.int64)
        for b in f.breaks:
            codes += _geq(limbs, int(b * _ONE)).astype(np.int64)
        near = _near_edges(limbs, f.breaks)
        if len(near):
            logger.warning(f"{len(near)} orbit points lie within {NEAR_EDGE} of a breakpoint")
        mean_true = f.mean
    elif isinstance(s, CyclicRotation):
        res_codes = np.array([f.code(F(r, s.P)) for r in range(s.P)], dtype=np.int64)
        start = int(x0) % s.P
        codes = res_codes[(start + np.arange(n_max, dtype=np.int64)) % s.P]
        counts = np.bincount(res_codes, minlength=len(f.levels))
        mean_true = sum((lv * int(c) for lv, c in zip(f.levels, counts.tolist())), F(0)) / s.P
    else:
        rng = make_rng(s.seed)
        codes = (rng.random(n_max) < float(s.p)).astype(np.int64)
        mean_true = F(s.p)
    codes.setflags(write=False)
    logger.debug(f"sampled {n_max} points of {spec.tag} from x0={x0}")
    return OrbitSignal(
        codes=codes, levels=f.levels, mean_true=mean_true, system_tag=spec.tag,
        x0=str(x0), f_desc=f.describe, near_edge=near,
    )


# Averages along the sequence

def _check_horizon(orbit: OrbitSignal, store: SequenceStore, N: int) -> None:
    limit = min(orbit.horizon, store.horizon)
    if N > limit:
        raise HorizonExceeded(f"N = {N} exceeds the usable horizon {limit}")


def subseq_average(orbit: OrbitSignal, store: SequenceStore, N: int) -> Fraction:
    """A(f, x, N); 0 when no element lies below N."""
    _check_horizon(orbit, store, N)
    k = store.count_range(0, N)
    if k == 0:
        return F(0)
    return orbit.exact_sum(store.elements[:k]) / k


def birkhoff_average(orbit: OrbitSignal, N: int) -> Fraction:
    if N > orbit.horizon:
        raise HorizonExceeded(f"N = {N} exceeds the orbit horizon {orbit.horizon}")
    return orbit.exact_sum(np.arange(N)) / N


def subseq_max(orbit: OrbitSignal, store: SequenceStore, n_max: int) -> float:
    """max over N <= n_max of |A(f, x, N)|; A only moves when N passes an element."""
    _check_horizon(orbit, store, n_max)
    k = store.count_range(0, n_max)
    if k == 0:
        return 0.0
    sums = np.cumsum(orbit.values[store.elements[:k]])
    return float(np.max(np.abs(sums / np.arange(1, k + 1))))


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    A: Fraction
    deviation: Fraction
    block_m: int


@dataclass(frozen=True)
class ConvergenceReport:
    rows: Tuple[ConvergenceRow, ...]
    mean_true: Fraction
    final_deviation: Optional[Fraction]
    trend_slope: Optional[float]

    def to_csv(self) -> str:
        lines = ["N,A,deviation,block_m"]
        for r in self.rows:
            lines.append(f"{r.N},{float(r.A)!r},{float(r.deviation)!r},{r.block_m}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "rows": [
                {"N": r.N, "A": float(r.A), "deviation": float(r.deviation), "block_m": r.block_m}
                for r in self.rows
            ],
            "mean_true": str(self.mean_true),
            "final_deviation": None if self.final_deviation is None else float(self.final_deviation),
            "trend_slope": self.trend_slope,
        }


def block_of(store: SequenceStore, N: int) -> int:
    """m with beta_{m-1} < N <= beta_m."""
    for b in store.blocks:
        if b.lo < N <= b.hi:
            return b.m
    raise HorizonExceeded(f"N = {N} lies outside the built blocks")


def auto_checkpoints(store: SequenceStore, limit: int, points: int = 25) -> List[int]:
    bounds = [b.hi for b in store.blocks if b.hi <= limit]
    spaced = np.unique(np.geomspace(10, max(limit, 10), points).astype(np.int64)).tolist()
    return sorted({n for n in bounds + spaced if 1 <= n <= limit})


def convergence_report(
    orbit: OrbitSignal,
    store: SequenceStore,
    checkpoints: Union[str, Sequence[int]] = "auto",
) -> ConvergenceReport:
    """A(f, x, N) and |A - mean_true| at block ends and log-spaced N."""
    limit = min(orbit.horizon, store.horizon)
    if checkpoints == "auto":
        checkpoints = auto_checkpoints(store, limit)
    checkpoints = sorted(set(int(n) for n in checkpoints))
    if checkpoints and checkpoints[-1] > limit:
        raise HorizonExceeded(f"checkpoint {checkpoints[-1]} exceeds the usable horizon {limit}")

    elements = store.elements[: store.count_range(0, limit)]
    codes = orbit.codes[elements]
    cum = [np.concatenate(([0], np.cumsum(codes == i))) for i in range(len(orbit.levels))]
    rows = []
    for N in checkpoints:
        k = int(np.searchsorted(elements, N))
        if k == 0:
            A = F(0)
        else:
            A = sum((lv * int(c[k]) for lv, c in zip(orbit.levels, cum)), F(0)) / k
        rows.append(ConvergenceRow(N=N, A=A, deviation=abs(A - orbit.mean_true), block_m=block_of(store, N)))

    ends = {b.hi for b in store.blocks}
    full = [r for r in rows if r.N in ends]
    final = (full[-1] if full else rows[-1]).deviation if rows else None
    positive = [r for r in rows if r.deviation > 0]
    slope = None
    if len(positive) >= 2:
        xs = np.log10([r.N for r in positive])
        ys = np.log10([float(r.deviation) for r in positive])
        slope = float(np.polyfit(xs, ys, 1)[0])
    logger.info(f"convergence over {len(rows)} checkpoints on {orbit.system_tag}: final deviation {final}")
    return ConvergenceReport(tuple(rows), orbit.mean_true, final, slope)


# Decomposition of f / lambda' by the ledger thresholds

@dataclass(frozen=True)
class Decomposition:
    """
    For block index m and y = f(x) / lambda': f1 = y below N-bar_{m-3},
    f2 = y in [N-bar_{m-3}, N-bar_m), f3 = y from N-bar_m on.
    """
    lam: Fraction
    nbar: Tuple[int, ...]

    @property
    def lam_prime(self) -> Fraction:
        return self.lam / 3

    @property
    def M(self) -> int:
        return len(self.nbar) - 1

    def _nbar(self, i: int) -> int:
        return 0 if i <= 0 else self.nbar[i]

    def parts(self, m: int, value) -> Tuple[Fraction, Fraction, Fraction]:
        y = F(value) / self.lam_prime
        lo, hi = self._nbar(m - 3), self._nbar(m)
        if y < lo:
            return y, F(0), F(0)
        if y < hi:
            return F(0), y, F(0)
        return F(0), F(0), y

    def check(self, f: StepFunction) -> "DecompositionReport":
        sum_ok = f1_ok = f2_ok = True
        for level in f.levels:
            y = F(level) / self.lam_prime
            f2_total = F(0)
            for m in range(1, self.M + 1):
                f1, f2, f3 = self.parts(m, level)
                sum_ok &= f1 + f2 + f3 == y
                if m <= 3:
                    f1_ok &= f1 == 0
                f2_total += f2
            f2_ok &= f2_total <= 3 * y
        return DecompositionReport(sum_ok=sum_ok, f1_zero_ok=f1_ok, f2_sum_ok=f2_ok)


@dataclass(frozen=True)
class DecompositionReport:
    sum_ok: bool
    f1_zero_ok: bool
    f2_sum_ok: bool

    @property
    def passed(self) -> bool:
        return self.sum_ok and self.f1_zero_ok and self.f2_sum_ok


def decompose(f: StepFunction, ledger: Ledger, lam) -> Decomposition:
    lam = F(lam)
    if lam <= 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")
    if any(v < 0 for v in f.levels):
        raise BadSpec("the decomposition needs a nonnegative observable")
    decomposition = Decomposition(lam=lam, nbar=ledger.nbar)
    report = decomposition.check(f)
    if not report.passed:
        logger.error(f"decomposition identities fail for {f.describe}: {report}")
    return decomposition


@dataclass(frozen=True)
class SplitAverages:
    m: int
    N: int
    total: Fraction
    parts: Tuple[Fraction, Fraction, Fraction]

    @property
    def consistent(self) -> bool:
        return sum(self.parts, F(0)) == self.total


def split_averages(orbit: OrbitSignal, store: SequenceStore, decomposition: Decomposition, N: int) -> SplitAverages:
    """A(f / lambda') and A(f_{i,m(N)}) for i = 1, 2, 3 at one N."""
    _check_horizon(orbit, store, N)
    m = block_of(store, N)
    k = store.count_range(0, N)
    if k == 0:
        return SplitAverages(m, N, F(0), (F(0), F(0), F(0)))
    counts = np.bincount(orbit.codes[store.elements[:k]], minlength=len(orbit.levels)).tolist()
    totals = [F(0)] * 3
    total = F(0)
    for level, c in zip(orbit.levels, counts):
        for i, part in enumerate(decomposition.parts(m, level)):
            totals[i] += part * c
        total += F(level) / decomposition.lam_prime * c
    return SplitAverages(m, N, total / k, tuple(t / k for t in totals))


# Towers on Z_P

@dataclass(frozen=True)
class Tower:
    P: int
    kappa: int
    base: Tuple[int, ...]

    @property
    def covered(self) -> Fraction:
        return F(len(self.base) * self.kappa, self.P)

    def disjoint(self) -> bool:
        """E, TE, ..., T^{kappa-1}E are pairwise disjoint."""
        hits = np.zeros(self.P, dtype=np.int64)
        for b in self.base:
            hits[(b + np.arange(self.kappa)) % self.P] += 1
        return bool(np.all(hits <= 1))


def build_tower(P: int, kappa: int, eps) -> Tower:
    """Base {0, kappa, 2 kappa, ...} with floor(P / kappa) full columns."""
    eps = F(eps)
    if not 1 <= kappa <= P:
        raise BadSpec(f"tower height {kappa} must lie in [1, {P}]")
    if not 0 < eps < 1:
        raise BadSpec(f"epsilon must lie in (0, 1), got {eps}")
    columns = P // kappa
    tower = Tower(P=P, kappa=kappa, base=tuple(kappa * c for c in range(columns)))
    if tower.covered <= 1 - eps:
        raise TowerCoverageError(f"height {kappa} on Z_{P} covers {tower.covered}, not above {1 - eps}")
    return tower


def dynamical_B(orbit: OrbitSignal, ctx: GridContext, x: int, r: int, N: int) -> Fraction:
    """
    B(f, x, N) along the orbit of x in Z_P, with offsets
    [-r, floor((N + r) / p) p + p - r) and r = n(x) mod p.
    """
    P, p = orbit.horizon, ctx.p
    hi = ((N + r) // p) * p + p - r
    n_prime = (N + r) // p + 1
    total = F(0)
    for q, qt in zip(ctx.primes, ctx.qtil):
        first = -(r // q) * q
        offsets = np.arange(first, hi, q, dtype=np.int64)
        total += orbit.exact_sum((x + offsets) % P)
    return total / (n_prime * sum(ctx.qtil))


@dataclass
class TransferReport:
    trials: int
    equal: int = 0
    mismatches: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.equal == self.trials

    def to_json(self) -> dict:
        return {"trials": self.trials, "equal": self.equal, "mismatches": self.mismatches, "pass": self.passed}


def tower_transfer_check(
    tower: Tower,
    orbit: OrbitSignal,
    ctx: GridContext,
    trials: int,
    horizon: int,
    seed: int,
    workers: Optional[int] = None,
) -> TransferReport:
    """
    Compare the dynamical B at x = b + n with the grid operator applied to
    phi(n') = f(T^{n'} b) on [0, kappa), for n in [p, kappa - horizon - 2p).
    """
    p = ctx.p
    if orbit.horizon != tower.P:
        raise BadSpec(f"orbit must cover Z_{tower.P} once, it has {orbit.horizon} points")
    top = tower.kappa - horizon - 2 * p
    if top <= p:
        raise TowerTooShort(f"height {tower.kappa} leaves no room for horizon {horizon} with p = {p}")
    rng = make_rng(seed)
    draws = [
        (int(tower.base[rng.integers(len(tower.base))]), int(rng.integers(p, top)), int(rng.integers(1, horizon + 1)))
        for _ in range(trials)
    ]

    def one(draw):
        b, n, N = draw
        column = (b + np.arange(tower.kappa)) % tower.P
        phi = FiniteSignal(0, np.array(orbit.exact_values(column), dtype=object))
        grid = opB(phi, ctx, n, N)
        dyn = dynamical_B(orbit, ctx, (b + n) % tower.P, n % p, N)
        return b, n, N, grid, dyn

    report = TransferReport(trials=trials)
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as pool:
        for b, n, N, grid, dyn in pool.map(one, draws):
            if grid == dyn:
                report.equal += 1
            else:
                report.mismatches.append({"base": b, "n": n, "N": N, "grid": str(grid), "orbit": str(dyn)})
    if not report.passed:
        logger.error(f"tower transfer: {len(report.mismatches)} of {trials} trials differ")
    else:
        logger.info(f"tower transfer: {trials}/{trials} exact equalities on Z_{tower.P}")
    return report


# Counting bounds along the built store

@dataclass(frozen=True)
class CountBoundsReport:
    records: Tuple[ConstraintRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.satisfied for r in self.records)

    def failures(self) -> List[ConstraintRecord]:
        return [r for r in self.records if not r.satisfied]

    def to_json(self) -> dict:
        return {"records": [r.to_json() for r in self.records], "passed": self.passed}


def _n_grid(lo: int, hi: int, p: int, points: int = 6) -> List[int]:
    picks = {lo + 1, min(hi, lo + p), min(hi, lo + p + 1), hi - 1, hi}
    picks.update(np.linspace(lo + 1, hi, points).astype(np.int64).tolist())
    return sorted(n for n in picks if lo < n <= hi)


def count_bounds_check(ledger: Ledger, store: SequenceStore) -> CountBoundsReport:
    """
    Exact upper and lower bounds on the element counts of every built block,
    of the partial block below N and of the whole prefix below N.
    """
    gb = ledger.constants.gamma_beta
    records: List[ConstraintRecord] = []
    lower_sum = F(0)
    for blk in store.blocks:
        m = blk.m
        par = ledger.block(m)
        lo, hi, p, Q, g = par.beta_prev, par.beta, par.p, par.Q, par.gamma
        count = F(store.count_range(lo, hi))
        P_m = (hi - lo) // p
        records += [
            ConstraintRecord(f"block_count_lower[{m}]", (1 - g) * P_m * p * Q, count),
            ConstraintRecord(f"block_count_lower_beta[{m}]", (1 - g) * (1 - gb) * hi * Q, count),
            ConstraintRecord(f"block_count_upper[{m}]", count, (P_m + 1) * p * Q),
        ]
        if m >= 2:
            records.append(ConstraintRecord(f"block_count_upper_beta[{m}]", count, hi * Q))
        for N in _n_grid(lo, hi, p):
            partial = F(store.count_range(lo, N))
            total = F(store.count_range(0, N))
            P_N = (N - lo) // p
            tag = f"[{m},{N}]"
            records += [
                ConstraintRecord("partial_count_lower" + tag, (1 - g) * P_N * p * Q, partial, "<="),
                ConstraintRecord("partial_count_lower_linear" + tag, (1 - g) * (N - lo - p) * Q, partial),
                ConstraintRecord("partial_count_upper" + tag, partial, (P_N + 1) * p * Q),
                ConstraintRecord("total_count_sum" + tag, lower_sum + (1 - g) * (N - lo - p) * Q, total, "<="),
                ConstraintRecord("total_count_lower" + tag, F(3, 5) * Q * N, total),
            ]
        lower_sum += (1 - g) * (hi - lo - p) * Q
    report = CountBoundsReport(tuple(records))
    for r in report.failures():
        logger.error(f"count bound {r.name} fails: {r.lhs} {r.relation} {r.rhs} is false")
    return report
