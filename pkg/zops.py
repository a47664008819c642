"""
Finitely supported signals on the integers and the prime-grid operators.

A GridContext fixes p = q_1 ... q_K. Grid blocks are [(t-1)p, tp) with
t(n) = n // p + 1. For a start n and length N the operators average over
I(n, N) = [(t0-1)p - n, t1 p - n), i.e. over the N' = t1 - t0 + 1 whole grid
blocks met by [n, n + N].

Exact mode keeps values as Fraction objects in numpy object arrays; float
mode uses float64 or complex128. Every operator accepts either.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, prod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import GridRatioError, LengthMismatch, NonpositiveLambda
from utils import trigamma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteSignal:
    """phi on [support_lo, support_hi]; zero elsewhere."""
    support_lo: int
    values: np.ndarray

    @classmethod
    def make(cls, support_lo: int, values: Sequence, exact: bool = False) -> "FiniteSignal":
        if exact:
            arr = np.array([Fraction(v) for v in values], dtype=object)
        else:
            arr = np.asarray(values)
            if not np.iscomplexobj(arr):
                arr = arr.astype(np.float64)
        if len(arr) == 0:
            raise LengthMismatch("a signal needs at least one sample")
        return cls(support_lo=int(support_lo), values=arr)

    @classmethod
    def delta(cls, at: int = 0, height=1, exact: bool = True) -> "FiniteSignal":
        return cls.make(at, [height], exact=exact)

    @property
    def support_hi(self) -> int:
        return self.support_lo + len(self.values) - 1

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def bound_M(self):
        return max(abs(v) for v in self.values.tolist())

    @property
    def l1(self):
        return sum(abs(v) for v in self.values.tolist())

    @property
    def l2sq(self):
        return sum(abs(v) ** 2 for v in self.values.tolist())

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def at(self, n: int):
        if self.support_lo <= n <= self.support_hi:
            return self.values[n - self.support_lo]
        return self.zero()

    def window(self, a: int, b: int) -> np.ndarray:
        """phi on [a, b) as a dense array."""
        if self.exact:
            out = np.full(max(b - a, 0), Fraction(0), dtype=object)
        else:
            out = np.zeros(max(b - a, 0), dtype=self.values.dtype)
        lo, hi = max(a, self.support_lo), min(b, self.support_hi + 1)
        if lo < hi:
            out[lo - a:hi - a] = self.values[lo - self.support_lo:hi - self.support_lo]
        return out

    def to_float(self) -> "FiniteSignal":
        if not self.exact:
            return self
        return FiniteSignal(self.support_lo, np.array([float(v) for v in self.values], dtype=np.float64))

    def to_json(self) -> dict:
        """Integer-rational array: each value as [numerator, denominator]."""
        vals = []
        for v in self.values.tolist():
            if isinstance(v, complex):
                vals.append({"re": _ratio(v.real), "im": _ratio(v.imag)})
            else:
                vals.append(_ratio(v))
        return {"support_lo": self.support_lo, "values": vals}


def _ratio(v) -> List[int]:
    f = Fraction(v).limit_denominator(10 ** 12) if isinstance(v, float) else Fraction(v)
    return [f.numerator, f.denominator]


class GridContext:
    """
    Pairwise-distinct q_1..q_K with p = prod q_j and qtil_j = p / q_j. With
    strict=True the ratio condition 1/2 < q_j / q_j' < 2 is enforced.
    """

    def __init__(self, primes: Sequence[int], strict: bool = True):
        self.primes: Tuple[int, ...] = tuple(int(q) for q in primes)
        if len(set(self.primes)) != len(self.primes) or any(q < 1 for q in self.primes):
            raise GridRatioError(f"primes must be distinct positive integers: {self.primes}")
        self.K = len(self.primes)
        self.p = prod(self.primes)
        self.qtil: Tuple[int, ...] = tuple(self.p // q for q in self.primes)
        self.ratio = Fraction(max(self.primes), min(self.primes))
        if strict and not self.ratio_ok:
            raise GridRatioError(f"max/min = {self.ratio} is not below 2 for {self.primes}")

    @property
    def ratio_ok(self) -> bool:
        return self.ratio < 2

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        """nu_j / nu-sum, the same for every (n, N)."""
        total = sum(self.qtil)
        return tuple(Fraction(qt, total) for qt in self.qtil)

    def t(self, n: int) -> int:
        return n // self.p + 1

    def t1(self, n: int, N: int) -> int:
        return (n + N) // self.p + 1

    def n_prime(self, n: int, N: int) -> int:
        return self.t1(n, N) - self.t(n) + 1

    def interval(self, n: int, N: int) -> Tuple[int, int]:
        """I(n, N) as offsets from n."""
        return (self.t(n) - 1) * self.p - n, self.t1(n, N) * self.p - n

    def nu(self, n: int, N: int) -> int:
        return self.n_prime(n, N) * self.p

    def nu_j(self, n: int, N: int, j: int) -> int:
        return self.n_prime(n, N) * self.qtil[j]

    def min_terms(self, n: int) -> int:
        """Smallest N' reachable with N >= 1: the last residue of a block always spills into the next."""
        return 2 if n % self.p == self.p - 1 else 1

    def length_for(self, n: int, n_prime: int) -> int:
        """Some N >= 1 giving exactly n_prime grid blocks from n."""
        return max(1, (self.t(n) + n_prime - 2) * self.p - n)

    def __repr__(self) -> str:
        return f"GridContext(primes={self.primes}, p={self.p})"


# Fourier layer

@dataclass(frozen=True)
class Spectrum:
    p: int
    coeffs: np.ndarray


def _phase_matrix(p: int, sign: int) -> np.ndarray:
    n = np.arange(p)
    return np.exp(sign * 2j * np.pi * (np.outer(n, n) % p) / p)


def dft(block: Sequence, ctx) -> Spectrum:
    """phihat(b/p) = (1/p) sum_n phi(n) e(-nb/p) over one period block."""
    p = ctx if isinstance(ctx, int) else ctx.p
    x = np.asarray([complex(v) for v in block], dtype=np.complex128)
    if len(x) != p:
        raise LengthMismatch(f"period block has {len(x)} samples, expected {p}")
    return Spectrum(p=p, coeffs=_phase_matrix(p, -1) @ x / p)


def idft(spectrum: Spectrum) -> np.ndarray:
    """phi(n) = sum_b phihat(b/p) e(nb/p)."""
    return _phase_matrix(spectrum.p, 1) @ spectrum.coeffs


def parseval_residual(block: Sequence, spectrum: Spectrum) -> float:
    """Relative gap between (1/p) sum |phi|^2 and sum |phihat|^2."""
    x = np.asarray([complex(v) for v in block], dtype=np.complex128)
    lhs = float(np.sum(np.abs(x) ** 2)) / spectrum.p
    rhs = float(np.sum(np.abs(spectrum.coeffs) ** 2))
    return abs(lhs - rhs) / max(lhs, 1e-300)


@dataclass(frozen=True)
class GridParts:
    """Period-block pieces of phi on grid block t; arrays are indexed by n mod p."""
    t: int
    block: np.ndarray
    mean: object
    smeared: Tuple[np.ndarray, ...]

    @property
    def minus(self) -> np.ndarray:
        return self.block - self.mean

    @property
    def smeared_minus(self) -> Tuple[np.ndarray, ...]:
        return tuple(s - self.mean for s in self.smeared)

    def mean_part(self) -> np.ndarray:
        """phi-bar_0 on the block."""
        return np.array([self.mean] * len(self.block), dtype=self.block.dtype)


def _smear_rows(rows: np.ndarray, q: int, qtil: int) -> np.ndarray:
    """Row-wise (1/qtil) sum_k row[(r + k q) mod p]."""
    p = rows.shape[1]
    idx = (np.arange(p)[:, None] + q * np.arange(qtil)[None, :]) % p
    return rows[:, idx].sum(axis=2) / qtil


def grid_parts(phi: FiniteSignal, ctx: GridContext, t: int) -> GridParts:
    """Periodization, block mean and q_j-smearing of phi on grid block t."""
    p = ctx.p
    block = phi.window((t - 1) * p, t * p)
    mean = block.sum() / p
    rows = block.reshape(1, p)
    smeared = tuple(_smear_rows(rows, q, qt)[0] for q, qt in zip(ctx.primes, ctx.qtil))
    return GridParts(t=t, block=block, mean=mean, smeared=smeared)


def block_means(phi: FiniteSignal, ctx: GridContext) -> Tuple[int, np.ndarray]:
    """phi-bar_0 over the grid blocks meeting the support: (first point, values)."""
    a, rows = _support_rows(phi, ctx)
    means = rows.sum(axis=1) / ctx.p
    return a, np.repeat(means, ctx.p)


def fourier_support_error(phi: FiniteSignal, ctx: GridContext, t: int) -> float:
    """max |dft(phi_{t,0,j}) - dft(phi_{t,0}) masked to qtil_j | b|."""
    parts = grid_parts(phi, ctx, t)
    full = dft(parts.block, ctx).coeffs
    b = np.arange(ctx.p)
    worst = 0.0
    for qt, smeared in zip(ctx.qtil, parts.smeared):
        masked = np.where(b % qt == 0, full, 0)
        worst = max(worst, float(np.max(np.abs(dft(smeared, ctx).coeffs - masked))))
    return worst


def orthogonality_error(phi: FiniteSignal, ctx: GridContext, t: int) -> float:
    """max over b != 0 and j != j' of |phihat_j(b/p) phihat_j'(b/p)|."""
    parts = grid_parts(phi, ctx, t)
    spectra = [dft(s, ctx).coeffs for s in parts.smeared]
    worst = 0.0
    for j in range(ctx.K):
        for jj in range(j + 1, ctx.K):
            worst = max(worst, float(np.max(np.abs(spectra[j][1:] * spectra[jj][1:]), initial=0.0)))
    return worst


# Definitional operators

def _row_window(phi: FiniteSignal, ctx: GridContext, n: int, N: int) -> Tuple[int, np.ndarray]:
    a = (ctx.t(n) - 1) * ctx.p
    rows = phi.window(a, ctx.t1(n, N) * ctx.p).reshape(ctx.n_prime(n, N), ctx.p)
    return a, rows


def _class_sum_j(phi, ctx, n, N, j):
    a, rows = _row_window(phi, ctx, n, N)
    i0 = (n - a) % ctx.primes[j]
    return rows[:, i0::ctx.primes[j]].sum()


def _class_abs_sum_j(phi, ctx, n, N, j):
    a, rows = _row_window(phi, ctx, n, N)
    centred = rows - (rows.sum(axis=1) / ctx.p)[:, None]
    i0 = (n - a) % ctx.primes[j]
    return np.abs(centred[:, i0::ctx.primes[j]].sum(axis=1)).sum()


def opB_j(phi: FiniteSignal, ctx: GridContext, n: int, N: int, j: int):
    """(1 / nu(n,N,j)) sum of phi(n + l q_j) over l q_j in I(n, N)."""
    return _class_sum_j(phi, ctx, n, N, j) / ctx.nu_j(n, N, j)


def opB(phi: FiniteSignal, ctx: GridContext, n: int, N: int):
    """nu_j-weighted average of the opB_j."""
    total = sum(_class_sum_j(phi, ctx, n, N, j) for j in range(ctx.K))
    return total / sum(ctx.nu_j(n, N, j) for j in range(ctx.K))


def opB0_j(phi: FiniteSignal, ctx: GridContext, n: int, N: int, j: int):
    """(1 / nu_j) sum over grid blocks of |sum over the q_j-class of (phi - phi-bar_0)|."""
    return _class_abs_sum_j(phi, ctx, n, N, j) / ctx.nu_j(n, N, j)


def opB0(phi: FiniteSignal, ctx: GridContext, n: int, N: int):
    total = sum(_class_abs_sum_j(phi, ctx, n, N, j) for j in range(ctx.K))
    return total / sum(ctx.nu_j(n, N, j) for j in range(ctx.K))


def _sweep_bound(phi: FiniteSignal, ctx: GridContext, n: int) -> range:
    first = ctx.min_terms(n)
    last = max(first, ceil((phi.support_hi - n) / ctx.p) + 2)
    return range(first, last + 1)


def _sweep(phi, ctx, n, value) -> object:
    best = phi.zero()
    for n_prime in _sweep_bound(phi, ctx, n):
        v = abs(value(ctx.length_for(n, n_prime)))
        if v > best:
            best = v
    return best


def maximal_B(phi: FiniteSignal, ctx: GridContext, n: int, j: Optional[int] = None):
    """sup over N >= 1 of |B(phi, n, N)| (or of |B_j| when j is given)."""
    if j is None:
        return _sweep(phi, ctx, n, lambda N: opB(phi, ctx, n, N))
    return _sweep(phi, ctx, n, lambda N: opB_j(phi, ctx, n, N, j))


def maximal_B0(phi: FiniteSignal, ctx: GridContext, n: int, j: Optional[int] = None):
    if j is None:
        return _sweep(phi, ctx, n, lambda N: opB0(phi, ctx, n, N))
    return _sweep(phi, ctx, n, lambda N: opB0_j(phi, ctx, n, N, j))


def maximal_BK(phi: FiniteSignal, ctx: GridContext, n: int):
    """sup over N of |(1/K) sum_j B_j(phi, n, N)|."""
    return _sweep(
        phi, ctx, n,
        lambda N: sum(opB_j(phi, ctx, n, N, j) for j in range(ctx.K)) / ctx.K,
    )


# Representations along the grid: phi_{0,j,+}(y) = phi_{t(y),0,j}(y)

def _support_rows(phi: FiniteSignal, ctx: GridContext) -> Tuple[int, np.ndarray]:
    t_lo, t_hi = ctx.t(phi.support_lo), ctx.t(phi.support_hi)
    a = (t_lo - 1) * ctx.p
    rows = phi.window(a, t_hi * ctx.p).reshape(t_hi - t_lo + 1, ctx.p)
    return a, rows


def smeared_signal(phi: FiniteSignal, ctx: GridContext, j: int, centred: bool = False) -> FiniteSignal:
    """phi_{0,j,+} (or phi_{0,j,-} when centred) on the grid blocks meeting the support."""
    a, rows = _support_rows(phi, ctx)
    sm = _smear_rows(rows, ctx.primes[j], ctx.qtil[j])
    if centred:
        sm = sm - (rows.sum(axis=1) / ctx.p)[:, None]
    return FiniteSignal(a, sm.reshape(-1))


def weighted_signal(phi: FiniteSignal, ctx: GridContext, kind: str) -> FiniteSignal:
    """
    The grid-line function whose running means along n + p Z give the
    operator: 'B' -> sum_j w_j phi_{0,j,+}; 'BK' -> (1/K) sum_j phi_{0,j,+};
    'B0' -> sum_j w_j |phi_{0,j,-}|, with w_j = qtil_j / sum qtil.
    """
    parts = []
    for j in range(ctx.K):
        s = smeared_signal(phi, ctx, j, centred=(kind == "B0")).values
        if kind == "B0":
            s = np.abs(s)
        parts.append(s)
    if kind == "BK":
        coef = [Fraction(1, ctx.K)] * ctx.K
    else:
        coef = list(ctx.weights)
    if not phi.exact:
        coef = [float(c) for c in coef]
    total = parts[0] * coef[0]
    for s, c in zip(parts[1:], coef[1:]):
        total = total + s * c
    a, _ = _support_rows(phi, ctx)
    return FiniteSignal(a, total)


def running_mean(psi: FiniteSignal, n: int, step: int, n_terms: int):
    """(1/N') sum_{k < N'} psi(n + k step)."""
    total = psi.zero()
    for k in range(n_terms):
        total = total + psi.at(n + k * step)
    return total / n_terms


def sup_average(psi: FiniteSignal, n: int, step: int, min_terms: int = 1):
    """
    sup over N' >= min_terms of |running_mean(psi, n, step, N')|. Only the
    lengths ending on a support point (and min_terms itself) can attain it.
    """
    best = abs(running_mean(psi, n, step, min_terms))
    k_first = max(0, -((n - psi.support_lo) // step))
    k_last = (psi.support_hi - n) // step
    total = psi.zero()
    for k in range(0, k_last + 1):
        total = total + psi.at(n + k * step)
        if k >= k_first and k + 1 >= min_terms:
            v = abs(total) / (k + 1)
            if v > best:
                best = v
    return best


def rep_B0_j(phi: FiniteSignal, ctx: GridContext, n: int, N: int, j: int):
    """(1/N') sum_{k<N'} |phi_{0,j,-}(n + k p)|."""
    psi = smeared_signal(phi, ctx, j, centred=True)
    psi = FiniteSignal(psi.support_lo, np.abs(psi.values))
    return running_mean(psi, n, ctx.p, ctx.n_prime(n, N))


def rep_maximal_B0_j(phi: FiniteSignal, ctx: GridContext, n: int, j: int):
    psi = smeared_signal(phi, ctx, j, centred=True)
    psi = FiniteSignal(psi.support_lo, np.abs(psi.values))
    return sup_average(psi, n, ctx.p, ctx.min_terms(n))


def rep_maximal_BK(phi: FiniteSignal, ctx: GridContext, n: int):
    return sup_average(weighted_signal(phi, ctx, "BK"), n, ctx.p, ctx.min_terms(n))


# Vectorized sup-average profiles (float mode)

def sup_profile(
    psi: np.ndarray,
    start: int,
    step: int,
    ns: np.ndarray,
    min_terms: np.ndarray,
    signed: bool = False,
) -> np.ndarray:
    """
    For every n in ns: sup over N' >= min_terms of the mean of
    psi(n), psi(n + step), ..., psi(n + (N'-1) step), psi supported on
    [start, start + len(psi)). Absolute values unless signed; signed sups
    are floored at 0, the limit of the means as N' grows.
    """
    ns = np.asarray(ns, dtype=np.int64)
    min_terms = np.broadcast_to(np.asarray(min_terms, dtype=np.int64), ns.shape)
    out = np.zeros(len(ns), dtype=np.float64)
    for c in range(step):
        first = start + ((c - start) % step)
        cls_vals = psi[first - start::step]
        if len(cls_vals) == 0:
            continue
        sel = np.flatnonzero(((ns - c) % step) == 0)
        if len(sel) == 0:
            continue
        prefix = np.concatenate(([0], np.cumsum(cls_vals)))
        n_cls = len(cls_vals)
        o = (ns[sel] - first) // step
        base = prefix[np.clip(o, 0, n_cls)]
        ends = np.arange(n_cls)
        length = ends[None, :] - o[:, None] + 1
        sums = prefix[ends + 1][None, :] - base[:, None]
        valid = (ends[None, :] >= o[:, None]) & (length >= min_terms[sel][:, None])
        safe_len = np.where(length > 0, length, 1)
        vals = sums / safe_len
        vals = vals.real if signed else np.abs(vals)
        vals = np.where(valid, vals, -np.inf if signed else 0.0)
        best = vals.max(axis=1)
        mt = min_terms[sel]
        first_sum = prefix[np.clip(o + mt, 0, n_cls)] - base
        first_val = first_sum / mt
        first_val = first_val.real if signed else np.abs(first_val)
        best = np.maximum(best, first_val)
        out[sel] = np.maximum(best, 0.0) if signed else best
    return out


def _left_tail_sq(prefix_at_end: np.ndarray, cap: int = 4000) -> float:
    """
    sum over s >= 1 of max(0, max_e P_e / (s + e + 1))^2, where P_e is the
    sum of the first e+1 class values and s counts zero terms before the
    support. Summed exactly up to the point where the eventual winner is
    fixed (or cap), then closed form via trigamma. Beyond cap the largest
    P is paired with the shortest length, an upper bound.
    """
    P = np.asarray(prefix_at_end, dtype=np.float64)
    a = np.arange(1, len(P) + 1, dtype=np.float64)
    pos = P > 0
    if not np.any(pos):
        return 0.0
    P, a = P[pos], a[pos]
    top = P.max()
    winners = P >= top * (1 - 1e-12)
    a_star = a[winners].min()
    others = ~winners
    s_star = 1
    if np.any(others):
        thr = (P[others] * a_star - top * a[others]) / (top - P[others])
        s_star = max(1, int(np.ceil(thr.max())))
    exact_tail = s_star <= cap
    s_end = s_star if exact_tail else cap
    s = np.arange(1, s_end, dtype=np.float64)
    explicit = 0.0
    if len(s):
        vals = (P[None, :] / (s[:, None] + a[None, :])).max(axis=1)
        explicit = float(np.sum(vals ** 2))
    a_tail = a_star if exact_tail else a.min()
    return explicit + top ** 2 * trigamma(s_end + a_tail)


def _check_lambda(lam) -> None:
    if not lam > 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")


@dataclass(frozen=True)
class InequalityRecord:
    test: str
    lhs: float
    rhs: float
    extra: Tuple[Tuple[str, object], ...] = ()

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs)

    @property
    def ratio(self) -> float:
        return 0.0 if self.rhs == 0 else self.lhs / self.rhs

    def to_json(self) -> dict:
        out = {"test": self.test, "lhs": float(self.lhs), "rhs": float(self.rhs),
               "ratio": float(self.ratio), "pass": self.passed}
        out.update(dict(self.extra))
        return out


def b_star_profile(phi: FiniteSignal, ctx: GridContext, ns: np.ndarray, kind: str = "B") -> np.ndarray:
    """Vectorized B* (kind 'B'), B*_K ('BK') or B0* ('B0') at every n in ns."""
    psi = weighted_signal(phi.to_float(), ctx, kind)
    mt = np.where(np.asarray(ns) % ctx.p == ctx.p - 1, 2, 1)
    return sup_profile(psi.values, psi.support_lo, ctx.p, ns, mt)


def weak11_count(phi: FiniteSignal, ctx: GridContext, lam) -> int:
    """#{n : B*(phi, n) > lam}, exact over [support_lo - W, support_hi + p]."""
    _check_lambda(lam)
    W = ceil(float(phi.l1) * max(ctx.primes) / float(lam)) + ctx.p
    ns = np.arange(phi.support_lo - W, phi.support_hi + ctx.p + 1, dtype=np.int64)
    count = int(np.count_nonzero(b_star_profile(phi, ctx, ns, "B") > float(lam)))
    logger.debug(f"weak (1,1) on {ctx}: {count} of {len(ns)} points above {float(lam):.6g}")
    return count


def weak11_check(phi: FiniteSignal, ctx: GridContext, lam) -> InequalityRecord:
    count = weak11_count(phi, ctx, lam)
    return InequalityRecord("weak11_B", float(count), 4 * float(phi.l1) / float(lam))


def l2_B0star_check(phi: FiniteSignal, ctx: GridContext) -> InequalityRecord:
    """
    sum over all n of B0*(phi, n)^2 against (32/K) M ||phi||_1. Inside the
    support blocks the sum is explicit; left of them each residue class
    contributes a closed-form tail; right of them B0* vanishes.
    """
    psi = weighted_signal(phi.to_float(), ctx, "B0")
    a, b = psi.support_lo, psi.support_hi + 1
    ns = np.arange(a, b, dtype=np.int64)
    mt = np.where(ns % ctx.p == ctx.p - 1, 2, 1)
    inner = float(np.sum(sup_profile(psi.values, a, ctx.p, ns, mt) ** 2))
    tail = 0.0
    for c in range(ctx.p):
        cls_vals = psi.values[c::ctx.p]
        tail += _left_tail_sq(np.cumsum(cls_vals))
    lhs = inner + tail
    rhs = 32.0 / ctx.K * float(phi.bound_M) * float(phi.l1)
    unsquared = lhs ** 0.5 <= rhs
    logger.debug(f"l2 B0* on {ctx}: inner={inner:.6g} tail={tail:.6g} rhs={rhs:.6g}")
    return InequalityRecord("l2_B0star", lhs, rhs, (("tail", tail), ("unsquared_ok", bool(unsquared))))


def classic_weak_count(phi: FiniteSignal, lam) -> int:
    """#{n : sup_N |(1/N) sum_{k<N} phi(n+k)| > lam}."""
    _check_lambda(lam)
    f = phi.to_float()
    W = ceil(float(f.l1) / float(lam)) + 1
    ns = np.arange(f.support_lo - W, f.support_hi + 1, dtype=np.int64)
    vals = sup_profile(f.values, f.support_lo, 1, ns, np.ones(len(ns), dtype=np.int64))
    return int(np.count_nonzero(vals > float(lam)))


def strong_maximal_l2sq(phi: FiniteSignal) -> float:
    """
    sum over n of (sup_N (1/N) sum_{k=1..N} phi(n+k))^2 for real phi; complex
    phi uses the modulus of the means.
    """
    f = phi.to_float()
    signed = not np.iscomplexobj(f.values)
    starts = np.arange(f.support_lo, f.support_hi + 1, dtype=np.int64)
    vals = sup_profile(f.values, f.support_lo, 1, starts, np.ones(len(starts), dtype=np.int64), signed=signed)
    inner = float(np.sum(vals ** 2))
    prefix = np.cumsum(f.values)
    prefix = prefix.real if signed else np.abs(prefix)
    return inner + _left_tail_sq(prefix)


def classic_maximal_checks(phi: FiniteSignal, lam) -> Tuple[InequalityRecord, InequalityRecord]:
    """Weak (1,1) with constant 2 and the l2 bound with constant 2."""
    count = classic_weak_count(phi, lam)
    weak = InequalityRecord("classic_weak", float(count), 2 * float(phi.l1) / float(lam))
    lhs = strong_maximal_l2sq(phi) ** 0.5
    strong = InequalityRecord("strong_l2", lhs, 2 * float(phi.l2sq) ** 0.5 * (1 + 1e-12))
    return weak, strong
