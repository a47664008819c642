"""
Seeded randomized batteries for the grid operators.

Every trial draws its signal from its own PCG64 stream, seeded from the run
seed, the test name and the trial index, so a failing record replays on its
own. Violations are shrunk greedily and dumped with the full signal.
"""
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import GridRatioError
from utils import make_rng
from zops import (
    FiniteSignal,
    GridContext,
    InequalityRecord,
    classic_maximal_checks,
    dft,
    fourier_support_error,
    grid_parts,
    idft,
    l2_B0star_check,
    maximal_B0,
    maximal_BK,
    opB,
    opB0,
    opB0_j,
    opB_j,
    orthogonality_error,
    parseval_residual,
    rep_B0_j,
    rep_maximal_B0_j,
    rep_maximal_BK,
    weak11_check,
)

logger = logging.getLogger(__name__)

CONTEXTS: Tuple[Tuple[int, ...], ...] = ((2, 3), (3, 5), (5, 7), (5, 7, 11))
IDENTITY_CONTEXTS: Tuple[Tuple[int, ...], ...] = ((2, 3), (3, 5), (5, 7))
FOURIER_PERIODS: Tuple[Tuple[int, ...], ...] = ((2, 3), (3, 5), (5, 7))
TOLERANCE = 1e-9
ORTHO_TOLERANCE = 1e-12


def trial_seed(seed: int, test: str, trial: int) -> int:
    """64-bit seed of one trial, stable across runs and platforms."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(test.encode()), trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def context_for(primes: Sequence[int]) -> GridContext:
    """Contexts outside the ratio condition still run, with the flag recorded."""
    try:
        return GridContext(primes)
    except GridRatioError:
        logger.warning(f"grid {tuple(primes)} breaks the ratio condition; running it unchecked")
        return GridContext(primes, strict=False)


def random_signal(
    rng: np.random.Generator,
    p: int,
    exact: bool = False,
    nonneg: bool = False,
    complex_values: bool = False,
) -> FiniteSignal:
    """Integer-valued signal of length up to 2p starting within two periods of 0."""
    length = int(rng.integers(1, 2 * p + 1))
    lo = int(rng.integers(-2 * p, 2 * p + 1))
    bound = int(rng.integers(1, 10))
    low = 0 if nonneg else -bound
    values = rng.integers(low, bound + 1, size=length)
    if complex_values:
        values = values + 1j * rng.integers(low, bound + 1, size=length)
        return FiniteSignal.make(lo, values.astype(np.complex128))
    if exact:
        return FiniteSignal.make(lo, [int(v) for v in values], exact=True)
    return FiniteSignal.make(lo, values.astype(np.float64))


@dataclass
class TrialRecord:
    test: str
    ctx: Optional[Tuple[int, ...]]
    seed: int
    lhs: float
    rhs: float
    passed: bool
    lam: Optional[float] = None
    ratio_ok: Optional[bool] = None
    counterexample: Optional[dict] = None

    @property
    def ratio(self) -> float:
        return 0.0 if self.rhs == 0 else self.lhs / self.rhs

    def to_json(self) -> dict:
        out = {
            "test": self.test,
            "ctx": None if self.ctx is None else list(self.ctx),
            "seed": self.seed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "pass": self.passed,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.ratio_ok is not None:
            out["ratio_ok"] = self.ratio_ok
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def shrink(phi: FiniteSignal, fails: Callable[[FiniteSignal], bool], rounds: int = 200) -> FiniteSignal:
    """
    Greedy shrinking: drop an end sample, zero a value, or halve a value
    toward zero, keeping each step only while the signal still fails.
    """
    current = phi
    for _ in range(rounds):
        changed = False
        vals = current.values
        candidates = []
        if len(vals) > 1:
            candidates.append(FiniteSignal(current.support_lo + 1, vals[1:]))
            candidates.append(FiniteSignal(current.support_lo, vals[:-1]))
        for i, v in enumerate(vals.tolist()):
            if v != 0:
                for new in (0, v / 2 if not current.exact else Fraction(v) / 2):
                    trial = vals.copy()
                    trial[i] = new
                    candidates.append(FiniteSignal(current.support_lo, trial))
        for cand in candidates:
            if fails(cand):
                current, changed = cand, True
                break
        if not changed:
            break
    return current


# One check per battery; each returns an InequalityRecord for (phi, ctx, rng)

def _lam(rng: np.random.Generator, phi: FiniteSignal) -> float:
    return float(max(phi.bound_M, 1)) * float(rng.uniform(0.05, 1.0))


def check_classic_weak(phi, ctx, lam) -> InequalityRecord:
    return classic_maximal_checks(phi, lam)[0]


def check_strong_l2(phi, ctx, lam) -> InequalityRecord:
    return classic_maximal_checks(phi, lam)[1]


def check_weak11(phi, ctx, lam) -> InequalityRecord:
    return weak11_check(phi, ctx, lam)


def check_l2_B0star(phi, ctx, lam) -> InequalityRecord:
    return l2_B0star_check(phi, ctx)


def weight_bound_B(phi: FiniteSignal, ctx: GridContext, n: int, N: int) -> InequalityRecord:
    """B(phi, n, N) <= (2/K) sum_j B_j(phi, n, N) for phi >= 0."""
    lhs = float(opB(phi, ctx, n, N))
    rhs = 2.0 / ctx.K * sum(float(opB_j(phi, ctx, n, N, j)) for j in range(ctx.K))
    return InequalityRecord("weight_B", lhs, rhs * (1 + TOLERANCE))


def weight_bound_B0(phi: FiniteSignal, ctx: GridContext, n: int, N: int) -> InequalityRecord:
    """|B0(phi, n, N)| <= (2/K) sum_j |B0_j(phi, n, N)|."""
    lhs = abs(float(opB0(phi, ctx, n, N)))
    rhs = 2.0 / ctx.K * sum(abs(float(opB0_j(phi, ctx, n, N, j))) for j in range(ctx.K))
    return InequalityRecord("weight_B0", lhs, rhs * (1 + TOLERANCE))


@dataclass(frozen=True)
class Battery:
    name: str
    check: Callable[[FiniteSignal, Optional[GridContext], float], InequalityRecord]
    needs_ctx: bool = True
    nonneg: bool = False
    contexts: Tuple[Tuple[int, ...], ...] = IDENTITY_CONTEXTS


def _weight_check(bound):
    def check(phi, ctx, lam):
        # n and N derive from the signal so a shrunk signal replays the same point
        n = phi.support_lo + len(phi.values) // 2
        N = 1 + (len(phi.values) * 7) % (3 * ctx.p)
        return bound(phi, ctx, n, N)
    return check


BATTERIES: Dict[str, Battery] = {
    b.name: b
    for b in (
        Battery("classic_weak", check_classic_weak, needs_ctx=False),
        Battery("strong_l2", check_strong_l2, needs_ctx=False),
        Battery("weak11_B", check_weak11),
        Battery("l2_B0star", check_l2_B0star, contexts=CONTEXTS),
        Battery("weight_B", _weight_check(weight_bound_B), nonneg=True),
        Battery("weight_B0", _weight_check(weight_bound_B0)),
    )
}


def run_trial(battery: Battery, ctx_primes: Optional[Tuple[int, ...]], seed: int) -> TrialRecord:
    rng = make_rng(seed)
    ctx = context_for(ctx_primes) if ctx_primes else None
    p = ctx.p if ctx else int(rng.integers(2, 40))
    phi = random_signal(rng, p, nonneg=battery.nonneg)
    lam = _lam(rng, phi)
    record = battery.check(phi, ctx, lam)
    trial = TrialRecord(
        test=battery.name, ctx=ctx_primes, seed=seed, lhs=float(record.lhs), rhs=float(record.rhs),
        passed=record.passed, lam=lam, ratio_ok=ctx.ratio_ok if ctx else None,
    )
    if not record.passed:
        small = shrink(phi, lambda s: not battery.check(s, ctx, lam).passed)
        trial.counterexample = {"lambda": lam, "signal": small.to_json(), "original": phi.to_json()}
        logger.error(f"{battery.name} violated at seed {seed} on {ctx}: {record.lhs} > {record.rhs}")
    return trial


@dataclass
class BatterySummary:
    records: List[TrialRecord] = field(default_factory=list)

    @property
    def violations(self) -> List[TrialRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.violations

    def max_ratio(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for r in self.records:
            out[r.test] = max(out.get(r.test, 0.0), r.ratio)
        return out

    def to_json(self) -> dict:
        return {
            "trials": len(self.records),
            "violations": len(self.violations),
            "max_ratio": self.max_ratio(),
            "pass": self.passed,
        }


def run_battery(
    name: str,
    trials: int,
    seed: int,
    contexts: Optional[Sequence[Tuple[int, ...]]] = None,
    workers: Optional[int] = None,
) -> BatterySummary:
    """trials draws for one battery, cycling through the grid contexts."""
    battery = BATTERIES[name]
    contexts = contexts or battery.contexts
    jobs = []
    for t in range(trials):
        primes = contexts[t % len(contexts)] if battery.needs_ctx else None
        jobs.append((primes, trial_seed(seed, name, t)))
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as pool:
        records = list(pool.map(lambda job: run_trial(battery, *job), jobs))
    summary = BatterySummary(records)
    logger.info(f"battery {name}: {trials} trials, {len(summary.violations)} violations, "
                f"max ratio {summary.max_ratio().get(name, 0.0):.4f}")
    return summary


# Identity and Fourier batteries

def identity_trial(primes: Tuple[int, ...], seed: int, points: int = 6) -> TrialRecord:
    """
    Exact comparison of the definitional operators with their grid-line
    representations at a few random (n, N). lhs counts mismatches.
    """
    rng = make_rng(seed)
    ctx = context_for(primes)
    phi = random_signal(rng, ctx.p, exact=True)
    mismatches = 0
    for _ in range(points):
        n = int(rng.integers(phi.support_lo - 2 * ctx.p, phi.support_hi + ctx.p + 1))
        N = int(rng.integers(1, 3 * ctx.p + 1))
        j = int(rng.integers(ctx.K))
        if opB0_j(phi, ctx, n, N, j) != rep_B0_j(phi, ctx, n, N, j):
            mismatches += 1
        if maximal_B0(phi, ctx, n, j) != rep_maximal_B0_j(phi, ctx, n, j):
            mismatches += 1
        if maximal_BK(phi, ctx, n) != rep_maximal_BK(phi, ctx, n):
            mismatches += 1
    record = TrialRecord("representation", primes, seed, float(mismatches), 0.0, mismatches == 0)
    if mismatches:
        record.counterexample = {"signal": phi.to_json()}
        logger.error(f"representation identity broken at seed {seed} on {ctx}")
    return record


def fourier_trial(primes: Tuple[int, ...], seed: int) -> TrialRecord:
    """Roundtrip, Parseval, masked-projection and orthogonality errors on one block."""
    rng = make_rng(seed)
    ctx = context_for(primes)
    phi = random_signal(rng, ctx.p, complex_values=bool(rng.integers(2)))
    t = ctx.t(phi.support_lo)
    block = grid_parts(phi, ctx, t).block
    spec = dft(block, ctx)
    roundtrip = float(np.max(np.abs(idft(spec) - block.astype(np.complex128))))
    parseval = parseval_residual(block, spec)
    mask = fourier_support_error(phi, ctx, t)
    ortho = orthogonality_error(phi, ctx, t)
    worst = max(roundtrip, parseval, mask)
    ok = worst < TOLERANCE and ortho < ORTHO_TOLERANCE
    record = TrialRecord("fourier", primes, seed, worst, TOLERANCE, ok)
    if not record.passed:
        record.counterexample = {
            "signal": phi.to_json(), "roundtrip": roundtrip, "parseval": parseval,
            "mask": mask, "orthogonality": ortho,
        }
        logger.error(f"fourier layer off at seed {seed} on {ctx}: {record.counterexample}")
    return record


def run_identities(trials: int, seed: int, workers: Optional[int] = None) -> BatterySummary:
    jobs = [(IDENTITY_CONTEXTS[t % len(IDENTITY_CONTEXTS)], trial_seed(seed, "representation", t))
            for t in range(trials)]
    jobs_f = [(FOURIER_PERIODS[t % len(FOURIER_PERIODS)], trial_seed(seed, "fourier", t))
              for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers or config.WORKERS) as pool:
        records = list(pool.map(lambda job: identity_trial(*job), jobs))
        records += list(pool.map(lambda job: fourier_trial(*job), jobs_f))
    return BatterySummary(records)


def run_all(
    trials: int,
    seed: int,
    identity_trials: Optional[int] = None,
    workers: Optional[int] = None,
) -> BatterySummary:
    """Every inequality battery, then the identity and Fourier checks."""
    summary = BatterySummary()
    for name in BATTERIES:
        summary.records += run_battery(name, trials, seed, workers=workers).records
    n_ident = identity_trials if identity_trials is not None else min(trials, 100)
    summary.records += run_identities(n_ident, seed, workers).records
    logger.info(f"all batteries: {len(summary.records)} records, {len(summary.violations)} violations")
    return summary
