"""
Inductive parameter ledger for the block construction.

Each block m carries (beta_prev, beta, K, primes, p, Q, d, gamma, count).
extend_ledger appends block m and, in the same step, fixes the end of
block m-1 (beta_{m-1}) and its element count. Every inequality the
construction relies on is evaluated by check_constraints in exact
rational arithmetic; no floats are used anywhere in this module.
"""
import json
import logging
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from math import prod
from typing import Dict, List, Optional, Tuple

import config
from errors import (
    ConstraintViolation,
    InfeasibleAtScale,
    MissingBlock,
    MissingCount,
    NoPrimeWindow,
    ConfigError,
)
from utils import (
    consecutive_primes,
    count_survivors,
    is_prime,
    iter_primes,
    rational_from_json,
    rational_to_json,
)

logger = logging.getLogger(__name__)

F = Fraction


@dataclass(frozen=True)
class ConstantTable:
    """
    Numeric constants of the construction. The faithful table reproduces
    the literal values; the demo table keeps every inequality's shape with
    constants small enough to build several blocks on a laptop.
    """
    profile: str
    gamma_beta: Fraction
    gamma_small: Fraction
    gamma_flat_until: int
    gamma_scale: Fraction
    k_growth_base: Fraction
    spacing_factor: Fraction
    spacing_rhs: Fraction
    period_margin: Fraction
    count_margin: Fraction
    prefix_weight_factor: Fraction
    prefix_tail_factor: Fraction
    early_mass_factor: Fraction
    cross_mass_factor: Fraction
    offset_mass_factor: Fraction
    count_growth_factor: Fraction
    count_ratio_factor: Fraction
    tail_mass_factor: Fraction
    base_beta: int = 10
    min_primes: int = 2

    def __post_init__(self):
        for f in fields(self):
            if f.name == "profile":
                continue
            value = getattr(self, f.name)
            if value <= 0:
                raise ConfigError(f"constant {f.name} must be positive, got {value}")
        if self.gamma_beta >= 1:
            raise ConfigError(f"gamma_beta must be below 1, got {self.gamma_beta}")

    def k_growth_threshold(self, m: int) -> Fraction:
        return F(1, 2 ** (m + 1))

    def k_growth_factor(self, m: int) -> Fraction:
        return self.k_growth_base * 4 ** (m + 1)

    def with_overrides(self, overrides: Dict[str, str]) -> "ConstantTable":
        """Return a copy with some entries replaced; values are parsed exactly."""
        known = {f.name: f.type for f in fields(self)}
        changes = {}
        for name, raw in overrides.items():
            if name not in known:
                raise ConfigError(f"unknown constant: {name}")
            if name == "profile":
                changes[name] = str(raw)
            elif name in ("gamma_flat_until", "base_beta", "min_primes"):
                changes[name] = int(raw)
            else:
                try:
                    changes[name] = Fraction(str(raw))
                except (ValueError, ZeroDivisionError):
                    raise ConfigError(f"constant {name}: not a rational number: {raw!r}")
        return replace(self, **changes)

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = rational_to_json(value) if isinstance(value, Fraction) else value
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConstantTable":
        kwargs = {}
        for f in fields(cls):
            value = obj[f.name]
            kwargs[f.name] = rational_from_json(value) if isinstance(value, dict) else value
        return cls(**kwargs)


def default_constants() -> ConstantTable:
    """The literal constants of the construction."""
    return ConstantTable(
        profile="faithful",
        gamma_beta=F(1, 1000),
        gamma_small=F(1, 8),
        gamma_flat_until=3,
        gamma_scale=F(2000),
        k_growth_base=F(32 * 10 ** 4),
        spacing_factor=F(4),
        spacing_rhs=F(1, 200),
        period_margin=F(10 ** 4),
        count_margin=F(100),
        prefix_weight_factor=F(3),
        prefix_tail_factor=F(100),
        early_mass_factor=F(200),
        cross_mass_factor=F(10 ** 7),
        offset_mass_factor=F(200),
        count_growth_factor=F(100),
        count_ratio_factor=F(1),
        tail_mass_factor=F(200),
    )


def demo_constants() -> ConstantTable:
    """
    Desk-scale table: same inequalities, constants chosen so five blocks end
    past 10**6 while block 1 stays shorter than 10**4.
    """
    return ConstantTable(
        profile="demo",
        gamma_beta=F(3, 4),
        gamma_small=F(1, 5),
        gamma_flat_until=10 ** 6,
        gamma_scale=F(2000),
        k_growth_base=F(1, 10 ** 12),
        spacing_factor=F(4),
        spacing_rhs=F(10 ** 7),
        period_margin=F(1),
        count_margin=F(1, 2),
        prefix_weight_factor=F(1, 10 ** 9),
        prefix_tail_factor=F(1, 10 ** 9),
        early_mass_factor=F(1, 10 ** 9),
        cross_mass_factor=F(1, 10 ** 15),
        offset_mass_factor=F(1, 10 ** 15),
        count_growth_factor=F(1, 1000),
        count_ratio_factor=F(1, 10),
        tail_mass_factor=F(1, 10 ** 15),
    )


def constants_for_profile(profile: str) -> ConstantTable:
    if profile == "faithful":
        return default_constants()
    if profile == "demo":
        return demo_constants()
    raise ConfigError(f"unknown profile: {profile}")


@dataclass(frozen=True)
class ResourceBounds:
    """Caller-supplied limits; exceeding one raises InfeasibleAtScale."""
    max_primes: int = config.MAX_PRIMES
    max_prime: int = config.MAX_PRIME
    max_beta: int = config.MAX_BETA


@dataclass(frozen=True)
class BlockParams:
    m: int
    beta_prev: int
    beta: Optional[int]
    K: int
    primes: Tuple[int, ...]
    p: int
    Q: Fraction
    d: int
    gamma: Fraction
    count: Optional[int] = None

    @property
    def closed(self) -> bool:
        return self.beta is not None and self.count is not None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "beta_prev": self.beta_prev,
            "beta": self.beta,
            "K": self.K,
            "primes": list(self.primes),
            "p": self.p,
            "Q": rational_to_json(self.Q),
            "d": self.d,
            "gamma": rational_to_json(self.gamma),
            "count": self.count,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BlockParams":
        return cls(
            m=obj["m"],
            beta_prev=obj["beta_prev"],
            beta=obj["beta"],
            K=obj["K"],
            primes=tuple(obj["primes"]),
            p=obj["p"],
            Q=rational_from_json(obj["Q"]),
            d=obj["d"],
            gamma=rational_from_json(obj["gamma"]),
            count=obj["count"],
        )


@dataclass(frozen=True)
class Ledger:
    constants: ConstantTable
    blocks: Tuple[BlockParams, ...] = ()

    @property
    def M(self) -> int:
        return len(self.blocks)

    def block(self, m: int) -> BlockParams:
        if m < 1 or m > len(self.blocks):
            raise MissingBlock(f"block {m} is not in the ledger (M = {self.M})")
        return self.blocks[m - 1]

    def beta(self, i: int) -> int:
        """beta_i; beta_0 = 0."""
        if i <= 0:
            return 0
        b = self.block(i)
        if b.beta is None:
            raise MissingBlock(f"block {i} is still open, beta_{i} is not chosen")
        return b.beta

    def nbar_at(self, i: int) -> int:
        """N-bar_i, the number of sequence elements below beta_i; zero for i <= 0."""
        if i <= 0:
            return 0
        total = 0
        for b in self.blocks[:i]:
            if b.count is None:
                raise MissingCount(f"count of block {b.m} is not computed yet")
            total += b.count
        if i > self.M:
            raise MissingBlock(f"block {i} is not in the ledger (M = {self.M})")
        return total

    @property
    def nbar(self) -> Tuple[int, ...]:
        """N-bar_0 .. N-bar_j over the counted prefix of blocks."""
        out = [0]
        for b in self.blocks:
            if b.count is None:
                break
            out.append(out[-1] + b.count)
        return tuple(out)

    @property
    def horizon(self) -> int:
        """beta of the last closed block."""
        closed = [b.beta for b in self.blocks if b.closed]
        return closed[-1] if closed else 0

    def to_json(self) -> dict:
        return {
            "constants": self.constants.to_json(),
            "blocks": [b.to_json() for b in self.blocks],
            "nbar": list(self.nbar),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "Ledger":
        return cls(
            constants=ConstantTable.from_json(obj["constants"]),
            blocks=tuple(BlockParams.from_json(b) for b in obj["blocks"]),
        )

    @classmethod
    def loads(cls, text: str) -> "Ledger":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str = "<"

    @property
    def satisfied(self) -> bool:
        if self.relation == "<":
            return self.lhs < self.rhs
        if self.relation == "<=":
            return self.lhs <= self.rhs
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": rational_to_json(self.lhs),
            "rhs": rational_to_json(self.rhs),
            "relation": self.relation,
            "satisfied": self.satisfied,
        }


@dataclass(frozen=True)
class ConstraintReport:
    m: int
    profile: str
    records: Tuple[ConstraintRecord, ...] = field(default_factory=tuple)

    @property
    def overall(self) -> bool:
        return all(r.satisfied for r in self.records)

    def record(self, name: str) -> ConstraintRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> List[ConstraintRecord]:
        return [r for r in self.records if not r.satisfied]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "profile": self.profile,
            "overall": self.overall,
            "records": [r.to_json() for r in self.records],
        }


def new_ledger(constants: ConstantTable) -> Ledger:
    """Ledger holding only the open first block: K=1, q=1, p=1, Q=1, d=1."""
    first = BlockParams(
        m=1, beta_prev=0, beta=None, K=1, primes=(1,), p=1, Q=F(1), d=1,
        gamma=constants.gamma_small,
    )
    return Ledger(constants=constants, blocks=(first,))


def gamma_for(constants: ConstantTable, m: int, nbar_m_minus_2: int) -> Fraction:
    if m <= constants.gamma_flat_until:
        return constants.gamma_small
    return 1 / (constants.gamma_scale * (m + 1) * nbar_m_minus_2)


def _base_records(ledger: Ledger) -> List[ConstraintRecord]:
    c = ledger.constants
    b = ledger.block(1)
    records = [
        ConstraintRecord("base_k", F(b.K), F(1), "=="),
        ConstraintRecord("base_prime", F(b.primes[0]), F(1), "=="),
        ConstraintRecord("base_p", F(b.p), F(1), "=="),
        ConstraintRecord("base_q", b.Q, F(1), "=="),
        ConstraintRecord("base_beta_prev", F(b.beta_prev), F(0), "=="),
        ConstraintRecord("gamma_rule", b.gamma, c.gamma_small, "=="),
    ]
    if b.beta is not None:
        records.append(ConstraintRecord("base_beta", F(c.base_beta), F(b.beta)))
    return records


def _terminal_record(ledger: Ledger, m: int) -> List[ConstraintRecord]:
    """beta_growth for the end of the last block, which no later step fixes."""
    b = ledger.block(m)
    if m != ledger.M or b.beta is None:
        return []
    c = ledger.constants
    return [ConstraintRecord("beta_growth_terminal", F(b.beta_prev + 2 * b.p), c.gamma_beta / 2 * b.beta)]


def _prime_records(ledger: Ledger, m: int) -> List[ConstraintRecord]:
    """Records fixed once K_m and the primes are chosen; beta_{m-1} does not enter."""
    c = ledger.constants
    b = ledger.block(m)
    a = ledger.block(m - 1)
    n2 = ledger.nbar_at(m - 2)
    qmin, qmax = min(b.primes), max(b.primes)
    records = [
        ConstraintRecord("min_primes", F(c.min_primes), F(b.K), "<="),
        ConstraintRecord("primes_distinct", F(len(set(b.primes))), F(b.K), "=="),
        ConstraintRecord("primes_are_prime", F(sum(1 for q in b.primes if is_prime(q))), F(b.K), "=="),
        ConstraintRecord("primes_above_d", F(b.d), F(qmin)),
        ConstraintRecord("prime_spread", F(qmax, qmin), F(2)),
        ConstraintRecord("period_product", F(b.p), F(prod(b.primes)), "=="),
        ConstraintRecord("density_sum", b.Q, sum(F(1, q) for q in b.primes), "=="),
        ConstraintRecord("period_growth", F(a.p), F(b.p)),
        ConstraintRecord("density_decrease", b.Q, a.Q),
        ConstraintRecord("d_growth", F(a.d), F(b.d), "<="),
        ConstraintRecord("gamma_rule", b.gamma, gamma_for(c, m, n2), "=="),
        ConstraintRecord("k_growth", F(n2) * c.k_growth_factor(m) / b.K, c.k_growth_threshold(m)),
        ConstraintRecord(
            "spacing",
            F(n2) * c.spacing_factor * b.K ** 2 * F(b.d + 1, qmin),
            c.spacing_rhs / (m + 1),
        ),
        ConstraintRecord("deletion_share", F(2 * b.K * (b.d + 1), qmin), b.gamma),
        ConstraintRecord("gamma_margin", F(3, 4), 1 - b.gamma),
    ]
    if m > c.gamma_flat_until and ledger.nbar_at(m - 3) > 0:
        records.append(
            ConstraintRecord("gamma_decay", b.gamma, 1 / (c.gamma_scale * m * ledger.nbar_at(m - 3)))
        )
    return records


def _beta_records(ledger: Ledger, m: int) -> List[ConstraintRecord]:
    """Records that depend on beta_{m-1} and the count of block m-1."""
    c = ledger.constants
    b = ledger.block(m)
    a = ledger.block(m - 1)
    beta1 = b.beta_prev
    beta2 = a.beta_prev
    n1, n2, n3 = ledger.nbar_at(m - 1), ledger.nbar_at(m - 2), ledger.nbar_at(m - 3)
    if n1 == 0:
        raise MissingCount(f"N-bar_{m - 1} is zero; block {m - 1} holds no elements")
    nsum = sum(ledger.nbar_at(i) for i in range(1, m - 1))
    records = [
        ConstraintRecord("block_link", F(a.beta if a.beta is not None else -1), F(beta1), "=="),
        ConstraintRecord("beta_aligned", F(beta1 % b.p), F(1)),
        ConstraintRecord("period_spacing", F(b.p), F(beta1 - beta2) / c.period_margin),
        ConstraintRecord("prefix_weight", F(nsum * n3, n1), 1 / (c.prefix_weight_factor * m)),
        ConstraintRecord("period_vs_count", F(b.p), F(n1) / c.count_margin),
        ConstraintRecord("beta_growth", F(beta2 + 2 * a.p), c.gamma_beta / 2 * beta1),
        ConstraintRecord("prefix_weight_tail", F(nsum * n3, n1), 1 / (c.prefix_tail_factor * m)),
        ConstraintRecord("early_mass", F(n3 * 3 * b.p, n1), 1 / (c.early_mass_factor * m)),
        ConstraintRecord("cross_mass", F((m + 1) * n2 * b.p * n3, n1), 1 / (c.cross_mass_factor * m)),
        ConstraintRecord(
            "offset_mass",
            n3 * 2 * (beta2 + c.period_margin * b.p * n2 * (m + 1)) / n1,
            1 / (c.offset_mass_factor * m),
        ),
        ConstraintRecord("count_growth", F(n2), F(n1 - n2) / (c.count_growth_factor * m)),
        ConstraintRecord("count_ratio", F(n2, n1), 1 / (c.count_ratio_factor * m)),
        ConstraintRecord(
            "tail_mass",
            2 * c.period_margin * b.p * n2 * (m + 1) * F(n3, beta1),
            1 / (c.tail_mass_factor * m),
        ),
    ]
    if m == 2:
        records.append(ConstraintRecord("base_beta", F(c.base_beta), F(beta1)))
    return records


def check_constraints(ledger: Ledger, m: int) -> ConstraintReport:
    """
    Evaluate every inequality chosen at step m: block m's primes and period,
    and the end beta_{m-1} of the previous block with its count.
    """
    ledger.block(m)
    if m == 1:
        records = _base_records(ledger)
    else:
        records = _prime_records(ledger, m) + _beta_records(ledger, m)
    records += _terminal_record(ledger, m)
    return ConstraintReport(m=m, profile=ledger.constants.profile, records=tuple(records))


def minimal_k(constants: ConstantTable, m: int, nbar_m_minus_2: int) -> int:
    """Smallest K >= min_primes with factor * N-bar_{m-2} / K below the threshold."""
    ratio = constants.k_growth_factor(m) * nbar_m_minus_2 / constants.k_growth_threshold(m)
    return max(constants.min_primes, ratio.numerator // ratio.denominator + 1)


def _replace_block(ledger: Ledger, block: BlockParams) -> Ledger:
    blocks = list(ledger.blocks)
    blocks[block.m - 1] = block
    return replace(ledger, blocks=tuple(blocks))


def _count_block(block: BlockParams, beta: int) -> int:
    return count_survivors(block.primes, block.d, block.beta_prev, beta)


def _choose_primes(ledger: Ledger, m: int, K: int, d: int, bounds: ResourceBounds) -> BlockParams:
    c = ledger.constants
    a = ledger.block(m - 1)
    gamma = gamma_for(c, m, ledger.nbar_at(m - 2))
    for q0 in iter_primes(d + 1, bounds.max_prime):
        primes = consecutive_primes(q0, K, bounds.max_prime)
        if len(primes) < K:
            break
        if primes[-1] >= 2 * q0:
            continue
        p = prod(primes)
        candidate = BlockParams(
            m=m, beta_prev=a.beta_prev, beta=None, K=K, primes=tuple(primes), p=p,
            Q=sum(F(1, q) for q in primes), d=d, gamma=gamma,
        )
        trial = replace(ledger, blocks=ledger.blocks + (candidate,))
        failed = [r.name for r in _prime_records(trial, m) if not r.satisfied]
        if not failed:
            logger.debug(f"block {m}: primes {primes} accepted")
            return candidate
        logger.debug(f"block {m}: window at {q0} rejected by {failed}")
    raise NoPrimeWindow(f"block {m}: no window of {K} primes above {d} below {bounds.max_prime}")


def _with_beta(ledger: Ledger, m: int, beta: int) -> Ledger:
    """Close block m-1 at beta and point block m at it."""
    a = ledger.block(m - 1)
    b = ledger.block(m)
    closed = replace(a, beta=beta, count=_count_block(a, beta))
    opened = replace(b, beta_prev=beta)
    return _replace_block(_replace_block(ledger, closed), opened)


def _beta_ok(ledger: Ledger, m: int, beta: int) -> bool:
    return all(r.satisfied for r in _beta_records(_with_beta(ledger, m, beta), m))


def _smallest_beta(ledger: Ledger, m: int, bounds: ResourceBounds) -> int:
    """
    Smallest multiple of p_m passing the beta records. Every such record
    only gets easier as beta grows, so a doubling search followed by
    bisection over the multiples finds it.
    """
    c = ledger.constants
    a = ledger.block(m - 1)
    p = ledger.block(m).p
    lower = max(
        F(a.beta_prev),
        F(c.base_beta) if m == 2 else F(0),
        (a.beta_prev + 2 * a.p) * 2 / c.gamma_beta,
        a.beta_prev + c.period_margin * p,
    )
    k_lo = lower.numerator // (lower.denominator * p) + 1
    if k_lo * p > bounds.max_beta:
        raise InfeasibleAtScale(m - 1, "beta", k_lo * p, bounds.max_beta)
    if _beta_ok(ledger, m, k_lo * p):
        return k_lo * p
    step = 1
    k_hi = k_lo + step
    while not _beta_ok(ledger, m, k_hi * p):
        k_lo = k_hi
        step *= 2
        k_hi = k_lo + step
        if k_hi * p > bounds.max_beta:
            raise InfeasibleAtScale(m - 1, "beta", k_hi * p, bounds.max_beta)
    while k_hi - k_lo > 1:
        mid = (k_lo + k_hi) // 2
        if _beta_ok(ledger, m, mid * p):
            k_hi = mid
        else:
            k_lo = mid
    return k_hi * p


def extend_ledger(
    ledger: Ledger,
    bounds: Optional[ResourceBounds] = None,
    beta_prev: Optional[int] = None,
    d: Optional[int] = None,
) -> Ledger:
    """
    Append block m = M+1 under the ledger's ConstantTable and close block M.

    d_m defaults to m. K_m is the smallest value allowed by k_growth. The primes
    are the first window of K_m consecutive primes above d_m, all below
    twice the first, passing spacing, deletion_share and the growth records. beta_{m-1}
    is the smallest admissible multiple of p_m unless the caller supplies
    one, in which case it is validated as given.
    """
    bounds = bounds or ResourceBounds()
    m = ledger.M + 1
    last = ledger.block(ledger.M)
    if last.beta is not None:
        raise ConstraintViolation(f"block {last.m} is already closed; the ledger is final")
    c = ledger.constants
    d = m if d is None else d

    K = minimal_k(c, m, ledger.nbar_at(m - 2))
    if K > bounds.max_primes:
        raise InfeasibleAtScale(m, "K", K, bounds.max_primes)

    block = _choose_primes(ledger, m, K, d, bounds)
    grown = replace(ledger, blocks=ledger.blocks + (block,))
    if beta_prev is None:
        beta_prev = _smallest_beta(grown, m, bounds)
    grown = _with_beta(grown, m, beta_prev)

    report = check_constraints(grown, m)
    if not report.overall:
        names = ", ".join(r.name for r in report.failures())
        raise ConstraintViolation(f"block {m}: constraints failed: {names}", report)
    logger.info(
        f"block {m}: K={K} primes={block.primes} p={block.p} Q={block.Q}; "
        f"beta_{m - 1}={beta_prev} N-bar_{m - 1}={grown.nbar_at(m - 1)}"
    )
    return grown


def close_ledger(ledger: Ledger, bounds: Optional[ResourceBounds] = None) -> Ledger:
    """
    Fix beta_M for the last block as the smallest multiple of p_M meeting
    beta_growth (and the base bound when M = 1), and count its elements.
    """
    bounds = bounds or ResourceBounds()
    M = ledger.M
    b = ledger.block(M)
    if b.beta is not None:
        return ledger
    c = ledger.constants
    lower = max(F(b.beta_prev + 2 * b.p) * 2 / c.gamma_beta, F(c.base_beta) if M == 1 else F(0))
    beta = (lower.numerator // (lower.denominator * b.p) + 1) * b.p
    if beta > bounds.max_beta:
        raise InfeasibleAtScale(M, "beta", beta, bounds.max_beta)
    closed = _replace_block(ledger, replace(b, beta=beta, count=_count_block(b, beta)))
    logger.info(f"block {M} closed at beta_{M}={beta} with {closed.block(M).count} elements")
    return closed


def build_ledger(
    constants: ConstantTable,
    horizon: int,
    bounds: Optional[ResourceBounds] = None,
    close: bool = True,
) -> Ledger:
    """Extend a fresh ledger to `horizon` blocks, closing the last one when asked."""
    if horizon < 1:
        raise ConfigError(f"horizon must be at least 1, got {horizon}")
    ledger = new_ledger(constants)
    while ledger.M < horizon:
        ledger = extend_ledger(ledger, bounds)
    return close_ledger(ledger, bounds) if close else ledger


def check_all(ledger: Ledger) -> List[ConstraintReport]:
    return [check_constraints(ledger, m) for m in range(1, ledger.M + 1)]


def ledger_invariants(ledger: Ledger) -> List[ConstraintRecord]:
    """Ledger-wide monotonicity: Q nonincreasing, p increasing, N-bar nondecreasing, d growing."""
    records = []
    for m in range(2, ledger.M + 1):
        a, b = ledger.block(m - 1), ledger.block(m)
        records.append(ConstraintRecord(f"q_nonincreasing[{m}]", b.Q, a.Q, "<="))
        records.append(ConstraintRecord(f"p_increasing[{m}]", F(a.p), F(b.p)))
        if m >= 3:
            records.append(ConstraintRecord(f"d_strict_every_2[{m}]", F(ledger.block(m - 2).d), F(b.d)))
    nbar = ledger.nbar
    for i in range(1, len(nbar)):
        records.append(ConstraintRecord(f"nbar_nondecreasing[{i}]", F(nbar[i - 1]), F(nbar[i]), "<="))
    return records
