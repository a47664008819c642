from fractions import Fraction

import pytest

from errors import ConfigError, ConstraintViolation, InfeasibleAtScale, MissingBlock
from ledger import (
    BlockParams,
    ConstraintRecord,
    Ledger,
    ResourceBounds,
    build_ledger,
    check_all,
    check_constraints,
    close_ledger,
    default_constants,
    demo_constants,
    extend_ledger,
    gamma_for,
    ledger_invariants,
    minimal_k,
    new_ledger,
)


def test_first_block_defaults():
    ledger = new_ledger(demo_constants())
    b = ledger.block(1)
    assert (b.K, b.primes, b.p, b.Q, b.d, b.beta_prev) == (1, (1,), 1, 1, 1, 0)
    assert b.beta is None
    assert check_constraints(ledger, 1).overall
    assert ledger.beta(0) == 0
    with pytest.raises(MissingBlock):
        ledger.beta(1)
    with pytest.raises(MissingBlock):
        ledger.block(2)


def test_faithful_blocks_one_and_two(faithful_open_ledger):
    ledger = faithful_open_ledger
    assert ledger.M == 2
    b2 = ledger.block(2)
    assert b2.K == 2
    assert b2.primes == (97, 101)
    assert b2.p == 9797
    assert b2.Q == Fraction(1, 97) + Fraction(1, 101)
    assert ledger.beta(1) == 97_979_797
    assert ledger.nbar_at(1) == 97_979_797
    assert b2.beta is None
    for report in check_all(ledger):
        assert report.overall, report.failures()


def test_faithful_zero_prefix_records(faithful_open_ledger):
    report = check_constraints(faithful_open_ledger, 2)
    for name in ("k_growth", "spacing", "prefix_weight_tail"):
        assert report.record(name).lhs == 0


def test_faithful_third_block_is_infeasible(faithful_open_ledger):
    with pytest.raises(InfeasibleAtScale) as info:
        extend_ledger(faithful_open_ledger, ResourceBounds(max_beta=10 ** 9))
    exc = info.value
    assert exc.m == 3 and exc.what == "K"
    assert exc.required_k == 320_000 * 4 ** 4 * 2 ** 4 * 97_979_797 + 1
    assert exc.required_k > 10 ** 12


def test_faithful_beta_bound_is_reported():
    with pytest.raises(InfeasibleAtScale) as info:
        build_ledger(default_constants(), 2, ResourceBounds(max_beta=10 ** 7), close=False)
    assert info.value.what == "beta"
    assert info.value.required_k is None


def test_demo_primes(demo_ledger):
    primes = [demo_ledger.block(m).primes for m in range(2, 6)]
    assert primes == [(61, 67), (83, 89), (101, 103), (127, 131)]
    betas = [demo_ledger.beta(m) for m in range(1, 6)]
    assert betas == [8174, 44322, 166448, 515747, 1480693]
    assert demo_ledger.beta(1) < 10 ** 4
    assert demo_ledger.horizon == 1480693


def test_demo_ledger_passes_every_record(demo_ledger):
    for report in check_all(demo_ledger):
        assert report.overall, [r.name for r in report.failures()]
    for record in ledger_invariants(demo_ledger):
        assert record.satisfied, record.name


def test_demo_ledger_structure(demo_ledger):
    for m in range(2, demo_ledger.M + 1):
        b = demo_ledger.block(m)
        assert b.beta_prev == demo_ledger.beta(m - 1)
        assert b.beta_prev % b.p == 0
        assert b.d == m
        assert max(b.primes) < 2 * min(b.primes)
        assert 0 < b.gamma < 1
    last = demo_ledger.block(demo_ledger.M)
    assert last.closed and last.beta % last.p == 0
    nbar = demo_ledger.nbar
    assert len(nbar) == demo_ledger.M + 1
    assert all(a <= b for a, b in zip(nbar, nbar[1:]))
    assert demo_ledger.horizon == last.beta


def test_ledger_json_roundtrip(small_ledger):
    again = Ledger.loads(small_ledger.dumps())
    assert again == small_ledger
    assert again.nbar == small_ledger.nbar


def test_closed_ledger_cannot_extend(small_ledger):
    with pytest.raises(ConstraintViolation):
        extend_ledger(small_ledger)


def test_caller_beta_is_validated():
    ledger = new_ledger(demo_constants())
    with pytest.raises(ConstraintViolation):
        extend_ledger(ledger, beta_prev=4087)


def test_close_is_idempotent(small_ledger):
    assert close_ledger(small_ledger) is small_ledger


def test_minimal_k():
    c = demo_constants()
    assert minimal_k(c, 2, 0) == 2
    faithful = default_constants()
    assert minimal_k(faithful, 3, 1) == 320_000 * 4 ** 4 * 2 ** 4 + 1


def test_constant_overrides():
    c = demo_constants().with_overrides({"gamma_small": "1/4", "period_margin": "20"})
    assert c.gamma_small == Fraction(1, 4)
    assert c.period_margin == 20
    with pytest.raises(ConfigError):
        demo_constants().with_overrides({"nope": "1"})
    with pytest.raises(ConfigError):
        demo_constants().with_overrides({"gamma_beta": "0"})
    with pytest.raises(ConfigError):
        demo_constants().with_overrides({"gamma_beta": "3/2"})
    with pytest.raises(ConfigError):
        build_ledger(demo_constants(), 0)


def test_constant_table_json():
    c = default_constants()
    assert type(c).from_json(c.to_json()) == c


def test_constraint_record_relations():
    assert ConstraintRecord("a", Fraction(1), Fraction(2)).satisfied
    assert not ConstraintRecord("a", Fraction(2), Fraction(2)).satisfied
    assert ConstraintRecord("a", Fraction(2), Fraction(2), "<=").satisfied
    assert ConstraintRecord("a", Fraction(2), Fraction(2), "==").satisfied
    record = ConstraintRecord("a", Fraction(1, 3), Fraction(1, 2)).to_json()
    assert record["lhs"] == {"num": "1", "den": "3"}
    assert record["satisfied"] is True


def test_gamma_decays_past_the_flat_stretch():
    c = default_constants()
    assert gamma_for(c, 3, 10 ** 8) == c.gamma_small
    assert gamma_for(c, 4, 97_979_797) == Fraction(1, 2000 * 5 * 97_979_797)
    assert gamma_for(c, 7, 12) == Fraction(1, 2000 * 8 * 12)
    assert gamma_for(demo_constants(), 5, 10 ** 5) == Fraction(1, 5)


def test_toy_block_fails_the_deletion_share():
    c = demo_constants()
    first = BlockParams(
        m=1, beta_prev=0, beta=15, K=1, primes=(1,), p=1, Q=Fraction(1), d=1, gamma=c.gamma_small, count=15,
    )
    toy = BlockParams(
        m=2, beta_prev=15, beta=None, K=2, primes=(3, 5), p=15, Q=Fraction(8, 15), d=2, gamma=c.gamma_small,
    )
    report = check_constraints(Ledger(constants=c, blocks=(first, toy)), 2)
    record = report.record("deletion_share")
    assert record.lhs == 4 and record.rhs == Fraction(1, 5)
    assert not record.satisfied
    assert not report.overall
    assert "deletion_share" in [r.name for r in report.failures()]
