from fractions import Fraction

import numpy as np
import pytest

from errors import LedgerIncomplete, OutOfBuiltRange, WindowTooLarge
from ledger import build_ledger, demo_constants
from utils import make_rng
from sequence import (
    SequenceStore,
    banach_density,
    brute_force_block,
    build_block,
    gap_profile,
    make_block,
    verify_block,
)


def test_make_block_matches_literal_rule():
    block = make_block(2, (5, 7), 2, 35, 35 * 6)
    assert block.elements.tolist() == brute_force_block((5, 7), 2, 35, 35 * 6)
    assert block.min_gap >= 2
    # multiples of 5 in [35, 210) minus survivors divisible by 5
    assert block.deleted_per_j[0] == 35 - int(np.count_nonzero(block.elements % 5 == 0))


def test_make_block_matches_literal_rule_on_ledger_windows(demo_ledger):
    rng = make_rng(20)
    for trial in range(24):
        b = demo_ledger.block(2 + trial % 4)
        periods = int(rng.integers(3, 6))
        shift = int(rng.integers(0, b.p)) if trial % 2 else 0
        lo = b.beta_prev + shift
        hi = lo + periods * b.p + int(rng.integers(0, b.p))
        block = make_block(b.m, b.primes, b.d, lo, hi)
        assert block.elements.tolist() == brute_force_block(b.primes, b.d, lo, hi), (b.m, lo, hi)


def test_first_block_is_every_integer():
    block = make_block(1, (1,), 1, 0, 50)
    assert block.elements.tolist() == list(range(50))


def test_store_matches_ledger_counts(demo_ledger, demo_store):
    assert demo_store.M == demo_ledger.M
    assert demo_store.nbar == demo_ledger.nbar
    assert demo_store.horizon == demo_ledger.horizon
    assert len(demo_store) == demo_ledger.nbar[-1]
    assert np.all(np.diff(demo_store.elements) > 0)


def test_elements_lie_in_their_progressions(demo_ledger, demo_store):
    for m in range(2, demo_ledger.M + 1):
        b = demo_ledger.block(m)
        elements = demo_store.block(m).elements
        assert np.all((elements >= b.beta_prev) & (elements < b.beta))
        on_some = np.zeros(len(elements), dtype=bool)
        for q in b.primes:
            on_some |= elements % q == 0
        assert on_some.all()


def test_every_block_verifies(demo_ledger, demo_store):
    for m in range(1, demo_ledger.M + 1):
        report = verify_block(demo_ledger, demo_store, m)
        assert report.passed, report.to_json()
        if m >= 2:
            assert 1 - demo_ledger.block(m).gamma < report.min_ratio
            assert report.max_ratio < 1
            assert report.min_gap >= demo_ledger.block(m).d


def test_gap_profile(demo_store):
    gaps = gap_profile(demo_store)
    assert [g.m for g in gaps] == [1, 2, 3, 4, 5]
    assert gaps[0].gap == 1
    for g in gaps[1:]:
        assert g.gap >= g.m


def test_nth_and_count_range(small_store):
    assert small_store.nth(1) == 0
    assert small_store.nth(8174) == 8173
    assert small_store.count_range(0, 8174) == 8174
    assert small_store.count_range(10, 10) == 0
    with pytest.raises(OutOfBuiltRange):
        small_store.nth(0)
    with pytest.raises(OutOfBuiltRange):
        small_store.count_range(0, small_store.horizon + 1)
    with pytest.raises(OutOfBuiltRange):
        small_store.block(9)


def test_open_block_cannot_be_built():
    ledger = build_ledger(demo_constants(), 2, close=False)
    with pytest.raises(LedgerIncomplete):
        build_block(ledger, 2)


def test_density_decays_along_the_blocks(demo_ledger, demo_store):
    b5 = demo_ledger.block(5)
    p = b5.p
    aligned = banach_density(demo_store, p, start=b5.beta_prev, stop=b5.beta, aligned=True)
    assert aligned < b5.Q
    assert aligned > (1 - b5.gamma) * b5.Q
    sliding = banach_density(demo_store, p, start=b5.beta_prev, stop=b5.beta)
    assert sliding <= 2 * b5.Q
    # the whole of block 1 is dense
    assert banach_density(demo_store, 100, start=0, stop=8174) == 1
    assert banach_density(demo_store, demo_ledger.beta(1)) == 1


def test_density_window_too_large(small_store):
    with pytest.raises(WindowTooLarge):
        banach_density(small_store, small_store.horizon + 1)


def test_density_of_empty_range():
    store = SequenceStore([make_block(2, (5, 7), 2, 35, 70)])
    assert banach_density(store, 10, start=60, stop=65) == 0
    assert banach_density(store, 35, start=35, stop=70, aligned=True) == Fraction(store.count_range(35, 70), 35)


def test_export_lines(small_store):
    lines = small_store.export_lines().splitlines()
    assert len(lines) == len(small_store)
    assert lines[:3] == ["0", "1", "2"]
    summaries = small_store.block_summaries()
    assert summaries[0] == {"m": 1, "beta_prev": 0, "beta": 8174, "size": 8174, "min_gap": 1}


def test_density_strictly_decreases_with_window(demo_ledger, demo_store):
    assert demo_ledger.beta(1) < 10 ** 4
    windows = (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)
    densities = [banach_density(demo_store, L) for L in windows]
    assert densities[0] == 1
    assert all(a > b for a, b in zip(densities, densities[1:])), densities
    assert densities[-1] < Fraction(1, 20)
