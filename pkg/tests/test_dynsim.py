from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

import config
from dynsim import (
    COORDINATE,
    CyclicRotation,
    IIDBernoulli,
    IrrationalRotation,
    StepFunction,
    SystemSpec,
    auto_checkpoints,
    birkhoff_average,
    block_of,
    build_tower,
    continued_fraction,
    convergence_report,
    count_bounds_check,
    decompose,
    golden_alpha,
    parse_alpha,
    rotation_limbs,
    sample_orbit,
    spec_from_config,
    split_averages,
    subseq_average,
    subseq_max,
    tower_transfer_check,
)
from errors import BadSpec, HorizonExceeded, NonpositiveLambda, TowerCoverageError, TowerTooShort
from sequence import SequenceStore
from utils import make_rng
from zops import GridContext

F = Fraction
HALF = StepFunction.indicator(0, F(1, 2))
FIVES = StepFunction.residue_indicator(35, range(0, 35, 5))


def test_step_functions():
    assert HALF.breaks == (F(1, 2),) and HALF.levels == (1, 0)
    assert HALF(F(1, 4)) == 1 and HALF(F(1, 2)) == 0
    assert HALF.mean == F(1, 2)
    middle = StepFunction.indicator(F(1, 4), F(3, 4))
    assert middle.levels == (0, 1, 0) and middle.mean == F(1, 2)
    assert StepFunction.constant(F(3, 7)).mean == F(3, 7)
    assert StepFunction.residue_indicator(35, [0]).mean == F(1, 35)
    assert FIVES.mean == F(1, 5)
    with pytest.raises(BadSpec):
        StepFunction((F(1, 2),), (F(1),))
    with pytest.raises(BadSpec):
        StepFunction.indicator(F(1, 2), F(1, 4))
    with pytest.raises(BadSpec):
        StepFunction.residue_indicator(5, [7])


def test_rotation_angles():
    assert float(golden_alpha()) / 2 ** 128 == pytest.approx(0.6180339887498949, abs=1e-15)
    assert continued_fraction([1, 1, 1]) == F(2, 3)
    assert parse_alpha("1/2").alpha_fp == 2 ** 127
    assert parse_alpha("cf:2").alpha_fp == 2 ** 127
    assert parse_alpha("0.25").alpha_fp == 2 ** 126
    assert parse_alpha("golden").label == "golden"
    for bad in ("3/2", "0", "x", "cf:0"):
        with pytest.raises(BadSpec):
            parse_alpha(bad)


def test_rotation_limbs_are_exact():
    alpha = golden_alpha()
    x0 = 12345 << 64
    limbs = rotation_limbs(alpha, x0, 5000)
    for n in (0, 1, 2, 999, 4999):
        value = sum(int(limbs[i][n]) << (32 * i) for i in range(4))
        assert value == (x0 + n * alpha) % 2 ** 128
    low = rotation_limbs(alpha, 0, 10, bits=64)
    assert all(int(low[0][n]) == 0 and int(low[1][n]) == 0 for n in range(10))
    with pytest.raises(BadSpec):
        rotation_limbs(alpha, 0, 10, bits=32)


def test_half_rotation_alternates():
    orbit = sample_orbit(SystemSpec(parse_alpha("1/2"), HALF), 0, 8)
    assert orbit.values.tolist() == [1, 0, 1, 0, 1, 0, 1, 0]
    assert birkhoff_average(orbit, 8) == F(1, 2)
    assert len(orbit.near_edge) > 0


def test_cyclic_and_iid_orbits():
    orbit = sample_orbit(SystemSpec(CyclicRotation(35), FIVES), 0, 70)
    assert orbit.mean_true == F(1, 5)
    assert birkhoff_average(orbit, 70) == F(1, 5)
    with pytest.raises(HorizonExceeded):
        birkhoff_average(orbit, 71)
    coin = sample_orbit(SystemSpec(IIDBernoulli(3, F(1, 2))), 0, 10000)
    assert coin.mean_true == F(1, 2)
    assert abs(float(birkhoff_average(coin, 10000)) - 0.5) < 0.03
    again = sample_orbit(SystemSpec(IIDBernoulli(3, F(1, 2))), 0, 10000)
    assert np.array_equal(coin.codes, again.codes)


def test_iid_orbit_reads_its_coordinate():
    coin = sample_orbit(SystemSpec(IIDBernoulli(5, F(1, 4))), 0, 20000)
    assert coin.levels == (0, 1)
    assert coin.f_desc == COORDINATE.describe
    assert abs(float(birkhoff_average(coin, 20000)) - 0.25) < 0.02
    same = sample_orbit(SystemSpec(IIDBernoulli(5, F(1, 4)), COORDINATE), 0, 20000)
    assert np.array_equal(coin.codes, same.codes)
    with pytest.raises(BadSpec):
        sample_orbit(SystemSpec(IIDBernoulli(5, F(1, 4)), StepFunction.constant(2)), 0, 10)
    with pytest.raises(BadSpec):
        SystemSpec(IIDBernoulli(5, F(1, 4)), HALF).validate()


def test_system_validation():
    with pytest.raises(BadSpec):
        SystemSpec(CyclicRotation(0)).validate()
    with pytest.raises(BadSpec):
        SystemSpec(IIDBernoulli(1, F(3, 2))).validate()
    with pytest.raises(BadSpec):
        SystemSpec(IrrationalRotation(0)).validate()
    with pytest.raises(BadSpec):
        sample_orbit(SystemSpec(CyclicRotation(5)), 0, 0)
    assert SystemSpec(CyclicRotation(35), FIVES).tag == "cyclic(35)"


def test_spec_from_config():
    spec = spec_from_config(config.RunConfig())
    assert isinstance(spec.system, IrrationalRotation)
    assert spec.observable.mean == F(1, 2)
    cyclic = spec_from_config(config.RunConfig(system="cyclic", period=7, f_const="2/3"))
    assert cyclic.system == CyclicRotation(7)
    assert cyclic.observable.mean == F(2, 3)
    iid = spec_from_config(config.RunConfig(system="iid", seed=4, bernoulli_p="1/4"))
    assert iid.system == IIDBernoulli(4, F(1, 4))
    assert iid.observable is None and iid.f == COORDINATE


def test_subsequence_average_on_block_one(small_store):
    orbit = sample_orbit(SystemSpec(CyclicRotation(35), FIVES), 0, small_store.horizon)
    assert subseq_average(orbit, small_store, 8174) == F(1635, 8174)
    assert subseq_average(orbit, small_store, 0) == 0
    with pytest.raises(HorizonExceeded):
        subseq_average(orbit, small_store, small_store.horizon + 1)
    assert 0 < subseq_max(orbit, small_store, 1000) <= 1


def test_golden_rotation_converges(demo_store):
    orbit = sample_orbit(SystemSpec(parse_alpha("golden"), HALF), 0, demo_store.horizon)
    report = convergence_report(orbit, demo_store)
    assert report.mean_true == F(1, 2)
    assert report.final_deviation < F(1, 50)
    assert report.rows[-1].N == demo_store.horizon
    assert report.rows[-1].block_m == demo_store.M
    csv_lines = report.to_csv().splitlines()
    assert csv_lines[0] == "N,A,deviation,block_m"
    assert len(csv_lines) == len(report.rows) + 1
    data = report.to_json()
    assert data["mean_true"] == "1/2"
    assert len(data["rows"]) == len(report.rows)


def test_convergence_checkpoints(small_store):
    orbit = sample_orbit(SystemSpec(CyclicRotation(35), FIVES), 0, small_store.horizon)
    report = convergence_report(orbit, small_store, [10, 8174])
    assert [r.N for r in report.rows] == [10, 8174]
    assert report.rows[1].A == F(1635, 8174)
    assert report.final_deviation == abs(F(1635, 8174) - F(1, 5))
    with pytest.raises(HorizonExceeded):
        convergence_report(orbit, small_store, [small_store.horizon + 5])
    points = auto_checkpoints(small_store, small_store.horizon)
    assert 8174 in points and small_store.horizon in points


def test_block_of(small_store):
    assert block_of(small_store, 1) == 1
    assert block_of(small_store, 8174) == 1
    assert block_of(small_store, 8175) == 2
    with pytest.raises(HorizonExceeded):
        block_of(small_store, 0)


def test_decomposition(demo_ledger, small_store):
    d = decompose(HALF, demo_ledger, 1)
    assert d.lam_prime == F(1, 3)
    assert d.check(HALF).passed
    assert d.parts(1, 1) == (0, 3, 0)
    assert d.parts(5, 1) == (3, 0, 0)
    assert d.parts(5, 0) == (0, 0, 0)
    with pytest.raises(NonpositiveLambda):
        decompose(HALF, demo_ledger, 0)
    with pytest.raises(BadSpec):
        decompose(StepFunction.constant(-1), demo_ledger, 1)
    orbit = sample_orbit(SystemSpec(CyclicRotation(35), FIVES), 0, small_store.horizon)
    split = split_averages(orbit, small_store, decompose(FIVES, demo_ledger, 1), 100000)
    assert split.consistent
    assert split.m == 3


@pytest.mark.parametrize("k", [3, 4, 10])
def test_tower_coverage(k):
    tower = build_tower(35 * k, 35 * (k - 1), F(1, k - 1))
    assert tower.covered == 1 - F(1, k)
    assert tower.disjoint()
    with pytest.raises(TowerCoverageError):
        build_tower(35 * k, 35 * (k - 1), F(1, k + 1))
    with pytest.raises(BadSpec):
        build_tower(35, 36, F(1, 2))


def test_tower_transfer_is_exact():
    P = 10 ** 5
    tower = build_tower(P, 1000, F(1, 10))
    f = StepFunction.indicator(F(1, 3), F(7, 10))
    orbit = sample_orbit(SystemSpec(CyclicRotation(P), f), 0, P)
    report = tower_transfer_check(tower, orbit, GridContext((5, 7)), trials=20, horizon=200, seed=1, workers=2)
    assert report.passed, report.mismatches
    assert report.to_json()["equal"] == 20
    short = build_tower(P, 100, F(1, 10))
    with pytest.raises(TowerTooShort):
        tower_transfer_check(short, orbit, GridContext((5, 7)), trials=1, horizon=50, seed=1)


def test_count_bounds_hold(demo_ledger, demo_store):
    report = count_bounds_check(demo_ledger, demo_store)
    assert report.passed, [r.name for r in report.failures()]
    names = {r.name for r in report.records}
    assert "block_count_upper_beta[1]" not in names
    assert "block_count_upper_beta[2]" in names


def test_count_bounds_catch_a_thinned_block(demo_ledger, demo_store):
    blocks = list(demo_store.blocks)
    blocks[1] = replace(blocks[1], elements=blocks[1].elements[::2])
    report = count_bounds_check(demo_ledger, SequenceStore(blocks))
    assert not report.passed
    assert "block_count_lower[2]" in {r.name for r in report.failures()}


def test_golden_birkhoff_average_of_a_third():
    third = StepFunction.indicator(0, F(1, 3))
    orbit = sample_orbit(SystemSpec(parse_alpha("golden"), third), 0, 10 ** 6)
    assert orbit.mean_true == F(1, 3)
    assert abs(birkhoff_average(orbit, 10 ** 6) - F(1, 3)) < F(5, 10 ** 6)


def test_doubling_precision_only_moves_points_at_the_edges():
    third = StepFunction.indicator(F(1, 7), F(1, 3))
    spec = SystemSpec(parse_alpha("golden"), third)
    fine = sample_orbit(spec, F(1, 5), 200000, precision=128)
    coarse = sample_orbit(spec, F(1, 5), 200000, precision=64)
    moved = np.flatnonzero(fine.codes != coarse.codes)
    flagged = set(fine.near_edge.tolist()) | set(coarse.near_edge.tolist())
    assert set(moved.tolist()) <= flagged


def test_random_step_functions_decompose(demo_ledger, small_store):
    rng = make_rng(50)
    P = 997
    for trial in range(50):
        k = int(rng.integers(0, 5))
        breaks = tuple(F(int(b), P) for b in np.sort(rng.choice(np.arange(1, P), size=k, replace=False)))
        levels = tuple(F(int(rng.integers(0, 10)), int(rng.integers(1, 6))) for _ in range(k + 1))
        f = StepFunction(breaks, levels)
        lam = F(int(rng.integers(1, 7)), 2)
        d = decompose(f, demo_ledger, lam)
        assert d.check(f).passed, f.describe
        orbit = sample_orbit(SystemSpec(CyclicRotation(P), f), int(rng.integers(0, P)), small_store.horizon)
        N = int(rng.integers(1, small_store.horizon + 1))
        split = split_averages(orbit, small_store, d, N)
        assert split.consistent, (f.describe, N)
        assert split.total == subseq_average(orbit, small_store, N) / d.lam_prime


@pytest.mark.slow
def test_golden_rotation_converges_from_random_starts(demo_ledger, demo_store):
    rng = make_rng(100)
    ends = [demo_ledger.beta(m) for m in range(1, demo_ledger.M + 1)]
    close = 0
    for _ in range(100):
        x0 = F(int(rng.integers(0, 2 ** 53)), 2 ** 53)
        orbit = sample_orbit(SystemSpec(parse_alpha("golden"), HALF), x0, demo_store.horizon)
        report = convergence_report(orbit, demo_store, ends)
        close += report.final_deviation < F(1, 100)
        for N in (1, 100, demo_ledger.beta(1)):
            assert subseq_average(orbit, demo_store, N) == birkhoff_average(orbit, N)
    assert close >= 95
