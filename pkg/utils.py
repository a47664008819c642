"""
Arithmetic helpers shared by the ledger, sequence and zops modules:
primes, arithmetic-progression survivors, rational JSON codec, seeded
generators and a trigamma tail sum.
"""
import logging
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

# Deterministic Miller-Rabin bases, valid for every n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def primes_upto(n: int) -> np.ndarray:
    """
    Return all primes <= n as an int64 array (sieve of Eratosthenes).
    """
    if n < 2:
        return np.array([], dtype=np.int64)
    is_prime_arr = np.ones(n + 1, dtype=bool)
    is_prime_arr[:2] = False
    for i in range(2, int(n ** 0.5) + 1):
        if is_prime_arr[i]:
            is_prime_arr[i * i::i] = False
    return np.flatnonzero(is_prime_arr).astype(np.int64)


def is_prime(n: int) -> bool:
    """
    Deterministic primality test for the 64-bit range and well beyond.
    """
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def iter_primes(start: int, limit: int) -> Iterable[int]:
    """
    Yield the primes in [start, limit] in increasing order, sieving in
    doubling segments so small searches stay cheap.
    """
    lo = max(start, 2)
    hi = min(limit, max(2 * lo, 64))
    while lo <= limit:
        for q in primes_upto(hi):
            if q >= lo:
                yield int(q)
        lo = hi + 1
        hi = min(limit, 2 * hi)


def consecutive_primes(start: int, k: int, limit: int = None) -> list:
    """
    Return the k smallest primes >= start (all <= limit when a limit is given),
    or fewer if the limit cuts the run short.
    """
    found = []
    q = max(start, 2)
    while len(found) < k:
        if limit is not None and q > limit:
            break
        if is_prime(q):
            found.append(q)
        q += 1
    return found


def _window_sums(arr: np.ndarray, d: int) -> np.ndarray:
    """Sum of arr over [i-d, i+d] clipped to the array, for every i."""
    n = len(arr)
    csum = np.concatenate(([0], np.cumsum(arr, dtype=np.int64)))
    idx = np.arange(n)
    right = np.minimum(idx + d + 1, n)
    left = np.maximum(idx - d, 0)
    return csum[right] - csum[left]


def progression_survivors(primes: Sequence[int], d: int, lo: int, hi: int) -> np.ndarray:
    """
    Literal deletion rule on [lo, hi): keep a multiple x of q_j unless some
    multiple of a different q_j' in [lo, hi) lies within distance d of x.
    A point shared by two progressions is deleted from both.
    """
    if hi <= lo:
        return np.array([], dtype=np.int64)
    xs = np.arange(lo, hi, dtype=np.int64)
    masks = [(xs % q) == 0 for q in primes]
    if len(masks) == 1:
        return xs[masks[0]]
    windows = [_window_sums(mask.astype(np.int64), d) for mask in masks]
    total = np.sum(windows, axis=0)
    keep = np.zeros(len(xs), dtype=bool)
    for mask, own in zip(masks, windows):
        keep |= mask & ((total - own) == 0)
    return xs[keep]


def period_pattern(primes: Sequence[int], d: int) -> np.ndarray:
    """
    Survivor offsets in [0, p) of one interior period, p = prod(primes).
    """
    p = prod(primes)
    survivors = progression_survivors(primes, d, 0, p + d + 1)
    return survivors[survivors < p]


def _can_tile(primes: Sequence[int], d: int, lo: int, hi: int) -> bool:
    p = prod(primes)
    return len(primes) >= 2 and p > d and lo % p == 0 and hi - lo >= 3 * p


def block_survivors(primes: Sequence[int], d: int, lo: int, hi: int) -> np.ndarray:
    """
    Same result as progression_survivors, built by tiling one period and
    computing only the last stretch literally.
    """
    if not _can_tile(primes, d, lo, hi):
        return progression_survivors(primes, d, lo, hi)
    p = prod(primes)
    pattern = period_pattern(primes, d)
    full = (hi - lo) // p - 1
    starts = lo + p * np.arange(full, dtype=np.int64)
    tiled = (starts[:, None] + pattern[None, :]).ravel()
    tail = progression_survivors(primes, d, lo + full * p, hi)
    return np.concatenate((tiled, tail))


def count_survivors(primes: Sequence[int], d: int, lo: int, hi: int) -> int:
    """Number of survivors on [lo, hi) without materializing interior periods."""
    if hi <= lo:
        return 0
    if len(primes) == 1 and primes[0] == 1:
        return hi - lo
    if not _can_tile(primes, d, lo, hi):
        return int(len(progression_survivors(primes, d, lo, hi)))
    p = prod(primes)
    full = (hi - lo) // p - 1
    tail = progression_survivors(primes, d, lo + full * p, hi)
    return full * len(period_pattern(primes, d)) + len(tail)


def rational_to_json(value) -> dict:
    value = Fraction(value)
    return {"num": str(value.numerator), "den": str(value.denominator)}


def rational_from_json(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    return Fraction(obj)


def parse_rational(text: str) -> Fraction:
    """Parse '3/8', '0.125' or '12' exactly."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {text!r}") from e


def make_rng(seed: int) -> np.random.Generator:
    """The one generator every randomized path uses: PCG64 with a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def trigamma(a: float) -> float:
    """
    Sum of 1/(a+k)^2 over k >= 0, for a > 0.
    """
    total = 0.0
    while a < 20.0:
        total += 1.0 / (a * a)
        a += 1.0
    inv = 1.0 / a
    inv2 = inv * inv
    series = inv + inv2 / 2 + inv2 * inv * (1 / 6 - inv2 * (1 / 30 - inv2 * (1 / 42 - inv2 / 30)))
    return total + series
