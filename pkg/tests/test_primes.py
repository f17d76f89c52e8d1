from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slpinterp import primes
from slpinterp.primes import compute_kd, crt, d_adic_expand, d_adic_pack, first_primes


def is_prime(k: int) -> bool:
    return k >= 2 and all(k % d for d in range(2, math.isqrt(k) + 1))


def test_first_five():
    assert first_primes(5) == [2, 3, 5, 7, 11]


def test_first_one():
    assert first_primes(1) == [2]


def test_twenty_fifth_is_97():
    assert first_primes(25)[-1] == 97


def test_prefix_matches_trial_division():
    assert first_primes(1200) == [k for k in range(2, 10000) if is_prime(k)][:1200]


def test_cache_regrowth_is_consistent():
    primes.clear_cache()
    small = first_primes(10)
    big = first_primes(5000)
    assert big[:10] == small
    assert first_primes(10) == small


def test_returns_copy():
    a = first_primes(5)
    a[0] = 4
    assert first_primes(5)[0] == 2


@pytest.mark.parametrize("D, K", [(16, 3), (1, 0), (7, 3), (2, 1), (6, 2), (30, 3), (31, 4)])
def test_compute_kd(D, K):
    assert compute_kd(D) == K


@given(st.integers(2, 10**60))
def test_compute_kd_is_minimal(D):
    K = compute_kd(D)
    ps = first_primes(K)
    assert math.prod(ps) >= D > math.prod(ps[:-1])


def test_crt_examples():
    assert crt([0, 1, 0], [2, 3, 5], 30) == 10
    assert crt([0, 0], [2, 3], 6) == 0
    assert crt([1, 2, 4], [2, 3, 5], 10) is None


def test_crt_residue_out_of_range():
    with pytest.raises(ValueError):
        crt([3], [3], 10)


@given(st.lists(st.sampled_from(first_primes(60)), min_size=1, max_size=6, unique=True), st.data())
def test_crt_roundtrip(mods, data):
    M = math.prod(mods)
    w = data.draw(st.integers(0, M - 1))
    assert crt([w % q for q in mods], mods, M) == w


def test_d_adic_examples():
    assert d_adic_expand(543, 10, 3) == (3, 4, 5)
    assert d_adic_expand(0, 7, 4) == (0, 0, 0, 0)
    assert d_adic_expand(4, 3, 2) == (1, 1)


def test_d_adic_overflow():
    with pytest.raises(ValueError):
        d_adic_expand(1000, 10, 3)
    with pytest.raises(ValueError):
        d_adic_expand(1, 1, 3)


@given(st.integers(2, 2**20), st.integers(1, 10), st.data())
def test_d_adic_roundtrip(D, n, data):
    digits = tuple(data.draw(st.lists(st.integers(0, D - 1), min_size=n, max_size=n)))
    assert d_adic_expand(d_adic_pack(digits, D), D, n) == digits
