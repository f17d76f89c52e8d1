"""Prime tables, K_D, Chinese remaindering and base-D digit expansion."""
from __future__ import annotations

import math
from collections.abc import Sequence

# Grows monotonically; first_primes always hands out copies of a prefix.
_cache: list[int] = []


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def _bound(n: int) -> int:
    # Rosser: p_n < n (ln n + ln ln n) for n >= 6
    if n < 6:
        return 15
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def first_primes(n: int) -> list[int]:
    """The first ``n`` primes, in increasing order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > len(_cache):
        limit = _bound(n)
        while True:
            found = _sieve(limit)
            if len(found) >= n:
                break
            limit *= 2
        _cache[:] = found
    return _cache[:n]


def clear_cache() -> None:
    _cache.clear()


def compute_kd(D: int) -> int:
    """Least K with p_1 * ... * p_K >= D (0 when D <= 1)."""
    if D < 1:
        raise ValueError("D must be >= 1")
    # p_1...p_k >= 2^k, so bit_length(D) primes always suffice
    k, prod = 0, 1
    for p in first_primes(D.bit_length()):
        if prod >= D:
            break
        prod *= p
        k += 1
    return k


def crt(residues: Sequence[int], moduli: Sequence[int], bound: int) -> int | None:
    """The unique w < prod(moduli) with w = residues[i] mod moduli[i].

    Returns None when that w is not below ``bound``.  Moduli must be
    pairwise coprime.
    """
    if len(residues) != len(moduli):
        raise ValueError("residues and moduli differ in length")
    w, m = 0, 1
    for r, q in zip(residues, moduli):
        if not 0 <= r < q:
            raise ValueError(f"residue {r} out of range for modulus {q}")
        # lift w (mod m) to w' (mod m*q) with w' = r (mod q)
        t = ((r - w) * pow(m, -1, q)) % q
        w += m * t
        m *= q
    return w if w < bound else None


def d_adic_expand(d: int, D: int, n: int) -> tuple[int, ...]:
    """Digits (e_1, ..., e_n) with d = sum e_i D^(i-1), least significant first."""
    if D < 2:
        raise ValueError("base must be >= 2")
    if d < 0 or d >= D**n:
        raise ValueError(f"{d} does not fit in {n} base-{D} digits")
    digits = []
    for _ in range(n):
        d, r = divmod(d, D)
        digits.append(r)
    return tuple(digits)


def d_adic_pack(digits: Sequence[int], D: int) -> int:
    d = 0
    for e in reversed(digits):
        d = d * D + e
    return d
