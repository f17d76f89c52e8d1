"""Quick invariant suite behind ``slpinterp selftest``."""
from __future__ import annotations

import contextlib
import math
from collections.abc import Iterator

from . import checks, primes
from .checks import CheckResult

FAULTS = ("primes",)


def check_prime_table(count: int = 500) -> CheckResult:
    """The cached table is exactly the first ``count`` primes (trial division)."""
    res = CheckResult("prime_table")
    table = primes.first_primes(count)
    res.trials = count
    expect, k = [], 1
    while len(expect) < count:
        k += 1
        if all(k % d for d in range(2, math.isqrt(k) + 1)):
            expect.append(k)
    for i, (got, want) in enumerate(zip(table, expect)):
        if got != want:
            res.fail(f"entry {i + 1} is {got}, expected {want}")
    res.log.append(" ".join(map(str, table)))
    return res


def check_kd(limit: int = 5000) -> CheckResult:
    """K_D is the least K whose prime product reaches D."""
    res = CheckResult("kd_minimal")
    for D in range(2, limit):
        res.trials += 1
        k = primes.compute_kd(D)
        ps = primes.first_primes(k)
        if math.prod(ps) < D or math.prod(ps[:-1]) >= D:
            res.fail(f"compute_kd({D}) = {k}")
    return res


@contextlib.contextmanager
def corrupted_prime_table() -> Iterator[None]:
    """Replace one cached prime by a composite while the block runs."""
    primes.clear_cache()
    table = primes.first_primes(5000)
    table[3] = 9
    primes._cache[:] = table
    try:
        yield
    finally:
        primes.clear_cache()


def run_selftest(fault: str | None = None, scale: int = 1) -> list[CheckResult]:
    """Run every invariant at small scale; ``fault`` injects a known defect first."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {', '.join(FAULTS)}")
    ctx = corrupted_prime_table() if fault == "primes" else contextlib.nullcontext()
    small = [(1, 2**12, 16), (2, 2**8, 8), (4, 2**6, 8)]
    with ctx:
        return [
            check_prime_table(),
            check_kd(),
            checks.check_recovery(trials=2 * scale, configs=small),
            checks.check_term_test(trials=6 * scale),
            checks.check_ok_prime(trials=8 * scale),
            checks.check_collision_bound(trials=8 * scale),
            checks.check_candidate_soundness(trials=6 * scale),
            checks.check_homomorphism(trials=40 * scale),
            checks.check_roundtrips(trials=200 * scale),
        ]
