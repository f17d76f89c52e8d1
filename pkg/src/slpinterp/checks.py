"""Seeded invariant checks against the brute-force oracle.

Each ``check_*`` function runs a batch of randomized trials and returns a
:class:`CheckResult` with the failures found and a log of everything it
computed.  Logs are deterministic in the seed, so hashing them twice
detects nondeterminism.  The self-test runs these at small scale; the
acceptance suite runs them at full scale.
"""
from __future__ import annotations

import hashlib
import random
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .multivariate import find_k0, interpolate, mterms
from .oracle import (
    ExpansionTooLarge,
    InstanceSpec,
    brute_reduce,
    collision_census,
    combine_programs,
    dense_expand,
    kron_pack,
    random_instance,
    random_monomial,
    random_program,
    substitute,
    uncollided_terms,
)
from .poly import SparsePoly, format_poly, sparse_image
from .primes import compute_kd, crt, d_adic_expand, d_adic_pack, first_primes
from .ring import ZZ, Ring
from .slp import ADD, BATCH_MIN, MUL, SUB, ProbeMeter, kron_oracle, probe_eval, probe_many, sub_oracle
from .univariate import UCandidate, make_schedule, ok_prime_select, term_test, ui_poly, uterms

# Second ring used by every randomized check.
ZQ = Ring(101)
RINGS = (ZZ, ZQ)


@dataclass
class CheckResult:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)
    log: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str) -> None:
        self.failures.append(msg)

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.log).encode()).hexdigest()

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f": {self.failures[0]}" if self.failures else ""
        more = f" (+{len(self.failures) - 1} more)" if len(self.failures) > 1 else ""
        return f"{status} {self.name} [{self.trials} trials, {len(self.failures)} failures]{extra}{more}"


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    h = hashlib.sha256(repr(parts).encode()).digest()
    return int.from_bytes(h[:8], "little")


def sample_bounds(rng: random.Random, d_max: int, t_max: int) -> tuple[int, int]:
    """D log-uniform in [2, d_max] and T uniform in [1, t_max]."""
    k = rng.randint(1, max(1, (d_max - 1).bit_length()))
    lo = min(2 ** (k - 1) + 1, d_max)
    D = rng.randint(max(2, lo), min(2**k, d_max))
    return D, rng.randint(1, t_max)


def _guard(res: CheckResult, label: str, fn: Callable[[], None]) -> None:
    try:
        fn()
    except Exception as exc:  # a crash is a failed trial, not an aborted check
        res.fail(f"{label}: {type(exc).__name__}: {exc}")


def _short(f: SparsePoly) -> str:
    return hashlib.sha256(format_poly(f).encode()).hexdigest()[:16]


def _kron_images(prog, D: int, n: int, T: int, ring: Ring):
    sched = make_schedule(n, T, D)
    primes = first_primes(sched.N)
    return sched, primes, kron_oracle(prog, D, ring).probe_many(primes)


# --- exact recovery -------------------------------------------------------

RECOVERY_CONFIGS: tuple[tuple[int, int, int], ...] = (
    (1, 2**16, 64),
    (2, 2**12, 32),
    (3, 2**12, 32),
    (4, 2**12, 32),
    (6, 2**12, 32),
    (8, 2**12, 32),
)


def check_recovery(trials: int = 100, seed: int = 0,
                   configs: Sequence[tuple[int, int, int]] = RECOVERY_CONFIGS,
                   rings: Sequence[Ring] = RINGS) -> CheckResult:
    """Every algorithm returns the generated polynomial exactly.

    Per configuration (n, D_max, T_max) and ring, the first instance uses
    the maximal bounds; the rest sample D and T below them.
    """
    res = CheckResult("exact_recovery")
    for n, d_max, t_max in configs:
        algos = ("uipoly", "kron", "mpolysi") if n == 1 else ("kron", "mpolysi")
        for ring in rings:
            for i in range(trials):
                rng = random.Random(derive_seed("recovery", seed, n, str(ring), i))
                D, T = (d_max, t_max) if i == 0 else sample_bounds(rng, d_max, t_max)
                spec = InstanceSpec(n, D, T, ring, seed=rng.getrandbits(64))
                f, prog = random_instance(spec)
                for algo in algos:
                    res.trials += 1
                    label = f"n={n} ring={ring} i={i} D={D} T={T} {algo}"

                    def run(algo=algo, label=label):
                        meter = ProbeMeter()
                        g = interpolate(algo, prog, D, T, ring, meter)
                        res.log.append(f"{label} probes={meter.probes} maxdeg={meter.max_probe_degree} "
                                       f"ops={meter.ring_ops} out={_short(g)}")
                        if g != f:
                            res.fail(f"{label}: recovered {g.term_count} terms, expected {f.term_count}")

                    _guard(res, label, run)
    return res


# --- membership test ------------------------------------------------------

def _perturbations(rng: random.Random, f: SparsePoly, D: int, ring: Ring) -> list[tuple[str, int, tuple]]:
    """Five non-terms per true term: wrong coefficients, wrong exponents, absent monomials."""
    terms = f.as_dict()
    n = f.nvars
    out = []
    for c, e in f.terms:

        def other_coeff(base: int) -> int:
            while True:
                c2 = ring.canon(base + ring.random_nonzero(rng, 1000))
                if c2 and c2 != c:
                    return c2

        out.append(("wrong-coeff", other_coeff(c), e))
        # collision sum with another term: the coefficient a collided image would show
        others = [c2 for c2, e2 in f.terms if e2 != e]
        s = ring.canon(c + rng.choice(others)) if others else 0
        out.append(("collision-coeff", s if s and s != c else other_coeff(c), e))
        for kind in ("wrong-exp", "absent"):
            for _ in range(1000):
                if kind == "wrong-exp":
                    e2 = list(e)
                    j = rng.randrange(n)
                    e2[j] = max(0, e2[j] + rng.choice((-3, -2, -1, 1, 2, 3)))
                    e2 = tuple(e2)
                    c2 = c
                else:
                    e2 = random_monomial(rng, n, D)
                    c2 = ring.random_nonzero(rng)
                if sum(e2) < D and terms.get(e2) != c2:
                    out.append((kind, c2, e2))
                    break
        e3 = random_monomial(rng, n, D)
        if terms.get(e3) != c:
            out.append(("absent-samecoeff", c, e3))
    return out


def check_term_test(trials: int = 50, seed: int = 0) -> CheckResult:
    """term_test accepts exactly the true terms."""
    res = CheckResult("term_test_biconditional")
    for i in range(trials):
        rng = random.Random(derive_seed("termtest", seed, i))
        n = 1 + i % 3
        ring = RINGS[i % 2]
        D, T = sample_bounds(rng, 2**10, 16)
        f, prog = random_instance(InstanceSpec(n, D, T, ring, seed=rng.getrandbits(64)))
        label = f"i={i} n={n} D={D} T={T} ring={ring}"

        def run(f=f, prog=prog, n=n, D=D, T=T, ring=ring, rng=rng, label=label):
            sched, _, images = _kron_images(prog, D, n, T, ring)
            verdicts = []
            for c, e in f.terms:
                res.trials += 1
                ok = term_test(c, kron_pack(e, D), images, sched)
                verdicts.append(int(ok))
                if not ok:
                    res.fail(f"{label}: true term {c}*{e} rejected")
            for kind, c, e in _perturbations(rng, f, D, ring):
                res.trials += 1
                ok = term_test(c, kron_pack(e, D), images, sched)
                verdicts.append(int(ok))
                if ok:
                    res.fail(f"{label}: {kind} non-term {c}*{e} accepted")
            res.log.append(f"{label} verdicts={''.join(map(str, verdicts))}")

        _guard(res, label, run)
    return res


# --- ok-prime selection and collision bounds -------------------------------

def check_ok_prime(trials: int = 50, seed: int = 0) -> CheckResult:
    """The selected prime leaves at least floor(t/2) terms uncollided."""
    res = CheckResult("ok_prime_half_uncollided")
    for i in range(trials):
        rng = random.Random(derive_seed("okprime", seed, i))
        n = 1 + i % 4
        ring = RINGS[i % 2]
        D, T = sample_bounds(rng, 2**12, 32)
        f, prog = random_instance(InstanceSpec(n, D, T, ring, seed=rng.getrandbits(64)))
        t = f.term_count
        label = f"i={i} n={n} D={D} t={t} ring={ring}"

        def run(f=f, prog=prog, n=n, D=D, t=t, ring=ring, label=label):
            res.trials += 1
            _, primes, images = _kron_images(prog, D, n, t, ring)
            j0, alpha = ok_prime_select(images)
            unc, col, _ = collision_census(f, D, primes[j0])
            res.log.append(f"{label} p={primes[j0]} alpha={alpha} uncollided={unc} collided={col}")
            if unc < t // 2:
                res.fail(f"{label}: p={primes[j0]} leaves {unc} < {t // 2} uncollided")

        _guard(res, label, run)
    return res


def check_collision_bound(trials: int = 30, seed: int = 0) -> CheckResult:
    """No term collides at N1 or more of the scheduled primes."""
    res = CheckResult("collision_prime_bound")
    for i in range(trials):
        rng = random.Random(derive_seed("collisions", seed, i))
        n = 1 + i % 4
        D, T = sample_bounds(rng, 2**12, 32)
        f = random_instance(InstanceSpec(n, D, T, ZZ, seed=rng.getrandbits(64)))[0]
        t = f.term_count
        sched = make_schedule(n, t, D)
        primes = first_primes(sched.N)
        packed = [kron_pack(e, D) for _, e in f.terms]
        hits = [0] * t
        for p in primes:
            blocks = Counter(d % p for d in packed)
            for k, d in enumerate(packed):
                hits[k] += blocks[d % p] > 1
        res.trials += t
        worst = max(hits, default=0)
        res.log.append(f"i={i} n={n} D={D} t={t} N1={sched.N1} primes={len(primes)} worst={worst}")
        if worst > sched.N1 - 1:
            res.fail(f"i={i} n={n} D={D} t={t}: a term collides at {worst} > N1-1={sched.N1 - 1} primes")
    return res


# --- candidate soundness ---------------------------------------------------

def _uterms_trial(res: CheckResult, f: SparsePoly, prog, D: int, T: int, ring: Ring, rng: random.Random,
                  label: str) -> None:
    _, primes, images = _kron_images(prog, D, 1, T, ring)
    j0, _ = ok_prime_select(images)
    oracle = kron_oracle(prog, D, ring)
    crt_primes = first_primes(compute_kd(D))
    for j in sorted({j0, *rng.sample(range(len(primes)), min(3, len(primes)))}):
        p = primes[j]
        lifts = oracle.probe_many([p * q for q in crt_primes])
        cands = set(uterms(images[j], lifts, p, D, crt_primes))
        want = uncollided_terms(f, D, p)
        res.trials += len(want)
        missing = [(c, e) for c, e in want if UCandidate(c, e[0]) not in cands]
        res.log.append(f"{label} p={p} uncollided={len(want)} candidates={len(cands)}")
        if missing:
            res.fail(f"{label} p={p}: uncollided terms missing from candidates: {missing[:3]}")


def _mterms_trial(res: CheckResult, f: SparsePoly, prog, D: int, T: int, ring: Ring, rng: random.Random,
                  label: str) -> None:
    n = f.nvars
    _, primes, images = _kron_images(prog, D, n, T, ring)
    j0, _ = ok_prime_select(images)
    for j in sorted({j0, *rng.sample(range(len(primes)), min(2, len(primes)))}):
        p = primes[j]
        k0 = find_k0(D, p)
        f_sub = ui_poly(sub_oracle(prog, D, p, None, None, ring), T, D * p)
        base = [pow(D, i, p) for i in range(n)]
        if f_sub != substitute(f, base):
            res.fail(f"{label} p={p}: substituted image recovered incorrectly")
            continue
        shifted = {k: ui_poly(sub_oracle(prog, D, p, k, None, ring), T, 2 * D * p) for k in range(k0, n + 1)}
        cands = mterms(images[j], f_sub, shifted, p, D, n, k0)
        bad = [u for u in cands if not all(0 <= e < D for e in u.exps)]
        if bad:
            res.fail(f"{label} p={p}: candidate digits out of range: {bad[:3]}")
        have = {(u.coeff, u.exps) for u in cands}
        want = uncollided_terms(f, D, p)
        res.trials += len(want)
        missing = [t for t in want if t not in have]
        res.log.append(f"{label} p={p} k0={k0} uncollided={len(want)} candidates={len(cands)}")
        if missing:
            res.fail(f"{label} p={p}: uncollided terms missing from candidates: {missing[:3]}")


def check_candidate_soundness(trials: int = 50, seed: int = 0) -> CheckResult:
    """Every term uncollided at p shows up among the candidates built from p."""
    res = CheckResult("candidate_soundness")
    for i in range(trials):
        rng = random.Random(derive_seed("soundness", seed, i))
        ring = RINGS[i % 2]
        if i % 2 == 0:
            n = 1
            D, T = sample_bounds(rng, 2**16, 32)
        else:
            n = 2 + (i // 2) % 3
            # small D keeps p below D^(n-1), so the shifted images are exercised
            D, T = sample_bounds(rng, 2**8, 24)
        f, prog = random_instance(InstanceSpec(n, D, T, ring, seed=rng.getrandbits(64)))
        label = f"i={i} n={n} D={D} T={T} ring={ring}"
        trial = _uterms_trial if n == 1 else _mterms_trial
        _guard(res, label, lambda: trial(res, f, prog, D, T, ring, rng, label))
    return res


# --- probe engine against the oracle ---------------------------------------

def _homomorphism_program(rng: random.Random, n: int, ring: Ring):
    """A program with at most 100 expanded terms, from one of three families."""
    while True:
        family = rng.randrange(3)
        if family == 0:
            prog = random_program(rng, n, rng.randint(3, 20))
        else:
            D = rng.randint(2, 40)
            f1, p1 = random_instance(InstanceSpec(n, D, rng.randint(1, 30), ring, seed=rng.getrandbits(64)))
            prog = p1
            if family == 2:
                _, p2 = random_instance(InstanceSpec(n, D, rng.randint(1, 8), ring, seed=rng.getrandbits(64)))
                prog = combine_programs(rng.choice((MUL, ADD, SUB)), p1, p2)
        try:
            F = dense_expand(prog, ring, limit=1000)
        except ExpansionTooLarge:
            continue
        if F.term_count <= 100:
            return prog, F


def check_homomorphism(trials: int = 200, seed: int = 0) -> CheckResult:
    """Program probes agree with the expanded polynomial's image, by two routes."""
    res = CheckResult("probe_homomorphism")
    rings = (ZZ, Ring(101), Ring(6), Ring(2**61 - 1))
    for i in range(trials):
        rng = random.Random(derive_seed("homomorphism", seed, i))
        ring = rings[i % len(rings)]
        n = rng.randint(1, 4)
        prog, F = _homomorphism_program(rng, n, ring)
        p = rng.randint(1, 64)
        a = [rng.randrange(p) for _ in range(n)]
        label = f"i={i} n={n} L={len(prog)} p={p} ring={ring}"

        def run(prog=prog, F=F, p=p, a=a, ring=ring, label=label):
            res.trials += 1
            got = probe_eval(prog, a, p, ring)
            img = sparse_image(F, a, p)
            brute = brute_reduce(F, a, p)
            batch = probe_many(prog, [a] * BATCH_MIN, [p] * BATCH_MIN, ring)
            res.log.append(f"{label} terms={F.term_count} image={got.items()}")
            if not (got == img == brute):
                res.fail(f"{label}: probe {got} vs image {img} vs brute {brute}")
            if any(b != got for b in batch):
                res.fail(f"{label}: batched probe disagrees with scalar probe")

        _guard(res, label, run)
    return res


# --- number-theoretic round trips ------------------------------------------

def check_roundtrips(trials: int = 1000, seed: int = 0) -> CheckResult:
    """crt inverts reduction and base-D expansion inverts packing."""
    res = CheckResult("crt_dadic_roundtrip")
    pool = first_primes(300)
    rng = random.Random(derive_seed("roundtrip", seed))
    for i in range(trials):
        res.trials += 2
        k = rng.randint(1, 6)
        mods = rng.sample(pool, k)
        M = 1
        for q in mods:
            M *= q
        w = rng.randrange(M)
        bound = rng.randint(1, M)
        got = crt([w % q for q in mods], mods, bound)
        want = w if w < bound else None
        if got != want:
            res.fail(f"crt {w} mod {mods} bound {bound}: got {got}")
        D = rng.randint(2, 2**16)
        n = rng.randint(1, 8)
        d = rng.randrange(D**n)
        digits = d_adic_expand(d, D, n)
        back = d_adic_pack(digits, D)
        rand_digits = tuple(rng.randrange(D) for _ in range(n))
        if back != d or any(not 0 <= x < D for x in digits) or \
                d_adic_expand(d_adic_pack(rand_digits, D), D, n) != rand_digits:
            res.fail(f"d-adic D={D} n={n} d={d}: digits {digits} repack {back}")
        res.log.append(f"{i} {w} {got} {d} {digits}")
    return res


ALL_CHECKS: tuple[Callable[..., CheckResult], ...] = (
    check_recovery,
    check_term_test,
    check_ok_prime,
    check_collision_bound,
    check_candidate_soundness,
    check_homomorphism,
    check_roundtrips,
)
