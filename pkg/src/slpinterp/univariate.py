"""Deterministic univariate interpolation from images modulo x^p - 1.

The driver :func:`ui_poly` repeats three steps until nothing is left:

1. among the first N primes pick the one whose image has the most terms
   (at least half the remaining terms then survive uncollided);
2. lift that image to moduli p*p_k and rebuild exponents by CRT;
3. keep only candidates that pass the membership test against the
   images at the first N1 + N2 - 1 primes.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

from .poly import CyclicPoly, SparsePoly, sparse_image
from .primes import compute_kd, crt, first_primes
from .slp import ProbeOracle

log = logging.getLogger(__name__)


class InterpolationError(RuntimeError):
    """Raised when the term or degree bound turns out to be wrong."""


def _ceil_log2_power(D: int, k: int) -> int:
    """Exact ceil(k * log2 D) for integers k >= 0, D >= 2."""
    if k <= 0:
        return 0
    return (D**k - 1).bit_length()


@dataclass(frozen=True)
class Schedule:
    n: int
    T: int
    D: int
    N1: int
    N2: int
    N: int

    @property
    def test_count(self) -> int:
        """How many images the membership test consults."""
        return self.N1 + self.N2 - 1


def make_schedule(n: int, T: int, D: int) -> Schedule:
    if D < 2:
        raise ValueError("degree bound D must be >= 2")
    if T < 0 or n < 1:
        raise ValueError("need T >= 0 and n >= 1")
    n1 = max(1, _ceil_log2_power(D, n * (T - 1)))
    n2 = _ceil_log2_power(D, n * T)
    return Schedule(n, T, D, n1, n2, max(4 * n1, n1 + n2 - 1))


def ok_prime_select(images: Sequence[CyclicPoly]) -> tuple[int, int]:
    """(index, count) of the first image with the most terms."""
    if not images:
        raise ValueError("no images")
    best, alpha = 0, images[0].term_count
    for j, img in enumerate(images):
        if img.term_count > alpha:
            best, alpha = j, img.term_count
    return best, alpha


@dataclass(frozen=True)
class UCandidate:
    coeff: int
    exponent: int


def _groups(img: CyclicPoly, p: int) -> dict[int, list[tuple[int, int]]]:
    g: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for d, c in img._c.items():
        g[d % p].append((d, c))
    return g


def uterms(f_p: CyclicPoly, lifts: Sequence[CyclicPoly], p: int, D: int,
           crt_primes: Sequence[int] | None = None) -> list[UCandidate]:
    """Candidate terms recovered from f mod x^p-1 and its lifts mod x^(p*p_k)-1.

    ``lifts[k]`` is the image at ``p * crt_primes[k]``; by default the CRT
    primes are the first K_D primes.  A term a*x^d of ``f_p`` yields a
    candidate when, in every lift, exactly one term sits over d and it has
    coefficient a.  The exponent is the CRT reconstruction of those lifted
    degrees, kept only if it is below D and consistent with every lift.
    """
    if crt_primes is None:
        crt_primes = first_primes(compute_kd(D))
    if len(lifts) != len(crt_primes):
        raise ValueError("need one lifted image per CRT prime")
    groups = [_groups(g, p) for g in lifts]
    out = []
    for d, a in f_p.items():
        lifted = []
        for grp in groups:
            hits = grp.get(d)
            if hits is None or len(hits) != 1 or hits[0][1] != a:
                break
            lifted.append(hits[0][0])
        else:
            beta = crt([b % pk for b, pk in zip(lifted, crt_primes)], crt_primes, D)
            if beta is None:
                continue
            # guards the case p = p_k, where p*p_k is not squarefree
            if beta % p != d or any(beta % (p * pk) != b for b, pk in zip(lifted, crt_primes)):
                continue
            out.append(UCandidate(a, beta))
    return out


def term_test(coeff: int, degree: int, images: Sequence[CyclicPoly], schedule: Schedule) -> bool:
    """Membership test for the term coeff * m.

    ``degree`` is the packed exponent of m, so its image at p_j is
    ``degree mod p_j``.  Subtracting the term lowers the term count of
    image j exactly when image j carries ``coeff`` at that degree; the term
    belongs to f iff this happens for at least N2 of the first N1 + N2 - 1
    images.
    """
    need = schedule.N2
    m = schedule.test_count
    if len(images) < m:
        raise ValueError(f"membership test needs {m} images, got {len(images)}")
    hits = 0
    for j in range(m):
        img = images[j]
        if img._c.get(degree % img.modulus) == coeff:
            hits += 1
            if hits >= need:
                return True
        elif j + 1 - hits > m - need:
            return False
    return hits >= need


def _lift_moduli(p: int, crt_primes: Sequence[int]) -> list[int]:
    return [p * pk for pk in crt_primes]


def ui_poly(oracle: ProbeOracle, T: int, D: int) -> SparsePoly:
    """Recover the univariate polynomial behind ``oracle`` exactly.

    Requires T >= number of terms and D > degree.  Raises
    :class:`InterpolationError` if the bounds are violated badly enough to
    stall the loop.
    """
    ring = oracle.ring
    sched = make_schedule(1, T, D)
    if T == 0:
        return SparsePoly(1, (), ring)
    primes = first_primes(sched.N)
    images = oracle.probe_many(primes)
    crt_primes = first_primes(compute_kd(D))
    found: dict[int, int] = {}
    j0, alpha = ok_prime_select(images)
    rounds = 0
    while alpha:
        if sched.T <= 0:
            raise InterpolationError(f"term bound exhausted with {alpha} terms still unexplained")
        rounds += 1
        p = primes[j0]
        h = SparsePoly.univariate(found, ring)
        lifts = [g - sparse_image(h, (1,), g.modulus) for g in oracle.probe_many(_lift_moduli(p, crt_primes))]
        cands = uterms(images[j0], lifts, p, D, crt_primes)
        accepted = [u for u in cands if term_test(u.coeff, u.exponent, images, sched)]
        log.debug("round %d: p=%d alpha=%d candidates=%d accepted=%d", rounds, p, alpha, len(cands), len(accepted))
        if not accepted:
            raise InterpolationError(
                f"no term accepted at p={p} with {alpha} terms left; T={T} or D={D} is too small")
        for u in accepted:
            c = ring.add(found.get(u.exponent, 0), u.coeff)
            if c:
                found[u.exponent] = c
            else:
                found.pop(u.exponent, None)
        if sched.T - len(accepted) < 0:
            raise InterpolationError(f"more than T={T} terms found")
        sched = make_schedule(1, sched.T - len(accepted), D)
        sub = [(u.exponent, u.coeff) for u in accepted]
        images = [img.minus_terms(sub) for img in images[: sched.N]]
        j0, alpha = ok_prime_select(images)
    return SparsePoly.univariate(found, ring)
