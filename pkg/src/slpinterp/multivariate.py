"""Multivariate interpolation.

:func:`mpoly_kron` packs all variables into one with x_i -> x^(D^(i-1)) and
calls the univariate driver with degree bound D^n.

:func:`mpoly_si` keeps probe degrees small instead: it uses the maps
x_i -> x^mod(D^(i-1), p) and, for each k >= k0, the same map with x_k
shifted by +p.  The shift moves a term's exponent by exactly p * e_k, so
comparing the two univariate images reveals e_k; the low digits come from
base-D expansion of what remains.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass

from .poly import CyclicPoly, Exps, SparsePoly
from .primes import d_adic_expand, first_primes
from .ring import ZZ, Ring
from .slp import ProbeMeter, SlpProgram, kron_oracle, sub_oracle
from .univariate import InterpolationError, make_schedule, ok_prime_select, term_test, ui_poly

log = logging.getLogger(__name__)


def _check_bounds(D: int, T: int) -> None:
    if D < 2:
        raise ValueError("degree bound D must be >= 2")
    if T < 0:
        raise ValueError("term bound T must be >= 0")


def mpoly_kron(prog: SlpProgram, D: int, T: int, ring: Ring = ZZ, meter: ProbeMeter | None = None) -> SparsePoly:
    _check_bounds(D, T)
    n = prog.nvars
    packed = ui_poly(kron_oracle(prog, D, ring, meter), T, D**n)
    return SparsePoly(n, ((c, d_adic_expand(d, D, n)) for c, (d,) in packed.terms), ring)


def find_k0(D: int, p: int) -> int:
    """The k0 >= 1 with D^(k0-2) < p <= D^(k0-1)."""
    if D < 2 or p < 1:
        raise ValueError("need D >= 2 and p >= 1")
    k0 = 1
    while D ** (k0 - 1) < p:
        k0 += 1
    return k0


@dataclass(frozen=True)
class MCandidate:
    coeff: int
    exps: Exps

    def packed(self, D: int) -> int:
        d = 0
        for e in reversed(self.exps):
            d = d * D + e
        return d


def _group(g: SparsePoly, p: int) -> dict[int, list[tuple[int, int]]]:
    out: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for c, (d,) in g.terms:
        out[d % p].append((d, c))
    return out


def _single(groups: dict[int, list[tuple[int, int]]], d: int, a: int) -> int | None:
    hits = groups.get(d)
    if hits is None or len(hits) != 1 or hits[0][1] != a:
        return None
    return hits[0][0]


def mterms(f_mod: CyclicPoly, f_sub: SparsePoly, shifted: Mapping[int, SparsePoly], p: int, D: int, n: int,
           k0: int) -> list[MCandidate]:
    """Candidate terms from one prime p.

    ``f_sub`` is f(x^mod(D^0,p), ..., x^mod(D^(n-1),p)) and ``shifted[k]``
    the same with x_k shifted by +p, for k = k0..n (1-based).  Candidates
    whose shifts are not whole multiples of p, or whose digits fall outside
    [0, D), are dropped.
    """
    ks = list(range(k0, n + 1))
    missing = [k for k in ks if k not in shifted]
    if missing:
        raise ValueError(f"missing shifted images for k={missing}")
    low = min(k0 - 1, n)
    low_cap = D**low
    g0 = _group(f_sub, p)
    gk = {k: _group(shifted[k], p) for k in ks}
    weights = {k: pow(D, k - 1, p) for k in ks}
    out = []
    for d, a in f_mod.items():
        u = _single(g0, d, a)
        if u is None:
            continue
        high: dict[int, int] = {}
        for k in ks:
            b = _single(gk[k], d, a)
            if b is None:
                break
            e, r = divmod(b - u, p)
            if r or not 0 <= e < D:
                break
            high[k] = e
        else:
            B = u - sum(e * weights[k] for k, e in high.items())
            if not 0 <= B < low_cap:
                continue
            exps = d_adic_expand(B, D, low) + tuple(high[k] for k in ks)
            out.append(MCandidate(a, exps))
    return out


def _kron_readout(img: CyclicPoly, D: int, n: int, ring: Ring) -> SparsePoly:
    return SparsePoly(n, ((c, d_adic_expand(d, D, n)) for d, c in img.items()), ring)


def mpoly_si(prog: SlpProgram, D: int, T: int, ring: Ring = ZZ, meter: ProbeMeter | None = None) -> SparsePoly:
    """Interpolate with the shifted substitutions; requires D > total degree and T >= #f."""
    _check_bounds(D, T)
    n = prog.nvars
    if T == 0:
        return SparsePoly(n, (), ring)
    sched = make_schedule(n, T, D)
    primes = first_primes(sched.N)
    kron = kron_oracle(prog, D, ring, meter)
    top = D**n
    big = next((p for p in primes if p >= top), None)
    if big is not None:
        # every packed exponent is below p, so one image is the whole answer
        return _kron_readout(kron.probe(big), D, n, ring)

    images = kron.probe_many(primes)
    found: dict[Exps, int] = {}
    j0, alpha = ok_prime_select(images)
    rounds = 0
    while alpha:
        if sched.T <= 0:
            raise InterpolationError(f"term bound exhausted with {alpha} terms still unexplained")
        rounds += 1
        p = primes[j0]
        h = SparsePoly.from_dict(n, found, ring)
        f_sub = ui_poly(sub_oracle(prog, D, p, None, h, ring, meter), sched.T, D * p)
        k0 = find_k0(D, p)
        shifted = {k: ui_poly(sub_oracle(prog, D, p, k, h, ring, meter), sched.T, 2 * D * p)
                   for k in range(k0, n + 1)}
        cands = mterms(images[j0], f_sub, shifted, p, D, n, k0)
        accepted = [u for u in cands if term_test(u.coeff, u.packed(D), images, sched)]
        log.debug("round %d: p=%d k0=%d alpha=%d candidates=%d accepted=%d",
                  rounds, p, k0, alpha, len(cands), len(accepted))
        if not accepted:
            raise InterpolationError(
                f"no term accepted at p={p} with {alpha} terms left; T={T} or D={D} is too small")
        for u in accepted:
            c = ring.add(found.get(u.exps, 0), u.coeff)
            if c:
                found[u.exps] = c
            else:
                found.pop(u.exps, None)
        if sched.T - len(accepted) < 0:
            raise InterpolationError(f"more than T={T} terms found")
        sched = make_schedule(n, sched.T - len(accepted), D)
        sub = [(u.packed(D), u.coeff) for u in accepted]
        images = [img.minus_terms(sub) for img in images[: sched.N]]
        j0, alpha = ok_prime_select(images)
    return SparsePoly.from_dict(n, found, ring)


ALGOS = ("uipoly", "kron", "mpolysi")


def interpolate(algo: str, prog: SlpProgram, D: int, T: int, ring: Ring = ZZ,
                meter: ProbeMeter | None = None) -> SparsePoly:
    """Dispatch by name; ``uipoly`` needs a one-variable program."""
    if algo == "kron":
        return mpoly_kron(prog, D, T, ring, meter)
    if algo == "mpolysi":
        return mpoly_si(prog, D, T, ring, meter)
    if algo == "uipoly":
        if prog.nvars != 1:
            raise ValueError("uipoly interpolates one-variable programs only")
        _check_bounds(D, T)
        return ui_poly(kron_oracle(prog, D, ring, meter), T, D)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
