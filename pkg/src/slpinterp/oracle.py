"""Ground truth for testing: brute-force expansion, instance generation,
SLP synthesis and collision counting.

Nothing here is used by the interpolators themselves.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

from .poly import CyclicPoly, Exps, SparsePoly, sparse_image
from .ring import ZZ, Ring
from .slp import ADD, CONST, IN, MUL, SUB, Instr, ProbeOracle, SlpProgram

EXPAND_LIMIT = 10**6


class ExpansionTooLarge(RuntimeError):
    pass


def sparse_mul(f: dict[Exps, int], g: dict[Exps, int], ring: Ring) -> dict[Exps, int]:
    out: dict[Exps, int] = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in ((e, ring.canon(c)) for e, c in out.items()) if c}


def _sparse_addsub(f: dict[Exps, int], g: dict[Exps, int], sign: int, ring: Ring) -> dict[Exps, int]:
    out = dict(f)
    for e, c in g.items():
        v = ring.canon(out.get(e, 0) + sign * c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def dense_expand(prog: SlpProgram, ring: Ring = ZZ, limit: int = EXPAND_LIMIT) -> SparsePoly:
    """Symbolically expand every register; exact but exponential in the worst case."""
    n = prog.nvars
    zero = (0,) * n
    regs: list[dict[Exps, int]] = []
    for op, x, y in prog.instructions:
        if op == IN:
            e = [0] * n
            e[x] = 1
            v = {tuple(e): 1}
        elif op == CONST:
            c = ring.canon(x)
            v = {zero: c} if c else {}
        elif op == MUL:
            if len(regs[x]) * len(regs[y]) > 16 * limit:
                raise ExpansionTooLarge("product too large to expand")
            v = sparse_mul(regs[x], regs[y], ring)
        else:
            v = _sparse_addsub(regs[x], regs[y], 1 if op == ADD else -1, ring)
        if len(v) > limit:
            raise ExpansionTooLarge(f"intermediate polynomial exceeds {limit} terms")
        regs.append(v)
    return SparsePoly.from_dict(n, regs[-1], ring)


def sparse_to_slp(f: SparsePoly) -> SlpProgram:
    """A program computing ``f``; variable powers come from shared repeated squaring."""
    n = f.nvars
    ins: list[Instr] = []

    def emit(op: str, a: int, b: int = 0) -> int:
        ins.append(Instr(op, a, b))
        return len(ins) - 1

    if f.is_zero():
        return SlpProgram(n, (Instr(CONST, 0),))
    # squares[i][k] is the register holding x_i^(2^k)
    squares: list[list[int]] = [[] for _ in range(n)]

    def square_reg(i: int, k: int) -> int:
        sq = squares[i]
        if not sq:
            sq.append(emit(IN, i))
        while len(sq) <= k:
            sq.append(emit(MUL, sq[-1], sq[-1]))
        return sq[k]

    total = None
    for c, e in f.terms:
        mono = None
        for i, ei in enumerate(e):
            k = 0
            while ei:
                if ei & 1:
                    r = square_reg(i, k)
                    mono = r if mono is None else emit(MUL, mono, r)
                ei >>= 1
                k += 1
        if mono is None:
            term = emit(CONST, c)
        elif c == 1:
            term = mono
        else:
            term = emit(MUL, emit(CONST, c), mono)
        total = term if total is None else emit(ADD, total, term)
    if total != len(ins) - 1:
        # output must be the last instruction; a lone reused register needs a copy
        total = emit(ADD, total, emit(CONST, 0))
    return SlpProgram(n, tuple(ins))


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters for :func:`random_instance`.

    Monomials are drawn uniformly from those of total degree < D, so the
    result satisfies both D > deg f and every exponent < D.
    """

    n: int
    D: int
    T: int
    ring: Ring = ZZ
    seed: int = 0
    coeff_range: int = 100


def monomial_count(n: int, D: int) -> int:
    """Number of monomials in n variables with total degree < D."""
    return math.comb(D - 1 + n, n)


def random_monomial(rng: random.Random, n: int, D: int) -> Exps:
    # stars and bars: n+1 nonnegative parts (the last is slack) summing to D-1
    bars = sorted(rng.sample(range(D - 1 + n), n))
    parts, prev = [], -1
    for b in bars:
        parts.append(b - prev - 1)
        prev = b
    return tuple(parts)


def random_poly(spec: InstanceSpec) -> SparsePoly:
    rng = random.Random(spec.seed)
    n, D = spec.n, spec.D
    want = min(spec.T, monomial_count(n, D))
    if want * 4 >= monomial_count(n, D):
        monos = rng.sample(list(_all_monomials(n, D)), want)
    else:
        seen: set[Exps] = set()
        monos = []
        while len(monos) < want:
            e = random_monomial(rng, n, D)
            if e not in seen:
                seen.add(e)
                monos.append(e)
    return SparsePoly(n, ((spec.ring.random_nonzero(rng, spec.coeff_range), e) for e in monos), spec.ring)


def _all_monomials(n: int, D: int):
    if n == 1:
        for e in range(D):
            yield (e,)
        return
    for e in range(D):
        for rest in _all_monomials(n - 1, D - e):
            yield (e, *rest)


def random_instance(spec: InstanceSpec) -> tuple[SparsePoly, SlpProgram]:
    f = random_poly(spec)
    return f, sparse_to_slp(f)


def random_program(rng: random.Random, n: int, length: int, const_range: int = 5) -> SlpProgram:
    """Random circuit mixing all instruction kinds; the result may be dense.

    Operands lean toward recent registers so the output depends on most of
    the program rather than on a short tail.
    """
    ins = [Instr(IN, i) for i in range(n)]

    def recent(k: int) -> int:
        return max(0, k - 1 - int(rng.expovariate(0.4)))

    while len(ins) < n + length:
        r = rng.random()
        k = len(ins)
        if r < 0.1:
            ins.append(Instr(CONST, rng.randint(-const_range, const_range)))
            continue
        op = ADD if r < 0.45 else SUB if r < 0.6 else MUL
        ins.append(Instr(op, recent(k), rng.randrange(k)))
    return SlpProgram(n, tuple(ins))


def combine_programs(op: str, left: SlpProgram, right: SlpProgram) -> SlpProgram:
    """Program for ``left <op> right`` (both over the same variables)."""
    if left.nvars != right.nvars:
        raise ValueError("programs have different variable counts")
    shift = len(left)
    moved = [ins if ins.op in (IN, CONST) else Instr(ins.op, ins.a + shift, ins.b + shift)
             for ins in right.instructions]
    tail = Instr(op, left.output, shift + right.output)
    return SlpProgram(left.nvars, (*left.instructions, *moved, tail))


def collision_census(f: SparsePoly, D: int, p: int) -> tuple[int, int, list[int]]:
    """(uncollided terms, collided terms, sizes of collision blocks) under x_i -> x^(D^(i-1)) mod x^p - 1."""
    blocks = Counter(kron_pack(e, D) % p for _, e in f.terms)
    sizes = sorted(s for s in blocks.values() if s > 1)
    collided = sum(sizes)
    return f.term_count - collided, collided, sizes


def uncollided_terms(f: SparsePoly, D: int, p: int) -> list[tuple[int, Exps]]:
    blocks = Counter(kron_pack(e, D) % p for _, e in f.terms)
    return [(c, e) for c, e in f.terms if blocks[kron_pack(e, D) % p] == 1]


def kron_pack(e: Sequence[int], D: int) -> int:
    d = 0
    for x in reversed(e):
        d = d * D + x
    return d


def substitute(f: SparsePoly, a: Sequence[int]) -> SparsePoly:
    """Exact univariate f(x^a_1, ..., x^a_n), no reduction."""
    return SparsePoly(1, ((c, (sum(x * y for x, y in zip(e, a)),)) for c, e in f.terms), f.ring)


def brute_reduce(f: SparsePoly, a: Sequence[int], p: int) -> CyclicPoly:
    """Substitute exactly, then fold exponents modulo p."""
    g = substitute(f, a)
    return CyclicPoly(p, _fold_dict(g, p), f.ring)


def _fold_dict(g: SparsePoly, p: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for c, (d,) in g.terms:
        out[d % p] = out.get(d % p, 0) + c
    return out


class ExplicitOracle(ProbeOracle):
    """Probe source backed by a known univariate polynomial."""

    def __init__(self, g: SparsePoly, degree_bound: int | None = None):
        if g.nvars != 1:
            raise ValueError("ExplicitOracle needs a univariate polynomial")
        self.g = g
        self.ring = g.ring
        self.degree_bound = degree_bound if degree_bound is not None else g.max_exponent() + 1
        self.calls: list[int] = []

    def probe_many(self, qs: Sequence[int]) -> list[CyclicPoly]:
        self.calls.extend(qs)
        return [sparse_image(self.g, (1,), q) for q in qs]
