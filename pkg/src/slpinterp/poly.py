"""Sparse multivariate polynomials and the cyclic rings R[x]/(x^p - 1).

A :class:`SparsePoly` is the explicit form the interpolators return.  A
:class:`CyclicPoly` is the image of some polynomial modulo ``x^p - 1``; this
is what every probe produces.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

from .ring import ZZ, Ring

Exps = tuple[int, ...]
Term = tuple[int, Exps]


class SparsePoly:
    """Polynomial in ``nvars`` variables as sorted ``(coeff, exps)`` terms.

    Terms are kept in ascending lexicographic order of exponent vectors with
    no zero coefficients and no repeated monomials, so ``==`` is structural.
    """

    __slots__ = ("nvars", "ring", "terms")

    def __init__(self, nvars: int, terms: Iterable[tuple[int, Sequence[int]]] = (), ring: Ring = ZZ):
        if nvars < 1:
            raise ValueError("nvars must be >= 1")
        acc: dict[Exps, int] = {}
        for c, e in terms:
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent vector {e} has wrong length for nvars={nvars}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            acc[e] = ring.canon(acc.get(e, 0) + c)
        self.nvars = nvars
        self.ring = ring
        self.terms: tuple[Term, ...] = tuple((c, e) for e, c in sorted(acc.items()) if c != 0)

    @classmethod
    def from_dict(cls, nvars: int, d: Mapping[Exps, int], ring: Ring = ZZ) -> SparsePoly:
        return cls(nvars, ((c, e) for e, c in d.items()), ring)

    @classmethod
    def univariate(cls, d: Mapping[int, int], ring: Ring = ZZ) -> SparsePoly:
        """Build from ``{exponent: coeff}``."""
        return cls(1, ((c, (e,)) for e, c in d.items()), ring)

    def as_dict(self) -> dict[Exps, int]:
        return {e: c for c, e in self.terms}

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=-1)

    def max_exponent(self) -> int:
        return max((max(e) for _, e in self.terms), default=-1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.nvars == other.nvars and self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.ring, self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return f"SparsePoly(n={self.nvars}, 0)"
        body = " + ".join(f"{c}*x^{list(e)}" for c, e in self.terms)
        return f"SparsePoly(n={self.nvars}, {body})"

    def _check(self, other: SparsePoly) -> None:
        if self.nvars != other.nvars or self.ring != other.ring:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: SparsePoly) -> SparsePoly:
        self._check(other)
        return SparsePoly(self.nvars, self.terms + other.terms, self.ring)

    def __neg__(self) -> SparsePoly:
        return SparsePoly(self.nvars, ((-c, e) for c, e in self.terms), self.ring)

    def __sub__(self, other: SparsePoly) -> SparsePoly:
        return poly_sub(self, other)


def poly_sub(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    f._check(g)
    return SparsePoly(f.nvars, f.terms + tuple((-c, e) for c, e in g.terms), f.ring)


class CyclicPoly:
    """Element of R[x]/(x^p - 1).

    Only nonzero coefficients are stored (degree -> coeff); :meth:`dense`
    gives the length-``p`` coefficient vector.
    """

    __slots__ = ("modulus", "ring", "_c")

    def __init__(self, modulus: int, coeffs: Sequence[int] | Mapping[int, int] = (), ring: Ring = ZZ):
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        c: dict[int, int] = {}
        for d, v in items:
            d %= modulus
            v = ring.canon(c.get(d, 0) + v)
            if v:
                c[d] = v
            else:
                c.pop(d, None)
        self.modulus = modulus
        self.ring = ring
        self._c = c

    @classmethod
    def _wrap(cls, modulus: int, c: dict[int, int], ring: Ring) -> CyclicPoly:
        # c must already be reduced, canonical and free of zeros
        obj = cls.__new__(cls)
        obj.modulus = modulus
        obj.ring = ring
        obj._c = c
        return obj

    @property
    def term_count(self) -> int:
        return len(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def coeff(self, d: int) -> int:
        return self._c.get(d % self.modulus, 0)

    def __getitem__(self, d: int) -> int:
        return self.coeff(d)

    def items(self) -> list[tuple[int, int]]:
        """Nonzero ``(degree, coeff)`` pairs in increasing degree."""
        return sorted(self._c.items())

    def dense(self) -> list[int]:
        out = [0] * self.modulus
        for d, v in self._c.items():
            out[d] = v
        return out

    def is_zero(self) -> bool:
        return not self._c

    def reduce(self, q: int) -> CyclicPoly:
        """Image in R[x]/(x^q - 1); meaningful when q divides the modulus."""
        return CyclicPoly(q, self._fold(q), self.ring)

    def _fold(self, q: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for d, v in self._c.items():
            out[d % q] = out.get(d % q, 0) + v
        return out

    def minus_terms(self, terms: Iterable[tuple[int, int]]) -> CyclicPoly:
        """Subtract ``sum c*x^d`` for ``(d, c)`` in ``terms`` (degrees reduced)."""
        c = dict(self._c)
        p, ring = self.modulus, self.ring
        for d, v in terms:
            d %= p
            r = ring.canon(c.get(d, 0) - v)
            if r:
                c[d] = r
            else:
                c.pop(d, None)
        return CyclicPoly._wrap(p, c, ring)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclicPoly):
            return NotImplemented
        return self.modulus == other.modulus and self.ring == other.ring and self._c == other._c

    def __hash__(self) -> int:
        return hash((self.modulus, self.ring, frozenset(self._c.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*x^{d}" for d, v in self.items()) or "0"
        return f"CyclicPoly(p={self.modulus}, {body})"

    def __add__(self, other: CyclicPoly) -> CyclicPoly:
        _same(self, other)
        return self.minus_terms((d, -v) for d, v in other._c.items())

    def __sub__(self, other: CyclicPoly) -> CyclicPoly:
        return cyclic_sub(self, other)

    def __mul__(self, other: CyclicPoly) -> CyclicPoly:
        return cyclic_mul(self, other)


def _same(a: CyclicPoly, b: CyclicPoly) -> None:
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus} vs {b.modulus}")
    if a.ring != b.ring:
        raise ValueError("ring mismatch")


def cyclic_sub(a: CyclicPoly, b: CyclicPoly) -> CyclicPoly:
    _same(a, b)
    return a.minus_terms(b._c.items())


def cyclic_mul(a: CyclicPoly, b: CyclicPoly) -> CyclicPoly:
    """Schoolbook product with exponents wrapped modulo p."""
    _same(a, b)
    p, ring = a.modulus, a.ring
    out: dict[int, int] = {}
    for i, u in a._c.items():
        for j, v in b._c.items():
            k = i + j
            if k >= p:
                k -= p
            out[k] = out.get(k, 0) + u * v
    return CyclicPoly._wrap(p, {k: v for k, v in ((k, ring.canon(v)) for k, v in out.items()) if v}, ring)


def sparse_image(f: SparsePoly, a: Sequence[int], p: int) -> CyclicPoly:
    """f(x^a_1, ..., x^a_n) mod (x^p - 1) for an explicit polynomial."""
    if len(a) != f.nvars:
        raise ValueError(f"exponent map has length {len(a)}, expected {f.nvars}")
    if p < 1:
        raise ValueError("modulus must be >= 1")
    out: dict[int, int] = {}
    for c, e in f.terms:
        d = sum(ei * ai for ei, ai in zip(e, a)) % p
        out[d] = out.get(d, 0) + c
    ring = f.ring
    return CyclicPoly._wrap(p, {d: v for d, v in ((d, ring.canon(v)) for d, v in out.items()) if v}, ring)


def format_poly(f: SparsePoly) -> str:
    lines = [f"poly n={f.nvars}"]
    lines.extend(" ".join([str(c), *map(str, e)]) for c, e in f.terms)
    return "\n".join(lines) + "\n"


def parse_poly(text: str, ring: Ring = ZZ) -> SparsePoly:
    """Inverse of :func:`format_poly`; coefficients are canonicalized in ``ring``."""
    nvars = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if nvars is None:
            if not line.startswith("poly n="):
                raise ValueError(f"line {lineno}: expected header 'poly n=<n>'")
            nvars = int(line[7:])
            continue
        fields = line.split()
        if len(fields) != nvars + 1:
            raise ValueError(f"line {lineno}: expected {nvars + 1} fields, got {len(fields)}")
        try:
            nums = [int(x) for x in fields]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field") from None
        terms.append((nums[0], nums[1:]))
    if nvars is None:
        raise ValueError("empty polynomial file")
    return SparsePoly(nvars, terms, ring)
