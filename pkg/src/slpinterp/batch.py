"""Vectorized probing: one program evaluated modulo many x^p - 1 at once.

Every register holds the nonzero terms of all M images together as three
parallel arrays (modulus index, degree, coefficient) sorted by
(modulus index, degree).  Results are identical to the scalar engine in
:mod:`slpinterp.slp`; only the bookkeeping differs.

Coefficients use int64 while a running bound on their magnitude proves
that no product or sum can overflow, and Python ints (object arrays)
otherwise, so ZZ stays exact.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .slp import ADD, CONST, IN, MUL, SlpProgram

_LIMIT = 1 << 62
_SMALL_Q = 1 << 31


class _Val:
    __slots__ = ("mi", "dg", "cf", "bound", "maxcount")

    def __init__(self, mi, dg, cf, bound, maxcount):
        self.mi = mi
        self.dg = dg
        self.cf = cf
        self.bound = bound  # upper bound on |coeff|
        self.maxcount = maxcount  # max terms in any one image

    def __len__(self) -> int:
        return len(self.mi)


class _Batch:
    def __init__(self, moduli: Sequence[int], q: int | None):
        self.M = len(moduli)
        self.P = np.asarray(moduli, dtype=np.int64)
        self.stride = int(self.P.max())
        if self.M * self.stride >= _LIMIT:
            raise OverflowError("too many or too large moduli for one batch")
        self.q = q
        self.fixed_int = q is not None and q <= _SMALL_Q
        self.fixed_obj = q is not None and not self.fixed_int
        self.arange = np.arange(self.M, dtype=np.int64)
        self.empty = _Val(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int64), 0, 0)

    def _dtype(self, bound: int):
        if self.fixed_int:
            return np.int64
        if self.fixed_obj or bound >= _LIMIT:
            return object
        return np.int64

    @staticmethod
    def _cast(cf, dtype):
        return cf if cf.dtype == dtype else cf.astype(dtype)

    def finish(self, mi, dg, cf, presorted: bool) -> _Val:
        """Sort by (modulus, degree), merge duplicates, reduce, drop zeros."""
        if len(mi) == 0:
            return self.empty
        key = mi * self.stride + dg
        if not presorted:
            order = np.argsort(key, kind="stable")
            key = key[order]
            cf = cf[order]
        if len(key) > 1:
            new = np.empty(len(key), dtype=bool)
            new[0] = True
            np.not_equal(key[1:], key[:-1], out=new[1:])
            if not new.all():
                starts = np.flatnonzero(new)
                cf = np.add.reduceat(cf, starts)
                key = key[starts]
        if self.q is not None:
            cf = cf % self.q
        nz = cf != 0
        if not nz.all():
            key = key[nz]
            cf = cf[nz]
        if len(key) == 0:
            return self.empty
        mi, dg = np.divmod(key, self.stride)
        if self.q is not None:
            bound = self.q - 1
        else:
            bound = int(np.abs(cf).max())
            if cf.dtype == object and bound < _LIMIT:
                cf = cf.astype(np.int64)
        return _Val(mi, dg, cf, bound, int(np.bincount(mi).max()))

    def monomials(self, degs, c: int) -> _Val:
        if c == 0:
            return self.empty
        cf = np.full(self.M, c, dtype=self._dtype(abs(c)))
        return _Val(self.arange, np.asarray(degs, dtype=np.int64), cf, abs(c), 1)

    def addsub(self, A: _Val, B: _Val, sign: int) -> _Val:
        """A + sign*B by merging two sorted, duplicate-free term lists."""
        if len(B) == 0:
            return A
        if len(A) == 0 and sign == 1:
            return B
        dtype = self._dtype(A.bound + B.bound)
        cfb = self._cast(B.cf, dtype)
        if sign < 0:
            cfb = -cfb
        if self.q is not None:
            cfb = cfb % self.q
        ka = A.mi * self.stride + A.dg
        kb = B.mi * self.stride + B.dg
        pos = np.searchsorted(ka, kb)
        hit = pos < len(ka)
        hit[hit] = ka[pos[hit]] == kb[hit]
        cf = self._cast(A.cf, dtype).copy()
        at = pos[hit]
        if len(at):
            cf[at] += cfb[hit]
            if self.q is not None:
                cf[at] %= self.q
        miss = ~hit
        if miss.any():
            ka = np.insert(ka, pos[miss], kb[miss])
            cf = np.insert(cf, pos[miss], cfb[miss])
        if len(at):
            nz = cf != 0
            if not nz.all():
                ka, cf = ka[nz], cf[nz]
        if len(ka) == 0:
            return self.empty
        mi, dg = np.divmod(ka, self.stride)
        if self.q is not None:
            bound = self.q - 1
        else:
            bound = A.bound + B.bound
            if bound >= _LIMIT:
                bound = int(np.abs(cf).max())
                if cf.dtype == object and bound < _LIMIT:
                    cf = cf.astype(np.int64)
        return _Val(mi, dg, cf, bound, int(np.bincount(mi).max()))

    def mul(self, A: _Val, B: _Val) -> tuple[_Val, int]:
        if len(A) == 0 or len(B) == 0:
            return self.empty, 0
        if len(A) == self.M and len(B) == self.M and A.maxcount == 1 and B.maxcount == 1:
            v = self._mono_mul(A, B)
            if v is not None:
                return v, self.M
        cnt_b = np.bincount(B.mi, minlength=self.M)
        reps = cnt_b[A.mi]
        total = int(reps.sum())
        if total == 0:
            return self.empty, 0
        if A.maxcount == 1 and B.maxcount == 1:
            # one term per image on both sides: pair up images directly
            keep = reps.astype(bool)
            ia = np.flatnonzero(keep)
            m = A.mi[ia]
            start_b = np.cumsum(cnt_b) - cnt_b
            ib = start_b[m]
        else:
            ia = np.repeat(np.arange(len(A), dtype=np.int64), reps)
            first = np.cumsum(reps) - reps
            off = np.arange(total, dtype=np.int64) - np.repeat(first, reps)
            m = A.mi[ia]
            start_b = np.cumsum(cnt_b) - cnt_b
            ib = start_b[m] + off
        dg = A.dg[ia] + B.dg[ib]
        pm = self.P[m]
        dg = np.where(dg >= pm, dg - pm, dg)
        if self.q is not None:
            dtype = self._dtype(0)
            cf = self._cast(A.cf, dtype)[ia] * self._cast(B.cf, dtype)[ib] % self.q
        else:
            k = min(A.maxcount, B.maxcount)
            dtype = self._dtype(A.bound * B.bound * k)
            cf = self._cast(A.cf, dtype)[ia] * self._cast(B.cf, dtype)[ib]
        presorted = A.maxcount == 1 and B.maxcount == 1
        return self.finish(m, dg, cf, presorted=presorted), total

    def _mono_mul(self, A: _Val, B: _Val) -> _Val | None:
        # one term in every image on both sides: elementwise, already sorted
        dg = A.dg + B.dg
        dg = np.where(dg >= self.P, dg - self.P, dg)
        if self.q is None:
            bound = A.bound * B.bound
            dtype = self._dtype(bound)
            cf = self._cast(A.cf, dtype) * self._cast(B.cf, dtype)
            # products of nonzero integers are nonzero
            return _Val(self.arange, dg, cf, bound, 1)
        dtype = self._dtype(0)
        cf = self._cast(A.cf, dtype) * self._cast(B.cf, dtype) % self.q
        if not cf.all():
            return None
        return _Val(self.arange, dg, cf, self.q - 1, 1)

    def terms_image(self, terms, amat) -> _Val:
        """Batch image of an explicit polynomial's terms."""
        n = amat.shape[1]
        maxe = max((max(e) for _, e in terms), default=0)
        safe = maxe * self.stride * max(n, 1) < _LIMIT
        mis, dgs, cfs = [], [], []
        for c, e in terms:
            if safe:
                d = (amat @ np.asarray(e, dtype=np.int64)) % self.P
            else:
                d = np.array([sum(ei * int(ai) for ei, ai in zip(e, row)) % int(p)
                              for row, p in zip(amat, self.P)], dtype=np.int64)
            mis.append(self.arange)
            dgs.append(d)
            cfs.append(np.full(self.M, c, dtype=object))
        cf = np.concatenate(cfs)
        bound = max(abs(c) for c, _ in terms)
        if self.fixed_int or (not self.fixed_obj and bound * len(terms) < _LIMIT):
            cf = cf.astype(np.int64)
        return self.finish(np.concatenate(mis), np.concatenate(dgs), cf, presorted=False)

    def to_dicts(self, v: _Val) -> list[dict[int, int]]:
        cuts = np.searchsorted(v.mi, np.arange(self.M + 1)).tolist()
        dg = v.dg.tolist()
        cf = v.cf.tolist()
        return [dict(zip(dg[s:e], cf[s:e])) for s, e in zip(cuts[:-1], cuts[1:])]


def eval_batch(prog: SlpProgram, maps: Sequence[Sequence[int]], moduli: Sequence[int], q: int | None,
               subtract: Sequence[tuple[int, Sequence[int]]] | None = None) -> tuple[list[dict[int, int]], int]:
    """Evaluate ``prog`` at every (map, modulus) pair; returns per-modulus dicts and ring-op count.

    ``subtract`` is an optional list of ``(coeff, exps)`` terms whose images
    are subtracted from the output (not counted as ring operations).
    """
    bt = _Batch(moduli, q)
    amat = np.array([[ai % p for ai in a] for a, p in zip(maps, moduli)], dtype=np.int64).reshape(bt.M, prog.nvars)
    last = prog.last_uses()
    regs: list[_Val | None] = [None] * len(prog.instructions)
    ops = 0
    for i, (op, x, y) in enumerate(prog.instructions):
        if op == IN:
            v = bt.monomials(amat[:, x], 1)
        elif op == CONST:
            v = bt.monomials(np.zeros(bt.M, dtype=np.int64), x if q is None else x % q)
        elif op == MUL:
            v, k = bt.mul(regs[x], regs[y])
            ops += k
        else:
            A, B = regs[x], regs[y]
            ops += len(A) + len(B)
            v = bt.addsub(A, B, 1 if op == ADD else -1)
        regs[i] = v
        if op not in (IN, CONST):
            if last[x] == i:
                regs[x] = None
            if last[y] == i:
                regs[y] = None
    out = regs[prog.output]
    if subtract:
        out = bt.addsub(out, bt.terms_image(subtract, amat), -1)
    return bt.to_dicts(out), ops
