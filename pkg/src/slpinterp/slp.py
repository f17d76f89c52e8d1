"""Straight-line programs and probing them inside R[x]/(x^p - 1).

Text format, one instruction per line, registers numbered from 1::

    slp n=2
    in 1
    in 2
    mul 1 2      # x1*x2
    const 3
    add 3 4      # output is the last line

Internally variables and registers are 0-based.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

from .poly import CyclicPoly, SparsePoly, sparse_image
from .ring import ZZ, Ring

IN, CONST, ADD, SUB, MUL = "in", "const", "add", "sub", "mul"
_BINARY = (ADD, SUB, MUL)


class SlpParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class Instr(NamedTuple):
    op: str
    a: int  # variable index for IN, constant for CONST, register otherwise
    b: int = 0


@dataclass(frozen=True)
class SlpProgram:
    nvars: int
    instructions: tuple[Instr, ...]

    def __post_init__(self) -> None:
        if self.nvars < 1:
            raise ValueError("nvars must be >= 1")
        if not self.instructions:
            raise ValueError("program has no instructions")
        for i, ins in enumerate(self.instructions):
            if ins.op == IN:
                if not 0 <= ins.a < self.nvars:
                    raise ValueError(f"instruction {i + 1}: input index {ins.a + 1} out of range")
            elif ins.op in _BINARY:
                if not (0 <= ins.a < i and 0 <= ins.b < i):
                    raise ValueError(f"instruction {i + 1}: operand must reference an earlier register")
            elif ins.op != CONST:
                raise ValueError(f"instruction {i + 1}: unknown op {ins.op!r}")

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def output(self) -> int:
        return len(self.instructions) - 1

    def last_uses(self) -> list[int]:
        """For each register, the index of the last instruction reading it."""
        last = list(range(len(self.instructions)))
        for i, ins in enumerate(self.instructions):
            if ins.op in _BINARY:
                last[ins.a] = i
                last[ins.b] = i
        last[self.output] = len(self.instructions)
        return last


def parse_slp(text: str, nvars: int | None = None) -> SlpProgram:
    """Parse the circuit text format.

    The ``slp n=<n>`` header may be omitted if ``nvars`` is given; when both
    are present they must agree.
    """
    header_n = None
    instrs: list[Instr] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "slp":
            if instrs or header_n is not None or len(words) != 2 or not words[1].startswith("n="):
                raise SlpParseError(lineno, "malformed or misplaced header")
            try:
                header_n = int(words[1][2:])
            except ValueError:
                raise SlpParseError(lineno, "bad variable count") from None
            if header_n < 1:
                raise SlpParseError(lineno, "variable count must be >= 1")
            continue
        op, args = words[0], words[1:]
        try:
            vals = [int(x) for x in args]
        except ValueError:
            raise SlpParseError(lineno, "non-integer operand") from None
        idx = len(instrs) + 1
        if op == IN:
            if len(vals) != 1:
                raise SlpParseError(lineno, "'in' takes one operand")
            instrs.append(Instr(IN, vals[0] - 1))
            linenos.append(lineno)
        elif op == CONST:
            if len(vals) != 1:
                raise SlpParseError(lineno, "'const' takes one operand")
            instrs.append(Instr(CONST, vals[0]))
            linenos.append(lineno)
        elif op in _BINARY:
            if len(vals) != 2:
                raise SlpParseError(lineno, f"'{op}' takes two operands")
            for r in vals:
                if not 1 <= r < idx:
                    raise SlpParseError(lineno, f"register {r} is not defined before instruction {idx}")
            instrs.append(Instr(op, vals[0] - 1, vals[1] - 1))
            linenos.append(lineno)
        else:
            raise SlpParseError(lineno, f"unknown instruction {op!r}")
    if nvars is not None and header_n is not None and nvars != header_n:
        raise SlpParseError(1, f"header says n={header_n} but {nvars} variables were requested")
    n = header_n if header_n is not None else nvars
    if n is None:
        raise SlpParseError(1, "missing 'slp n=<n>' header")
    if not instrs:
        raise SlpParseError(1, "no instructions")
    for lineno, ins in zip(linenos, instrs):
        if ins.op == IN and not 0 <= ins.a < n:
            raise SlpParseError(lineno, f"input index {ins.a + 1} out of range for n={n}")
    return SlpProgram(n, tuple(instrs))


def format_slp(prog: SlpProgram) -> str:
    lines = [f"slp n={prog.nvars}"]
    for ins in prog.instructions:
        if ins.op == IN:
            lines.append(f"in {ins.a + 1}")
        elif ins.op == CONST:
            lines.append(f"const {ins.a}")
        else:
            lines.append(f"{ins.op} {ins.a + 1} {ins.b + 1}")
    return "\n".join(lines) + "\n"


@dataclass
class ProbeMeter:
    """Tally of probes issued: one modulus per probe, plus ring operations."""

    moduli: list[int] = field(default_factory=list)
    ring_ops: int = 0

    @property
    def probes(self) -> int:
        return len(self.moduli)

    @property
    def max_probe_degree(self) -> int:
        # images live in R[x]/(x^p - 1); report the largest p
        return max(self.moduli, default=0)

    def record(self, moduli: Sequence[int], ops: int) -> None:
        self.moduli.extend(moduli)
        self.ring_ops += ops

    def summary(self) -> dict[str, int]:
        return {"probes": self.probes, "max_probe_degree": self.max_probe_degree, "ring_ops": self.ring_ops}


def _eval_scalar(prog: SlpProgram, a: Sequence[int], p: int, q: int | None) -> tuple[dict[int, int], int]:
    """Evaluate with each register a {degree: coeff} dict; returns (output, ring ops).

    Dead operands are recycled in place, which keeps long sums linear.
    """
    last = prog.last_uses()
    regs: list[dict[int, int] | None] = [None] * len(prog.instructions)
    ops = 0
    for i, (op, x, y) in enumerate(prog.instructions):
        if op == IN:
            v = {a[x] % p: 1}
        elif op == CONST:
            c = x if q is None else x % q
            v = {0: c} if c else {}
        elif op == MUL:
            A, B = regs[x], regs[y]
            ops += len(A) * len(B)
            if len(A) == 1 and len(B) == 1:
                (da, ca), = A.items()
                (db, cb), = B.items()
                c = ca * cb if q is None else ca * cb % q
                v = {(da + db) % p: c} if c else {}
            else:
                v = {}
                for da, ca in A.items():
                    for db, cb in B.items():
                        d = da + db
                        if d >= p:
                            d -= p
                        v[d] = v.get(d, 0) + ca * cb
                if q is not None:
                    v = {d: c % q for d, c in v.items()}
                v = {d: c for d, c in v.items() if c}
        else:
            A, B = regs[x], regs[y]
            ops += len(A) + len(B)
            sign = 1 if op == ADD else -1
            if x != y and last[x] == i:
                v, other = A, B
                regs[x] = None
            elif op == ADD and x != y and last[y] == i:
                v, other = B, A
                regs[y] = None
            else:
                v, other = dict(A), B
            for d, c in other.items():
                r = v.get(d, 0) + sign * c
                if q is not None:
                    r %= q
                if r:
                    v[d] = r
                else:
                    v.pop(d, None)
        regs[i] = v
        if op in _BINARY:
            if last[x] == i:
                regs[x] = None
            if last[y] == i:
                regs[y] = None
    return regs[prog.output], ops


def probe_eval(prog: SlpProgram, a: Sequence[int], p: int, ring: Ring = ZZ,
               meter: ProbeMeter | None = None) -> CyclicPoly:
    """Run ``prog`` with x_i -> x^(a_i) and all arithmetic in R[x]/(x^p - 1)."""
    if len(a) != prog.nvars:
        raise ValueError(f"exponent map has length {len(a)}, expected {prog.nvars}")
    if p < 1:
        raise ValueError("modulus must be >= 1")
    out, ops = _eval_scalar(prog, a, p, ring.q)
    if meter is not None:
        meter.record([p], ops)
    return CyclicPoly._wrap(p, out, ring)


# Below this many moduli the per-instruction numpy overhead outweighs batching.
BATCH_MIN = 24


def probe_many(prog: SlpProgram, maps: Sequence[Sequence[int]], moduli: Sequence[int], ring: Ring = ZZ,
               meter: ProbeMeter | None = None, subtract: SparsePoly | None = None) -> list[CyclicPoly]:
    """``[probe_eval(prog, maps[m], moduli[m]) for m ...]``, batched when large.

    If ``subtract`` is given, its image under the same map is removed from
    each result (this is bookkeeping and is not metered as ring work).
    """
    if len(maps) != len(moduli):
        raise ValueError("one exponent map per modulus required")
    if len(moduli) >= BATCH_MIN:
        from .batch import eval_batch

        terms = subtract.terms if subtract is not None else None
        outs, ops = eval_batch(prog, maps, moduli, ring.q, terms)
        imgs = [CyclicPoly._wrap(p, o, ring) for p, o in zip(moduli, outs)]
    else:
        imgs, ops = [], 0
        for a, p in zip(maps, moduli):
            o, k = _eval_scalar(prog, a, p, ring.q)
            img = CyclicPoly._wrap(p, o, ring)
            if subtract is not None:
                img = img - sparse_image(subtract, a, p)
            imgs.append(img)
            ops += k
    if meter is not None:
        meter.record(moduli, ops)
    return imgs


class ProbeOracle:
    """A univariate polynomial g known only through its images g mod (x^q - 1).

    ``degree_bound`` exceeds deg g.
    """

    ring: Ring
    degree_bound: int

    def probe(self, q: int) -> CyclicPoly:
        return self.probe_many([q])[0]

    def probe_many(self, qs: Sequence[int]) -> list[CyclicPoly]:
        raise NotImplementedError


class SubstitutionOracle(ProbeOracle):
    """g(x) = (f - h)(x^a_1, ..., x^a_n) for a program f and explicit h."""

    def __init__(self, prog: SlpProgram, base_map: Sequence[int], degree_bound: int, ring: Ring = ZZ,
                 subtrahend: SparsePoly | None = None, meter: ProbeMeter | None = None):
        if len(base_map) != prog.nvars:
            raise ValueError("base map length must equal the number of program inputs")
        if subtrahend is not None and subtrahend.nvars != prog.nvars:
            raise ValueError("subtrahend has the wrong number of variables")
        self.prog = prog
        self.base_map = tuple(base_map)
        self.degree_bound = degree_bound
        self.ring = ring
        self.subtrahend = subtrahend if subtrahend is not None and not subtrahend.is_zero() else None
        self.meter = meter

    def probe_many(self, qs: Sequence[int]) -> list[CyclicPoly]:
        maps = [[ai % q for ai in self.base_map] for q in qs]
        return probe_many(self.prog, maps, qs, self.ring, self.meter, self.subtrahend)


def kron_oracle(prog: SlpProgram, D: int, ring: Ring = ZZ, meter: ProbeMeter | None = None) -> SubstitutionOracle:
    """f(x, x^D, ..., x^(D^(n-1))), degree bound D^n."""
    n = prog.nvars
    return SubstitutionOracle(prog, [D**i for i in range(n)], D**n, ring, meter=meter)


def sub_oracle(prog: SlpProgram, D: int, p: int, k: int | None = None, h: SparsePoly | None = None,
               ring: Ring = ZZ, meter: ProbeMeter | None = None) -> SubstitutionOracle:
    """(f - h)(x^mod(D^0,p), ..., x^mod(D^(n-1),p)), with x_k shifted by +p if ``k`` is given.

    ``k`` is 1-based.  Degree bound is D*p, or 2*D*p with the shift.
    """
    n = prog.nvars
    a = [pow(D, i, p) for i in range(n)]
    bound = D * p
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError(f"k={k} out of range 1..{n}")
        a[k - 1] += p
        bound = 2 * D * p
    return SubstitutionOracle(prog, a, bound, ring, subtrahend=h, meter=meter)
