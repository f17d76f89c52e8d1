from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slpinterp.oracle import InstanceSpec, dense_expand, random_instance, random_program, sparse_to_slp
from slpinterp.poly import CyclicPoly, SparsePoly, sparse_image
from slpinterp.ring import ZZ, Ring
from slpinterp.slp import (
    ProbeMeter,
    SlpParseError,
    SlpProgram,
    format_slp,
    kron_oracle,
    parse_slp,
    probe_eval,
    probe_many,
    sub_oracle,
)

from .strategies import rings, sparse_polys


def test_parse_product():
    prog = parse_slp("in 1\nin 2\nmul 1 2\n", nvars=2)
    assert dense_expand(prog) == SparsePoly(2, [(1, (1, 1))])


def test_parse_plus_constant():
    prog = parse_slp("in 1\nconst 3\nadd 1 2\n", nvars=1)
    assert dense_expand(prog) == SparsePoly(1, [(1, (1,)), (3, (0,))])


def test_forward_reference():
    with pytest.raises(SlpParseError) as exc:
        parse_slp("mul 1 2\n", nvars=2)
    assert exc.value.lineno == 1


def test_parse_errors_carry_line_numbers():
    cases = {
        "slp n=2\nin 3\n": 2,
        "slp n=1\nin 1\nfoo 1\n": 3,
        "slp n=1\n# c\nin 1\nadd 1 x\n": 4,
        "slp n=1\nin 1\nadd 1\n": 3,
    }
    for text, line in cases.items():
        with pytest.raises(SlpParseError) as exc:
            parse_slp(text)
        assert exc.value.lineno == line, text


def test_header_handling():
    assert parse_slp("slp n=3\nin 2\n").nvars == 3
    with pytest.raises(SlpParseError):
        parse_slp("in 1\n")
    with pytest.raises(SlpParseError):
        parse_slp("slp n=2\nin 1\n", nvars=3)


def test_comments_and_blank_lines():
    prog = parse_slp("slp n=1  # header\n\n in 1 # x\nmul 1 1\n")
    assert len(prog) == 2


def test_program_validation():
    from slpinterp.slp import Instr

    with pytest.raises(ValueError):
        SlpProgram(1, (Instr("mul", 0, 0),))
    with pytest.raises(ValueError):
        SlpProgram(1, ())


@given(st.integers(0, 2**32))
def test_format_roundtrip(seed):
    rng = random.Random(seed)
    prog = random_program(rng, rng.randint(1, 4), rng.randint(1, 20))
    assert parse_slp(format_slp(prog)) == prog


class TestProbeEval:
    def test_product_plus_one(self):
        prog = parse_slp("slp n=2\nin 1\nin 2\nmul 1 2\nconst 1\nadd 3 4\n")
        assert probe_eval(prog, (1, 3), 7) == CyclicPoly(7, {4: 1, 0: 1})

    def test_cancellation(self):
        prog = parse_slp("slp n=1\nin 1\nsub 1 1\n")
        assert probe_eval(prog, (3,), 5).is_zero()

    def test_matches_sparse_image(self):
        f = SparsePoly(2, [(3, (2, 3)), (2, (0, 0))])
        got = probe_eval(sparse_to_slp(f), (1, 10 % 7), 7)
        assert got == CyclicPoly(7, {0: 2, 4: 3})

    def test_map_length_checked(self):
        with pytest.raises(ValueError):
            probe_eval(parse_slp("slp n=2\nin 1\n"), (1,), 5)

    def test_meter_counts(self):
        prog = parse_slp("slp n=1\nin 1\nconst 1\nadd 1 2\nmul 3 3\n")
        meter = ProbeMeter()
        probe_eval(prog, (1,), 11, meter=meter)
        probe_eval(prog, (1,), 13, meter=meter)
        # per probe: add 1+1, mul 2*2
        assert meter.summary() == {"probes": 2, "max_probe_degree": 13, "ring_ops": 12}

    def test_deterministic(self):
        f, prog = random_instance(InstanceSpec(3, 50, 20, seed=3))
        assert probe_eval(prog, (1, 5, 9), 97) == probe_eval(prog, (1, 5, 9), 97)


class TestOracles:
    def test_kron_probe(self):
        prog = parse_slp("slp n=2\nin 1\nin 2\nmul 1 2\n")
        orc = kron_oracle(prog, 3)
        assert orc.degree_bound == 9
        assert orc.probe(5) == CyclicPoly(5, {4: 1})

    def test_shifted_probe(self):
        prog = sparse_to_slp(SparsePoly(2, [(1, (2, 3))]))
        orc = sub_oracle(prog, 10, 7, k=2)
        assert orc.base_map == (1, 10)
        assert orc.degree_bound == 140
        assert orc.probe(33) == CyclicPoly(33, {32: 1})

    def test_unshifted_bound(self):
        prog = sparse_to_slp(SparsePoly(2, [(1, (2, 3))]))
        orc = sub_oracle(prog, 10, 7)
        assert orc.base_map == (1, 3) and orc.degree_bound == 70

    def test_subtracting_everything(self):
        f, prog = random_instance(InstanceSpec(2, 30, 10, seed=11))
        orc = sub_oracle(prog, 30, 13, None, f)
        assert all(g.is_zero() for g in orc.probe_many([5, 13, 64, 200]))

    def test_k_out_of_range(self):
        prog = parse_slp("slp n=2\nin 1\n")
        with pytest.raises(ValueError):
            sub_oracle(prog, 4, 5, k=3)
        with pytest.raises(ValueError):
            sub_oracle(prog, 4, 5, k=0)


@given(st.data())
def test_oracle_images_consistent_under_division(data):
    ring = data.draw(rings)
    f = data.draw(sparse_polys(ring=ring, nvars=2))
    prog = sparse_to_slp(f)
    D = data.draw(st.integers(2, 15))
    orc = kron_oracle(prog, D, ring)
    q = data.draw(st.integers(1, 12))
    m = data.draw(st.integers(1, 6))
    assert orc.probe(q * m).reduce(q) == orc.probe(q)


@given(st.data())
def test_probe_composition_matches_image(data):
    ring = data.draw(rings)
    f = data.draw(sparse_polys(ring=ring))
    prog = sparse_to_slp(f)
    p = data.draw(st.integers(1, 64))
    a = data.draw(st.lists(st.integers(0, p - 1), min_size=f.nvars, max_size=f.nvars))
    assert probe_eval(prog, a, p, ring) == sparse_image(f, a, p)


@pytest.mark.parametrize("ring", [ZZ, Ring(7), Ring(6), Ring(2**61 - 1), Ring(2**64 + 13)])
def test_batched_probes_match_scalar(ring):
    rng = random.Random(5)
    for trial in range(6):
        n = rng.randint(1, 3)
        prog = random_program(rng, n, rng.randint(5, 25), const_range=10**3)
        moduli = [rng.randint(1, 90) for _ in range(40)]
        maps = [[rng.randrange(q) for _ in range(n)] for q in moduli]
        sub = SparsePoly(n, [(rng.randint(-9, 9), [rng.randint(0, 5) for _ in range(n)]) for _ in range(3)], ring)
        m1, m2 = ProbeMeter(), ProbeMeter()
        batched = probe_many(prog, maps, moduli, ring, m1, sub)
        scalar = [probe_eval(prog, a, q, ring, m2) - sparse_image(sub, a, q) for a, q in zip(maps, moduli)]
        assert batched == scalar
        assert m1.summary() == m2.summary()


def test_batched_big_integer_coefficients():
    # repeated squaring of (x + 3) pushes coefficients past 64 bits
    prog = parse_slp("slp n=1\nin 1\nconst 3\nadd 1 2\n" + "".join(f"mul {i} {i}\n" for i in range(3, 10)))
    moduli = list(range(30, 60))
    maps = [[1]] * len(moduli)
    batched = probe_many(prog, maps, moduli)
    assert batched == [probe_eval(prog, [1], q) for q in moduli]
    assert max(abs(c) for g in batched for _, c in g.items()) > 2**64
