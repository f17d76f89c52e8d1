from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slpinterp.oracle import brute_reduce, sparse_mul
from slpinterp.poly import (
    CyclicPoly,
    SparsePoly,
    cyclic_mul,
    cyclic_sub,
    format_poly,
    parse_poly,
    poly_sub,
    sparse_image,
)
from slpinterp.ring import ZZ, Ring

from .strategies import rings, sparse_polys


def uni(d, ring=ZZ):
    return SparsePoly.univariate(d, ring)


class TestCyclicMul:
    def test_no_wraparound(self):
        one_x = CyclicPoly(3, [1, 1])
        assert cyclic_mul(one_x, one_x) == CyclicPoly(3, [1, 2, 1])

    def test_square_wraps_to_one(self):
        x = CyclicPoly(2, {1: 1})
        assert cyclic_mul(x, x) == CyclicPoly(2, {0: 1})

    def test_wraparound_p4(self):
        # (1 + x^3) x^2 = x^2 + x^5 = x^2 + x (mod x^4 - 1)
        a = CyclicPoly(4, {0: 1, 3: 1})
        b = CyclicPoly(4, {2: 1})
        assert cyclic_mul(a, b) == CyclicPoly(4, {1: 1, 2: 1})

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            cyclic_mul(CyclicPoly(3, [1]), CyclicPoly(4, [1]))


class TestSparseImage:
    def test_bivariate(self):
        f = SparsePoly(2, [(3, (2, 3)), (2, (0, 0))])
        assert sparse_image(f, (1, 3), 7) == CyclicPoly(7, {0: 2, 4: 3})

    def test_zero(self):
        assert sparse_image(SparsePoly(2), (4, 5), 6).is_zero()

    def test_collision_adds(self):
        f = SparsePoly(2, [(1, (1, 0)), (1, (0, 1))])
        assert sparse_image(f, (1, 1), 5) == CyclicPoly(5, {1: 2})

    def test_collision_cancels_mod_q(self):
        r = Ring(5)
        f = SparsePoly(2, [(3, (1, 0)), (2, (0, 1))], r)
        assert sparse_image(f, (1, 1), 5).is_zero()

    def test_big_exponents_exact(self):
        f = SparsePoly(1, [(1, (10**40 + 3,))])
        assert sparse_image(f, (1,), 10**40) == CyclicPoly(10**40, {3: 1})


class TestSubtraction:
    def test_self(self):
        f = uni({10: 3, 4: 2})
        assert poly_sub(f, f).is_zero()

    def test_drop_term(self):
        assert poly_sub(uni({10: 3, 4: 2}), uni({4: 2})) == uni({10: 3})

    def test_mod_five(self):
        r = Ring(5)
        assert poly_sub(uni({1: 3}, r), uni({1: -2}, r)).is_zero()
        assert cyclic_sub(CyclicPoly(3, {1: 3}, r), CyclicPoly(3, {1: -2}, r)).is_zero()

    def test_nvars_mismatch(self):
        with pytest.raises(ValueError):
            poly_sub(SparsePoly(1), SparsePoly(2))


class TestSparsePoly:
    def test_canonical_order_and_merging(self):
        f = SparsePoly(2, [(1, (1, 0)), (2, (0, 1)), (-1, (1, 0)), (4, (0, 0))])
        assert f.terms == ((4, (0, 0)), (2, (0, 1)))
        assert f.term_count == 2

    def test_structural_equality(self):
        assert SparsePoly(1, [(1, (2,)), (1, (0,))]) == SparsePoly(1, [(1, (0,)), (1, (2,))])
        assert SparsePoly(1, [(1, (0,))]) != SparsePoly(1, [(1, (0,))], Ring(7))

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            SparsePoly(2, [(1, (1,))])
        with pytest.raises(ValueError):
            SparsePoly(1, [(1, (-1,))])

    def test_degrees(self):
        f = SparsePoly(3, [(1, (1, 2, 3)), (1, (5, 0, 0))])
        assert f.total_degree() == 6
        assert f.max_exponent() == 5


class TestCyclicPoly:
    def test_dense_and_items(self):
        g = CyclicPoly(5, [0, 2, 0, 7])
        assert g.dense() == [0, 2, 0, 7, 0]
        assert g.items() == [(1, 2), (3, 7)]
        assert g.term_count == 2

    def test_reduce_folds(self):
        assert CyclicPoly(6, {1: 1, 4: 2}).reduce(3) == CyclicPoly(3, {1: 3})

    def test_minus_terms_reduces_degrees(self):
        assert CyclicPoly(5, {2: 4}).minus_terms([(7, 4)]).is_zero()


def test_format_parse_roundtrip():
    f = SparsePoly(3, [(5, (0, 0, 0)), (-7, (1, 2, 3))])
    text = format_poly(f)
    assert text == "poly n=3\n5 0 0 0\n-7 1 2 3\n"
    assert parse_poly(text) == f


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_poly("1 2\n")
    with pytest.raises(ValueError):
        parse_poly("poly n=2\n1 2\n")


@given(st.data())
def test_image_is_ring_homomorphism(data):
    ring = data.draw(rings)
    n = data.draw(st.integers(1, 3))
    f = data.draw(sparse_polys(ring=ring, nvars=n))
    g = data.draw(sparse_polys(ring=ring, nvars=n))
    p = data.draw(st.integers(1, 40))
    a = data.draw(st.lists(st.integers(0, 100), min_size=n, max_size=n))
    fg = SparsePoly.from_dict(n, sparse_mul(f.as_dict(), g.as_dict(), ring), ring)
    fi, gi = sparse_image(f, a, p), sparse_image(g, a, p)
    assert sparse_image(fg, a, p) == cyclic_mul(fi, gi)
    assert sparse_image(f + g, a, p) == fi + gi
    assert sparse_image(f - g, a, p) == cyclic_sub(fi, gi)


@given(sparse_polys(), st.integers(2, 30), st.integers(1, 60))
def test_kronecker_image_matches_brute_reduction(f, D, p):
    a = [pow(D, i, p) for i in range(f.nvars)]
    assert sparse_image(f, a, p) == brute_reduce(f, [D**i for i in range(f.nvars)], p)


@given(sparse_polys(), st.integers(1, 30))
def test_image_never_gains_terms(f, p):
    assert sparse_image(f, [1] * f.nvars, p).term_count <= f.term_count


@given(sparse_polys())
def test_format_roundtrip_property(f):
    assert parse_poly(format_poly(f), f.ring) == f
