"""Hypothesis strategies shared by the property tests."""
from __future__ import annotations

from hypothesis import strategies as st

from slpinterp.poly import SparsePoly
from slpinterp.ring import ZZ, Ring

rings = st.sampled_from([ZZ, Ring(2), Ring(6), Ring(7), Ring(101), Ring(2**61 - 1)])


@st.composite
def sparse_polys(draw, ring=None, nvars=None, max_terms=8, max_exp=12):
    ring = draw(rings) if ring is None else ring
    n = draw(st.integers(1, 3)) if nvars is None else nvars
    terms = draw(st.lists(st.tuples(st.integers(-50, 50), st.tuples(*[st.integers(0, max_exp)] * n)),
                          max_size=max_terms))
    return SparsePoly(n, terms, ring)
