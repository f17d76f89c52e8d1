"""Deterministic sparse interpolation of polynomials given as straight-line programs."""
from __future__ import annotations

from .multivariate import ALGOS, MCandidate, find_k0, interpolate, mpoly_kron, mpoly_si, mterms
from .poly import CyclicPoly, SparsePoly, cyclic_mul, cyclic_sub, format_poly, parse_poly, poly_sub, sparse_image
from .primes import compute_kd, crt, d_adic_expand, d_adic_pack, first_primes
from .ring import ZZ, Ring, zmod
from .slp import (
    ProbeMeter,
    ProbeOracle,
    SlpParseError,
    SlpProgram,
    SubstitutionOracle,
    format_slp,
    kron_oracle,
    parse_slp,
    probe_eval,
    probe_many,
    sub_oracle,
)
from .univariate import (
    InterpolationError,
    Schedule,
    UCandidate,
    make_schedule,
    ok_prime_select,
    term_test,
    ui_poly,
    uterms,
)

__all__ = [
    "ALGOS", "ZZ", "CyclicPoly", "InterpolationError", "MCandidate", "ProbeMeter", "ProbeOracle", "Ring", "Schedule",
    "SlpParseError", "SlpProgram", "SparsePoly", "SubstitutionOracle", "UCandidate", "compute_kd", "crt",
    "cyclic_mul", "cyclic_sub", "d_adic_expand", "d_adic_pack", "find_k0", "first_primes", "format_poly",
    "format_slp", "interpolate", "kron_oracle", "make_schedule", "mpoly_kron", "mpoly_si", "mterms", "ok_prime_select",
    "parse_poly", "parse_slp", "poly_sub", "probe_eval", "probe_many", "sparse_image", "sub_oracle",
    "term_test", "ui_poly", "uterms", "zmod",
]
