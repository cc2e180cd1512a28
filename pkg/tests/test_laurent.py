from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from multisum.corpus import LAURENT, load_builtin_laurent
from multisum.laurent import (LaurentPoly, NotConvenientError, convenient_part, laurent_from_dict, laurent_reduction,
                              laurent_to_dict, laurent_to_term, psi_map, torus_critical_points, trace_power,
                              trace_sequence, verify_psi)
from multisum.polytope import faces, newton_polytope
from multisum.sequence import compute_sequence

mp = mpmath.mpf


def naive_trace(F, n):
    poly = {(0,) * F.dims: Fraction(1)}
    for _ in range(n):
        nxt = {}
        for e1, c1 in poly.items():
            for e2, c2 in F.monomials:
                e = tuple(a + b for a, b in zip(e1, e2))
                nxt[e] = nxt.get(e, 0) + c1 * c2
        poly = nxt
    return poly.get((0,) * F.dims, Fraction(0))


def assert_trace_identity(F, free=None, N=12):
    red = laurent_reduction(F, free)
    d = red.stride
    reduced = compute_sequence(red.term, N // d).values
    tr = trace_sequence(F, N)
    for n in range(N + 1):
        assert tr[n] == (reduced[n // d] if n % d == 0 else 0)


def test_trace_examples():
    assert trace_power(load_builtin_laurent("x_plus_inverse"), 2) == 2
    assert trace_power(load_builtin_laurent("hexagon_f"), 0) == 1
    assert trace_power(load_builtin_laurent("hexagon_f"), 1) == 1


def test_trace_matches_naive_expansion(corpus_laurent):
    F = corpus_laurent[1]
    assert trace_sequence(F, 8) == [naive_trace(F, n) for n in range(9)]


def test_trace_identity_corpus(corpus_laurent):
    _, F, free = corpus_laurent
    assert_trace_identity(F, free)
    assert_trace_identity(F)


exps = st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=2, max_size=5, unique=True)


@given(exps, st.lists(st.integers(1, 3), min_size=5, max_size=5))
def test_trace_identity_random(e, c):
    F = LaurentPoly(list(zip(e, map(Fraction, c))), 2)
    assume(not F.is_constant())
    try:
        convenient_part(F)
    except NotConvenientError:
        assert all(v == 0 for v in trace_sequence(F, 6)[1:])
        return
    assert_trace_identity(F, N=6)


def test_constant_polynomial_term():
    F = LaurentPoly({(0,): Fraction(3)}, 1)
    red = laurent_reduction(F)
    assert compute_sequence(red.term, 5).values == tuple(Fraction(3) ** n for n in range(6))
    with pytest.raises(ValueError):
        torus_critical_points(F)


def test_x_plus_inverse_term():
    red = laurent_reduction(load_builtin_laurent("x_plus_inverse"))
    assert red.stride == 2 and red.term.r == 0
    assert compute_sequence(red.term, 6).values == tuple(comb(2 * m, m) for m in range(7))


def test_hexagon_reduced_polytope_is_the_expected_simplex():
    red = laurent_reduction(load_builtin_laurent("hexagon_f"), (0, 2, 4))
    p = newton_polytope(red.term.linear())
    third = Fraction(1, 3)
    assert set(p.vertices) == {(0, 0, 0), (Fraction(1, 2), 0, 0), (0, Fraction(1, 2), 0), (0, 0, third)}
    from multisum.polytope import lattice_points
    assert lattice_points(p, 2) == [(0, 0, 0), (0, 1, 0), (1, 0, 0)]


def test_newton_polytope_is_simplex_and_coefficient_free(corpus_laurent):
    _, F, free = corpus_laurent
    red = laurent_reduction(F, free)
    if red.term.r == 0:
        return
    p = newton_polytope(red.term.linear())
    assert len(p.vertices) == p.dim + 1
    assert sum(1 for f in faces(p)) == 2 ** (p.dim + 1) - 1
    G = LaurentPoly([(e, c * (i + 2)) for i, (e, c) in enumerate(F.monomials)], F.dims)
    assert newton_polytope(laurent_reduction(G, free).term.linear()) == p


def test_torus_critical_points_examples(cfg):
    with mpmath.workdps(cfg.digits):
        pts = torus_critical_points(load_builtin_laurent("x_plus_inverse"), cfg)
        assert sorted(float(mpmath.re(u[0])) for u, _ in pts) == [-1.0, 1.0]
        assert sorted(float(mpmath.re(v)) for _, v in pts) == [-2.0, 2.0]
        G = LaurentPoly({(1, 0): 1, (0, 1): 1, (-1, -1): 1}, 2)
        pts = torus_critical_points(G, cfg)
        assert len(pts) == 3
        for u, v in pts:
            assert abs(u[0] - u[1]) < mp(10) ** -40 and abs(u[0] ** 3 - 1) < mp(10) ** -40
            assert abs(v - 3 * u[0]) < mp(10) ** -40


def test_psi_map_examples(cfg):
    assert psi_map(load_builtin_laurent("x_plus_inverse"), (Fraction(1),)) == (Fraction(1, 2), Fraction(1, 2))
    F = load_builtin_laurent("hexagon_f")
    with mpmath.workdps(cfg.digits):
        for u, _ in torus_critical_points(F, cfg):
            w = psi_map(F, u)
            assert abs(sum(w) - 1) < mp(10) ** -50
            assert abs(w[2] + w[4] - w[3]) < mp(10) ** -30
            assert abs(w[0] + w[4] - w[1]) < mp(10) ** -30


def test_verify_x_plus_inverse(cfg):
    rep = verify_psi(load_builtin_laurent("x_plus_inverse"), cfg)
    assert rep.ok and rep.stride == 2
    assert sorted(float(mpmath.re(c)) for c in rep.candidates) == [-0.5, 0.5]
    assert not rep.unmatched_candidates


def test_verify_hexagon(cfg):
    rep = verify_psi(load_builtin_laurent("hexagon_f"), cfg, (0, 2, 4))
    assert rep.ok and len(rep.pairs) == 3
    assert rep.max_residual < mp(10) ** -25
    assert not rep.unmatched_solutions and not rep.unmatched_candidates


def test_verify_single_monomial_is_vacuous(cfg):
    rep = verify_psi(LaurentPoly({(1,): 1}, 1), cfg)
    assert rep.ok and not rep.pairs


def test_dict_roundtrip():
    for d in LAURENT.values():
        assert laurent_to_dict(laurent_from_dict(d)) == d


@pytest.mark.parametrize("bad", [
    {"dims": 1},
    {"dims": 1, "monomials": [{"exp": [1.5], "coeff": "1"}]},
    {"dims": 2, "monomials": [{"exp": [1], "coeff": "1"}]},
    {"dims": 1, "monomials": [{"exp": [1], "coeff": "0"}]},
])
def test_malformed_laurent(bad):
    with pytest.raises(ValueError):
        laurent_from_dict(bad)


def test_terms_carry_support_equalities():
    t = laurent_to_term(load_builtin_laurent("hexagon_f"))
    assert len(t.equalities) == 3 and t.r == 6
