import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from multisum.laurent import laurent_reduction
from multisum.polytope import (EmptyInteriorError, PolytopeError, UnboundedPolytopeError, faces, lattice_points,
                               newton_polytope, nonnegative_support, polytope_from_inequalities)
from multisum.term import as_balanced, eliminate_equalities


def corpus_polytopes(corpus_term):
    t = as_balanced(corpus_term[1])
    if t.equalities:
        t = eliminate_equalities(t).term
    return newton_polytope(t.linear())


def laurent_polytope(F, free):
    return newton_polytope(laurent_reduction(F, free).term.linear())


def brute_points(p, n):
    if p.dim == 0:
        return [()]
    hi = [math.ceil(max(v[i] for v in p.vertices) * n) for i in range(p.dim)]
    lo = [math.floor(min(v[i] for v in p.vertices) * n) for i in range(p.dim)]
    box = itertools.product(*(range(a - 1, b + 2) for a, b in zip(lo, hi)))
    return [k for k in box if all(c * n + sum(a * x for a, x in zip(v, k)) >= 0 for c, v in p.inequalities)]


def euler(p):
    return sum((-1) ** f.dim for f in faces(p))


def test_golden_unit_interval(corpus_term):
    p = corpus_polytopes(corpus_term)
    if corpus_term[0] == "central_binomial":
        assert p.dim == 0 and p.vertices == ((),)
    else:
        assert p.vertices == ((Fraction(0),), (Fraction(1),))


def _check_points(p):
    for n in range(9):
        assert lattice_points(p, n) == brute_points(p, n)


def test_lattice_points_match_brute_force(corpus_term):
    _check_points(corpus_polytopes(corpus_term))


def test_lattice_points_match_brute_force_laurent(corpus_laurent):
    _check_points(laurent_polytope(corpus_laurent[1], corpus_laurent[2]))


def _check_faces(p):
    fs = faces(p)
    assert euler(p) == 1
    assert {f.vertices[0] for f in fs if f.dim == 0} == set(p.vertices)
    assert fs[-1].dim == p.dim and not fs[-1].tight


def test_face_lattice_euler_and_vertices(corpus_term):
    _check_faces(corpus_polytopes(corpus_term))


def test_face_lattice_euler_and_vertices_laurent(corpus_laurent):
    _check_faces(laurent_polytope(corpus_laurent[1], corpus_laurent[2]))


def test_square_face_counts():
    p = polytope_from_inequalities([(0, (1, 0)), (0, (0, 1)), (1, (-1, 0)), (1, (0, -1)), (5, (1, 1))])
    dims = [f.dim for f in faces(p)]
    assert dims.count(0) == 4 and dims.count(1) == 4 and dims.count(2) == 1


def test_redundant_rows_are_harmless():
    a = polytope_from_inequalities([(0, (1,)), (1, (-1,))])
    b = polytope_from_inequalities([(0, (1,)), (0, (2,)), (1, (-1,)), (3, (-1,))])
    assert a.vertices == b.vertices and euler(b) == 1


@pytest.mark.parametrize("rows, err", [
    ([(0, (1,))], UnboundedPolytopeError),
    ([(0, (1, 0)), (0, (0, 1)), (1, (-1, 0))], UnboundedPolytopeError),
    ([(0, (1,)), (0, (-1,))], EmptyInteriorError),
    ([(-1, (1,)), (0, (-1,))], PolytopeError),
])
def test_degenerate_polytopes_raise(rows, err):
    with pytest.raises(err):
        polytope_from_inequalities(rows)


coef = st.integers(-3, 3)


@settings(max_examples=25)
@given(st.lists(st.tuples(st.integers(1, 6), st.tuples(coef, coef, coef)), max_size=4))
def test_random_cut_cubes(cuts):
    # unit cube scaled by 2, centred cuts keep the centre (1, 1, 1) strictly inside
    rows = [(0, (1, 0, 0)), (0, (0, 1, 0)), (0, (0, 0, 1)), (2, (-1, 0, 0)), (2, (0, -1, 0)), (2, (0, 0, -1))]
    for c, v in cuts:
        rows.append((c - sum(v), v))
    assume(all(c + sum(v) > 0 for c, v in rows))
    p = polytope_from_inequalities(rows)
    assert euler(p) == 1
    for n in range(4):
        assert lattice_points(p, n) == brute_points(p, n)


def test_nonnegative_support():
    # x0 + x1 = 1, x1 - x2 = 1 forces x1 = 1, x0 = 0, x2 = 0
    assert nonnegative_support([[1, 1, 0], [0, 1, -1]], [1, 1]) == {1}
    assert nonnegative_support([[1, 1]], [-1]) is None
    assert nonnegative_support([[1, 1, 1]], [1]) == {0, 1, 2}
