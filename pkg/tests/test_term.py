import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multisum.corpus import TERMS, load_builtin_laurent
from multisum.laurent import laurent_reduction, laurent_to_term
from multisum.polytope import support_points
from multisum.term import (BalancedTerm, LinearForm, SpecialTerm, TermDomainError, as_balanced,
                           eliminate_equalities, eval_term, special_to_balanced,
                           term_digest, term_from_dict, term_to_dict, validate)


def naive_eval(term: BalancedTerm, n, k):
    """Independent factorial evaluation, ``None`` outside the support."""
    value = Fraction(term.c0) ** n * term.scale
    for ci, ki in zip(term.c, k):
        value *= Fraction(ci) ** ki
    for f, s in term.factors:
        m = f.coeff_n * n + sum(a * b for a, b in zip(f.coeffs_k, k)) + f.offset
        if m < 0:
            return None
        value *= Fraction(math.factorial(m)) ** s
    return value


def test_dict_roundtrip_and_digest(corpus_term):
    name, term = corpus_term
    assert term_to_dict(term) == TERMS[name] | ({"equalities": []} if "factors" in TERMS[name] else {})
    assert term_from_dict(term_to_dict(term)) == term
    assert term_digest(term) == term_digest(term_from_dict(TERMS[name]))


@pytest.mark.parametrize("bad, msg", [
    ({"c0": "1", "c": [], "factors": [], "extra": 1}, "unknown keys"),
    ({"c0": "2/4", "c": [], "factors": []}, "lowest terms"),
    ({"c0": "1", "c": [], "factors": [{"n": 1.5, "k": [], "sign": 1}]}, "integer"),
    ({"c0": "1", "c": ["1"], "factors": [{"n": 1, "k": [], "sign": 1}]}, "length 1"),
    ({"c0": "1", "c": [], "factors": [{"n": 1, "k": [], "sign": 2}]}, "sign"),
    ({"c0": "1", "c": []}, "'factors' or 'binomials'"),
    ([], "JSON object"),
])
def test_malformed_descriptions_rejected(bad, msg):
    with pytest.raises(ValueError, match=msg):
        term_from_dict(bad)


def test_validate_reports_unbalanced_and_zero_constants():
    t = BalancedTerm(Fraction(1), (Fraction(0),), ((LinearForm(1, (1,)), 1), (LinearForm(0, (1,)), -1)))
    rep = validate(t)
    assert not rep.ok
    assert any("n-coordinate" in v for v in rep.violations)
    assert any("c1" in v for v in rep.violations)


def test_validate_corpus(corpus_term):
    assert validate(as_balanced(corpus_term[1])).ok


def test_eval_matches_naive_factorials(corpus_term):
    term = as_balanced(corpus_term[1])
    for n in range(0, 7):
        for k in itertools.product(range(-5, 6), repeat=term.r):
            expected = naive_eval(term, n, k)
            if expected is None:
                with pytest.raises(TermDomainError):
                    eval_term(term, n, k)
            else:
                assert eval_term(term, n, k) == expected


def test_support_points_are_exactly_the_nonnegative_region(corpus_term):
    term = as_balanced(corpus_term[1])
    for n in range(7):
        brute = [k for k in itertools.product(range(-3, 3 * n + 4), repeat=term.r)
                 if naive_eval(term, n, k) is not None]
        assert support_points(term, n) == sorted(brute)


@pytest.mark.parametrize("name", ["closed_form", "inverse_binomial"])
def test_special_expansion_matches_binomial_product(name):
    special = term_from_dict(TERMS[name])
    bal = special_to_balanced(special)
    for n in range(7):
        for k in support_points(bal, n):
            direct = Fraction(1)
            for top, bottom, s in special.binomials:
                direct *= Fraction(math.comb(top(n, k), bottom(n, k))) ** s
            assert eval_term(bal, n, k) == direct


forms = st.builds(lambda a, b, c: LinearForm(a, (b, c)), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))


@given(st.lists(st.tuples(forms, forms, st.sampled_from([1, -1])), min_size=1, max_size=4))
def test_special_terms_are_always_balanced(bins):
    t = SpecialTerm(Fraction(1), (Fraction(1), Fraction(2)), tuple(bins))
    assert validate(special_to_balanced(t)).ok


def test_equality_elimination_is_an_embedding():
    F = load_builtin_laurent("hexagon_f")
    term = laurent_to_term(F)
    for free in (None, (0, 2, 4)):
        red = eliminate_equalities(term, free)
        assert not red.term.equalities
        for n_red in range(5):
            for m in support_points(red.term, n_red):
                n, k = red.embedding(n_red, m)
                assert eval_term(red.term, n_red, m) == eval_term(term, n, k)


def test_stride_of_x_plus_inverse():
    red = laurent_reduction(load_builtin_laurent("x_plus_inverse"))
    assert red.stride == 2
    assert [eval_term(red.term, n) for n in range(5)] == [math.comb(2 * n, n) for n in range(5)]


def test_eval_rejects_a_failed_equality():
    term = laurent_to_term(load_builtin_laurent("x_plus_inverse"))
    with pytest.raises(TermDomainError, match="equality"):
        eval_term(term, 1, (1, 0))
