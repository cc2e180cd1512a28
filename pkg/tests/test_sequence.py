import itertools
from fractions import Fraction

import mpmath
import pytest

from multisum.corpus import load_builtin_laurent, load_builtin_term
from multisum.laurent import laurent_reduction
from multisum.polytope import newton_polytope, support_points
from multisum.sequence import (GrowthEstimate, SequenceTable, compute_sequence, confront_ansatz, estimate_growth,
                               richardson)
from multisum.term import as_balanced, eval_term
from multisum.variational import ansatz_set

mp = mpmath.mpf


def brute_sequence(term, N):
    term = as_balanced(term)
    out = []
    for n in range(N + 1):
        total = Fraction(0)
        for k in itertools.product(range(-2, 3 * n + 3), repeat=term.r):
            if all(f(n, k) >= 0 for f in term.forms):
                total += eval_term(term, n, k)
        out.append(total)
    return out


def test_golden_prefixes():
    assert compute_sequence(load_builtin_term("apery"), 3).values == (1, 5, 73, 1445)
    assert compute_sequence(load_builtin_term("closed_form"), 10).values == tuple(2 ** n for n in range(11))
    assert compute_sequence(load_builtin_term("inverse_binomial"), 2).values == (1, 2, Fraction(5, 2))


def test_matches_brute_force(corpus_term):
    assert list(compute_sequence(corpus_term[1], 8).values) == brute_sequence(corpus_term[1], 8)


def test_laurent_reduced_matches_brute_force():
    red = laurent_reduction(load_builtin_laurent("hexagon_f"), (0, 2, 4))
    assert list(compute_sequence(red.term, 6).values) == brute_sequence(red.term, 6)


def test_deterministic_and_hashed(corpus_term):
    a = compute_sequence(corpus_term[1], 12)
    b = compute_sequence(corpus_term[1], 12)
    assert a == b and a.term_hash and a.to_dict() == b.to_dict()


@pytest.mark.parametrize("name", ["apery", "closed_form"])
def test_positivity_sandwich(name):
    term = as_balanced(load_builtin_term(name))
    p = newton_polytope(term)
    tab = compute_sequence(term, 30)
    for n, a_n in enumerate(tab.values):
        pts = support_points(term, n, p)
        peak = max(eval_term(term, n, k) for k in pts)
        assert peak <= a_n <= len(pts) * peak


def test_richardson_is_exact_on_polynomials_in_inverse_n():
    with mpmath.workdps(50):
        seq = [mp(0)] + [3 + mp(2) / n - mp(5) / n ** 2 + mp(7) / n ** 3 for n in range(1, 40)]
        assert abs(richardson(seq, 20, 3) - 3) < mp(10) ** -40


def test_synthetic_calibration():
    with mpmath.workdps(64):
        vals = [mp(1)] + [mp(3) ** n * mp(n) ** mp("-1.5") for n in range(1, 201)]
    est = estimate_growth(vals, 4)
    assert abs(est.lambda_ - 3) < 1e-8
    assert abs(est.alpha + 1.5) < 1e-3


def test_closed_form_ratio_is_exact():
    tab = compute_sequence(load_builtin_term("closed_form"), 40)
    for order in (1, 2, 3, 4):
        est = estimate_growth(tab, order)
        assert abs(est.lambda_ - 2) < mp(10) ** -55 and abs(est.alpha) < mp(10) ** -40


def test_central_binomial_growth():
    est = estimate_growth(compute_sequence(load_builtin_term("central_binomial"), 200), 4)
    assert abs(est.lambda_ - 4) < 1e-8
    assert abs(est.alpha + 0.5) < 1e-3


def test_oscillating_sequence_uses_root_test():
    with mpmath.workdps(64):
        vals = [(-2) ** n * mp(n + 1) for n in range(120)]
    est = estimate_growth(vals, 4)
    assert est.method == "root" and est.alpha is None
    assert abs(est.lambda_ - 2) < 1e-2


@pytest.mark.parametrize("vals, msg", [
    ([1] * 10, r"4 \* order = 16"),
    ([1] * 30 + [0] * 20, "zero terms"),
])
def test_estimate_guards(vals, msg):
    with pytest.raises(ValueError, match=msg):
        estimate_growth(vals, 4)


def test_confrontation_closed_form(cfg):
    t = load_builtin_term("closed_form")
    conf = confront_ansatz(estimate_growth(compute_sequence(t, 50)), ansatz_set(t, cfg))
    assert abs(conf.matched - mp(1) / 2) < mp(10) ** -40 and conf.is_min_modulus


def test_confrontation_needs_nonzero_ansatz():
    class Empty:
        s_set = candidates = [0]

    est = GrowthEstimate(mp(2), mp(0), 4, mp(0))
    with pytest.raises(ValueError):
        confront_ansatz(est, Empty())


def test_inverse_binomial_growth(cfg):
    t = load_builtin_term("inverse_binomial")
    tab = compute_sequence(t, 160)
    a = tab.values
    for n in range(len(a) - 3):
        assert -2 * (n + 3) * a[n + 3] + (12 + 5 * n) * a[n + 2] - 4 * (n + 2) * a[n + 1] + (n + 2) * a[n] == 0
    conf = confront_ansatz(estimate_growth(tab), ansatz_set(t, cfg))
    assert abs(conf.matched - 1) < mp(10) ** -40


def test_table_serialization():
    tab = SequenceTable((Fraction(1), Fraction(5, 2)), "h", 1)
    assert tab.to_dict() == {"n": 1, "stride": 1, "term_hash": "h", "values": ["1", "5/2"]}
