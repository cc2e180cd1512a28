"""Built-in golden examples and the corpus runner."""

from __future__ import annotations

from fractions import Fraction
from math import comb

import mpmath

from .laurent import LaurentPoly, laurent_from_dict, laurent_reduction, trace_sequence, verify_psi
from .sequence import compute_sequence, confront_ansatz, estimate_growth
from .term import as_balanced, term_from_dict
from .variational import SolverConfig, ansatz_set

__all__ = ["TERMS", "LAURENT", "LAURENT_FREE", "load_builtin_term", "load_builtin_laurent", "run_corpus"]


def _f(n=0, k=(), offset=0):
    return {"n": n, "k": list(k), "offset": offset}


TERMS = {
    # binom(n, k)
    "closed_form": {"c0": "1", "c": ["1"],
                    "binomials": [{"top": _f(1, [0]), "bottom": _f(0, [1]), "sign": 1}]},
    # binom(n, k)^2 binom(n+k, k)^2
    "apery": {"c0": "1", "c": ["1"],
              "factors": [dict(_f(1, [1]), sign=1), dict(_f(1, [1]), sign=1),
                          dict(_f(0, [1]), sign=-1), dict(_f(0, [1]), sign=-1),
                          dict(_f(0, [1]), sign=-1), dict(_f(0, [1]), sign=-1),
                          dict(_f(1, [-1]), sign=-1), dict(_f(1, [-1]), sign=-1)],
              "equalities": []},
    # 1 / binom(n, k)
    "inverse_binomial": {"c0": "1", "c": ["1"],
                         "binomials": [{"top": _f(1, [0]), "bottom": _f(0, [1]), "sign": -1}]},
    # (2n)! / n!^2
    "central_binomial": {"c0": "1", "c": [],
                         "factors": [dict(_f(2), sign=1), dict(_f(1), sign=-1), dict(_f(1), sign=-1)],
                         "equalities": []},
}

LAURENT = {
    "x_plus_inverse": {"dims": 1, "monomials": [{"exp": [1], "coeff": "1"}, {"exp": [-1], "coeff": "1"}]},
    "hexagon_f": {"dims": 2, "monomials": [
        {"exp": [1, 0], "coeff": "1"}, {"exp": [-1, 0], "coeff": "1"},
        {"exp": [0, 1], "coeff": "1"}, {"exp": [0, -1], "coeff": "1"},
        {"exp": [1, 1], "coeff": "1"}, {"exp": [0, 0], "coeff": "1"}]},
}

# free summation indices reproducing the hand parametrization by (k1, k3, k5)
LAURENT_FREE = {"hexagon_f": (0, 2, 4)}


def load_builtin_term(name):
    return term_from_dict(TERMS[name])


def load_builtin_laurent(name) -> LaurentPoly:
    return laurent_from_dict(LAURENT[name])


def _check(name, ok, detail=""):
    return {"check": name, "pass": bool(ok), "detail": detail}


def _exact_set(rep):
    return {rep.rational_identifications.get(i) for i in range(len(rep.s_set))}


def _close_to(values, target, tol):
    return any(abs(v - target) < tol for v in values)


def _s(x, d=20):
    return mpmath.nstr(x, d)


def run_corpus(cfg: SolverConfig = SolverConfig(), seq_n: int = 100, order: int = 4) -> dict:
    """Run every golden example; returns a JSON-ready pass/fail table."""
    results = []
    with mpmath.workdps(cfg.digits):
        sqrt2 = mpmath.sqrt(2)

        # closed form
        t = load_builtin_term("closed_form")
        rep = ansatz_set(as_balanced(t), cfg)
        tab = compute_sequence(t, 50)
        est = estimate_growth(tab, order)
        results.append({"name": "closed_form", "checks": [
            _check("s_set == {0, 1, 1/2}", _exact_set(rep) == {0, 1, Fraction(1, 2)}),
            _check("a_n == 2^n, n <= 50", list(tab.values) == [Fraction(2) ** n for n in range(51)]),
            _check("ratio limit 2 within 1e-10", abs(est.lambda_ - 2) < 1e-10, _s(est.lambda_)),
        ]})

        # Apery
        t = load_builtin_term("apery")
        rep = ansatz_set(t, cfg)
        tab = compute_sequence(t, seq_n)
        est = estimate_growth(tab, order)
        conf = confront_ansatz(est, rep)
        tol = mpmath.mpf(10) ** -40
        quad = set(rep.quadratic_identifications.values())
        results.append({"name": "apery", "checks": [
            _check("17 +- 12 sqrt 2 in s_set", _close_to(rep.s_set, 17 + 12 * sqrt2, tol)
                   and _close_to(rep.s_set, 17 - 12 * sqrt2, tol)),
            _check("quadratic z^2 - 34 z + 1 recognized", quad == {(1, -34, 1)}),
            _check("rational part {0, 1, 1/16}", _exact_set(rep) - {None} == {0, 1, Fraction(1, 16)}),
            _check("a_0..a_3 == 1, 5, 73, 1445", list(tab.values[:4]) == [1, 5, 73, 1445]),
            _check("ratio matches 1/(17 - 12 sqrt 2) within 1e-6", conf.relative_error < 1e-6,
                   _s(est.lambda_)),
            _check("alpha within 0.05 of -3/2", abs(est.alpha + 1.5) < 0.05, _s(est.alpha, 10)),
        ]})

        # inverse binomial
        t = load_builtin_term("inverse_binomial")
        rep = ansatz_set(as_balanced(t), cfg)
        tab = compute_sequence(t, 43)
        a = tab.values
        rec = all(-2 * (n + 3) * a[n + 3] + (12 + 5 * n) * a[n + 2] - 4 * (n + 2) * a[n + 1] + (n + 2) * a[n] == 0
                  for n in range(41))
        results.append({"name": "inverse_binomial", "checks": [
            _check("s_set == {0, 1, 2}", _exact_set(rep) == {0, 1, 2}),
            _check("a_0..a_2 == 1, 2, 5/2", list(a[:3]) == [1, 2, Fraction(5, 2)]),
            _check("third-order recursion holds for n <= 40", rec),
        ]})

        # central binomial
        t = load_builtin_term("central_binomial")
        rep = ansatz_set(t, cfg)
        tab = compute_sequence(t, 200)
        est = estimate_growth(tab, order)
        results.append({"name": "central_binomial", "checks": [
            _check("CV == {1/4}", _exact_set(rep) == {0, Fraction(1, 4)}),
            _check("a_n == binom(2n, n), n <= 200", list(tab.values) == [comb(2 * n, n) for n in range(201)]),
            _check("ratio limit 4 within 1e-8", abs(est.lambda_ - 4) < 1e-8, _s(est.lambda_)),
        ]})

        # Laurent examples
        for name in ("x_plus_inverse", "hexagon_f"):
            F = load_builtin_laurent(name)
            free = LAURENT_FREE.get(name)
            red = laurent_reduction(F, free)
            tab = compute_sequence(red.term, 12)
            tr = trace_sequence(F, 12 * red.stride)
            ident = all(tr[red.stride * m] == tab.values[m] for m in range(13)) and \
                all(tr[n] == 0 for n in range(len(tr)) if n % red.stride)
            vr = verify_psi(F, cfg, free)
            checks = [
                _check("trace identity n <= 12", ident),
                _check("Psi residuals < 1e-25", vr.max_residual < mpmath.mpf(10) ** -25,
                       _s(vr.max_residual, 5)),
                _check("every 1/F(u) matches a stride candidate", vr.ok and bool(vr.pairs)),
            ]
            if name == "x_plus_inverse":
                vals = sorted(float(mpmath.re(p.value)) for p in vr.pairs)
                cands = sorted(float(mpmath.re(c)) for c in vr.candidates)
                checks.append(_check("critical values +-2 pair with +-1/2",
                                     vals == [-2.0, 2.0] and cands == [-0.5, 0.5]))
            results.append({"name": name, "checks": checks})

    passed = all(c["pass"] for r in results for c in r["checks"])
    return {"passed": passed, "results": results}
