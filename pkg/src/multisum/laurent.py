"""Laurent polynomials, their constant-term sequences and multinomial terms.

For ``F = sum_a c_a x^a`` the constant term of ``F^n`` is the multisum of

    n! / prod_a k_a!  *  prod_a c_a^{k_a}

over ``k >= 0`` with ``sum_a k_a = n`` and ``sum_a k_a a = 0``. The term is
returned with those constraints as equalities and reduced by
:func:`multisum.term.eliminate_equalities`. Torus critical points of ``F``
map to solutions of the reduced variational system through
``Psi(u) = (c_a u^a / F(u))_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np

from . import _solve
from .polytope import nonnegative_support
from .term import BalancedTerm, LinearForm, Reduction, eliminate_equalities
from .variational import (SolverConfig, build_system, critical_values, solve_system,
                          _mp, _roots_of, _zero_dim_cv)
from .polytope import faces, newton_polytope

__all__ = [
    "LaurentPoly",
    "NotConvenientError",
    "PsiPair",
    "PsiReport",
    "trace_power",
    "trace_sequence",
    "convenient_part",
    "laurent_to_term",
    "laurent_reduction",
    "torus_critical_points",
    "psi_map",
    "psi_to_reduced",
    "verify_psi",
    "laurent_from_dict",
    "laurent_to_dict",
]


class NotConvenientError(ValueError):
    """The origin is not in the convex hull of the exponents."""


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse Laurent polynomial in ``dims`` variables.

    ``monomials`` maps exponent tuples to nonzero rational coefficients;
    insertion order is kept and fixes the order of the summation indices.
    """

    monomials: tuple[tuple[tuple[int, ...], Fraction], ...]
    dims: int

    def __init__(self, monomials: Mapping | Sequence, dims: int | None = None):
        items = monomials.items() if isinstance(monomials, Mapping) else monomials
        merged: dict[tuple[int, ...], Fraction] = {}
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            merged[exp] = merged.get(exp, Fraction(0)) + Fraction(c)
        mons = tuple((e, c) for e, c in merged.items() if c != 0)
        if not mons:
            raise ValueError("Laurent polynomial has no nonzero monomials")
        if dims is None:
            dims = len(mons[0][0])
        if any(len(e) != dims for e, _ in mons):
            raise ValueError(f"all exponents must have length {dims}")
        object.__setattr__(self, "monomials", mons)
        object.__setattr__(self, "dims", int(dims))

    @property
    def r(self) -> int:
        return len(self.monomials)

    @property
    def exponents(self):
        return [e for e, _ in self.monomials]

    @property
    def coeffs(self):
        return [c for _, c in self.monomials]

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.exponents)

    def __call__(self, u):
        return sum((_term_value(c, e, u) for e, c in self.monomials), 0)

    def monomial_values(self, u):
        return [_term_value(c, e, u) for e, c in self.monomials]

    def restrict(self, keep) -> "LaurentPoly":
        return LaurentPoly([self.monomials[i] for i in sorted(keep)], self.dims)


def _term_value(c, e, u):
    if all(isinstance(x, (int, Fraction)) for x in u):
        out = Fraction(c)
        for ui, ei in zip(u, e):
            out *= Fraction(ui) ** ei
        return out
    out = _mp(c)
    for ui, ei in zip(u, e):
        if ei:
            out *= mpmath.mpmathify(ui) ** ei
    return out


def _mul(p, q):
    out: dict[tuple[int, ...], Fraction] = {}
    for e1, c1 in p.items():
        for e2, c2 in q:
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def trace_sequence(F: LaurentPoly, N: int) -> list[Fraction]:
    """Constant terms of ``F^0, ..., F^N``.

    Exponents that cannot return to the origin in the remaining steps are
    pruned, which keeps the convolution sparse.
    """
    exps = np.array(F.exponents, dtype=np.int64)
    hi = exps.max(axis=0)
    lo = exps.min(axis=0)
    cur: dict[tuple[int, ...], Fraction] = {(0,) * F.dims: Fraction(1)}
    out = [Fraction(1)]
    for n in range(1, N + 1):
        cur = _mul(cur, F.monomials)
        left = N - n
        cur = {e: c for e, c in cur.items()
               if all(-hi[i] * left <= e[i] <= -lo[i] * left for i in range(F.dims))}
        out.append(cur.get((0,) * F.dims, Fraction(0)))
    return out


def trace_power(F: LaurentPoly, n: int) -> Fraction:
    """Constant term of ``F^n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return trace_sequence(F, n)[n]


def convenient_part(F: LaurentPoly) -> LaurentPoly:
    """Restriction of ``F`` to the smallest face of its exponent hull containing 0.

    Returns ``F`` itself when the origin is in the relative interior.

    Raises
    ------
    NotConvenientError
        If the origin is outside the hull.
    """
    A = [[e[i] for e in F.exponents] for i in range(F.dims)] + [[1] * F.r]
    b = [0] * F.dims + [1]
    keep = nonnegative_support(A, b)
    if not keep:
        raise NotConvenientError("origin is not in the convex hull of the exponents")
    return F if len(keep) == F.r else F.restrict(keep)


def laurent_to_term(F: LaurentPoly) -> BalancedTerm:
    """Multinomial term with support constraints ``sum k_a a = 0``, ``sum k_a = n``.

    Non-convenient ``F`` is first replaced by :func:`convenient_part`, which
    leaves every constant term unchanged.
    """
    F = convenient_part(F)
    r = F.r
    zero = (0,) * r
    factors = [(LinearForm(1, zero), 1)]
    for a in range(r):
        factors.append((LinearForm(0, tuple(int(i == a) for i in range(r))), -1))
    eqs = []
    for i in range(F.dims):
        row = tuple(e[i] for e in F.exponents)
        if any(row):
            eqs.append(LinearForm(0, row))
    eqs.append(LinearForm(-1, (1,) * r))
    return BalancedTerm(1, tuple(F.coeffs), tuple(factors), tuple(eqs))


def laurent_reduction(F: LaurentPoly, free: Sequence[int] | None = None) -> Reduction:
    """:func:`laurent_to_term` followed by equality elimination."""
    return eliminate_equalities(laurent_to_term(F), free)


# torus critical points


def _cleared_bezout(F: LaurentPoly) -> int:
    exps = np.array(F.exponents)
    spread = int((exps.max(axis=0) - exps.min(axis=0)).sum())
    return max(spread, 1) ** F.dims


def torus_critical_points(F: LaurentPoly, cfg: SolverConfig = SolverConfig()):
    """Critical points of ``F`` on the complex torus with nonzero critical value.

    Solves ``u_i dF/du_i = 0`` by multi-start Newton in ``y = log u`` and
    polishes in ``u`` at ``cfg.digits``. Returns ``(u, F(u))`` pairs sorted by
    ``(Re, Im)`` of ``u``. Completeness is not guaranteed for ``dims >= 2``.

    Raises
    ------
    ValueError
        If ``F`` is constant.
    """
    if F.is_constant():
        raise ValueError("F is constant: no critical points to compute")
    d = F.dims
    exps = np.array(F.exponents, dtype=float)
    coef = np.array([float(c) for c in F.coeffs])

    def fun(Y):
        mon = coef[None, :] * np.exp(Y @ exps.T)
        R = mon @ exps
        scale = np.abs(mon).sum(axis=1, keepdims=True)
        J = np.einsum("ba,ai,al->bil", mon, exps, exps)
        return R / scale, J / scale[..., None]

    count = cfg.starts or min(50 * _cleared_bezout(F), cfg.max_starts)
    rng = np.random.default_rng(cfg.seed)
    Y0 = rng.uniform(-2, 2, size=(count, d)) + 1j * rng.uniform(-np.pi, np.pi, size=(count, d))
    Y, res = _solve.newton_batch(fun, Y0)
    U = np.exp(Y[res < 1e-9])
    cands = []
    for u in sorted(map(tuple, U), key=lambda z: tuple((c.real, c.imag) for c in z)):
        for x in (u, tuple(np.conj(u))):
            if not any(max(abs(a - b) for a, b in zip(x, y)) < 1e-6 * max(1, max(abs(b) for b in y))
                       for y in cands):
                cands.append(x)
    mons = F.monomials

    def mp_fun(u):
        vals = [_term_value(c, e, u) for e, c in mons]
        R = [sum((e[i] * v for (e, _), v in zip(mons, vals)), mpmath.mpc(0)) for i in range(d)]
        J = [[sum((e[i] * e[l] * v for (e, _), v in zip(mons, vals)), mpmath.mpc(0)) / u[l]
              for l in range(d)] for i in range(d)]
        return R, J

    out = []
    with mpmath.workdps(cfg.digits):
        tol = mpmath.mpf(cfg.tol)
        with mpmath.workdps(cfg.digits + 10):
            pol = []
            for u0 in cands:
                u, rn, ok = _solve.mp_newton(mp_fun, [mpmath.mpc(complex(x)) for x in u0], tol / 10)
                if ok and all(abs(x) > mpmath.mpf(cfg.degenerate_eps) for x in u):
                    pol.append(tuple(u))
        for u in (_solve.cluster(pol, mpmath.mpf(cfg.cluster_radius)) if pol else []):
            val = mpmath.mpc(F(u))
            if abs(val) > mpmath.mpf(cfg.degenerate_eps):
                out.append((tuple(mpmath.mpc(x) for x in u), val))
    return out


def psi_map(F: LaurentPoly, u):
    """``Psi(u) = (c_a u^a / F(u))_a``; exact for rational ``u``.

    Raises
    ------
    ZeroDivisionError
        If ``F(u) = 0``.
    """
    vals = F.monomial_values(u)
    total = sum(vals, 0)
    if total == 0:
        raise ZeroDivisionError("F vanishes at u")
    return tuple(v / total for v in vals)


def psi_to_reduced(red: Reduction, w):
    """Reduced coordinates ``s`` for an ambient point ``w`` (rows ``free``)."""
    emb = red.embedding
    q = len(emb.basis)
    if q == 0:
        return ()
    d = emb.stride
    rows = [1 + i for i in red.free]
    M = mpmath.matrix([[_mp(col[rw]) for col in emb.basis] for rw in rows])
    rhs = mpmath.matrix([d * mpmath.mpmathify(w[rw - 1]) - emb.step[rw] for rw in rows])
    s = mpmath.lu_solve(M, rhs)
    return tuple(mpmath.mpc(s[i]) for i in range(q))


@dataclass
class PsiPair:
    u: tuple
    value: mpmath.mpc
    w: tuple
    s: tuple
    simplex_residual: mpmath.mpf
    constraint_residual: mpmath.mpf
    variational_residual: mpmath.mpf
    matched_candidate: mpmath.mpc | None
    match_error: mpmath.mpf | None
    matched_solution: int | None


@dataclass
class PsiReport:
    """Outcome of :func:`verify_psi`.

    ``candidates`` are the stride roots of the reduced full-face critical
    values; ``unmatched_candidates`` lists those not hit by any ``1/F(u)``.
    """

    pairs: list[PsiPair]
    candidates: list
    unmatched_candidates: list
    unmatched_solutions: list
    stride: int
    max_residual: mpmath.mpf
    complete: bool
    note: str = ""
    ok: bool = True
    extra: dict = field(default_factory=dict)


def verify_psi(F: LaurentPoly, cfg: SolverConfig = SolverConfig(),
               free: Sequence[int] | None = None, tol: float = 1e-25) -> PsiReport:
    """Check that ``Psi`` sends torus critical points to variational solutions.

    For each critical point ``u`` with ``F(u) != 0`` this verifies, at
    ``cfg.digits``, that ``Psi(u)`` lies on the affine simplex and on the
    support constraints, and that its reduced coordinates solve the full-face
    variational system. The value ``1/F(u)`` is paired with the nearest
    stride root of the reduced critical values. Mismatches are reported, not
    raised.
    """
    with mpmath.workdps(cfg.digits):
        if F.is_constant():
            crit = []
        else:
            crit = torus_critical_points(F, cfg)
        try:
            red = laurent_reduction(F, free)
        except ValueError as exc:
            return PsiReport([], [], [], [], 1, mpmath.mpf(0), True,
                             note=f"no multinomial term: {exc}", ok=not crit)
        work = red.term.linear()
        full = faces(newton_polytope(work))[-1]
        system = build_system(work, full)
        if system.nvars == 0:
            sols = []
            base = [_mp(_zero_dim_cv(system.term))]
            complete = True
        else:
            res = solve_system(system, cfg)
            sols = list(res.solutions)
            base = critical_values(work, full, res, cfg, system)
            complete = res.complete
        cands = _solve.cluster([r for v in base for r in _roots_of(v, red.stride)],
                               mpmath.mpf(cfg.cluster_radius)) if base else []
        pairs = []
        hit_c, hit_s = set(), set()
        worst = mpmath.mpf(0)
        F_use = convenient_part(F)
        exps = F_use.exponents
        for u, val in crit:
            w = psi_map(F_use, u)
            simplex = abs(sum(w) - 1)
            cons = max([abs(sum((e[i] * wa for e, wa in zip(exps, w)), mpmath.mpc(0)))
                        for i in range(F.dims)] + [simplex])
            s = psi_to_reduced(red, w)
            w_back = red.embedding.normalized(s)
            cons = max([cons] + [abs(a - b) for a, b in zip(w_back, w)])
            vres = max((abs(x) for x in system.residuals(s)), default=mpmath.mpf(0))
            target = 1 / val
            mc, me = None, None
            if cands:
                idx = min(range(len(cands)), key=lambda i: abs(cands[i] - target))
                mc = cands[idx]
                me = abs(mc - target) / abs(target)
                if me < tol:
                    hit_c.add(idx)
            ms = None
            if sols:
                j = min(range(len(sols)), key=lambda i: max(abs(a - b) for a, b in zip(sols[i].s, s)))
                if max(abs(a - b) for a, b in zip(sols[j].s, s)) < mpmath.mpf(10) ** (-cfg.digits // 2):
                    ms = j
                    hit_s.add(j)
            worst = max(worst, cons, vres)
            pairs.append(PsiPair(u, val, w, s, simplex, cons, vres, mc, me, ms))
        unmatched_c = [c for i, c in enumerate(cands) if i not in hit_c]
        unmatched_s = [sols[i].s for i in range(len(sols)) if i not in hit_s]
        ok = worst < tol and all(p.match_error is not None and p.match_error < tol for p in pairs)
        return PsiReport(pairs, cands, unmatched_c, unmatched_s, red.stride, worst, complete, ok=ok)


def laurent_from_dict(data: dict) -> LaurentPoly:
    """Parse ``{"dims": d, "monomials": [{"exp": [...], "coeff": "p/q"}, ...]}``."""
    from .term import _parse_rational

    if not isinstance(data, dict) or "monomials" not in data:
        raise ValueError("Laurent description needs a 'monomials' list")
    dims = data.get("dims")
    mons = []
    for i, m in enumerate(data["monomials"]):
        if not isinstance(m, dict) or "exp" not in m:
            raise ValueError(f"monomials[{i}]: expected an object with 'exp' and 'coeff'")
        if not isinstance(m["exp"], list) or any(isinstance(e, bool) or not isinstance(e, int) for e in m["exp"]):
            raise ValueError(f"monomials[{i}].exp must be a list of integers")
        exp = list(m["exp"])
        if dims is not None and len(exp) != dims:
            raise ValueError(f"monomials[{i}].exp has length {len(exp)}, expected {dims}")
        mons.append((tuple(exp), _parse_rational(m.get("coeff", "1"), f"monomials[{i}].coeff")))
    return LaurentPoly(mons, dims)


def laurent_to_dict(F: LaurentPoly) -> dict:
    from .term import _format_rational

    return {"dims": F.dims,
            "monomials": [{"exp": list(e), "coeff": _format_rational(c)} for e, c in F.monomials]}
