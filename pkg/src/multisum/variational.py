"""Variational equations, potential functions and the ansatz set.

Each face of the Newton polytope is handled through its restricted term,
written in integral lattice coordinates by :func:`multisum.term.restrict`.
On a face with stride ``d`` the restricted term lives on ``n = d n'``; its
critical values ``v`` therefore contribute all ``d``-th roots of ``v``.

Numerics run in mpmath at ``SolverConfig.digits`` decimal digits. Logarithms
use the principal branch. When a solution satisfies the logarithmic
equations only up to ``2 pi i m``, the integer vector ``m`` is recorded as its
winding and the potential is corrected to the sheet on which the point is
critical before it is compared with the product formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import _solve
from .polytope import Face, Polytope, faces, newton_polytope, polytope_from_inequalities
from .term import (BalancedTerm, LinearForm, Reduction, SpecialTerm, as_balanced, eliminate_equalities,
                   restrict, validate)

__all__ = [
    "SolverConfig",
    "VariationalSystem",
    "VariationalSolution",
    "SolveResult",
    "FaceReport",
    "AnsatzReport",
    "SingularPotentialError",
    "CrossCheckError",
    "potential",
    "potential_gradient",
    "build_system",
    "solve_system",
    "critical_values",
    "ansatz_set",
]


class SingularPotentialError(ValueError):
    """Some ``A_j(w)`` vanishes exactly."""


class CrossCheckError(RuntimeError):
    """Two independent evaluations of a critical value disagree."""


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings shared by the variational and Laurent solvers."""

    digits: int = 64
    tol: float = 1e-30
    cluster_radius: float = 1e-20
    degenerate_eps: float = 1e-12
    starts: int | None = None
    max_starts: int = 5000
    seed: int = 0
    cross_tol: float = 1e-20

    def __post_init__(self):
        if self.digits < 32:
            raise ValueError("digits must be at least 32")


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    return mpmath.mpmathify(x)


def _log_const(c: Fraction):
    return mpmath.log(_mp(c)) if c > 0 else mpmath.log(mpmath.mpc(_mp(c)))


# potential function


def _checked_values(term: BalancedTerm, w):
    vals = []
    for j, f in enumerate(term.forms):
        a = f.at(w)
        if a == 0:
            raise SingularPotentialError(f"factor {j} ({f.linear()}) vanishes at w")
        vals.append(_mp(a))
    return vals


def _clog(x):
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpf) and x < 0:
        return mpmath.log(mpmath.mpc(x))
    return mpmath.log(x)


def potential(term: BalancedTerm, w: Sequence) -> mpmath.mpc:
    """``V(w) = C(w) + sum_j sign_j A_j(w) log A_j(w)`` on the principal branch.

    Offsets are ignored and ``0 log 0 = 0``, so ``V`` extends continuously to
    the boundary of the polytope. Evaluated at the current mpmath precision.
    """
    w = [_mp(x) for x in w]
    out = _log_const(term.c0) + sum((wi * _log_const(ci) for wi, ci in zip(w, term.c)), mpmath.mpf(0))
    for f, s in term.factors:
        a = f.at(w)
        if a != 0:
            out += s * a * _clog(a)
    return mpmath.mpc(out)


def potential_gradient(term: BalancedTerm, w: Sequence) -> list:
    """Components ``log C_i + sum_j sign_j v_i(A_j) log A_j(w)``.

    Raises
    ------
    SingularPotentialError
        If some ``A_j(w)`` is exactly zero.
    """
    w = [_mp(x) for x in w]
    vals = _checked_values(term, w)
    logs = [_clog(a) for a in vals]
    out = []
    for i, ci in enumerate(term.c):
        g = _log_const(ci)
        for (f, s), la in zip(term.factors, logs):
            if f.coeffs_k[i]:
                g += s * f.coeffs_k[i] * la
        out.append(mpmath.mpc(g))
    return out


def _winding(grad):
    two_pi = 2 * mpmath.pi
    return tuple(int(mpmath.nint(mpmath.im(g) / two_pi)) for g in grad)


def _lifted_potential(term, w, grad=None):
    """Potential on the sheet where ``w`` is critical, plus the winding used."""
    if grad is None:
        grad = potential_gradient(term, w)
    m = _winding(grad)
    v = potential(term, w)
    v -= 2j * mpmath.pi * sum((mi * _mp(wi) for mi, wi in zip(m, w)), mpmath.mpf(0))
    return v, m


def _product_cv(term: BalancedTerm, w, eps=0):
    """``C_0^{-1} prod_{A_j(w) != 0} A_j(w)^{-sign_j v_0(A_j)}``."""
    out = 1 / _mp(term.c0)
    for f, s in term.factors:
        if f.coeff_n == 0:
            continue
        a = _mp(f.at(w))
        if abs(a) <= eps:
            continue
        out *= a ** (-s * f.coeff_n)
    return mpmath.mpc(out)


def _zero_dim_cv(term: BalancedTerm) -> Fraction:
    out = 1 / term.c0
    for f, s in term.factors:
        b = f.coeff_n
        if b:
            out *= Fraction(b) ** (-s * b)
    return out


# systems


@dataclass(frozen=True)
class Equation:
    """``prefactor * prod base(s)^exponent = 1`` with integral affine bases."""

    prefactor: Fraction
    bases: tuple[tuple[LinearForm, int], ...]

    def __str__(self):
        parts = [f"({b.linear()})^{e}" if e != 1 else f"({b.linear()})" for b, e in self.bases]
        return f"{self.prefactor} * " + " * ".join(parts) + " = 1"


@dataclass(frozen=True)
class VariationalSystem:
    """Equations of one face in the lattice coordinates ``s`` of its restriction."""

    face: Face
    reduction: Reduction
    equations: tuple[Equation, ...]

    @property
    def nvars(self) -> int:
        return self.reduction.term.r

    @property
    def term(self) -> BalancedTerm:
        return self.reduction.term

    @property
    def stride(self) -> int:
        return self.reduction.stride

    def residuals(self, s):
        """Exponentiated residuals ``prefactor * prod - 1`` at ``s``."""
        out = []
        for eq in self.equations:
            val = _mp(eq.prefactor)
            for b, e in eq.bases:
                val *= _mp(b.at(s)) ** e
            out.append(val - 1)
        return out

    def bezout(self) -> int:
        total = 1
        for eq in self.equations:
            pos = sum(e for b, e in eq.bases if e > 0 and any(b.coeffs_k))
            neg = sum(-e for b, e in eq.bases if e < 0 and any(b.coeffs_k))
            total *= max(pos, neg, 1)
        return total


def build_system(term: BalancedTerm, face: Face, free: Sequence[int] | None = None) -> VariationalSystem:
    """Variational equations of ``term`` restricted to ``face``.

    Repeated bases are merged, so the Apery term gives the single equation
    ``(1+w)^2 (1-w)^2 w^-4 = 1``.
    """
    bary = face.barycenter()
    tight = [j for j, f in enumerate(term.forms) if f.at(bary) == 0]
    red = restrict(term, tight, free)
    t = red.term
    eqs = []
    for i in range(t.r):
        merged: dict[LinearForm, int] = {}
        for f, s in t.factors:
            e = s * f.coeffs_k[i]
            if e:
                key = f.linear()
                merged[key] = merged.get(key, 0) + e
        bases = tuple((b, e) for b, e in merged.items() if e)
        eqs.append(Equation(t.c[i], bases))
    return VariationalSystem(face, red, tuple(eqs))


@dataclass
class VariationalSolution:
    """A solution ``s`` of a face system, with ambient point ``w``.

    ``cv`` is the product formula value for the restricted term (before
    any stride roots) and ``cv_potential`` is ``exp(-V*)`` on the lifted sheet.
    """

    w: tuple
    s: tuple
    grad_residual: mpmath.mpf
    eq_residual: mpmath.mpf
    cv: mpmath.mpc
    cv_potential: mpmath.mpc
    winding: tuple[int, ...] = ()
    degenerate_forms: frozenset[int] = frozenset()


@dataclass
class SolveResult:
    """Solutions of one system plus bookkeeping counters."""

    solutions: list[VariationalSolution]
    complete: bool
    dropped: int = 0
    degenerate: int = 0
    starts: int = 0
    positive_dim_suspected: bool = False

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]


def _poly_of_equation(eq: Equation):
    num = [eq.prefactor]
    den = [Fraction(1)]
    for b, e in eq.bases:
        p = [Fraction(b.coeff_n), Fraction(b.coeffs_k[0])]
        if e > 0:
            num = _solve.pmul(num, _solve.ppow(p, e))
        else:
            den = _solve.pmul(den, _solve.ppow(p, -e))
    return _solve.psub(num, den)


def _make_solution(system: VariationalSystem, s, eps):
    t = system.term
    vals = [_mp(f.at(s)) for f in t.forms]
    degenerate = frozenset(j for j, a in enumerate(vals) if abs(a) <= eps)
    if degenerate:
        return None, degenerate
    eq_res = max((abs(r) for r in system.residuals(s)), default=mpmath.mpf(0))
    grad = potential_gradient(t, s)
    m = _winding(grad)
    grad_res = max((abs(g - 2j * mpmath.pi * mi) for g, mi in zip(grad, m)), default=mpmath.mpf(0))
    v_star, _ = _lifted_potential(t, s, grad)
    cv = _product_cv(t, s)
    w = system.reduction.embedding.normalized(s)
    return VariationalSolution(tuple(w), tuple(s), grad_res, eq_res, cv, mpmath.exp(-v_star), m), degenerate


def _random_starts(system: VariationalSystem, count: int, rng):
    t = system.term
    rows = [(f.coeff_n, f.coeffs_k) for f in t.forms]
    try:
        verts = np.array([[float(x) for x in v] for v in polytope_from_inequalities(rows).vertices])
        lo, hi = verts.min(axis=0), verts.max(axis=0)
    except ValueError:
        lo, hi = -np.ones(t.r), np.ones(t.r)
    width = np.maximum(hi - lo, 0.5)
    re = rng.uniform(lo - width, hi + width, size=(count, t.r))
    im = rng.normal(0.0, 1.0, size=(count, t.r)) * width
    # half the starts stay close to the real slice, where positive terms peak
    im[: count // 2] *= 0.1
    return re + 1j * im


def _log_system_numpy(system: VariationalSystem):
    """Vectorized residual/Jacobian of the logarithmic equations."""
    bases = []
    for eq in system.equations:
        for b, _ in eq.bases:
            if b not in bases:
                bases.append(b)
    B0 = np.array([float(b.coeff_n) for b in bases])
    B1 = np.array([[float(a) for a in b.coeffs_k] for b in bases])
    E = np.zeros((system.nvars, len(bases)))
    for i, eq in enumerate(system.equations):
        for b, e in eq.bases:
            E[i, bases.index(b)] += e
    logc = np.array([complex(mpmath.log(mpmath.mpc(_mp(eq.prefactor)))) for eq in system.equations])

    def fun(X):
        vals = B0[None, :] + X @ B1.T
        R = logc[None, :] + np.log(vals) @ E.T
        R = R - 2j * np.pi * np.round(R.imag / (2 * np.pi))
        J = np.einsum("ij,bj,jl->bil", E, 1.0 / vals, B1)
        return R, J

    return fun, bases, E


def _log_system_mp(system: VariationalSystem, bases, E):
    logc = [mpmath.log(mpmath.mpc(_mp(eq.prefactor))) for eq in system.equations]
    m = system.nvars

    def fun(x):
        vals = [_mp(b.coeff_n) + sum((a * xi for a, xi in zip(b.coeffs_k, x)), mpmath.mpf(0))
                for b in bases]
        logs = [mpmath.log(mpmath.mpc(v)) for v in vals]
        R = []
        for i in range(m):
            g = logc[i] + sum((E[i, j] * logs[j] for j in range(len(bases)) if E[i, j]), mpmath.mpc(0))
            g -= 2j * mpmath.pi * mpmath.nint(mpmath.im(g) / (2 * mpmath.pi))
            R.append(g)
        J = [[sum((E[i, j] * bases[j].coeffs_k[l] / vals[j] for j in range(len(bases)) if E[i, j]),
                  mpmath.mpc(0)) for l in range(m)] for i in range(m)]
        return R, J

    return fun


def solve_system(system: VariationalSystem, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """All complex solutions of a face system.

    Zero variables: the single point of the face. One variable: exact
    polynomial after clearing denominators, all roots. Two or more: vectorized
    multi-start Newton on the logarithmic equations followed by mpmath
    polishing; completeness is not guaranteed and ``complete`` is ``False``.
    Solutions where some factorial argument vanishes are discarded and counted.
    """
    with mpmath.workdps(cfg.digits):
        eps = mpmath.mpf(cfg.degenerate_eps)
        tol = mpmath.mpf(cfg.tol)
        if system.nvars == 0:
            sol, _ = _make_solution(system, (), -1)
            return SolveResult([sol], True)
        if system.nvars == 1:
            poly = _poly_of_equation(system.equations[0])
            out, degenerate, dropped = [], 0, 0
            with mpmath.workdps(cfg.digits + 20):
                roots = _solve.univariate_roots(poly)
            for x in roots:
                sol, deg = _make_solution(system, (mpmath.mpc(x),), eps)
                if sol is None:
                    degenerate += 1
                elif sol.eq_residual < tol:
                    out.append(sol)
                else:
                    dropped += 1
            out.sort(key=lambda v: _solve._key(v.s))
            return SolveResult(out, True, dropped, degenerate, 0)
        return _solve_multistart(system, cfg, eps, tol)


def _solve_multistart(system, cfg, eps, tol):
    bez = system.bezout()
    count = cfg.starts or min(50 * bez, cfg.max_starts)
    rng = np.random.default_rng(cfg.seed)
    fun_np, bases, E = _log_system_numpy(system)
    X, res = _solve.newton_batch(fun_np, _random_starts(system, count, rng))
    good = X[res < 1e-8]
    cands = []
    for x in sorted(map(tuple, good), key=lambda z: tuple((c.real, c.imag) for c in z)):
        if not any(max(abs(a - b) for a, b in zip(x, y)) < 1e-6 * max(1, max(abs(b) for b in y)) for y in cands):
            cands.append(x)
    # rational input: solutions come in conjugate pairs
    for x in [tuple(np.conj(c)) for c in cands]:
        if not any(max(abs(a - b) for a, b in zip(x, y)) < 1e-6 * max(1, max(abs(b) for b in y)) for y in cands):
            cands.append(x)
    fun_mp = _log_system_mp(system, bases, E)
    polished, dropped, degenerate = [], 0, 0
    with mpmath.workdps(cfg.digits + 10):
        for x0 in cands:
            x, rn, ok = _solve.mp_newton(fun_mp, [mpmath.mpc(complex(v)) for v in x0], tol / 10)
            if ok:
                polished.append(tuple(x))
            else:
                dropped += 1
    reps = _solve.cluster(polished, mpmath.mpf(cfg.cluster_radius)) if polished else []
    out = []
    for s in reps:
        sol, deg = _make_solution(system, tuple(s), eps)
        if sol is None:
            degenerate += 1
        elif sol.eq_residual < tol:
            out.append(sol)
        else:
            dropped += 1
    suspect = len(out) + degenerate > bez
    return SolveResult(out, False, dropped, degenerate, count, suspect)


# critical values


def _roots_of(v, d):
    """All ``d``-th roots of ``v``, sorted by argument in ``[0, 2 pi)``."""
    v = mpmath.mpc(v)
    if d == 1:
        return [v]
    mod = abs(v) ** (mpmath.mpf(1) / d)
    arg = mpmath.arg(v)
    out = []
    for k in range(d):
        out.append(mod * mpmath.expjpi((arg / mpmath.pi + 2 * k) / d))
    return out


def critical_values(term: BalancedTerm, face: Face, sols=None, cfg: SolverConfig = SolverConfig(),
                    system: VariationalSystem | None = None) -> list:
    """Critical value set of ``term`` restricted to ``face``.

    Vertices (and other faces whose restriction has no free variables) use
    the exact closed formula. Every other value is computed by the product
    formula and, independently, as ``exp(-V*)``; a disagreement beyond
    ``cfg.cross_tol`` (relative) raises :class:`CrossCheckError`. With face
    stride ``d`` all ``d``-th roots are returned.
    """
    if system is None:
        system = build_system(term, face)
    d = system.stride
    with mpmath.workdps(cfg.digits):
        if system.nvars == 0:
            base = [_mp(_zero_dim_cv(system.term))]
        else:
            if sols is None:
                sols = solve_system(system, cfg)
            base = []
            for sol in sols:
                err = abs(sol.cv - sol.cv_potential)
                if err > mpmath.mpf(cfg.cross_tol) * max(1, abs(sol.cv)):
                    raise CrossCheckError(
                        f"critical value mismatch {mpmath.nstr(err, 5)} at s={sol.s}")
                base.append(sol.cv)
        vals = [r for v in base for r in _roots_of(v, d)]
        if not vals:
            return []
        return _solve.cluster(vals, mpmath.mpf(cfg.cluster_radius))


# ansatz report


@dataclass
class FaceReport:
    face: Face
    stride: int
    nvars: int
    values: list
    exact: Fraction | None = None
    complete: bool = True
    dropped: int = 0
    degenerate: int = 0
    solutions: list = field(default_factory=list)


@dataclass
class AnsatzReport:
    """Union over faces of the critical value sets, together with 0.

    ``stride`` is the global stride from equality elimination; when it
    exceeds 1, ``candidates`` holds the ``stride``-th roots of ``s_set``.
    """

    per_face: list[FaceReport]
    s_set: list
    rational_identifications: dict
    quadratic_identifications: dict
    stride: int
    candidates: list
    polytope: Polytope
    reduction: Reduction | None = None
    complete: bool = True

    def values(self):
        return list(self.s_set)


def _identify(values):
    rat, quad = {}, {}
    for i, v in enumerate(values):
        q = _solve.identify_rational(v)
        if q is not None:
            rat[i] = q
            continue
        qd = _solve.identify_quadratic(v)
        if qd is not None:
            quad[i] = qd
    return rat, quad


def ansatz_set(term: BalancedTerm | SpecialTerm, cfg: SolverConfig = SolverConfig(),
               free: Sequence[int] | None = None) -> AnsatzReport:
    """Compute ``S = {0} u (critical values over all faces)``.

    Terms with equalities are first reduced by
    :func:`multisum.term.eliminate_equalities`; ``free`` is passed through.

    Raises
    ------
    ValueError
        If the term is not balanced.
    multisum.polytope.PolytopeError
        If the Newton polytope is unbounded, empty or lower-dimensional.
    """
    term = as_balanced(term)
    rep = validate(term)
    if not rep.ok:
        raise ValueError("term is not balanced: " + "; ".join(rep.violations))
    reduction = None
    stride = 1
    work = term
    if term.equalities:
        reduction = eliminate_equalities(term, free)
        stride = reduction.stride
        work = reduction.term
    work = work.linear()
    poly = newton_polytope(work)
    per_face = []
    with mpmath.workdps(cfg.digits):
        allvals = [mpmath.mpc(0)]
        complete = True
        for f in faces(poly):
            system = build_system(work, f)
            if system.nvars == 0:
                vals = critical_values(work, f, None, cfg, system)
                fr = FaceReport(f, system.stride, 0, vals, _zero_dim_cv(system.term))
            else:
                res = solve_system(system, cfg)
                vals = critical_values(work, f, res, cfg, system)
                fr = FaceReport(f, system.stride, system.nvars, vals, None, res.complete,
                                res.dropped, res.degenerate, list(res.solutions))
                complete &= res.complete
            per_face.append(fr)
            allvals += vals
        s_set = _solve.cluster(allvals, mpmath.mpf(cfg.cluster_radius))
        rat, quad = _identify(s_set)
        if stride > 1:
            cands = [mpmath.mpc(0)] + [r for v in s_set if v != 0 for r in _roots_of(v, stride)]
            cands = _solve.cluster(cands, mpmath.mpf(cfg.cluster_radius))
        else:
            cands = list(s_set)
    return AnsatzReport(per_face, s_set, rat, quad, stride, cands, poly, reduction, complete)
