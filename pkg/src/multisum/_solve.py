"""Shared numerical core: polynomial roots, multi-start Newton, clustering.

Double-precision work happens in numpy; every candidate is then polished in
mpmath at the caller's working precision.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np

# exact univariate polynomials, coefficient lists low -> high degree


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def psub(p, q):
    n = max(len(p), len(q))
    p = list(p) + [0] * (n - len(p))
    q = list(q) + [0] * (n - len(q))
    return _trim([Fraction(a) - b for a, b in zip(p, q)])


def ppow(p, e):
    out = [Fraction(1)]
    for _ in range(e):
        out = pmul(out, p)
    return out


def pderiv(p):
    return _trim([i * Fraction(a) for i, a in enumerate(p)][1:])


def pdivmod(p, q):
    p = [Fraction(a) for a in _trim(p)]
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    while len(p) >= len(q) and p:
        f = p[-1] / q[-1]
        shift = len(p) - len(q)
        out[shift] = f
        for i, b in enumerate(q):
            p[shift + i] -= f * b
        p = _trim(p)
    return _trim(out), p


def pgcd(p, q):
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, pdivmod(p, q)[1]
    if not p:
        return []
    lead = Fraction(p[-1])
    return [Fraction(a) / lead for a in p]


def squarefree(p):
    p = _trim(p)
    g = pgcd(p, pderiv(p))
    if len(g) <= 1:
        return p
    return pdivmod(p, g)[0]


def _peval(p, x):
    acc = 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def univariate_roots(p, maxiter=200):
    """All complex roots of the exact polynomial ``p`` (low -> high), no multiplicity.

    Returns mpmath numbers at the current working precision.
    """
    p = squarefree([Fraction(a) for a in p])
    deg = len(p) - 1
    if deg <= 0:
        return []
    pm = [mpmath.mpf(a.numerator) / a.denominator for a in p]
    dp = pderiv(p)
    dpm = [mpmath.mpf(a.numerator) / a.denominator for a in dp]
    guesses = np.roots([float(a) for a in reversed(p)])
    tol = mpmath.mpf(10) ** (-mpmath.mp.dps + 5)
    roots = []
    for g in guesses:
        x = mpmath.mpc(complex(g))
        for _ in range(maxiter):
            fx = _peval(pm, x)
            dfx = _peval(dpm, x)
            if dfx == 0:
                break
            step = fx / dfx
            x -= step
            if abs(step) <= tol * max(1, abs(x)):
                break
        roots.append(x)
    if len(cluster(roots, mpmath.mpf(10) ** (-mpmath.mp.dps // 2))) != deg:
        roots = list(mpmath.polyroots(list(reversed(pm)), maxsteps=400,
                                      extraprec=4 * mpmath.mp.prec))
    return [mpmath.mpc(x) for x in roots]


def _key(x):
    return tuple(float(c) for z in x for c in (mpmath.re(z), mpmath.im(z)))


def cluster(points, radius):
    """Greedy deduplication after lexicographic sort on (Re, Im) coordinates."""
    pts = [p if isinstance(p, (tuple, list)) else (p,) for p in points]
    single = not points or not isinstance(points[0], (tuple, list))
    pts = sorted(pts, key=_key)
    reps = []
    for p in pts:
        if not any(max(abs(a - b) for a, b in zip(p, q)) <= radius * max(1, max(abs(a) for a in q))
                   for q in reps):
            reps.append(p)
    return [r[0] for r in reps] if single else reps


def newton_batch(fun, X, iters=80, tol=1e-11, maxstep=2.0):
    """Damped vectorized Newton iteration.

    ``fun(X)`` maps a ``(B, m)`` complex array to residuals ``(B, m)`` and
    Jacobians ``(B, m, m)``. Returns final points and residual norms.
    """
    X = np.array(X, dtype=complex)
    B, m = X.shape
    active = np.ones(B, dtype=bool)
    res = np.full(B, np.inf)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            if not active.any():
                break
            idx = np.nonzero(active)[0]
            R, J = fun(X[idx])
            rn = np.max(np.abs(R), axis=1)
            res[idx] = rn
            ok = np.isfinite(rn) & np.isfinite(J).all(axis=(1, 2))
            done = rn < tol
            active[idx[~ok | done]] = False
            go = ok & ~done
            if not go.any():
                continue
            gi = idx[go]
            try:
                step = np.linalg.solve(J[go], -R[go][..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.zeros_like(R[go])
                for t, (Jt, Rt) in enumerate(zip(J[go], R[go])):
                    try:
                        step[t] = np.linalg.solve(Jt, -Rt)
                    except np.linalg.LinAlgError:
                        active[gi[t]] = False
            size = np.max(np.abs(step), axis=1)
            scale = np.where(size > maxstep, maxstep / np.maximum(size, 1e-300), 1.0)
            X[gi] = X[gi] + step * scale[:, None]
        R, _ = fun(X)
        res = np.max(np.abs(R), axis=1)
    return X, np.where(np.isfinite(res), res, np.inf)


def mp_newton(fun, x0, tol, maxiter=60):
    """Newton polish at the current mpmath precision.

    ``fun(x)`` takes a list of mpc and returns ``(residual list, Jacobian matrix)``.
    Returns ``(x, residual_norm, converged)``.
    """
    x = [mpmath.mpc(v) for v in x0]
    m = len(x)
    rn = mpmath.inf
    for _ in range(maxiter):
        try:
            R, J = fun(x)
        except (ZeroDivisionError, ValueError):
            return x, mpmath.inf, False
        rn = max(abs(v) for v in R) if R else mpmath.mpf(0)
        if rn < tol:
            return x, rn, True
        try:
            step = mpmath.lu_solve(mpmath.matrix(J), mpmath.matrix([-v for v in R]))
        except ZeroDivisionError:
            return x, rn, False
        x = [x[i] + step[i] for i in range(m)]
    try:
        R, _ = fun(x)
        rn = max(abs(v) for v in R) if R else mpmath.mpf(0)
    except (ZeroDivisionError, ValueError):
        return x, mpmath.inf, False
    return x, rn, rn < tol


def mpf_from_fraction(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    man = int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def identify_rational(v, max_den=10 ** 12):
    """Exact rational ``q`` with ``|v - q|`` at working precision, or ``None``."""
    if abs(mpmath.im(v)) > mpmath.mpf(10) ** (-mpmath.mp.dps + 10) * max(1, abs(v)):
        return None
    x = mpmath.re(v)
    q = to_fraction(x).limit_denominator(max_den)
    if abs(x - mpf_from_fraction(q)) <= mpmath.mpf(10) ** (-mpmath.mp.dps + 10) * max(1, abs(x)):
        return q
    return None


def identify_quadratic(v, maxcoeff=10 ** 6):
    """Integer ``(a, b, c)`` with ``a v^2 + b v + c = 0``, ``a > 0``, or ``None``.

    Heuristic integer relation search; only tried on real values.
    """
    if abs(mpmath.im(v)) > mpmath.mpf(10) ** (-mpmath.mp.dps + 10) * max(1, abs(v)):
        return None
    x = mpmath.re(v)
    rel = mpmath.pslq([1, x, x * x], maxcoeff=maxcoeff, maxsteps=10 ** 5)
    if rel is None:
        return None
    c, b, a = (int(t) for t in rel)
    if a == 0:
        return None
    if a < 0:
        a, b, c = -a, -b, -c
    if abs(a * x * x + b * x + c) > mpmath.mpf(10) ** (-mpmath.mp.dps + 15) * max(1, abs(x)) ** 2:
        return None
    return a, b, c
