"""Entropy function, its four-term relation and the regulator map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .term import SpecialTerm, special_to_balanced
from .variational import _clog, _log_const, _mp, potential, potential_gradient, _winding

__all__ = [
    "entropy",
    "four_term_residual",
    "RegulatorElement",
    "regulator",
    "beta",
    "KCheck",
    "check_K_diagram",
    "binomial_rate",
]


def entropy(x):
    """``-x log x - (1-x) log(1-x)`` on the principal branch.

    Raises
    ------
    ValueError
        At the singular points ``0`` and ``1``.
    """
    x = _mp(x)
    if x == 0 or x == 1:
        raise ValueError("entropy is singular at 0 and 1; use the limit value 0")
    return -x * _clog(x) - (1 - x) * _clog(1 - x)


def four_term_residual(a, b):
    """``|Phi(b) - Phi(a) + (1-b) Phi(a/(1-b)) - (1-a) Phi(b/(1-a))|``.

    Requires real ``a, b`` with ``a``, ``b`` and ``a + b`` in ``(0, 1)``.
    """
    a, b = _mp(a), _mp(b)
    for name, v in (("a", a), ("b", b), ("a+b", a + b)):
        if not 0 < v < 1:
            raise ValueError(f"{name} must lie in (0, 1)")
    val = entropy(b) - entropy(a) + (1 - b) * entropy(a / (1 - b)) - (1 - a) * entropy(b / (1 - a))
    return abs(val)


@dataclass(frozen=True)
class RegulatorElement:
    """Formal sum ``sum weight * <argument>``."""

    summands: tuple = field(default_factory=tuple)

    def __add__(self, other):
        return RegulatorElement(self.summands + other.summands)


def regulator(beta: RegulatorElement):
    """``R(sum w <x>) = -sum w Phi(x)``."""
    out = mpmath.mpc(0)
    for weight, arg in beta.summands:
        out -= _mp(weight) * entropy(arg)
    return out


def beta(term: SpecialTerm, w: Sequence) -> RegulatorElement:
    """``sum_j sign_j B_j(w) <C_j(w) / B_j(w)>`` over the binomials of ``term``."""
    w = [_mp(x) for x in w]
    out = []
    for top, bottom, s in term.binomials:
        B = top.at(w)
        if B == 0:
            raise ValueError(f"binomial top {top.linear()} vanishes at w")
        out.append((s * B, bottom.at(w) / B))
    return RegulatorElement(tuple(out))


@dataclass
class KCheck:
    """Residual ``V(w) - C(w) + R(beta(w))`` split by branch behaviour.

    ``imag_mod`` is the distance of the imaginary part to ``2 pi Z``;
    ``winding`` is the sheet index of ``w`` for the logarithmic equations.
    """

    residual: mpmath.mpc
    real: mpmath.mpf
    imag_mod: mpmath.mpf
    winding: tuple
    principal_sheet: bool

    def ok(self, tol=1e-10) -> bool:
        return self.real < tol and self.imag_mod < tol


def check_K_diagram(term: SpecialTerm, sol) -> KCheck:
    """Numerical check that the potential equals the regulator of ``beta``.

    ``sol`` is a :class:`multisum.variational.VariationalSolution` for the
    full face or a bare point ``w``.
    """
    w = list(getattr(sol, "w", sol))
    bal = special_to_balanced(term)
    w = [_mp(x) for x in w]
    V = potential(bal, w)
    Cw = _log_const(bal.c0) + sum((wi * _log_const(ci) for wi, ci in zip(w, bal.c)), mpmath.mpf(0))
    res = V - Cw + regulator(beta(term, w))
    two_pi = 2 * mpmath.pi
    im = mpmath.im(res)
    imag_mod = abs(im - two_pi * mpmath.nint(im / two_pi))
    m = _winding(potential_gradient(bal, w))
    return KCheck(mpmath.mpc(res), abs(mpmath.re(res)), imag_mod, m, not any(m))


def binomial_rate(a: int, b: int, n: int):
    """Return ``(log binom(an, bn)) / n`` and the limit ``a Phi(b/a)``."""
    val = mpmath.log(mpmath.binomial(a * n, b * n)) / n
    return val, a * entropy(mpmath.mpf(b) / a)
