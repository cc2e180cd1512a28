"""Exact multisum sequences and ratio-method growth estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .polytope import newton_polytope, support_points
from .term import BalancedTerm, SpecialTerm, as_balanced, eliminate_equalities, eval_term, term_digest

__all__ = [
    "SequenceTable",
    "GrowthEstimate",
    "Confrontation",
    "compute_sequence",
    "richardson",
    "estimate_growth",
    "confront_ansatz",
]


@dataclass(frozen=True)
class SequenceTable:
    """``values[n] = a_n`` for ``n = 0..N``.

    For a term with equalities the table holds the reduced sequence, i.e.
    ``values[n'] = a_{stride * n'}`` of the original term.
    """

    values: tuple[Fraction, ...]
    term_hash: str = ""
    stride: int = 1

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def to_dict(self) -> dict:
        return {"n": self.n, "stride": self.stride, "term_hash": self.term_hash,
                "values": [str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
                           for v in self.values]}


def compute_sequence(term: BalancedTerm | SpecialTerm, N: int) -> SequenceTable:
    """Exact ``a_0..a_N`` by summing the term over the lattice points of ``n P``.

    Terms with equalities are reduced first; each inner sum is taken in
    lexicographic order so tables are reproducible.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    digest = term_digest(term)
    t = as_balanced(term)
    stride = 1
    if t.equalities:
        red = eliminate_equalities(t)
        t, stride = red.term, red.stride
    p = None if any(f.offset for f in t.forms) else newton_polytope(t)
    values = []
    for n in range(N + 1):
        total = Fraction(0)
        for k in support_points(t, n, p):
            total += eval_term(t, n, k)
        values.append(total)
    return SequenceTable(tuple(values), digest, stride)


def richardson(seq: Sequence, n0: int, order: int):
    """Richardson extrapolation in powers of ``1/n`` from ``seq[n0..n0+order]``.

    ``seq[i]`` is the value at index ``n = i``; exact for ``c_0 + c_1/n + ...
    + c_order/n^order``.
    """
    out = mpmath.mpf(0)
    for j in range(order + 1):
        n = n0 + j
        out += (-1) ** (order + j) * mpmath.mpf(n) ** order * seq[n] / (math.factorial(j) * math.factorial(order - j))
    return out


@dataclass
class GrowthEstimate:
    """Ratio limit ``lambda_ = lim a_{n+1}/a_n`` and exponent ``alpha``.

    ``uncertainty`` is the spread of the last two extrapolation orders.
    """

    lambda_: mpmath.mpf
    alpha: mpmath.mpf | None
    order: int
    uncertainty: mpmath.mpf
    alpha_uncertainty: mpmath.mpf | None = None
    method: str = "ratio"
    stride: int = 1
    flags: list[str] = field(default_factory=list)


def _to_mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpmathify(v)


def estimate_growth(tab: SequenceTable | Sequence, order: int = 4, digits: int = 64) -> GrowthEstimate:
    """Ratio-method estimate of the dominant growth of ``a_n``.

    Uses the last ``max(20, N // 4)`` indices. The ratios ``a_{n+1}/a_n`` are
    extrapolated to ``n = infinity``; ``alpha`` is then extrapolated from
    ``n (r_n / lambda - 1)``. If the window changes sign the root test
    ``|a_n|^{1/n}`` is used instead and ``alpha`` is left undetermined.

    Raises
    ------
    ValueError
        If the table is too short or the window contains a zero.
    """
    values = tab.values if isinstance(tab, SequenceTable) else tuple(tab)
    stride = tab.stride if isinstance(tab, SequenceTable) else 1
    N = len(values) - 1
    if order < 1:
        raise ValueError("order must be at least 1")
    if N < 4 * order:
        raise ValueError(f"need N >= 4 * order = {4 * order}, have N = {N}")
    window = min(max(20, N // 4), N)
    lo = N - window
    flags = []
    with mpmath.workdps(digits):
        a = [_to_mp(v) for v in values]
        tail = a[lo:]
        if any(x == 0 for x in tail):
            raise ValueError("zero terms in the estimation window")
        if not (all(x > 0 for x in tail) or all(x < 0 for x in tail)):
            flags.append("sign oscillation: root test fallback, modulus only")
            root = [abs(x) ** (mpmath.mpf(1) / n) for n, x in enumerate(a) if n > 0]
            root = [mpmath.mpf(0)] + root
            est = richardson(root, N - order, order)
            prev = richardson(root, N - order + 1, order - 1)
            return GrowthEstimate(est, None, order, abs(est - prev), None, "root", stride, flags)
        r = [a[n + 1] / a[n] if a[n] != 0 else mpmath.mpf(0) for n in range(N)]
        ests = [richardson(r, N - 1 - k, k) for k in range(max(order - 2, 0), order + 1)]
        lam = ests[-1]
        unc = abs(ests[-1] - ests[-2])
        if len(ests) >= 3 and abs(ests[-1] - ests[-2]) > 10 * abs(ests[-2] - ests[-3]) > 0:
            flags.append("possible log factor or competing singularities")
        alpha_seq = [n * (r[n] / lam - 1) if n else mpmath.mpf(0) for n in range(N)]
        al = richardson(alpha_seq, N - 1 - order, order)
        al_prev = richardson(alpha_seq, N - order, order - 1)
        return GrowthEstimate(lam, al, order, unc, abs(al - al_prev), "ratio", stride, flags)


@dataclass
class Confrontation:
    """Best match of the estimated singularity ``1/lambda`` against the ansatz."""

    matched: mpmath.mpc
    singularity: mpmath.mpf
    relative_error: mpmath.mpf
    is_min_modulus: bool
    min_modulus: mpmath.mpc
    compared_against: str


def confront_ansatz(est: GrowthEstimate, rep) -> Confrontation:
    """Match ``1/est.lambda_`` with the closest nonzero element of the ansatz.

    Reduced sequences (stride ``d > 1``) are compared with the reduced set
    ``rep.s_set``; otherwise with ``rep.candidates``.

    Raises
    ------
    ValueError
        If the ansatz has no nonzero element.
    """
    if est.stride > 1:
        pool, label = rep.s_set, "s_set"
    else:
        pool, label = rep.candidates, "candidates"
    pool = [v for v in pool if v != 0]
    if not pool:
        raise ValueError("ansatz set has no nonzero element")
    with mpmath.workdps(64):
        z = 1 / est.lambda_
        if est.method == "root":
            best = min(pool, key=lambda v: abs(abs(v) - abs(z)))
            err = abs(abs(best) - abs(z)) / abs(z)
        else:
            best = min(pool, key=lambda v: abs(1 / v - est.lambda_))
            err = abs(1 / best - est.lambda_) / abs(est.lambda_)
        smallest = min(pool, key=abs)
        is_min = abs(abs(best) - abs(smallest)) <= mpmath.mpf(10) ** -30 * abs(smallest)
    return Confrontation(best, z, err, bool(is_min), smallest, label)
