"""Balanced hypergeometric terms: representation, validation and evaluation.

A term in variables ``(n, k_1, ..., k_r)`` is

    scale * C_0^n * prod_i C_i^{k_i} * prod_j A_j(n, k)!^{sign_j}

with integral (possibly affine) linear forms ``A_j``. Optional equality
constraints restrict the support to a sublattice; :func:`eliminate_equalities`
turns such a term into an unconstrained one in fewer variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import _lattice

__all__ = [
    "LinearForm",
    "BalancedTerm",
    "SpecialTerm",
    "ValidationReport",
    "Embedding",
    "Reduction",
    "TermDomainError",
    "validate",
    "eval_term",
    "special_to_balanced",
    "eliminate_equalities",
    "restrict",
    "term_from_dict",
    "term_to_dict",
    "term_digest",
    "as_balanced",
]


class TermDomainError(ValueError):
    """Raised when a term is evaluated outside its support."""


@lru_cache(maxsize=4096)
def _factorial(m: int) -> int:
    return math.factorial(m)


@dataclass(frozen=True)
class LinearForm:
    """Integral affine form ``coeff_n * n + coeffs_k . k + offset``."""

    coeff_n: int
    coeffs_k: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff_n", int(self.coeff_n))
        object.__setattr__(self, "coeffs_k", tuple(int(a) for a in self.coeffs_k))
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def r(self) -> int:
        return len(self.coeffs_k)

    def __call__(self, n: int, k: Sequence[int]) -> int:
        return self.coeff_n * n + sum(a * x for a, x in zip(self.coeffs_k, k)) + self.offset

    def at(self, w):
        """Normalized value ``A(w) = coeff_n + coeffs_k . w`` (offset dropped)."""
        return self.coeff_n + sum(a * x for a, x in zip(self.coeffs_k, w))

    def vector(self) -> tuple[int, ...]:
        """Linear part as the vector ``(coeff_n, coeffs_k...)``."""
        return (self.coeff_n,) + self.coeffs_k

    def linear(self) -> "LinearForm":
        return LinearForm(self.coeff_n, self.coeffs_k, 0)

    def is_zero(self) -> bool:
        return self.coeff_n == 0 and not any(self.coeffs_k) and self.offset == 0

    def __add__(self, other):
        return LinearForm(self.coeff_n + other.coeff_n,
                          tuple(a + b for a, b in zip(self.coeffs_k, other.coeffs_k)),
                          self.offset + other.offset)

    def __neg__(self):
        return LinearForm(-self.coeff_n, tuple(-a for a in self.coeffs_k), -self.offset)

    def __sub__(self, other):
        return self + (-other)

    def __str__(self):
        parts = []
        names = ["n"] + [f"k{i + 1}" for i in range(self.r)]
        for a, name in zip(self.vector(), names):
            if a:
                parts.append(f"{a:+d}{name}" if abs(a) != 1 else ("+" if a > 0 else "-") + name)
        if self.offset or not parts:
            parts.append(f"{self.offset:+d}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class BalancedTerm:
    """A balanced hypergeometric term.

    Parameters
    ----------
    c0 : Fraction
        Constant raised to the power ``n``.
    c : tuple of Fraction
        Constants ``C_1..C_r`` raised to ``k_1..k_r``; ``len(c)`` fixes ``r``.
    factors : tuple of (LinearForm, int)
        Factorial factors ``A_j(n, k)!^{sign_j}`` with ``sign_j = +1 or -1``.
    equalities : tuple of LinearForm
        Support constraints ``E_l(n, k) = 0``.
    scale : Fraction
        Overall prefactor; only produced when eliminating inhomogeneous
        equalities.
    """

    c0: Fraction
    c: tuple[Fraction, ...]
    factors: tuple[tuple[LinearForm, int], ...]
    equalities: tuple[LinearForm, ...] = ()
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "c0", _frac(self.c0))
        object.__setattr__(self, "c", tuple(_frac(x) for x in self.c))
        object.__setattr__(self, "scale", _frac(self.scale))
        object.__setattr__(self, "factors", tuple((f, int(s)) for f, s in self.factors))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        r = len(self.c)
        for f, s in self.factors:
            if f.r != r:
                raise ValueError(f"factor {f} has {f.r} k-coefficients, expected {r}")
            if s not in (1, -1):
                raise ValueError(f"factor sign must be +1 or -1, got {s}")
        for e in self.equalities:
            if e.r != r:
                raise ValueError(f"equality {e} has {e.r} k-coefficients, expected {r}")

    @property
    def r(self) -> int:
        return len(self.c)

    @property
    def forms(self) -> tuple[LinearForm, ...]:
        return tuple(f for f, _ in self.factors)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(s for _, s in self.factors)

    def linear(self) -> "BalancedTerm":
        """The same term with all affine offsets dropped (equalities kept)."""
        return BalancedTerm(self.c0, self.c, tuple((f.linear(), s) for f, s in self.factors),
                            self.equalities, self.scale)


@dataclass(frozen=True)
class SpecialTerm:
    """Product of constants and binomials ``binom(top, bottom)^{sign}``."""

    c0: Fraction
    c: tuple[Fraction, ...]
    binomials: tuple[tuple[LinearForm, LinearForm, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "c0", _frac(self.c0))
        object.__setattr__(self, "c", tuple(_frac(x) for x in self.c))
        object.__setattr__(self, "binomials",
                           tuple((t, b, int(s)) for t, b, s in self.binomials))

    @property
    def r(self) -> int:
        return len(self.c)


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _coord_names(r):
    return ["n"] + [f"k{i + 1}" for i in range(r)]


def _reduce_by_span(vec, basis_rows):
    """Residual of ``vec`` after exact elimination against ``basis_rows``."""
    rows = [[Fraction(x) for x in b] for b in basis_rows]
    res = [Fraction(x) for x in vec]
    echelon = []
    for row in rows:
        for piv, prow in echelon:
            if row[piv]:
                f = row[piv] / prow[piv]
                row = [a - f * b for a, b in zip(row, prow)]
        piv = next((i for i, a in enumerate(row) if a), None)
        if piv is not None:
            echelon.append((piv, row))
    for piv, prow in echelon:
        if res[piv]:
            f = res[piv] / prow[piv]
            res = [a - f * b for a, b in zip(res, prow)]
    return res


def validate(term: BalancedTerm) -> ValidationReport:
    """Check the balance condition (modulo equalities) and nonzero constants."""
    violations = []
    names = _coord_names(term.r)
    total = [0] * (term.r + 1)
    for f, s in term.factors:
        for i, a in enumerate(f.vector()):
            total[i] += s * a
    residual = _reduce_by_span(total, [e.vector() for e in term.equalities])
    for name, val in zip(names, residual):
        if val != 0:
            violations.append(f"balance fails at {name}-coordinate (signed sum {val})")
    if term.c0 == 0:
        violations.append("constant c0 is zero")
    for i, ci in enumerate(term.c):
        if ci == 0:
            violations.append(f"constant c{i + 1} is zero")
    return ValidationReport(not violations, violations)


def eval_term(term: BalancedTerm, n: int, k: Sequence[int] = ()) -> Fraction:
    """Exact value of the term at ``(n, k)``.

    Raises
    ------
    TermDomainError
        If an equality fails or some factorial argument is negative.
    """
    k = tuple(int(x) for x in k)
    if len(k) != term.r:
        raise ValueError(f"expected {term.r} summation indices, got {len(k)}")
    for e in term.equalities:
        if e(n, k) != 0:
            raise TermDomainError(f"equality {e} = 0 fails at n={n}, k={k}")
    num, den = 1, 1
    for j, (f, s) in enumerate(term.factors):
        m = f(n, k)
        if m < 0:
            raise TermDomainError(f"factor {j} ({f}) is negative at n={n}, k={k}")
        if s > 0:
            num *= _factorial(m)
        else:
            den *= _factorial(m)
    value = Fraction(num, den) * term.scale * term.c0 ** n
    for ci, ki in zip(term.c, k):
        value *= ci ** ki
    return value


def special_to_balanced(term: SpecialTerm) -> BalancedTerm:
    """Expand each ``binom(B, C)^eps`` into ``B!^eps C!^-eps (B-C)!^-eps``."""
    factors = []
    for top, bottom, s in term.binomials:
        factors += [(top, s), (bottom, -s), (top - bottom, -s)]
    return BalancedTerm(term.c0, term.c, tuple(factors))


@dataclass(frozen=True)
class Embedding:
    """Affine lattice map ``(n', m) -> (n, k) = origin + n' * step + M m``.

    Vectors are in ambient coordinates ``(n, k_1..k_r)``; ``step[0]`` is the
    stride ``d`` and every column of ``M`` has zero ``n``-component.
    """

    origin: tuple[int, ...]
    step: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]  # columns of M

    @property
    def stride(self) -> int:
        return self.step[0]

    def __call__(self, n_red: int, m: Sequence[int] = ()):
        x = [o + n_red * g for o, g in zip(self.origin, self.step)]
        for ml, col in zip(m, self.basis):
            x = [a + ml * b for a, b in zip(x, col)]
        return x[0], tuple(x[1:])

    def normalized(self, s):
        """Ambient point ``w = k/n`` for reduced face coordinates ``s = m/n'``."""
        d = self.step[0]
        out = []
        for i in range(1, len(self.step)):
            acc = self.step[i] + sum(sl * col[i] for sl, col in zip(s, self.basis))
            out.append(Fraction(acc, d) if isinstance(acc, int) else acc / d)
        return tuple(out)


@dataclass(frozen=True)
class Reduction:
    """Result of :func:`eliminate_equalities`."""

    term: BalancedTerm
    stride: int
    embedding: Embedding
    free: tuple[int, ...]  # ambient k-indices used as parameters


def _choose_free(kernel, r, free):
    """Pick k-coordinates on which the kernel lattice projects with full rank."""
    q = len(kernel[0]) if kernel else 0
    if free is not None:
        sel = [0] + [1 + i for i in free]
        if len(sel) != q or _lattice.rank_q([kernel[s] for s in sel]) != q:
            raise ValueError(f"coordinates {tuple(free)} do not parametrize the equality lattice")
        return tuple(free)
    chosen = []
    current = [kernel[0]]
    for i in range(r):
        if len(chosen) == q - 1:
            break
        trial = current + [kernel[1 + i]]
        if _lattice.rank_q(trial) == len(trial):
            chosen.append(i)
            current = trial
    return tuple(chosen)


def eliminate_equalities(term: BalancedTerm, free: Sequence[int] | None = None) -> Reduction:
    """Parametrize the equality lattice and return an unconstrained term.

    The lattice ``{(n, k) : E_l(n, k) = 0}`` is written as
    ``origin + n' * step + M m`` where ``step`` has ``n``-component ``d >= 1``
    (the stride) and the columns of ``M`` have ``n``-component zero. The basis
    is put in Hermite form on the rows ``(n, k_free...)``; by default the free
    coordinates are the lexicographically first ones that give a full-rank
    projection.

    Parameters
    ----------
    term : BalancedTerm
        Term with a nonempty list of equalities.
    free : sequence of int, optional
        0-based k-indices to use as the reduced variables.

    Raises
    ------
    ValueError
        If there are no equalities, they are inconsistent over the integers,
        or they force ``n = n_0`` (no support for large ``n``).
    """
    if not term.equalities:
        raise ValueError("term has no equalities to eliminate")
    N = term.r + 1
    E = [list(e.vector()) for e in term.equalities]
    rhs = [-e.offset for e in term.equalities]
    xp = _lattice.particular_solution(E, rhs, N)
    if xp is None:
        raise ValueError("equalities have no integer solution")
    kernel = _lattice.integer_kernel(E, N)
    q = len(kernel[0]) if kernel and kernel[0] else 0
    if q == 0 or all(row == 0 for row in kernel[0]):
        raise ValueError("equalities confine the support to a single value of n")
    free = _choose_free(kernel, term.r, free)
    sel = [0] + [1 + i for i in free]
    if len(sel) != q:
        raise ValueError("equality lattice is not parametrized by the chosen coordinates")
    B = _lattice.hermite_on_rows(kernel, sel)
    step = [row[0] for row in B]
    cols = [[row[c] for row in B] for c in range(1, q)]
    d = step[0]
    # shift the particular solution so that 0 <= n_0 < d and the free
    # coordinates are reduced
    t, n0 = divmod(xp[0], d)
    origin = [a - t * b for a, b in zip(xp, step)]
    for c, col in enumerate(cols):
        s = sel[c + 1]
        f = origin[s] // col[s]
        origin = [a - f * b for a, b in zip(origin, col)]
    emb = Embedding(tuple(origin), tuple(step), tuple(tuple(c) for c in cols))

    def pull(vec):
        return (sum(a * g for a, g in zip(vec, step)),
                tuple(sum(a * b for a, b in zip(vec, col)) for col in cols),
                sum(a * o for a, o in zip(vec, origin)))

    scale = term.scale
    factors = []
    for f, s in term.factors:
        cn, ck, off = pull(f.vector())
        off += f.offset
        if cn == 0 and not any(ck):
            if off < 0:
                raise ValueError(f"factor {f} is a negative constant on the support")
            scale = scale * (Fraction(_factorial(off)) ** s)
            continue
        factors.append((LinearForm(cn, ck, off), s))

    consts = (term.c0,) + term.c

    def power(vec):
        out = Fraction(1)
        for ci, e in zip(consts, vec):
            if e:
                out *= ci ** e
        return out

    scale = scale * power(origin)
    reduced = BalancedTerm(power(step), tuple(power(col) for col in cols), tuple(factors),
                           (), scale)
    return Reduction(reduced, d, emb, free)


def restrict(term: BalancedTerm, tight: Sequence[int], free: Sequence[int] | None = None) -> Reduction:
    """Restriction of the linearized term to the face where ``A_j = 0`` for ``j in tight``.

    Affine offsets are dropped first. With no tight forms the term itself is
    returned with stride 1 and the identity embedding.
    """
    lin = term.linear()
    if term.equalities:
        raise ValueError("eliminate equalities before restricting to a face")
    if not tight:
        r = term.r
        emb = Embedding((0,) * (r + 1), (1,) + (0,) * r,
                        tuple(tuple(int(i == j + 1) for i in range(r + 1)) for j in range(r)))
        return Reduction(BalancedTerm(lin.c0, lin.c, lin.factors), 1, emb, tuple(range(r)))
    eqs = tuple(lin.forms[j] for j in sorted(set(tight)))
    constrained = BalancedTerm(lin.c0, lin.c, lin.factors, eqs)
    red = eliminate_equalities(constrained, free)
    # restriction is only meaningful up to the overall constant
    return Reduction(BalancedTerm(red.term.c0, red.term.c, red.term.factors), red.stride,
                     red.embedding, red.free)


# JSON description files


def _parse_rational(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"{where}: expected a rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            q = Fraction(x.strip())
        except ValueError:
            raise ValueError(f"{where}: malformed rational {x!r}") from None
        if "/" in x:
            p, den = x.split("/")
            if int(den) <= 0 or math.gcd(int(p), int(den)) != 1:
                raise ValueError(f"{where}: rational {x!r} is not in lowest terms with q > 0")
        return q
    raise ValueError(f"{where}: expected a rational string 'p/q', got {x!r}")


def _format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_form(d, r, where) -> LinearForm:
    if not isinstance(d, dict):
        raise ValueError(f"{where}: expected an object")
    extra = set(d) - {"n", "k", "offset", "sign"}
    if extra:
        raise ValueError(f"{where}: unknown keys {sorted(extra)}")
    k = d.get("k", [])
    if not isinstance(k, list) or len(k) != r:
        raise ValueError(f"{where}: 'k' must be a list of length {r}")
    return LinearForm(_int(d.get("n", 0), f"{where}.n"), tuple(_int(x, f"{where}.k") for x in k),
                      _int(d.get("offset", 0), f"{where}.offset"))


def _int(x, where) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"{where}: expected an integer, got {x!r}")
    return x


def _form_dict(f: LinearForm) -> dict:
    return {"n": f.coeff_n, "k": list(f.coeffs_k), "offset": f.offset}


def term_from_dict(data: dict) -> BalancedTerm | SpecialTerm:
    """Build a term from its JSON description.

    Objects with a ``"binomials"`` key give a :class:`SpecialTerm`, all others
    a :class:`BalancedTerm`.
    """
    if not isinstance(data, dict):
        raise ValueError("term description must be a JSON object")
    kind = "binomials" if "binomials" in data else "factors"
    if kind not in data:
        raise ValueError("term description needs a 'factors' or 'binomials' list")
    allowed = {"c0", "c", kind} | ({"equalities"} if kind == "factors" else set())
    extra = set(data) - allowed
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)}")
    if not isinstance(data.get("c", []), list) or not isinstance(data[kind], list):
        raise ValueError("'c' and the factor list must be JSON arrays")
    c0 = _parse_rational(data.get("c0", "1"), "c0")
    c = tuple(_parse_rational(x, f"c[{i}]") for i, x in enumerate(data.get("c", [])))
    r = len(c)
    if "binomials" in data:
        bins = []
        for i, b in enumerate(data["binomials"]):
            if not isinstance(b, dict) or set(b) - {"top", "bottom", "sign"}:
                raise ValueError(f"binomials[{i}]: expected an object with top, bottom, sign")
            sign = _int(b.get("sign", 1), f"binomials[{i}].sign")
            bins.append((_parse_form(b.get("top"), r, f"binomials[{i}].top"),
                         _parse_form(b.get("bottom"), r, f"binomials[{i}].bottom"), sign))
            if sign not in (1, -1):
                raise ValueError(f"binomials[{i}].sign must be +1 or -1")
        return SpecialTerm(c0, c, tuple(bins))
    factors = []
    for i, f in enumerate(data.get("factors", [])):
        sign = _int(f.get("sign", 1), f"factors[{i}].sign") if isinstance(f, dict) else 0
        if sign not in (1, -1):
            raise ValueError(f"factors[{i}].sign must be +1 or -1")
        factors.append((_parse_form(f, r, f"factors[{i}]"), sign))
    eqs = tuple(_parse_form(e, r, f"equalities[{i}]") for i, e in enumerate(data.get("equalities", [])))
    return BalancedTerm(c0, c, tuple(factors), eqs)


def term_to_dict(term: BalancedTerm | SpecialTerm) -> dict:
    out = {"c0": _format_rational(term.c0), "c": [_format_rational(x) for x in term.c]}
    if isinstance(term, SpecialTerm):
        out["binomials"] = [{"top": _form_dict(t), "bottom": _form_dict(b), "sign": s}
                            for t, b, s in term.binomials]
        return out
    out["factors"] = [dict(_form_dict(f), sign=s) for f, s in term.factors]
    out["equalities"] = [_form_dict(e) for e in term.equalities]
    return out


def as_balanced(term: BalancedTerm | SpecialTerm) -> BalancedTerm:
    return special_to_balanced(term) if isinstance(term, SpecialTerm) else term


def term_digest(term: BalancedTerm | SpecialTerm) -> str:
    """SHA-256 of the canonical JSON description."""
    import hashlib
    import json

    blob = json.dumps(term_to_dict(term), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
