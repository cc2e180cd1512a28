"""Exact Newton polytopes of balanced terms.

Polytopes are given by inequalities ``const + coeffs . w >= 0`` with rational
data. Vertices come from exhaustive ``r``-subsets of the bounding
hyperplanes, faces from intersections of vertex tight sets, and lattice
points of dilates from coordinate-wise bound propagation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .term import BalancedTerm

__all__ = [
    "Polytope",
    "Face",
    "PolytopeError",
    "UnboundedPolytopeError",
    "EmptyInteriorError",
    "newton_polytope",
    "polytope_from_inequalities",
    "faces",
    "lattice_points",
    "support_points",
    "nonnegative_support",
]


class PolytopeError(ValueError):
    pass


class UnboundedPolytopeError(PolytopeError):
    pass


class EmptyInteriorError(PolytopeError):
    pass


Row = tuple[Fraction, tuple[Fraction, ...]]


@dataclass(frozen=True)
class Polytope:
    """H- and V-representation of a compact full-dimensional polytope.

    ``inequalities[i] = (const, coeffs)`` encodes ``const + coeffs . w >= 0``.
    """

    inequalities: tuple[Row, ...]
    vertices: tuple[tuple[Fraction, ...], ...]
    dim: int

    @property
    def r(self) -> int:
        return self.dim

    def contains(self, w) -> bool:
        return all(c + sum(a * x for a, x in zip(v, w)) >= 0 for c, v in self.inequalities)

    def tight_set(self, w) -> frozenset[int]:
        return frozenset(i for i, (c, v) in enumerate(self.inequalities)
                         if c + sum(a * x for a, x in zip(v, w)) == 0)


@dataclass(frozen=True)
class Face:
    """A nonempty face, keyed by its maximal tight set.

    ``base + basis @ s`` parametrizes the affine hull; ``basis`` holds
    ``dim`` rational direction vectors.
    """

    tight: frozenset[int]
    vertices: tuple[tuple[Fraction, ...], ...]
    dim: int
    base: tuple[Fraction, ...]
    basis: tuple[tuple[Fraction, ...], ...]

    def param(self, s):
        out = list(self.base)
        for sl, b in zip(s, self.basis):
            out = [x + sl * y for x, y in zip(out, b)]
        return tuple(out)

    def barycenter(self):
        m = len(self.vertices)
        return tuple(sum(v[i] for v in self.vertices) / m for i in range(len(self.base)))


# exact rational linear algebra

def _solve(A, b):
    """Unique solution of the square system ``A x = b`` or ``None``."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for i in range(n):
            if i != col and M[i][col] != 0:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return tuple(M[i][n] for i in range(n))


def _row_basis(vectors):
    """Rational basis (reduced echelon) of the span of ``vectors``."""
    rows = [list(map(Fraction, v)) for v in vectors]
    basis = []
    pivots = []
    for row in rows:
        for p, b in zip(pivots, basis):
            if row[p]:
                f = row[p]
                row = [x - f * y for x, y in zip(row, b)]
        p = next((i for i, x in enumerate(row) if x), None)
        if p is None:
            continue
        row = [x / row[p] for x in row]
        for i, b in enumerate(basis):
            if b[p]:
                f = b[p]
                basis[i] = [x - f * y for x, y in zip(b, row)]
        basis.append(row)
        pivots.append(p)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [tuple(basis[i]) for i in order]


def _nullspace(rows, n):
    """Rational basis of ``{x : row . x = 0 for all rows}``."""
    basis = _row_basis(rows) if rows else []
    pivots = [next(i for i, x in enumerate(b) if x) for b in basis]
    free = [i for i in range(n) if i not in pivots]
    out = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for p, b in zip(pivots, basis):
            x[p] = -b[f]
        out.append(tuple(x))
    return out


def _normalize_row(const, coeffs) -> Row | None:
    vals = [Fraction(const)] + [Fraction(a) for a in coeffs]
    if not any(vals[1:]):
        if vals[0] < 0:
            raise PolytopeError("constant inequality is violated: polytope is empty")
        return None
    den = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    return Fraction(ints[0]), tuple(Fraction(x) for x in ints[1:])


def _vertices(ineqs, r):
    verts = {}
    for sub in itertools.combinations(range(len(ineqs)), r):
        A = [ineqs[i][1] for i in sub]
        b = [-ineqs[i][0] for i in sub]
        x = _solve(A, b)
        if x is None:
            continue
        if all(c + sum(a * xi for a, xi in zip(v, x)) >= 0 for c, v in ineqs):
            verts[x] = None
    return list(verts)


def polytope_from_inequalities(rows: Sequence[tuple]) -> Polytope:
    """Build a :class:`Polytope` from rows ``(const, coeffs)``.

    Duplicate and trivially satisfied rows are dropped.

    Raises
    ------
    UnboundedPolytopeError, EmptyInteriorError, PolytopeError
    """
    rows = list(rows)
    if not rows:
        raise UnboundedPolytopeError("no inequalities")
    r = len(rows[0][1])
    seen = {}
    for c, v in rows:
        nr = _normalize_row(c, v)
        if nr is not None and nr not in seen:
            seen[nr] = None
    ineqs = tuple(seen)
    if r == 0:
        return Polytope(ineqs, ((),), 0)
    normals = [v for _, v in ineqs]
    if len(_row_basis(normals)) < r:
        raise UnboundedPolytopeError("inequality normals do not span: polytope contains a line")
    # extreme rays of the recession cone are cut out by r-1 tight normals
    for sub in itertools.combinations(range(len(normals)), r - 1):
        for d in _nullspace([normals[i] for i in sub], r):
            for sgn in (1, -1):
                ray = tuple(sgn * x for x in d)
                if all(sum(a * x for a, x in zip(v, ray)) >= 0 for v in normals):
                    raise UnboundedPolytopeError(f"polytope is unbounded along {ray}")
    verts = _vertices(ineqs, r)
    if not verts:
        raise PolytopeError("polytope is empty")
    vertices = tuple(sorted(verts))
    v0 = vertices[0]
    dim = len(_row_basis([[a - b for a, b in zip(v, v0)] for v in vertices[1:]])) if len(vertices) > 1 else 0
    if dim < r:
        raise EmptyInteriorError(f"polytope has dimension {dim} < {r}: empty interior")
    return Polytope(ineqs, vertices, r)


def newton_polytope(term: BalancedTerm) -> Polytope:
    """Newton polytope ``{w : A_j(w) >= 0 for all j}`` of a term without equalities."""
    if term.equalities:
        raise PolytopeError("eliminate equalities before building the Newton polytope")
    rows = [(f.coeff_n, f.coeffs_k) for f in term.forms]
    if term.r == 0:
        for c, _ in rows:
            if c < 0:
                raise PolytopeError("0-dimensional term with a negative factorial argument")
        return Polytope(tuple((Fraction(c), ()) for c, _ in rows if c), ((),), 0)
    return polytope_from_inequalities(rows)


def _make_face(p: Polytope, verts, tight) -> Face:
    verts = tuple(sorted(verts))
    v0 = verts[0]
    dirs = _row_basis([[a - b for a, b in zip(v, v0)] for v in verts[1:]])
    return Face(frozenset(tight), verts, len(dirs), tuple(v0), tuple(dirs))


def faces(p: Polytope) -> list[Face]:
    """All nonempty faces of ``p``, sorted by dimension then vertex list."""
    vtight = {v: p.tight_set(v) for v in p.vertices}
    sets = set(vtight.values())
    frontier = set(sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in sets:
                c = a & b
                if c not in sets and c not in new:
                    new.add(c)
        sets |= new
        frontier = new
    out = []
    for t in sets:
        verts = [v for v, vt in vtight.items() if t <= vt]
        out.append(_make_face(p, verts, t))
    out.sort(key=lambda f: (f.dim, f.vertices))
    return out


def _box(vertices, scale):
    r = len(vertices[0])
    return [(math.floor(min(v[i] for v in vertices) * scale),
             math.ceil(max(v[i] for v in vertices) * scale)) for i in range(r)]


def _enumerate(rows, box):
    """Integer points of ``{x : c + a . x >= 0}`` inside ``box``, lexicographic."""
    r = len(box)
    out = []
    point = [0] * r

    def rec(i):
        lo, hi = box[i]
        for c, a in rows:
            ai = a[i]
            if ai == 0:
                continue
            rest = c + sum(a[l] * point[l] for l in range(i))
            for l in range(i + 1, r):
                rest += max(a[l] * box[l][0], a[l] * box[l][1])
            # ai * x_i + rest >= 0
            bound = Fraction(-rest) / ai
            if ai > 0:
                lo = max(lo, math.ceil(bound))
            else:
                hi = min(hi, math.floor(bound))
        for x in range(lo, hi + 1):
            point[i] = x
            if i + 1 == r:
                if all(c + sum(al * xl for al, xl in zip(a, point)) >= 0 for c, a in rows):
                    out.append(tuple(point))
            else:
                rec(i + 1)

    if r == 0:
        return [()] if all(c >= 0 for c, _ in rows) else []
    rec(0)
    return out


def lattice_points(p: Polytope, n: int) -> list[tuple[int, ...]]:
    """Integer points of the dilate ``n P``, in lexicographic order."""
    if p.dim == 0:
        return [()]
    rows = [(c * n, v) for c, v in p.inequalities]
    return _enumerate(rows, _box(p.vertices, n))


def support_points(term: BalancedTerm, n: int, p: Polytope | None = None) -> list[tuple[int, ...]]:
    """Integer ``k`` with every factorial argument ``A_j(n, k) >= 0`` (offsets included)."""
    if term.r == 0:
        return [()] if all(f(n, ()) >= 0 for f in term.forms) else []
    rows = [(Fraction(f.coeff_n * n + f.offset), tuple(map(Fraction, f.coeffs_k)))
            for f in term.forms]
    if any(f.offset for f in term.forms):
        # bounded because the recession cone is that of the linear polytope
        verts = _vertices(rows, term.r)
        return _enumerate(rows, _box(verts, 1)) if verts else []
    if p is None:
        p = newton_polytope(term)
    return _enumerate(rows, _box(p.vertices, n))


def nonnegative_support(A: Sequence[Sequence[int]], b: Sequence[int]) -> set[int] | None:
    """Coordinates that are positive somewhere on ``{x >= 0 : A x = b}``.

    Returns ``None`` when the set is empty. Uses basic feasible solutions, so
    the answer is exact; intended for a handful of variables.
    """
    nvar = len(A[0]) if A else 0
    basis_rows = _row_basis([list(row) + [bi] for row, bi in zip(A, b)])
    rows = [r_[:-1] for r_ in basis_rows]
    rhs = [r_[-1] for r_ in basis_rows]
    rank = len(rows)
    if any(not any(r_) and c != 0 for r_, c in zip(rows, rhs)):
        return None
    support: set[int] | None = None
    for cols in itertools.combinations(range(nvar), rank):
        sub = [[row[c] for c in cols] for row in rows]
        x = _solve(sub, rhs) if rank else ()
        if x is None:
            continue
        if all(xi >= 0 for xi in x):
            support = support or set()
            support |= {c for c, xi in zip(cols, x) if xi > 0}
    return support
