"""Integer linear algebra: column echelon forms, kernels and lattice bases.

Matrices are lists of lists of Python ints (row-major). All operations are
exact and use unimodular column operations only.
"""

from __future__ import annotations

from fractions import Fraction


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _col_combine(mat, i, j, a, b, c, d):
    """Replace columns (i, j) by (a*col_i + b*col_j, c*col_i + d*col_j)."""
    for row in mat:
        x, y = row[i], row[j]
        row[i] = a * x + b * y
        row[j] = c * x + d * y


def _col_swap(mat, i, j):
    for row in mat:
        row[i], row[j] = row[j], row[i]


def _xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_echelon(mat, ncols=None):
    """Column echelon form ``H = mat @ U`` with ``U`` unimodular.

    Returns ``(H, U, pivots)`` where ``pivots[c]`` is the pivot row of the
    ``c``-th nonzero column of ``H``; columns ``len(pivots):`` of ``H`` are
    zero, so the matching columns of ``U`` span the integer kernel.
    """
    rows = len(mat)
    if ncols is None:
        ncols = len(mat[0]) if rows else 0
    H = [list(map(int, row)) for row in mat]
    U = _identity(ncols)
    pivots = []
    pc = 0
    for i in range(rows):
        if pc >= ncols:
            break
        for j in range(pc + 1, ncols):
            if H[i][j] == 0:
                continue
            if H[i][pc] == 0:
                _col_swap(H, pc, j)
                _col_swap(U, pc, j)
                continue
            a, b = H[i][pc], H[i][j]
            g, x, y = _xgcd(a, b)
            # [x, -b/g; y, a/g] has determinant 1
            _col_combine(H, pc, j, x, y, -b // g, a // g)
            _col_combine(U, pc, j, x, y, -b // g, a // g)
        if H[i][pc] != 0:
            if H[i][pc] < 0:
                for M in (H, U):
                    for row in M:
                        row[pc] = -row[pc]
            pivots.append(i)
            pc += 1
    return H, U, pivots


def integer_kernel(mat, ncols):
    """Basis (as columns of an ``ncols x q`` matrix) of ``{x in Z^ncols : mat x = 0}``."""
    if not mat:
        return _identity(ncols)
    _, U, pivots = column_echelon(mat, ncols)
    rank = len(pivots)
    return [row[rank:] for row in U]


def particular_solution(mat, rhs, ncols):
    """An integer ``x`` with ``mat x = rhs``, or ``None`` if none exists."""
    if not mat:
        return [0] * ncols
    H, U, pivots = column_echelon(mat, ncols)
    rank = len(pivots)
    y = [0] * ncols
    for c, p in enumerate(pivots):
        acc = rhs[p] - sum(H[p][cc] * y[cc] for cc in range(c))
        q, rem = divmod(acc, H[p][c])
        if rem:
            return None
        y[c] = q
    for i in range(len(mat)):
        if sum(H[i][c] * y[c] for c in range(rank)) != rhs[i]:
            return None
    return [sum(U[i][c] * y[c] for c in range(ncols)) for i in range(ncols)]


def rank_q(rows):
    """Rank over Q of a list of rational (or integer) row vectors."""
    M = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def hermite_on_rows(basis, sel):
    """Re-express a lattice basis so that its rows ``sel`` are in Hermite form.

    ``basis`` is an ``N x q`` integer matrix whose columns span a rank ``q``
    lattice, ``sel`` lists ``q`` row indices on which the projection has full
    rank. Returns a new basis ``B`` spanning the same lattice with ``B[sel]``
    lower triangular, positive diagonal, and entries left of the diagonal
    reduced into ``[0, diag)``.
    """
    q = len(sel)
    B = [list(row) for row in basis]
    sub = [B[s] for s in sel]
    # operate on the selected rows, mirror every column op on the full basis
    for i in range(q):
        for j in range(i + 1, q):
            if sub[i][j] == 0:
                continue
            if sub[i][i] == 0:
                _col_swap(B, i, j)
                continue
            a, b = sub[i][i], sub[i][j]
            g, x, y = _xgcd(a, b)
            _col_combine(B, i, j, x, y, -b // g, a // g)
        if sub[i][i] == 0:
            raise ValueError("selected rows do not have full rank")
        if sub[i][i] < 0:
            for row in B:
                row[i] = -row[i]
    for i in range(q):
        d = sub[i][i]
        for c in range(i):
            f = sub[i][c] // d
            if f:
                for row in B:
                    row[c] -= f * row[i]
    return B
