from hypothesis import given
from hypothesis import strategies as st

from multisum._lattice import column_echelon, hermite_on_rows, integer_kernel, particular_solution, rank_q

small = st.integers(-6, 6)


def matrices(rows=st.integers(1, 3), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


def _mul(A, x):
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def _det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


@given(matrices())
def test_echelon_is_unimodular_transform(A):
    n = len(A[0])
    H, U, pivots = column_echelon(A, n)
    AU = [[sum(A[i][k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(len(A))]
    assert AU == H
    assert abs(_det(U)) == 1
    assert len(pivots) == rank_q(A)


@given(matrices())
def test_kernel_spans_rational_kernel(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    q = len(K[0]) if K and K[0] else 0
    assert q == n - rank_q(A)
    for j in range(q):
        assert _mul(A, [row[j] for row in K]) == [0] * len(A)


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_particular_solution_of_consistent_system(A, x):
    n = len(A[0])
    b = _mul(A, x[:n])
    y = particular_solution(A, b, n)
    assert y is not None and _mul(A, y) == b


def test_particular_solution_detects_lattice_obstruction():
    assert particular_solution([[2, 4]], [1], 2) is None
    assert particular_solution([[2, 4]], [6], 2) is not None


def test_hermite_on_rows_keeps_lattice():
    basis = [[1, 0], [2, 3], [1, 1]]
    B = hermite_on_rows(basis, [0, 1])
    assert B[0][1] == 0 and B[0][0] > 0 and B[1][1] > 0
    # same lattice: each new column is an integer combination of the old ones and vice versa
    assert abs(_det([[B[0][0], B[0][1]], [B[1][0], B[1][1]]])) == abs(_det([[1, 0], [2, 3]]))
