from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from kmroots.linalg import Subspace, det, integer_kernel, nullspace, rank, rref, solve

small = st.integers(min_value=-4, max_value=4)


def matrices(rows, cols):
    return st.lists(
        st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows
    )


def test_rref_identity_pivots():
    red, piv = rref([[2, 4], [1, 3]])
    assert piv == [0, 1]
    assert red == [(1, 0), (0, 1)]


def test_det_known():
    assert det([[2, -1], [-1, 2]]) == 3
    assert det([[2, -2], [-2, 2]]) == 0
    assert det([[0, 1], [1, 0]]) == -1


def test_solve_and_none():
    assert solve([[1, 0], [1, 1]], [3, 2]) == (Fraction(1), Fraction(2))
    assert solve([[1, 1], [2, 2]], [1, 0]) is None


def test_integer_kernel_fn2d_relation():
    sigma = [(1, 1, 0), (2, 2, 3), (0, 2, 3), (0, 4, 3)]
    assert integer_kernel(sigma) == [(2, -1, 2, -1)]


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_rank_nullity(m):
    assert rank(m) + len(nullspace(m, 4)) == 4
    for v in nullspace(m, 4):
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in m)


@settings(max_examples=60, deadline=None)
@given(matrices(2, 3), matrices(2, 3))
def test_subspace_dimension_formula(a, b):
    A, B = Subspace(a, 3), Subspace(b, 3)
    assert (A + B).dim + A.intersect(B).dim == A.dim + B.dim
    assert A.intersect(B) <= A and A.intersect(B) <= B
    assert A <= A + B


def test_annihilator_of_form():
    form = [[2, -1], [-1, 2]]
    s = Subspace([[1, 0]], 2)
    ann = s.annihilator(form)
    assert ann.dim == 1 and ann.contains([1, 2])
