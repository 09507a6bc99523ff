import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, Rational

from modcomp.linalg import (
    bareiss_det,
    bareiss_rank,
    in_cone,
    integer_inverse,
    modular_rank,
    solve_exact,
)

small_ints = st.integers(min_value=-6, max_value=6)


def square_matrices(size):
    return st.lists(st.lists(small_ints, min_size=size, max_size=size), min_size=size, max_size=size)


def test_bareiss_rank_of_dependent_rows():
    """Tests that a row multiple does not raise the rank."""
    assert bareiss_rank([[1, 2], [2, 4]]) == 1
    assert bareiss_rank([[1, 2, 3], [0, 0, 1], [1, 2, 4]]) == 2


def test_bareiss_rank_empty():
    """Tests that an empty matrix has rank 0."""
    assert bareiss_rank([]) == 0
    assert bareiss_rank([[]]) == 0


def test_bareiss_rank_does_not_modify_input():
    """Tests that the caller's rows survive elimination."""
    rows = [[2, 1], [4, 3]]
    bareiss_rank(rows)
    assert rows == [[2, 1], [4, 3]]


def test_bareiss_det_known_values():
    """Tests determinants that need a row swap and an exact division."""
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[2, 1], [1, 1]]) == 1
    assert bareiss_det([[2, 0, 0], [0, 3, 0], [0, 0, 4]]) == 24
    assert bareiss_det([[1, 2], [2, 4]]) == 0


def test_bareiss_det_rejects_non_square():
    """Tests that a non-square matrix is refused."""
    with pytest.raises(ValueError):
        bareiss_det([[1, 2, 3], [4, 5, 6]])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(square_matrices))
def test_bareiss_det_matches_sympy(rows):
    """Tests that the fraction-free determinant agrees with sympy."""
    assert bareiss_det(rows) == Matrix(rows).det()


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda m: st.integers(min_value=1, max_value=5).flatmap(
            lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )
)
def test_bareiss_rank_matches_sympy_and_prime_field(rows):
    """Tests that the exact rank agrees with sympy and with the rank modulo a large prime."""
    rank = bareiss_rank(rows)
    assert rank == Matrix(rows).rank()
    assert modular_rank(rows) == rank


def test_integer_inverse_of_unimodular_matrix():
    """Tests that the inverse of a unimodular matrix comes back as integer rows."""
    inverse = integer_inverse([(-1, -1), (0, 1)])
    assert inverse == ((-1, 0), (-1, 1))


def test_integer_inverse_rejects_non_unimodular():
    """Tests that singular and non-unimodular matrices are refused."""
    with pytest.raises(ValueError):
        integer_inverse([(1, 0), (1, 2)])
    with pytest.raises(ValueError):
        integer_inverse([(1, 2), (2, 4)])


def test_solve_exact():
    """Tests the unique, inconsistent and underdetermined cases."""
    assert solve_exact([(1, 0), (1, 2)], (2, 1)) == (Rational(3, 2), Rational(1, 2))
    assert solve_exact([(1, 1)], (1, 0)) is None
    assert solve_exact([(1, 0), (2, 0)], (1, 0)) is None


def test_in_cone():
    """Tests cone membership for the cone spanned by (0,1) and (1,-1)."""
    generators = ((0, 1), (1, -1))
    assert in_cone((1, 0), generators)
    assert in_cone((3, -1), generators)
    assert in_cone((0, 0), generators)
    assert not in_cone((-1, 0), generators)
    assert not in_cone((1, -2), generators)


def test_in_cone_without_generators():
    """Tests that only the origin lies in the empty cone."""
    assert not in_cone((1, 0), ())
    assert not in_cone((1, 0), ((0, 0),))
    assert in_cone((0, 0), ())
