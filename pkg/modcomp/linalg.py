"""
Exact integer linear algebra shared by the fan and cohomology modules.

Everything here works on plain lists of Python ints (or sympy matrices for the
rational solves) and never touches floating point.
"""
import itertools
from functools import lru_cache

from sympy import GF, ZZ, Matrix
from sympy.polys.matrices import DomainMatrix

MERSENNE_61 = 2**61 - 1


def bareiss_rank(rows):
    """
    Rank of an integer matrix by fraction-free (Bareiss) elimination.

    Every intermediate entry is a minor of the input, so each division by the
    previous pivot is exact.

    :param rows: A list of equal-length lists of ints. Not modified.
    :return: The rank over the rationals.
    """
    a = [list(row) for row in rows]
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    previous = 1
    for col in range(n):
        pivot = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, m):
            factor = a[i][col]
            for j in range(col + 1, n):
                a[i][j] = (p * a[i][j] - factor * a[rank][j]) // previous
            a[i][col] = 0
        previous = p
        rank += 1
        if rank == m:
            break
    return rank


def bareiss_det(rows):
    """
    Determinant of a square integer matrix, fraction-free over ZZ via sympy's
    DomainMatrix.
    """
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    return int(DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (n, n), ZZ).det())


def modular_rank(rows, prime=MERSENNE_61):
    """
    Rank of an integer matrix reduced modulo a prime, via sympy's DomainMatrix.
    """
    if not rows or not rows[0]:
        return 0
    field = GF(prime)
    converted = [[field(int(x) % prime) for x in row] for row in rows]
    return DomainMatrix(converted, (len(rows), len(rows[0])), field).rank()


def integer_inverse(columns):
    """
    Inverse of the square matrix whose columns are given, required to be integral.

    :param columns: The column vectors.
    :return: The rows of the inverse, as tuples of ints.
    :raises ValueError: If the matrix is singular or the inverse is not integral.
    """
    mat = Matrix([list(c) for c in columns]).T
    if mat.det() == 0:
        raise ValueError("singular matrix has no inverse")
    inverse = mat.inv()
    if any(not x.is_integer for x in inverse):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in inverse.row(i)) for i in range(inverse.rows))


def solve_exact(columns, target):
    """
    Solve sum_i x_i * columns[i] = target over the rationals.

    :return: The unique solution as a tuple of sympy Rationals, or None when the
        system is inconsistent or underdetermined.
    """
    mat = Matrix([list(c) for c in columns]).T
    rhs = Matrix(list(target))
    try:
        solution, params = mat.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0] != 0:
        return None
    return tuple(solution)


@lru_cache(maxsize=65536)
def in_cone(vector, generators):
    """
    Membership of an integer vector in the rational cone spanned by generators.

    By Caratheodory it suffices to look for a nonnegative solution over some
    linearly independent subset of the generators.

    :param vector: A tuple of ints.
    :param generators: A tuple of int tuples.
    """
    if all(x == 0 for x in vector):
        return True
    gens = tuple(dict.fromkeys(g for g in generators if any(g)))
    if not gens:
        return False
    dim = len(vector)
    for size in range(1, min(dim, len(gens)) + 1):
        for subset in itertools.combinations(gens, size):
            if Matrix([list(g) for g in subset]).rank() != size:
                continue
            solution = solve_exact(subset, vector)
            if solution is not None and all(x >= 0 for x in solution):
                return True
    return False
