"""
Exact rational linear algebra

Thin helpers over sympy matrices: conversion to and from fractions.Fraction,
row-reduced null spaces and the Moore-Penrose pseudo-inverse through a
full-rank factorization. Everything stays in QQ.
"""
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

import sympy
from sympy import Matrix, Rational


Number = Union[int, Fraction, Rational]


def parse_rational(value: Union[str, int, float, Fraction]) -> Fraction:
    """
    Parse "p/q", an integer or a decimal string into a Fraction

    Floats are accepted only when they are integral, so exact inputs stay exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"inexact float {value!r}; pass a 'p/q' string")
        return Fraction(int(value))
    return Fraction(str(value).strip())


def to_fraction(value) -> Fraction:
    """Convert a sympy Rational (or int / Fraction) to Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    value = sympy.sympify(value)
    if not value.is_Rational:
        raise ValueError(f"{value} is not rational")
    return Fraction(int(value.p), int(value.q))


def to_rational(value: Number) -> Rational:
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return sympy.sympify(value)


def rational_matrix(rows: Sequence[Sequence[Number]], ncols: int = 0) -> Matrix:
    """Build an exact matrix; ncols fixes the width of an empty matrix"""
    if not rows:
        return sympy.zeros(0, ncols)
    return Matrix([[to_rational(v) for v in row] for row in rows])


def fraction_rows(matrix: Matrix) -> List[List[Fraction]]:
    return [[to_fraction(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def is_zero(matrix: Matrix) -> bool:
    return all(entry == 0 for entry in matrix)


def rank(matrix: Matrix) -> int:
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    return matrix.rank()


def nullspace_basis(matrix: Matrix) -> List[Matrix]:
    """
    Basis of ker(matrix) from the reduced row echelon form

    Free columns are taken left to right and each basis vector has a 1 in its
    free column, so the output is deterministic.
    """
    if matrix.rows == 0:
        return [sympy.eye(matrix.cols)[:, j] for j in range(matrix.cols)]
    reduced, pivots = matrix.rref()
    basis = []
    for free in range(matrix.cols):
        if free in pivots:
            continue
        vector = sympy.zeros(matrix.cols, 1)
        vector[free] = 1
        for row, pivot in enumerate(pivots):
            vector[pivot] = -reduced[row, free]
        basis.append(vector)
    return basis


def independent_rows(matrix: Matrix) -> List[int]:
    """Indices of a maximal set of linearly independent rows (first ones win)"""
    if matrix.rows == 0 or matrix.cols == 0:
        return []
    _, pivots = matrix.T.rref()
    return list(pivots)


def pseudo_inverse(matrix: Matrix) -> Matrix:
    """
    Exact Moore-Penrose pseudo-inverse

    With the full-rank factorization A = C F (C has full column rank, F full
    row rank), A+ = F^T (F F^T)^-1 (C^T C)^-1 C^T.
    """
    if matrix.rows == 0 or matrix.cols == 0 or is_zero(matrix):
        return sympy.zeros(matrix.cols, matrix.rows)
    left, right = matrix.rank_decomposition()
    return right.T * (right * right.T).inv() * (left.T * left).inv() * left.T


def penrose_defects(matrix: Matrix, pinv: Matrix) -> List[str]:
    """Names of the Penrose identities that fail for (matrix, pinv)"""
    failed = []
    if matrix * pinv * matrix != matrix:
        failed.append("A A+ A = A")
    if pinv * matrix * pinv != pinv:
        failed.append("A+ A A+ = A+")
    if (matrix * pinv).T != matrix * pinv:
        failed.append("(A A+)^T = A A+")
    if (pinv * matrix).T != pinv * matrix:
        failed.append("(A+ A)^T = A+ A")
    return failed


def orthogonal_coordinates(basis: Matrix) -> Matrix:
    """
    Coordinate map (B^T B)^-1 B^T of the orthogonal projection onto span(B)

    B has linearly independent columns.
    """
    if basis.cols == 0:
        return sympy.zeros(0, basis.rows)
    return (basis.T * basis).inv() * basis.T


def stack(blocks: Iterable[Matrix], ncols: int) -> Matrix:
    result = sympy.zeros(0, ncols)
    for block in blocks:
        if block.rows:
            result = result.col_join(block)
    return result
