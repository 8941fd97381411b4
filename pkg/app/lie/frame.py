"""
Left-invariant frame in exponential coordinates

X_i = sum_j a_ij(x) d/dx_j with a_ij = d/dt (x * exp(t e_i))_j at t = 0.
The coefficients are polynomials; they are kept both as sympy expressions
and as Polynomial term lists for fast exact or vectorized evaluation.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import List, Sequence, Tuple

import numpy as np
import sympy

from app.core.errors import CurveError
from app.core.linalg import to_fraction
from app.lie.algebra import StratifiedLieAlgebra
from app.lie.group import bch, coordinate_symbols


@dataclass(frozen=True)
class Polynomial:
    """Sparse multivariate polynomial with rational coefficients"""

    terms: Tuple[Tuple[Tuple[int, ...], Fraction], ...]

    @classmethod
    def from_expr(cls, expr, symbols: Sequence[sympy.Symbol]) -> "Polynomial":
        expr = sympy.expand(sympy.sympify(expr))
        if not expr.is_polynomial(*symbols):
            raise CurveError(f"{expr} is not a polynomial in {symbols}")
        if expr == 0:
            return cls(())
        poly = sympy.Poly(expr, *symbols)
        return cls(tuple((tuple(m), to_fraction(c)) for m, c in poly.terms()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def evaluate_exact(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for exponents, coeff in self.terms:
            value = coeff
            for x, e in zip(point, exponents):
                if e:
                    value *= x ** e
            total += value
        return total

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """Evaluate on an (N, n) float array of points"""
        coords = np.asarray(coords, dtype=float)
        out = np.zeros(coords.shape[0])
        for exponents, coeff in self.terms:
            term = np.full(coords.shape[0], float(coeff))
            for axis, e in enumerate(exponents):
                if e:
                    term *= coords[:, axis] ** e
            out += term
        return out


@dataclass(frozen=True, eq=False)
class FrameExpression:
    algebra: StratifiedLieAlgebra
    symbols: Tuple[sympy.Symbol, ...]
    coefficients: Tuple[Tuple[sympy.Expr, ...], ...]  # coefficients[i][j] = a_ij

    @property
    def matrix(self) -> sympy.Matrix:
        return sympy.Matrix(self.coefficients)

    @cached_property
    def polynomials(self) -> Tuple[Tuple[Polynomial, ...], ...]:
        return tuple(
            tuple(Polynomial.from_expr(a, self.symbols) for a in row) for row in self.coefficients
        )

    def vector_field(self, i: int, f: sympy.Expr) -> sympy.Expr:
        """X_i f"""
        return sympy.expand(sum(
            a * sympy.diff(f, x) for a, x in zip(self.coefficients[i], self.symbols) if a != 0
        ))

    def apply_monomial(self, exponents: Sequence[int], f: sympy.Expr) -> sympy.Expr:
        """X_1^e1 ... X_n^en f (the rightmost factor acts first)"""
        result = f
        for i in reversed(range(len(exponents))):
            for _ in range(exponents[i]):
                result = self.vector_field(i, result)
        return result

    def apply(self, element, f: sympy.Expr) -> sympy.Expr:
        """Action of an EnvelopingElement on a function"""
        total = sympy.Integer(0)
        for monomial, coeff in element.terms.items():
            total += sympy.Rational(coeff.numerator, coeff.denominator) * self.apply_monomial(monomial.exponents, f)
        return sympy.expand(total)

    def bracket(self, i: int, j: int) -> Tuple[sympy.Expr, ...]:
        """Coordinate components of the vector field commutator [X_i, X_j]"""
        a, b = self.coefficients[i], self.coefficients[j]
        return tuple(
            sympy.expand(self.vector_field(i, b[m]) - self.vector_field(j, a[m]))
            for m in range(len(self.symbols))
        )

    def bracket_defects(self) -> List[Tuple[int, int]]:
        """Pairs (i, j) whose commutator differs from sum_k c^k_ij X_k"""
        n = self.algebra.dim
        bad = []
        for i in range(n):
            for j in range(i + 1, n):
                expected = [
                    sympy.expand(sum(
                        sympy.Rational(c.numerator, c.denominator) * self.coefficients[k][m]
                        for k, c in self.algebra.bracket_of_basis(i, j).items()
                    ))
                    for m in range(n)
                ]
                if any(sympy.expand(u - v) != 0 for u, v in zip(self.bracket(i, j), expected)):
                    bad.append((i, j))
        return bad

    @cached_property
    def coframe(self) -> Tuple[Tuple[sympy.Expr, ...], ...]:
        """
        Dual coframe: theta^i = sum_j b_ij dx_j with B = (A^-1)^T, A the frame matrix
        """
        inverse = self.matrix.inv()
        dual = inverse.T
        return tuple(
            tuple(sympy.expand(dual[i, j]) for j in range(dual.cols)) for i in range(dual.rows)
        )

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """Frame matrices at points: shape (N, n, n)"""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        n = self.algebra.dim
        out = np.zeros((coords.shape[0], n, n))
        for i in range(n):
            for j in range(n):
                out[:, i, j] = self.polynomials[i][j].evaluate(coords)
        return out


@lru_cache(maxsize=None)
def left_invariant_frame(alg: StratifiedLieAlgebra) -> FrameExpression:
    """
    Differentiate right multiplication by exp(t e_i) at t = 0

    Args:
        alg: validated algebra

    Returns:
        FrameExpression whose coefficient matrix is the identity at the origin
    """
    symbols = coordinate_symbols(alg)
    t = sympy.Symbol("t", real=True)
    n = alg.dim
    rows = []
    for i in range(n):
        direction = [t if k == i else 0 for k in range(n)]
        moved = bch(alg, list(symbols), direction)
        rows.append(tuple(
            sympy.expand(sympy.diff(sympy.sympify(v), t).subs(t, 0)) for v in moved
        ))
    return FrameExpression(algebra=alg, symbols=tuple(symbols), coefficients=tuple(rows))
