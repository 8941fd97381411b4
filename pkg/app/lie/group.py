"""
Group law in exponential coordinates

The product p*q = log(exp(p) exp(q)) is the Baker-Campbell-Hausdorff series,
which terminates at bracket length `step` on a nilpotent algebra, so rational
inputs give rational outputs.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from math import factorial
from typing import Callable, Iterable, List, Sequence, Tuple, Union

import sympy

from app.core.errors import AlgebraInputError, DilationError
from app.core.linalg import parse_rational
from app.lie.algebra import StratifiedLieAlgebra


Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class GroupPoint:
    coords: Tuple[Fraction, ...]

    @classmethod
    def of(cls, values: Iterable) -> "GroupPoint":
        return cls(tuple(parse_rational(v) for v in values))

    @classmethod
    def identity(cls, dim: int) -> "GroupPoint":
        return cls(tuple(Fraction(0) for _ in range(dim)))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    def __neg__(self) -> "GroupPoint":
        return GroupPoint(tuple(-c for c in self.coords))


def _check_point(alg: StratifiedLieAlgebra, p: GroupPoint) -> None:
    if len(p) != alg.dim:
        raise AlgebraInputError(f"point has {len(p)} coordinates, {alg.name} has dimension {alg.dim}")


@lru_cache(maxsize=None)
def _bernoulli_weights(order: int) -> Tuple[Fraction, ...]:
    """B_2p / (2p)! for p = 1 .. order // 2"""
    weights = []
    for p in range(1, order // 2 + 1):
        b = sympy.bernoulli(2 * p)
        weights.append(Fraction(int(b.p), int(b.q)) / factorial(2 * p))
    return tuple(weights)


def _compositions(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """Ordered tuples of `parts` positive integers summing to `total`"""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bch_series(alg: StratifiedLieAlgebra, x: Sequence, y: Sequence) -> List[List]:
    """
    Homogeneous BCH components Z_1 .. Z_s of log(exp(x) exp(y))

    Uses the recursion
        (n+1) Z_{n+1} = 1/2 [x - y, Z_n]
                        + sum_{p>=1, 2p<=n} B_2p/(2p)! sum_{k_1+..+k_2p=n} [Z_k1, [.. [Z_k2p, x + y]..]]
    with Z_1 = x + y. Entries may be Fractions or sympy expressions.
    """
    n = alg.dim
    s = alg.step
    x_plus_y = [a + b for a, b in zip(x, y)]
    x_minus_y = [a - b for a, b in zip(x, y)]
    terms: List[List] = [x_plus_y]
    for order in range(1, s):
        nxt = [Fraction(1, 2) * v for v in alg.bracket(x_minus_y, terms[order - 1])]
        for p, weight in enumerate(_bernoulli_weights(order), start=1):
            acc = [0] * n
            for ks in _compositions(order, 2 * p):
                nested = x_plus_y
                for k in reversed(ks):
                    nested = alg.bracket(terms[k - 1], nested)
                acc = [a + b for a, b in zip(acc, nested)]
            nxt = [a + weight * b for a, b in zip(nxt, acc)]
        terms.append([v / (order + 1) if isinstance(v, Fraction) else v * Fraction(1, order + 1) for v in nxt])
    return terms


def bch(alg: StratifiedLieAlgebra, x: Sequence, y: Sequence) -> List:
    total = [0] * alg.dim
    for term in bch_series(alg, x, y):
        total = [a + b for a, b in zip(total, term)]
    return total


def bch_multiply(alg: StratifiedLieAlgebra, p: GroupPoint, q: GroupPoint) -> GroupPoint:
    """Exact product p * q; identity 0, inverse -p"""
    _check_point(alg, p)
    _check_point(alg, q)
    return GroupPoint(tuple(Fraction(v) for v in bch(alg, p.coords, q.coords)))


def inverse(alg: StratifiedLieAlgebra, p: GroupPoint) -> GroupPoint:
    _check_point(alg, p)
    return -p


def dilate(alg: StratifiedLieAlgebra, t, p: GroupPoint) -> GroupPoint:
    """delta_t: the layer-i coordinates are scaled by t^i"""
    t = parse_rational(t)
    if t <= 0:
        raise DilationError(f"dilation factor must be positive, got {t}")
    _check_point(alg, p)
    return GroupPoint(tuple(c * t ** w for c, w in zip(p.coords, alg.layers)))


def coordinate_symbols(alg: StratifiedLieAlgebra, prefix: str = "x") -> Tuple[sympy.Symbol, ...]:
    if alg.dim == 3 and prefix == "x":
        return sympy.symbols("x y z", real=True)
    return sympy.symbols(f"{prefix}1:{alg.dim + 1}", real=True)


@lru_cache(maxsize=None)
def group_law_polynomials(alg: StratifiedLieAlgebra) -> Tuple[Tuple[sympy.Symbol, ...], Tuple[sympy.Symbol, ...], Tuple[sympy.Expr, ...]]:
    """
    The product as polynomials: returns (p symbols, q symbols, coordinates of p*q)
    """
    p = coordinate_symbols(alg, "p")
    q = coordinate_symbols(alg, "q")
    law = tuple(sympy.expand(sympy.sympify(v)) for v in bch(alg, list(p), list(q)))
    return p, q, law


def homogeneous_norm(alg: StratifiedLieAlgebra, p: GroupPoint) -> float:
    """||p|| = max_i |p_i|^(1/layer(i)); homogeneous of degree 1 under dilations"""
    _check_point(alg, p)
    return max((abs(float(c)) ** (1.0 / w) for c, w in zip(p.coords, alg.layers)), default=0.0)


def vectorized_group_law(alg: StratifiedLieAlgebra) -> Callable:
    """numpy evaluator (p_arrays, q_arrays) -> list of coordinate arrays of p*q"""
    p, q, law = group_law_polynomials(alg)
    return sympy.lambdify([p, q], list(law), modules="numpy")
