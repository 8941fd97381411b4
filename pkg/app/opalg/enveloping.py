"""
Universal enveloping algebra in a PBW basis

Elements are finite sums of ordered monomials X_1^e1 ... X_n^en with Fraction
coefficients. They act on functions as left-invariant differential operators:
the product a * b is "apply b, then a".
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from app.lie.algebra import StratifiedLieAlgebra

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Coefficient = Union[int, Fraction]


class PBWMonomial(NamedTuple):
    exponents: Tuple[int, ...]

    @classmethod
    def unit(cls, n: int) -> "PBWMonomial":
        return cls(tuple([0] * n))

    @classmethod
    def from_word(cls, word: Iterable[int], n: int) -> "PBWMonomial":
        """Monomial of a word that is already in canonical (non-decreasing) order"""
        exponents = [0] * n
        for i in word:
            exponents[i] += 1
        return cls(tuple(exponents))

    def word(self) -> Word:
        out: List[int] = []
        for i, e in enumerate(self.exponents):
            out.extend([i] * e)
        return tuple(out)

    def weight(self, layers: Sequence[int]) -> int:
        return sum(e * w for e, w in zip(self.exponents, layers))

    @property
    def order(self) -> int:
        """Plain derivative count"""
        return sum(self.exponents)

    def format(self) -> str:
        factors = [f"X{i + 1}^{e}" for i, e in enumerate(self.exponents) if e]
        return " ".join(factors) if factors else "1"


class EnvelopingAlgebra:
    """U(g) of a fixed algebra, with memoized normal ordering"""

    def __init__(self, algebra: StratifiedLieAlgebra):
        self.algebra = algebra
        self.n = algebra.dim
        self.layers = algebra.layers
        self._normal_forms: Dict[Word, Dict[PBWMonomial, Fraction]] = {}
        self._products: Dict[Tuple[PBWMonomial, PBWMonomial], Dict[PBWMonomial, Fraction]] = {}

    def __repr__(self) -> str:
        return f"EnvelopingAlgebra({self.algebra.name})"

    # ==================== Constructors ====================

    def element(self, terms: Mapping[PBWMonomial, Coefficient]) -> "EnvelopingElement":
        return EnvelopingElement(self, terms)

    def zero(self) -> "EnvelopingElement":
        return EnvelopingElement(self, {})

    def scalar(self, value: Coefficient) -> "EnvelopingElement":
        return EnvelopingElement(self, {PBWMonomial.unit(self.n): Fraction(value)})

    def generator(self, i: int) -> "EnvelopingElement":
        exponents = [0] * self.n
        exponents[i] = 1
        return EnvelopingElement(self, {PBWMonomial(tuple(exponents)): Fraction(1)})

    def monomial(self, exponents: Sequence[int], coeff: Coefficient = 1) -> "EnvelopingElement":
        return EnvelopingElement(self, {PBWMonomial(tuple(exponents)): Fraction(coeff)})

    # ==================== Normal ordering ====================

    def _rewrite(self, word: Word, position: int) -> List[Tuple[Word, Fraction]]:
        """X_a X_b -> X_b X_a + sum_k c^k_ab X_k at the given descent"""
        a, b = word[position], word[position + 1]
        head, tail = word[:position], word[position + 2:]
        out = [(head + (b, a) + tail, Fraction(1))]
        for k, c in self.algebra.bracket_of_basis(a, b).items():
            out.append((head + (k,) + tail, c))
        return out

    def normal_form(self, word: Word) -> Dict[PBWMonomial, Fraction]:
        """PBW expansion of a word, rewriting the leftmost descent first"""
        cached = self._normal_forms.get(word)
        if cached is not None:
            return cached
        descent = next((p for p in range(len(word) - 1) if word[p] > word[p + 1]), None)
        if descent is None:
            result = {PBWMonomial.from_word(word, self.n): Fraction(1)}
        else:
            result: Dict[PBWMonomial, Fraction] = {}
            for rewritten, coeff in self._rewrite(word, descent):
                for monomial, value in self.normal_form(rewritten).items():
                    result[monomial] = result.get(monomial, Fraction(0)) + coeff * value
            result = {m: c for m, c in result.items() if c}
        self._normal_forms[word] = result
        return result

    def normalize_with_schedule(self, word: Word, pick: Callable[[List[int]], int]) -> Dict[PBWMonomial, Fraction]:
        """Unmemoized normal ordering where `pick` chooses which descent to rewrite"""
        descents = [p for p in range(len(word) - 1) if word[p] > word[p + 1]]
        if not descents:
            return {PBWMonomial.from_word(word, self.n): Fraction(1)}
        position = pick(descents)
        result: Dict[PBWMonomial, Fraction] = {}
        for rewritten, coeff in self._rewrite(word, position):
            for monomial, value in self.normalize_with_schedule(rewritten, pick).items():
                result[monomial] = result.get(monomial, Fraction(0)) + coeff * value
        return {m: c for m, c in result.items() if c}

    def multiply_monomials(self, left: PBWMonomial, right: PBWMonomial) -> Dict[PBWMonomial, Fraction]:
        key = (left, right)
        cached = self._products.get(key)
        if cached is None:
            cached = self.normal_form(left.word() + right.word())
            self._products[key] = cached
        return cached


class EnvelopingElement:
    """Immutable element of U(g); zero coefficients are never stored"""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: EnvelopingAlgebra, terms: Mapping[PBWMonomial, Coefficient]):
        self.ring = ring
        self.terms: Dict[PBWMonomial, Fraction] = {
            (m if isinstance(m, PBWMonomial) else PBWMonomial(tuple(m))): Fraction(c) for m, c in terms.items() if c
        }

    # ==================== Arithmetic ====================

    def _coerce(self, other) -> "EnvelopingElement":
        if isinstance(other, EnvelopingElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        raise TypeError(f"cannot combine EnvelopingElement with {type(other).__name__}")

    def __add__(self, other) -> "EnvelopingElement":
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return EnvelopingElement(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "EnvelopingElement":
        return EnvelopingElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "EnvelopingElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "EnvelopingElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "EnvelopingElement":
        if isinstance(other, (int, Fraction)):
            return EnvelopingElement(self.ring, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        terms: Dict[PBWMonomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, c in self.ring.multiply_monomials(m1, m2).items():
                    terms[m] = terms.get(m, Fraction(0)) + c1 * c2 * c
        return EnvelopingElement(self.ring, terms)

    def __rmul__(self, other) -> "EnvelopingElement":
        if isinstance(other, (int, Fraction)):
            return self * other
        return self._coerce(other) * self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        if not isinstance(other, EnvelopingElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"EnvelopingElement({self.format()})"

    # ==================== Gradings ====================

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> List[int]:
        layers = self.ring.layers
        return sorted({m.weight(layers) for m in self.terms})

    def weight_range(self) -> Optional[Tuple[int, int]]:
        weights = self.weights()
        if not weights:
            return None
        return weights[0], weights[-1]

    def derivative_orders(self) -> List[int]:
        return sorted({m.order for m in self.terms})

    def homogeneous_component(self, weight: int) -> "EnvelopingElement":
        layers = self.ring.layers
        return EnvelopingElement(self.ring, {m: c for m, c in self.terms.items() if m.weight(layers) == weight})

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def format(self) -> str:
        """Terms "p/q · X1^e1 ..." in graded-lex order (higher degree first)"""
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(), key=lambda item: (-item[0].order, tuple(-e for e in item[0].exponents)))
        return " + ".join(f"{c} · {m.format()}" for m, c in ordered)


@lru_cache(maxsize=None)
def enveloping_algebra(alg: StratifiedLieAlgebra) -> EnvelopingAlgebra:
    return EnvelopingAlgebra(alg)


def pbw_normalize(
    alg: StratifiedLieAlgebra,
    word: Sequence[int],
    coeff: Coefficient = 1,
    pick: Optional[Callable[[List[int]], int]] = None,
) -> EnvelopingElement:
    """
    Rewrite coeff * X_w1 X_w2 ... into PBW normal form

    Args:
        alg: validated algebra
        word: 0-based generator indices
        coeff: rational multiplier
        pick: optional rewrite schedule choosing among descent positions;
            the result does not depend on it

    Returns:
        EnvelopingElement in canonical form
    """
    ring = enveloping_algebra(alg)
    word = tuple(word)
    terms = ring.normal_form(word) if pick is None else ring.normalize_with_schedule(word, pick)
    return EnvelopingElement(ring, {m: c * Fraction(coeff) for m, c in terms.items()})
