from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.core.errors import OperatorShapeError
from app.lie.catalog import catalog
from app.lie.frame import left_invariant_frame
from app.lie.group import coordinate_symbols
from app.opalg.enveloping import PBWMonomial, enveloping_algebra, pbw_normalize
from app.opalg.operators import (
    OperatorMatrix,
    check_weight_bookkeeping,
    constant_operator,
    derivative_orders,
    format_operator,
    fraction_entry,
    identity_operator,
    max_derivative_order,
    op_compose,
    operator_weights,
)

engel_words = st.lists(st.integers(min_value=0, max_value=3), min_size=0, max_size=4)


# ==================== PBW normal form ====================

def test_heisenberg_commutation_rule(heisenberg):
    ring = enveloping_algebra(heisenberg)
    x1, x2, x3 = (ring.generator(i) for i in range(3))
    assert pbw_normalize(heisenberg, (1, 0)) == x1 * x2 - x3
    assert x2 * x1 - x1 * x2 == -x3


def test_ordered_words_are_already_normal(engel):
    element = pbw_normalize(engel, (0, 0, 1, 3), coeff=Fraction(2, 3))
    assert element.terms == {PBWMonomial((2, 1, 0, 1)): Fraction(2, 3)}


def test_central_generator_commutes(heisenberg):
    assert pbw_normalize(heisenberg, (2, 0)) == pbw_normalize(heisenberg, (0, 2))


@hypothesis_settings(max_examples=40, deadline=None)
@given(engel_words)
def test_rewrite_schedule_does_not_change_the_result(word):
    engel = catalog("engel")
    leftmost = pbw_normalize(engel, word)
    assert pbw_normalize(engel, word, pick=lambda descents: descents[-1]) == leftmost
    assert pbw_normalize(engel, word, pick=lambda descents: descents[len(descents) // 2]) == leftmost


@hypothesis_settings(max_examples=25, deadline=None)
@given(engel_words)
def test_normal_form_acts_like_the_word(word):
    engel = catalog("engel")
    frame = left_invariant_frame(engel)
    x1, x2, x3, x4 = coordinate_symbols(engel)
    f = x1 ** 3 * x2 + x2 ** 2 * x3 - x1 * x4 + x3 ** 2
    expected = f
    for i in reversed(word):
        expected = frame.vector_field(i, expected)
    assert sympy.expand(frame.apply(pbw_normalize(engel, word), f) - expected) == 0


def test_products_are_weight_homogeneous(engel):
    ring = enveloping_algebra(engel)
    x1, x2 = ring.generator(0), ring.generator(1)
    product = x2 * x1 * x2
    assert product.is_homogeneous()
    assert product.weights() == [3]
    assert product.derivative_orders() == [2, 3]


def test_element_arithmetic_with_scalars(heisenberg):
    ring = enveloping_algebra(heisenberg)
    x1 = ring.generator(0)
    assert (x1 - x1).is_zero
    assert 2 * x1 == x1 + x1
    assert (1 - x1) + x1 == 1
    with pytest.raises(TypeError):
        x1 + 0.5


def test_element_format(heisenberg):
    assert pbw_normalize(heisenberg, (1, 0)).format() == "1 · X1^1 X2^1 + -1 · X3^1"
    assert enveloping_algebra(heisenberg).zero().format() == "0"


# ==================== Operator matrices ====================

def _gradient(ring):
    return OperatorMatrix(
        ring, (1, 1), (0,),
        {(0, 0): ring.generator(0), (1, 0): ring.generator(1)},
        ("t1", "t2"), ("1",),
    )


def _curl(ring):
    return OperatorMatrix(ring, (3,), (1, 1), {(0, 0): -ring.generator(1), (0, 1): ring.generator(0)})


def test_composition_uses_enveloping_products(heisenberg):
    ring = enveloping_algebra(heisenberg)
    composed = op_compose(_curl(ring), _gradient(ring))
    assert composed.shape == (1, 1)
    # X1 X2 - X2 X1 = X3
    assert composed.entry(0, 0) == ring.generator(2)
    assert composed == _curl(ring) @ _gradient(ring)


def test_composition_shape_mismatch(heisenberg):
    ring = enveloping_algebra(heisenberg)
    with pytest.raises(OperatorShapeError):
        op_compose(_gradient(ring), _gradient(ring))


def test_entries_outside_shape_are_rejected(heisenberg):
    ring = enveloping_algebra(heisenberg)
    with pytest.raises(OperatorShapeError):
        OperatorMatrix(ring, (0,), (0,), {(1, 0): ring.scalar(1)})


def test_zero_entries_are_dropped(heisenberg):
    ring = enveloping_algebra(heisenberg)
    op = OperatorMatrix(ring, (0,), (0,), {(0, 0): ring.zero()})
    assert op.is_zero()


def test_orders_and_weights(heisenberg):
    ring = enveloping_algebra(heisenberg)
    grad = _gradient(ring)
    assert operator_weights(grad) == [1]
    assert derivative_orders(grad) == [1]
    assert max_derivative_order(grad) == 1
    assert max_derivative_order(identity_operator(ring, (0, 1))) == 0
    assert check_weight_bookkeeping(grad) == []


def test_weight_bookkeeping_flags_wrong_jumps(heisenberg):
    ring = enveloping_algebra(heisenberg)
    wrong = OperatorMatrix(ring, (2,), (0,), {(0, 0): ring.generator(0)})
    assert check_weight_bookkeeping(wrong) == [(0, 0)]


def test_constant_operator(heisenberg):
    ring = enveloping_algebra(heisenberg)
    op = constant_operator(ring, sympy.Matrix([[sympy.Rational(1, 2), 0], [0, -3]]), (1, 2), (1, 2))
    assert fraction_entry(op.entry(0, 0)) == Fraction(1, 2)
    assert fraction_entry(op.entry(0, 1)) == 0
    with pytest.raises(OperatorShapeError):
        constant_operator(ring, sympy.Matrix([[1, 2]]), (0,), (0,))
    with pytest.raises(OperatorShapeError):
        fraction_entry(ring.generator(0))


def test_apply_symbolic_gradient(heisenberg):
    ring = enveloping_algebra(heisenberg)
    frame = left_invariant_frame(heisenberg)
    x, y, z = coordinate_symbols(heisenberg)
    out = _gradient(ring).apply_symbolic(frame, [z])
    assert out == [sympy.expand(-y / 2), sympy.expand(x / 2)]
    with pytest.raises(OperatorShapeError):
        _gradient(ring).apply_symbolic(frame, [z, z])


def test_format_operator(heisenberg):
    text = format_operator(_gradient(enveloping_algebra(heisenberg)), "d")
    assert text.splitlines() == [
        "d shape=2x1",
        "  [t1, 1] = 1 · X1^1",
        "  [t2, 1] = 1 · X2^1",
    ]
