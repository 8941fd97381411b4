import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.core.errors import (
    AlgebraInputError,
    AlgebraValidationError,
    DilationError,
    SchemaError,
    UnknownAlgebraError,
)
from app.lie.algebra import StratifiedLieAlgebra, homogeneous_dimension, validate_algebra
from app.lie.catalog import algebra_to_file, catalog, load_algebra, parse_algebra_json
from app.lie.frame import left_invariant_frame
from app.lie.group import (
    GroupPoint,
    bch_multiply,
    coordinate_symbols,
    dilate,
    group_law_polynomials,
    homogeneous_norm,
    inverse,
)
from app.rumin.complex import build_rumin_complex

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def points(dim):
    return st.lists(rationals, min_size=dim, max_size=dim).map(GroupPoint.of)


# ==================== Catalog and validation ====================

@pytest.mark.parametrize("name", ["abelian(1)", "abelian(3)", "heisenberg(1)", "heisenberg(2)", "engel"])
def test_catalog_algebras_validate(name):
    assert validate_algebra(catalog(name)).passed


def test_catalog_returns_shared_instances():
    assert catalog("heisenberg(1)") is catalog("heisenberg(1)")


@pytest.mark.parametrize("name", ["heisenberg", "engel(2)", "carnot(3)", "abelian(0)"])
def test_unknown_catalog_names(name):
    with pytest.raises(UnknownAlgebraError):
        catalog(name)


def test_homogeneous_dimensions(heisenberg, engel):
    assert homogeneous_dimension(heisenberg) == 4
    assert homogeneous_dimension(engel) == 7
    assert homogeneous_dimension(catalog("heisenberg(2)")) == 6


def test_broken_jacobi_is_reported(tmp_path):
    # Engel plus stray brackets [X1, X4] = X4 and [X2, X4] = X3
    document = {
        "name": "broken",
        "layer_dims": [2, 1, 1],
        "brackets": [
            {"i": 1, "j": 2, "coeffs": {"3": "1"}},
            {"i": 1, "j": 3, "coeffs": {"4": "1"}},
            {"i": 1, "j": 4, "coeffs": {"4": "1"}},
            {"i": 2, "j": 4, "coeffs": {"3": "1"}},
        ],
    }
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(document))
    alg = load_algebra(str(path))
    report = validate_algebra(alg)
    assert not report.passed
    assert "jacobi" in report.failed_axioms()
    with pytest.raises(AlgebraValidationError) as info:
        build_rumin_complex(alg)
    assert info.value.report.failures


def test_generation_failure_is_reported():
    alg = StratifiedLieAlgebra("ungenerated", (2, 1), {})
    report = validate_algebra(alg)
    assert report.failed_axioms() == ["generation"]


def test_index_out_of_range_is_an_input_error():
    with pytest.raises(AlgebraInputError):
        StratifiedLieAlgebra("bad", (2, 1), {(0, 1): {5: Fraction(1)}})


def test_schema_errors():
    with pytest.raises(SchemaError):
        parse_algebra_json('{"name": "x", "layer_dims": [0]}')
    with pytest.raises(SchemaError):
        parse_algebra_json('{"name": "x", "layer_dims": [2], "brackets": [{"i": 1, "j": 2, "coeffs": {"3": 0.5}}]}')


def test_missing_file_is_unknown_algebra(tmp_path):
    with pytest.raises(UnknownAlgebraError):
        load_algebra(str(tmp_path / "missing.json"))


def test_algebra_file_round_trip_preserves_structure(engel):
    text = algebra_to_file(engel).model_dump_json()
    again = parse_algebra_json(text)
    assert again.layer_dims == engel.layer_dims
    assert again.constants == engel.constants


# ==================== Group law ====================

def test_heisenberg_group_law_closed_form(heisenberg):
    p, q, law = group_law_polynomials(heisenberg)
    expected_z = p[2] + q[2] + sympy.Rational(1, 2) * (p[0] * q[1] - p[1] * q[0])
    assert sympy.expand(law[0] - p[0] - q[0]) == 0
    assert sympy.expand(law[2] - expected_z) == 0


@hypothesis_settings(max_examples=40, deadline=None)
@given(points(4), points(4), points(4))
def test_engel_product_is_associative(p, q, r):
    engel = catalog("engel")
    left = bch_multiply(engel, bch_multiply(engel, p, q), r)
    right = bch_multiply(engel, p, bch_multiply(engel, q, r))
    assert left == right


@hypothesis_settings(max_examples=40, deadline=None)
@given(points(3))
def test_inverse_and_identity(p):
    heisenberg = catalog("heisenberg(1)")
    e = GroupPoint.identity(3)
    assert bch_multiply(heisenberg, p, inverse(heisenberg, p)) == e
    assert bch_multiply(heisenberg, e, p) == p


@hypothesis_settings(max_examples=40, deadline=None)
@given(points(4), points(4), st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4))
def test_dilation_is_an_automorphism(p, q, t):
    engel = catalog("engel")
    assert dilate(engel, t, bch_multiply(engel, p, q)) == bch_multiply(engel, dilate(engel, t, p), dilate(engel, t, q))


@pytest.mark.parametrize("t", [0, -1, "-1/2"])
def test_dilation_rejects_nonpositive_factors(heisenberg, t):
    with pytest.raises(DilationError):
        dilate(heisenberg, t, GroupPoint.of([1, 0, 0]))


def test_homogeneous_norm_scales_with_dilations(heisenberg):
    p = GroupPoint.of([1, "-1/2", 3])
    assert homogeneous_norm(heisenberg, dilate(heisenberg, 2, p)) == pytest.approx(2 * homogeneous_norm(heisenberg, p))
    assert homogeneous_norm(heisenberg, GroupPoint.of([0, 0, 4])) == pytest.approx(2.0)


# ==================== Frame ====================

def test_heisenberg_frame_coefficients(heisenberg):
    frame = left_invariant_frame(heisenberg)
    x, y, z = coordinate_symbols(heisenberg)
    assert frame.coefficients[0] == (1, 0, -y / 2)
    assert frame.coefficients[1] == (0, 1, x / 2)
    assert frame.coefficients[2] == (0, 0, 1)


@pytest.mark.parametrize("name", ["heisenberg(1)", "heisenberg(2)", "engel"])
def test_frame_brackets_reproduce_structure_constants(name):
    frame = left_invariant_frame(catalog(name))
    assert frame.bracket_defects() == []


def test_frame_is_identity_at_origin(engel):
    frame = left_invariant_frame(engel)
    origin = {s: 0 for s in frame.symbols}
    assert frame.matrix.subs(origin) == sympy.eye(4)


def test_coframe_is_dual_to_frame(heisenberg):
    frame = left_invariant_frame(heisenberg)
    product = sympy.Matrix(frame.coframe) * frame.matrix.T
    assert sympy.simplify(product) == sympy.eye(3)
