import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilwalk import catalog
from nilwalk.lie_core import (
    LieVector,
    NotAdaptedError,
    NotNilpotentError,
    StructureConstants,
    algebra_from_json,
    algebra_to_json,
    check_jacobi,
    direct_product,
    project,
    quotient_algebra,
    rescale_levels,
)

F = Fraction


def small_vec(dim):
    return st.lists(
        st.fractions(-3, 3, max_denominator=4), min_size=dim, max_size=dim
    ).map(LieVector)


# -- vectors ---------------------------------------------------------------


def test_vector_arithmetic():
    x = LieVector([F(1), F(2), F(0)])
    y = LieVector([F(0), F(1, 2), F(-1)])
    assert (x + y).coords == (F(1), F(5, 2), F(-1))
    assert (x - y).coords == (F(1), F(3, 2), F(1))
    assert (-x).coords == (F(-1), F(-2), F(0))
    assert (F(2) * x).coords == (F(2), F(4), F(0))
    assert LieVector.basis(3, 1).coords == (F(0), F(1), F(0))
    assert not any(LieVector.zero(3))


# -- structure constant bookkeeping ------------------------------------------


def test_bracket_normalization_flips_sign():
    # [X2,X1] = X3 stored as [X1,X2] = -X3
    a = StructureConstants(3, {(1, 0): {2: F(1)}})
    b = StructureConstants(3, {(0, 1): {2: F(-1)}})
    x, y = LieVector.basis(3, 0), LieVector.basis(3, 1)
    assert a.bracket(x, y) == b.bracket(x, y)
    assert a.bracket(x, y).coords == (F(0), F(0), F(-1))


def test_bracket_antisymmetry_and_bilinearity_heisenberg():
    sc = catalog.heisenberg()
    x = LieVector([F(1), F(2), F(3)])
    y = LieVector([F(-1, 2), F(1, 3), F(0)])
    assert sc.bracket(x, y) == -sc.bracket(y, x)
    z = LieVector([F(2), F(0), F(1)])
    lhs = sc.bracket(x + z, y)
    assert lhs == sc.bracket(x, y) + sc.bracket(z, y)


@settings(max_examples=40, deadline=None)
@given(small_vec(5), small_vec(5), st.fractions(-3, 3, max_denominator=4))
def test_bracket_bilinear_property(x, y, c):
    sc = catalog.example_3_2()
    assert sc.bracket(x, y) == -sc.bracket(y, x)
    assert sc.bracket(F(c) * x, y) == F(c) * sc.bracket(x, y)


def test_jacobi_violation_reported():
    # [X3,X1] = -X1 breaks the (X1,X2,X3) Jacobi sum
    bad = StructureConstants(3, {(0, 1): {2: F(1)}, (0, 2): {0: F(1)}})
    rep = check_jacobi(bad)
    assert not rep.ok
    assert rep.triple == (0, 1, 2)
    assert any(rep.residual)


def test_jacobi_clean_on_catalog():
    for label, sc in catalog.default_corpus():
        assert check_jacobi(sc).ok, label


# -- lower central series ------------------------------------------------------


def test_series_shapes():
    assert catalog.heisenberg().dims == (2, 1)
    assert catalog.example_3_2().dims == (2, 1, 2)
    assert catalog.example_5_6().dims == (3, 3, 8, 1)
    assert catalog.filiform(6).dims == (2, 1, 1, 1, 1)
    assert catalog.triangular(3).dims == (3, 2, 1)
    assert catalog.abelian(4).step == 1


def test_not_nilpotent_detected():
    # [X1,X2] = X2 keeps regenerating X2 forever
    sc = StructureConstants(2, {(0, 1): {1: F(1)}})
    with pytest.raises(NotNilpotentError):
        sc.series


def test_not_adapted_detected():
    # derived algebra sits at the *front* of the basis
    sc = StructureConstants(3, {(1, 2): {0: F(1)}})
    with pytest.raises(NotAdaptedError):
        sc.series


def test_project_slices_levels():
    sc = catalog.example_3_2()
    x = LieVector([F(1), F(2), F(3), F(4), F(5)])
    assert project(sc, x, 0) == (F(1), F(2))
    assert project(sc, x, 1) == (F(3),)
    assert project(sc, x, 2) == (F(4), F(5))
    with pytest.raises(ValueError):
        project(sc, x, 3)


# -- derived constructions -------------------------------------------------------


def test_quotient_algebra():
    q = quotient_algebra(catalog.filiform(6), 2)
    assert q.dims == (2, 1, 1)
    assert check_jacobi(q).ok
    # the quotient of the quotient at the same level is itself
    assert quotient_algebra(q, 2).dims == q.dims


def test_direct_product_is_adapted():
    prod = direct_product(catalog.heisenberg(), catalog.example_3_2())
    assert prod.dim == 8
    assert prod.dims == (4, 2, 2)
    assert check_jacobi(prod).ok
    # factor brackets survive with relocated indices
    names = prod.names
    assert "a.X1" in names and "b.X1" in names


def test_rescale_levels_scales_brackets():
    sc = catalog.heisenberg()
    r = rescale_levels(sc, [F(1), F(2)])
    # [X1, X2] = X3 becomes [X1, X2] = 2 * (X3/2)
    x, y = LieVector.basis(3, 0), LieVector.basis(3, 1)
    assert r.bracket(x, y).coords == (F(0), F(0), F(2))
    assert r.dims == sc.dims
    with pytest.raises(ValueError):
        rescale_levels(sc, [F(1)])
    with pytest.raises(ValueError):
        rescale_levels(sc, [F(1), F(0)])


# -- serialization ----------------------------------------------------------------


def test_json_round_trip():
    for label, sc in catalog.default_corpus():
        doc = algebra_to_json(sc)
        back = algebra_from_json(json.loads(json.dumps(doc)))
        assert back.dim == sc.dim and back.dims == sc.dims, label
        assert back._table == sc._table, label


def test_json_verify_rejects_wrong_levels():
    doc = algebra_to_json(catalog.heisenberg())
    doc["levels"] = [[1, 2, 3]]  # claims the algebra is abelian-shaped
    with pytest.raises(NotAdaptedError):
        algebra_from_json(doc)
    doc["levels"] = [3]
    with pytest.raises(ValueError):
        algebra_from_json(doc)
