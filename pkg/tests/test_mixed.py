import pytest

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import NotExact, NotStrict
from hodgeforge.core.filtration import make_filtration
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.mixed import (MixedHodgeModel, direct_sum, fw_decomposition, graded_hodge_numbers,
                                    hodge_polynomial, ht_two_of_three, is_hodge_tate, model_from_cells,
                                    same_structure, tate_model, tate_twist)


def elliptic_h1():
    F = make_filtration(2, [(-1, la.standard_basis(2, [0])), (0, RationalMatrix.identity(2))])
    W = make_filtration(2, [(0, RationalMatrix.zeros(2, 0)), (1, RationalMatrix.identity(2))])
    return MixedHodgeModel(2, F, W, "H1(E)")


def p2_quantum():
    # basis 1, h, h^2 at (p, w) = (2, 4), (1, 2), (0, 0)
    return model_from_cells([(2, 4), (1, 2), (0, 0)], "P2")


def test_graded_numbers_of_tate_and_elliptic():
    assert graded_hodge_numbers(tate_model(0)) == {(0, 0): 1}
    assert graded_hodge_numbers(elliptic_h1()) == {(1, 1): 1, (0, 1): 1}
    assert graded_hodge_numbers(p2_quantum()) == {(0, 0): 1, (1, 2): 1, (2, 4): 1}


def test_hodge_tate_verdicts():
    v = is_hodge_tate(tate_model(1))
    assert v.ok and v.fw_calibrated
    e = is_hodge_tate(elliptic_h1())
    assert not e.ok
    assert e.violations == [(0, 1), (1, 1)]
    assert e.odd_weights == [1]


def test_fw_index_convention_on_p2():
    m = p2_quantum()
    assert fw_decomposition(m, -4) == []
    assert fw_decomposition(m, 0) != []
    v = is_hodge_tate(m)
    assert v.ok and v.fw_calibrated and not v.fw_literal


def test_hodge_polynomial_diagonal():
    poly = hodge_polynomial(p2_quantum())
    assert poly.monomials() == {(0, 0): 1, (1, 1): 1, (2, 2): 1}
    assert poly.in_xy_subring()
    assert poly.total() == 3
    assert poly.render() == "1 + xy + x^2y^2"
    assert not hodge_polynomial(elliptic_h1()).in_xy_subring()


def test_tate_twist():
    twisted = tate_twist(tate_model(0), 1)
    assert graded_hodge_numbers(twisted) == {(-1, -2): 1}
    m = p2_quantum()
    assert same_structure(tate_twist(tate_twist(m, 1), -1), m)
    assert is_hodge_tate(tate_twist(m, 3)).ok


def test_two_of_three_split_sequence():
    left, right = tate_model(0), tate_model(1)
    middle = direct_sum(left, right)
    i = RationalMatrix.from_rows([[1], [0]])
    q = RationalMatrix.from_rows([[0, 1]])
    res = ht_two_of_three(left, middle, right, (i, q))
    assert res.ok and res.middle_ht


def test_two_of_three_flags_incompatible_middle():
    i = RationalMatrix.from_rows([[1], [0]])
    q = RationalMatrix.from_rows([[0, 1]])
    with pytest.raises(NotStrict):
        ht_two_of_three(tate_model(0), elliptic_h1(), tate_model(1), (i, q))


def test_two_of_three_not_exact():
    left, right = tate_model(0), tate_model(1)
    middle = direct_sum(left, right)
    i = RationalMatrix.from_rows([[1], [0]])
    q = RationalMatrix.from_rows([[1, 0]])
    with pytest.raises(NotExact):
        ht_two_of_three(left, middle, right, (i, q))
