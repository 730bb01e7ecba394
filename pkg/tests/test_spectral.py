import pytest

from hodgeforge.core.errors import (D1SquareNonzero, DegenerationFails, ExactnessFail, InvalidIntersectionData,
                                    NonHTStrata)
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.rescaling import ht_condition
from hodgeforge.spectral.assemble import assemble_rescaling
from hodgeforge.spectral.checks import (epsilon, exactness_failure, is_positive_definite, les_check,
                                        lefschetz_pairing_check, nu_check, spectral_suite, strata_euler)
from hodgeforge.spectral.kgrid import build_K, check_d1_square
from hodgeforge.spectral.pages import e2_nearby, e2_open, e2_relative, mv_divisor
from hodgeforge.spectral.strata import Piece, make_strata

ONE = RationalMatrix.identity(1)


def line_with_point():
    # X = P^1, D = one point
    pieces = [Piece("X", 0, (), {0: 1, 2: 1}), Piece("P", 1, (1,), {0: 1}, ("X",))]
    return make_strata(1, pieces, {("P", 0): {0: ONE}}, {"X": {0: ONE, 2: ONE}, "P": {0: ONE}},
                       {"X": {0: ONE}, "P": {}}, label="line")


def bare_point():
    return make_strata(0, [Piece("X", 0, (), {0: 1})], {}, {"X": {0: ONE}}, {"X": {}}, label="point")


def test_minimal_grid_matches_hand_enumeration():
    grid = build_K(line_with_point())
    assert grid.dims() == {(-1, 0, 0): 1, (0, -1, 0): 1, (0, 1, 0): 1, (1, 0, 1): 1}
    check_d1_square(grid)


def test_empty_divisor_grid_is_cohomology_of_x():
    grid = build_K(bare_point())
    assert grid.dims() == {(0, 0, 0): 1}


def test_line_with_point_pages():
    s = line_with_point()
    assert e2_relative(s).abutment_dims() == {}
    assert e2_open(s).graded(0) == {0: 1}
    assert e2_nearby(s).graded(0) == {0: 1}
    assert mv_divisor(s).abutment_dims() == {0: 1}
    assert strata_euler(s)["Y"] == 1


def test_line_with_point_checks_pass():
    s = line_with_point()
    pages, ledger = spectral_suite(s, threads=1)
    assert ledger.all_ok(), ledger.failures()
    assert "relative.psi.adjoint" in ledger.names()


def test_asymmetric_betti_numbers_stop_degeneration():
    s = line_with_point()
    s.pieces["X"].betti[2] = 2
    s.invalidate()
    with pytest.raises(DegenerationFails) as err:
        e2_open(s)
    assert err.value.location["piece"] == "X"
    assert err.value.location["degree"] == 0
    # the divisor page never touches X
    assert mv_divisor(s).abutment_dims() == {0: 1}


def test_point_assembles_to_trivial_model():
    s = bare_point()
    model = assemble_rescaling(s)
    assert model.dims() == {0: 1}
    assert ht_condition(model).ok
    ledger = nu_check(build_K(s))
    assert ledger.all_ok()


def test_odd_cohomology_is_not_hodge_tate():
    one2 = RationalMatrix.from_rows([[0, 1], [-1, 0]])
    pieces = [Piece("E", 0, (), {0: 1, 1: 2, 2: 1})]
    s = make_strata(1, pieces, {}, {"E": {0: ONE, 1: one2, 2: ONE}}, label="elliptic")
    with pytest.raises(NonHTStrata):
        assemble_rescaling(s)


def test_restriction_sign_error_is_caught():
    # two curves through two points with both signs positive: rho rho != 0 on the points
    pieces = [Piece("X", 0, (), {0: 1, 2: 1, 4: 1}),
              Piece("A", 1, (1,), {0: 1, 2: 1}, ("X",)), Piece("B", 1, (2,), {0: 1, 2: 1}, ("X",)),
              Piece("P", 2, (1, 2), {0: 1}, ("B", "A"))]
    restriction = {("A", 0): {0: ONE, 2: ONE}, ("B", 0): {0: ONE, 2: ONE},
                   ("P", 0): {0: ONE}, ("P", 1): {0: -ONE}}
    pairing = {"X": {0: ONE, 2: ONE, 4: ONE}, "A": {0: ONE, 2: ONE}, "B": {0: ONE, 2: ONE}, "P": {0: ONE}}
    with pytest.raises(D1SquareNonzero):
        make_strata(2, pieces, restriction, pairing, label="bad-signs")


def test_degenerate_pairing_rejected():
    with pytest.raises(InvalidIntersectionData):
        make_strata(0, [Piece("X", 0, (), {0: 1})], {}, {"X": {0: RationalMatrix.zeros(1, 1)}})


def test_exactness_helper():
    assert exactness_failure([1, 1]) is None
    assert exactness_failure([1, 2, 1]) is None
    assert exactness_failure([2, 1]) == 1
    assert exactness_failure([1, 0, 1]) == 1


def test_les_check_can_raise():
    s = line_with_point()
    rel, opn, near = e2_relative(s), e2_open(s), e2_nearby(s)
    assert les_check(rel, opn, near).all_ok()
    # swapping the open page for the relative one breaks exactness in degree 0
    with pytest.raises(ExactnessFail):
        les_check(rel, rel, near, raise_on_failure=True)


def test_epsilon_signs():
    assert [epsilon(a) for a in range(-2, 5)] == [-1, -1, 1, 1, -1, -1, 1]


def test_positive_definite():
    assert is_positive_definite(RationalMatrix.from_rows([[2, 1], [1, 2]]))
    assert not is_positive_definite(RationalMatrix.from_rows([[1, 2], [2, 1]]))
    assert not is_positive_definite(RationalMatrix.from_rows([[1, 1], [0, 1]]))


def test_pairing_check_on_line():
    s = line_with_point()
    ledger = lefschetz_pairing_check(s, build_K(s))
    assert ledger.all_ok(), ledger.failures()
