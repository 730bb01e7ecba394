from fractions import Fraction

import pytest

from hodgeforge.core.errors import SupportViolation
from hodgeforge.toric.fan import projective_space_fan, smooth_refine, spanning_fan
from hodgeforge.toric.laurent import (DEGENERATE, INCONCLUSIVE, PROBABLY_NONDEGENERATE, LaurentData, evaluate,
                                      log_gradient, nondegeneracy_probe, pole_analysis, standard_laurent)
from hodgeforge.toric.polytope import LatticePolytope, standard_polytopes


@pytest.fixture(scope="module")
def p3_setup():
    p = LatticePolytope.from_points(standard_polytopes()["p3"], label="p3")
    return p, smooth_refine(spanning_fan(p), p), standard_laurent(p)


def test_terms_are_combined_and_exact():
    L = LaurentData.from_terms([((1,), 1), ((1,), "1/2"), ((-1,), 2), ((0,), 0)])
    assert L.support == (((-1,), Fraction(2)), ((1,), Fraction(3, 2)))
    with pytest.raises(ValueError):
        LaurentData.from_terms([((1,), 0.5)])


def test_evaluation_and_log_gradient():
    terms = [((1, 0), Fraction(1)), ((0, 1), Fraction(1)), ((-1, -1), Fraction(1))]
    x = [Fraction(2), Fraction(1, 2)]
    assert evaluate(terms, x) == Fraction(2) + Fraction(1, 2) + 1
    assert log_gradient(terms, x) == [Fraction(2) - 1, Fraction(1, 2) - 1]


def test_probe_on_segment():
    L = LaurentData.from_terms([((1,), 1), ((-1,), 1)], label="segment")
    verdict = nondegeneracy_probe(L, trials=50)
    assert verdict.status == PROBABLY_NONDEGENERATE
    assert verdict.ok


def test_probe_finds_square_face():
    # the top edge restricts to (x1 - x2)^2, vanishing to second order on x1 = x2
    L = LaurentData.from_terms([((2, 0), 1), ((1, 1), -2), ((0, 2), 1), ((-1, -1), 1)], label="square")
    verdict = nondegeneracy_probe(L, seed=3)
    assert verdict.status == DEGENERATE
    assert sorted(verdict.witness["face"]) == [(0, 2), (1, 1), (2, 0)]
    x1, x2 = verdict.witness["point"]
    assert x1 == x2


def test_probe_standard_p3_and_inconclusive(p3_setup):
    _, _, L = p3_setup
    assert nondegeneracy_probe(L).ok
    assert nondegeneracy_probe(L, trials=0).status == INCONCLUSIVE


def test_pole_analysis_p3(p3_setup):
    p, fan, L = p3_setup
    poles = pole_analysis(fan, L, p)
    assert all(r.pole_order == 1 for r in poles.rays)
    dims = sorted(r.dim for r in poles.rays)
    assert dims.count(2) == 4
    assert dims.count(1) == 18
    assert dims.count(0) == 12
    assert all(r.genus == 0 for r in poles.rays)
    assert sum(poles.points_on(a, b) for a, b in poles.walls) == 24


def test_pole_analysis_rejects_bad_support(p3_setup):
    p, fan, _ = p3_setup
    with pytest.raises(SupportViolation):
        pole_analysis(fan, LaurentData.from_terms([((1, 0, 0), 1)]), p)
    missing = LaurentData.from_terms([((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1), ((0, 0, 0), 1)])
    with pytest.raises(SupportViolation):
        pole_analysis(fan, missing, p)


def test_facet_genus_is_reported():
    big = LatticePolytope.from_points([(-1, -1, -1), (3, -1, -1), (-1, 3, -1), (-1, -1, 3)], label="big")
    poles = pole_analysis(projective_space_fan(3), standard_laurent(big), big)
    assert [r.genus for r in poles.rays] == [3, 3, 3, 3]
