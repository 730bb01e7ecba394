import pytest

from conftest import random_matrix
from hodgeforge.core import linalg as la
from hodgeforge.core.errors import InjectivityFails, NotAComplex
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.double_complex import (column_cohomology_dim, column_filtration_images, make_double_complex,
                                             total_cohomology, total_differential)


def M(rows):
    return RationalMatrix.from_rows(rows)


def p1_model():
    # C00 = (a, b), C10 = c, C01 = e, C11 = (u, v)
    spaces = {(0, 0): 2, (1, 0): 1, (0, 1): 1, (1, 1): 2}
    d1 = {(0, 0): M([[0, 1]]), (0, 1): M([[0], [1]])}
    d2 = {(0, 0): M([[0, 1]]), (1, 0): M([[0], [1]])}
    return make_double_complex(spaces, d1, d2)


def test_single_column():
    dc = make_double_complex({(0, 0): 2, (0, 1): 1}, {}, {(0, 0): M([[1, 0]])})
    coh = total_cohomology(dc)
    assert coh[0].dim == 1 and coh[1].dim == 0
    G = column_filtration_images(dc)
    assert G[0].graded_dims() == {0: 1}


def test_single_column_at_p2_sits_at_minus_two():
    dc = make_double_complex({(2, 0): 1}, {}, {})
    G = column_filtration_images(dc)
    assert G[2].graded_dims() == {-2: 1}


def test_isomorphism_kills_cohomology():
    dc = make_double_complex({(0, 0): 2, (1, 0): 2}, {(0, 0): M([[1, 1], [0, 1]])}, {})
    assert all(h.dim == 0 for h in total_cohomology(dc).values())


def test_p1_dolbeault_model():
    dc = p1_model()
    coh = total_cohomology(dc)
    assert [coh[k].dim for k in (0, 1, 2)] == [1, 0, 1]
    G = column_filtration_images(dc)
    assert G[0].graded_dims() == {0: 1}
    assert G[2].graded_dims() == {-1: 1}
    for k in (0, 1, 2):
        for m, g in G[k].graded_dims().items():
            assert g == column_cohomology_dim(dc, k, m)


def test_diagonal_sum_of_columns():
    dc = make_double_complex({(0, 1): 1, (1, 0): 2}, {}, {})
    G = column_filtration_images(dc)
    assert G[1].graded_dims() == {-1: 2, 0: 1}


def test_random_square_matches_totalization(rng):
    # commuting square: d1 = d2 = a on the bottom row, c on the top
    for _ in range(5):
        a = random_matrix(rng, 2, 2)
        c = random_matrix(rng, 2, 2)
        dc = make_double_complex({(0, 0): 2, (1, 0): 2, (0, 1): 2, (1, 1): 2},
                                 {(0, 0): a, (0, 1): c}, {(0, 0): a, (1, 0): c}, signs="commuting")
        d0 = total_differential(dc, 0)
        d1 = total_differential(dc, 1)
        coh = total_cohomology(dc)
        assert coh[0].dim == 2 - la.rank(d0)
        assert coh[1].dim == 4 - la.rank(d1) - la.rank(d0)
        assert coh[2].dim == 2 - la.rank(d1)


def test_not_a_complex():
    with pytest.raises(NotAComplex):
        make_double_complex({(0, 0): 1, (1, 0): 1, (2, 0): 1}, {(0, 0): M([[1]]), (1, 0): M([[1]])}, {})


def test_injectivity_failure_is_reported():
    # y spans H^1(F_{-1}) but is the boundary of x, which lives in column 0
    dc = make_double_complex({(0, 0): 1, (1, 0): 1}, {(0, 0): M([[1]])}, {})
    with pytest.raises(InjectivityFails):
        column_filtration_images(dc)
