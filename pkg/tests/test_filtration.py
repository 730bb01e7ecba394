import pytest

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import NotExhaustive, NotNested, NotNilpotent
from hodgeforge.core.filtration import (NilpotentOp, grading_to_filtration, jordan_matrix,
                                        make_filtration, random_nilpotent, verify_weight_filtration,
                                        weight_filtration, weight_filtration_convolution)
from hodgeforge.core.linalg import RationalMatrix


def test_single_step_filtration():
    f = make_filtration(3, [(0, RationalMatrix.identity(3))])
    assert (f.lo, f.hi) == (0, 0)
    assert f.graded_dim(0) == 3
    assert f.graded_dim(1) == 0 and f.graded_dim(-1) == 0


def test_two_step_flag():
    f = make_filtration(2, [(-1, la.standard_basis(2, [1])), (0, RationalMatrix.identity(2))])
    assert (f.lo, f.hi) == (-1, 0)
    assert f.graded_dims() == {-1: 1, 0: 1}


def test_not_nested_and_not_exhaustive():
    plane = la.standard_basis(3, [0, 1])
    stray = la.standard_basis(3, [2])
    with pytest.raises(NotNested):
        make_filtration(3, [(0, plane), (-1, stray), (1, RationalMatrix.identity(3))])
    with pytest.raises(NotExhaustive):
        make_filtration(3, [(0, plane)])


def test_full_flag_graded_dims():
    f = make_filtration(3, [(-1, la.standard_basis(3, [0])), (0, la.standard_basis(3, [0, 1])),
                            (1, RationalMatrix.identity(3))])
    assert [f.graded_dim(m) for m in (-1, 0, 1)] == [1, 1, 1]
    assert sum(f.graded_dims().values()) == 3


def test_grading_to_filtration():
    assert grading_to_filtration([0, 0, 0]).graded_dims() == {0: 3}
    f = grading_to_filtration([1, 2])
    assert la.span_equal(f.step(-2), la.standard_basis(2, [1]))
    assert f.dim_at(-1) == 2
    # P^2 Hodge filtration: 1, h, h^2 sit in Gr_{-2}, Gr_{-1}, Gr_0
    g = grading_to_filtration([2, 1, 0])
    assert g.graded_dims() == {-2: 1, -1: 1, 0: 1}
    assert la.span_equal(g.step(-2), la.standard_basis(3, [0]))


def test_weight_filtration_zero_operator():
    W = weight_filtration(NilpotentOp.of(RationalMatrix.zeros(3, 3)), 5)
    assert W.dim_at(4) == 0 and W.dim_at(5) == 3


def test_weight_filtration_jordan_block_two():
    N = NilpotentOp.of(RationalMatrix.from_rows([[0, 1], [0, 0]]))
    W = weight_filtration(N, 1)
    ker = la.kernel_basis(N.matrix)
    assert W.dim_at(-1) == 0
    assert la.span_equal(W.step(0), ker) and la.span_equal(W.step(1), ker)
    assert W.dim_at(2) == 2


def test_weight_filtration_p2_cup_with_c1():
    # basis 1, h, h^2 and N = 3h
    N = NilpotentOp.of(RationalMatrix.from_rows([[0, 0, 0], [3, 0, 0], [0, 3, 0]]))
    W = weight_filtration(N, 2)
    assert W.graded_dims() == {0: 1, 2: 1, 4: 1}
    assert la.span_equal(W.step(0), la.standard_basis(3, [2]))
    assert la.span_equal(W.step(2), la.standard_basis(3, [1, 2]))


def test_centering_shift():
    N = NilpotentOp.of(jordan_matrix([3, 2, 1]))
    assert weight_filtration(N, 1).equals(weight_filtration(N, 0).shift(1))


def test_jordan_type_from_graded_dims():
    N = NilpotentOp.of(jordan_matrix([3, 1]))
    assert weight_filtration(N, 0).graded_dims() == {-2: 1, 0: 2, 2: 1}


def test_not_nilpotent():
    with pytest.raises(NotNilpotent):
        NilpotentOp.of(RationalMatrix.from_rows([[1, 0], [0, 0]]))


def test_wrong_filtration_is_rejected_by_verifier():
    N = NilpotentOp.of(jordan_matrix([2]))
    bogus = make_filtration(2, [(0, RationalMatrix.identity(2))])
    assert verify_weight_filtration(bogus, N, 0) is not None


@pytest.mark.slow
def test_random_nilpotents_agree_with_second_construction(rng):
    for trial in range(200):
        n = int(rng.integers(1, 13))
        N = random_nilpotent(rng, n)
        center = int(rng.integers(-3, 4))
        W = weight_filtration(N, center)
        assert verify_weight_filtration(W, N, center) is None
        assert W.equals(weight_filtration_convolution(N, center)), f"trial {trial}, dim {n}"
