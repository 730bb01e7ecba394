from fractions import Fraction

import pytest

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import NotStrict
from hodgeforge.core.filtration import NilpotentOp, grading_to_filtration, make_filtration
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.rescaling import (TwistTag, f_pq, h_pq, ht_condition, make_rescaling_model,
                                        random_ht_model, saito_opposed, same_model, speciality, tate_object,
                                        tate_twist_model)


def p2_model():
    # basis 1, h, h^2 in degree 2; N = c1 = 3h
    N = RationalMatrix.from_rows([[0, 0, 0], [3, 0, 0], [0, 3, 0]])
    return make_rescaling_model({2: ([2, 1, 0], N)}, "P2")


def test_f_pq_trivial_weights():
    m = make_rescaling_model({3: ([0, 0], None)})
    assert f_pq(m) == {(0, 3): 2}


def test_p2_tables_and_verdicts():
    m = p2_model()
    assert f_pq(m) == {(2, 0): 1, (1, 1): 1, (0, 2): 1}
    assert h_pq(m) == f_pq(m)
    assert ht_condition(m).ok
    assert speciality(m).ok


def test_h_pq_zero_residue():
    m = make_rescaling_model({2: ([1, 1], None), 4: ([2], None)})
    assert h_pq(m) == {(1, 1): 2, (2, 2): 1}


def test_tate_object_is_hodge_tate():
    t = tate_object(2)
    assert t.degrees() == [2]
    assert ht_condition(t).ok


def test_injected_odd_weight_breaks_ht():
    # a length-2 chain in degree 2 has weights 3 and 1
    N = RationalMatrix.from_rows([[0, 0], [1, 0]])
    m = make_rescaling_model({2: ([1, 0], N)}, "odd")
    res = ht_condition(m)
    assert not res.ok
    assert res.per_degree[2].odd_weights == [1, 3]
    assert 2 in res.certificate()


def test_transversality_is_enforced():
    # N would send lambda 2 straight to lambda 0
    N = RationalMatrix.from_rows([[0, 0], [1, 0]])
    with pytest.raises(NotStrict):
        make_rescaling_model({0: ([2, 0], N)})


def test_saito_rank_one_and_aligned_flags():
    one = RationalMatrix.identity(1)
    F = make_filtration(1, [(0, one)])
    G = make_filtration(1, [(-1, RationalMatrix.zeros(1, 0)), (0, one)])
    assert saito_opposed(F, G, NilpotentOp.of(RationalMatrix.zeros(1, 1)), -2).ok
    flag = make_filtration(2, [(-1, la.standard_basis(2, [0])), (0, RationalMatrix.identity(2))])
    res = saito_opposed(flag, flag, None, -2)
    assert not res.ok and res.failing_p


def test_not_special_rank_two():
    # F_{-1} and G_0 = W_0 are the same line
    N = RationalMatrix.from_rows([[0, 0], [1, 0]])
    m = make_rescaling_model({0: ([0, 1], N)}, "aligned")
    F = grading_to_filtration([0, 1])
    assert F.dim_at(-1) == 1
    res = speciality(m)
    assert not res.ok
    assert 0 in res.certificate()


def test_half_twists_round_trip():
    m = p2_model()
    for h in range(-6, 7):
        assert same_model(tate_twist_model(tate_twist_model(m, h), -h), m)
    assert same_model(tate_twist_model(m, TwistTag(0)), m)
    back = tate_twist_model(tate_object(2), -2)
    assert back.degrees() == [0]
    assert back.components[0].weights == (Fraction(0),)


def test_odd_half_twist_gives_half_integral_f():
    m = tate_twist_model(p2_model(), 1)
    table = f_pq(m)
    assert (Fraction(5, 2), Fraction(1, 2)) in table
    res = ht_condition(m)
    assert not res.ok and 3 in res.non_integral


def test_random_ht_models_satisfy_metamorphic_relations(rng):
    for _ in range(100):
        m = random_ht_model(rng, max_dim=6)
        assert ht_condition(m).ok
        assert f_pq(m) == h_pq(m)
        assert speciality(m).ok
