from fractions import Fraction

import pytest

from hodgeforge.core.errors import NotComplete, NotSmooth
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.rescaling import f_pq, h_pq, ht_condition, speciality
from hodgeforge.spectral.assemble import nilpotency_ranks
from hodgeforge.toric.cohomology import (ToricIntersection, ample_class, cross_check_triples, fano_rescaling,
                                         sr_cohomology, triple_numbers)
from hodgeforge.toric.fan import face_fan, make_fan, projective_space_fan, spanning_fan
from hodgeforge.toric.polytope import LatticePolytope, standard_polytopes


def _face_fan(name):
    return face_fan(LatticePolytope.from_points(standard_polytopes()[name], label=name))


def test_p2_ring_and_c1():
    ring = sr_cohomology(projective_space_fan(2))
    assert ring.betti() == [1, 1, 1]
    assert ring.cup(ring.c1(), 0) == RationalMatrix.from_rows([[3]])
    assert ring.cup(ring.c1(), 1) == RationalMatrix.from_rows([[3]])
    assert ring.integral((0, 1)) == 1
    assert ring.integral((2, 2)) == 1


def test_betti_numbers_of_fano_threefolds():
    assert sr_cohomology(_face_fan("p3")).betti() == [1, 1, 1, 1]
    ring = sr_cohomology(_face_fan("octahedron"))
    assert ring.betti() == [1, 3, 3, 1]
    assert ring.hard_lefschetz()


def test_non_smooth_and_incomplete_fans_are_rejected():
    p3 = LatticePolytope.from_points(standard_polytopes()["p3"], label="p3")
    with pytest.raises(NotSmooth):
        sr_cohomology(spanning_fan(p3))
    with pytest.raises(NotComplete):
        sr_cohomology(make_fan([(1, 0), (0, 1)], [(0, 1)]))
    with pytest.raises(NotSmooth):
        ToricIntersection(projective_space_fan(2))


def test_triple_numbers_from_walls():
    inter = triple_numbers(projective_space_fan(3))
    assert inter.triple(0, 1, 2) == 1
    assert inter.triple(0, 0, 1) == 1
    assert inter.triple(3, 3, 3) == 1
    cube = ToricIntersection(_face_fan("octahedron"))
    # rays in vertex order: -e1, -e2, -e3, e3, e2, e1; opposite rays never meet
    assert cube.triple(0, 1, 2) == 1
    assert cube.triple(0, 5, 1) == 0
    assert cube.triple(5, 5, 1) == 0
    assert cube.product(cube.anticanonical(), cube.anticanonical(), cube.anticanonical()) == 48


@pytest.mark.parametrize("name", ["p3", "octahedron"])
def test_triples_agree_with_stanley_reisner(name):
    assert cross_check_triples(_face_fan(name)) is None


def test_ample_class_is_positive_on_every_curve():
    inter = ToricIntersection(_face_fan("octahedron"))
    fixed = inter.fan.cones[0]
    divisor = ample_class(inter, fixed)
    assert not set(divisor) & set(fixed)
    assert all(isinstance(c, Fraction) and c.denominator == 1 for c in divisor.values())
    assert all(d >= 1 for d in inter.curve_degrees(divisor).values())


@pytest.mark.parametrize("fan,cells", [
    (projective_space_fan(2), {(2, 0): 1, (1, 1): 1, (0, 2): 1}),
    (projective_space_fan(3), {(3, 0): 1, (2, 1): 1, (1, 2): 1, (0, 3): 1}),
])
def test_fano_model_of_projective_space(fan, cells):
    model = fano_rescaling(fan)
    assert f_pq(model) == cells
    assert h_pq(model) == cells
    assert ht_condition(model).ok
    assert speciality(model).ok
    n = fan.dim
    assert nilpotency_ranks(model, n) == list(range(n, 0, -1))


def test_fano_model_of_p1_cubed():
    model = fano_rescaling(_face_fan("octahedron"))
    table = f_pq(model)
    assert table == {(3, 0): 1, (2, 1): 3, (1, 2): 3, (0, 3): 1}
    assert h_pq(model) == table
    assert nilpotency_ranks(model, 3) == [5, 2, 1]
    assert ht_condition(model).ok
