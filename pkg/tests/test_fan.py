import pytest

from hodgeforge.core.errors import NotComplete, NotSmooth, RefinementFailed
from hodgeforge.toric.fan import (face_fan, fan_from_mapping, make_fan, projective_space_fan, smooth_refine,
                                  spanning_fan, stellar_subdivision)
from hodgeforge.toric.polytope import LatticePolytope, dot, standard_polytopes


def _polytope(name):
    return LatticePolytope.from_points(standard_polytopes()[name], label=name)


def test_normal_fan_of_simplex_has_index_sixteen_cones():
    fan = spanning_fan(_polytope("p3"))
    assert len(fan.rays) == 4
    assert len(fan.cones) == 4
    assert fan.is_simplicial
    assert [fan.index(c) for c in fan.cones] == [16, 16, 16, 16]
    assert len(fan.cones_of_dim(2)) == 6
    with pytest.raises(NotSmooth):
        fan.check_smooth()


def test_normal_fan_of_octahedron_is_the_cube_face_fan():
    fan = spanning_fan(_polytope("octahedron"))
    assert len(fan.rays) == 8
    assert len(fan.cones) == 6
    assert all(len(c) == 4 for c in fan.cones)
    assert not fan.is_simplicial


@pytest.mark.parametrize("name,rays,cones", [("p3", 34, 64), ("octahedron", 26, 48)])
def test_smooth_refinement_uses_the_polar_boundary(name, rays, cones):
    p = _polytope(name)
    fan = smooth_refine(spanning_fan(p), p)
    assert len(fan.rays) == rays
    assert len(fan.cones) == cones
    assert fan.is_smooth
    fan.check_complete()
    assert all(min(dot(v, u) for v in p.vertices) == -1 for u in fan.rays)
    assert len(fan.cones_of_dim(2)) == 3 * cones // 2


def test_face_fans_are_smooth_and_complete():
    for name, count in (("p3", 4), ("octahedron", 8)):
        fan = face_fan(_polytope(name))
        assert len(fan.cones) == count
        assert fan.is_smooth
        fan.check_complete()


def test_stellar_subdivision_blows_up_a_point_of_p2():
    fan = projective_space_fan(2)
    blown = stellar_subdivision(fan, (1, 1))
    assert len(blown.rays) == 4
    assert len(blown.cones) == 4
    assert blown.is_smooth
    blown.check_complete()
    assert blown.neighbours(3) == [0, 1]


def test_subdivision_outside_support_fails():
    half = make_fan([(1, 0), (0, 1)], [(0, 1)])
    with pytest.raises(RefinementFailed):
        stellar_subdivision(half, (-1, -1))
    with pytest.raises(NotComplete):
        half.check_complete()


def test_fan_from_mapping():
    fan = fan_from_mapping({"rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [2, 0]], "label": "p2"})
    assert fan.label == "p2"
    assert fan.cones == ((0, 1), (0, 2), (1, 2))
    assert fan.is_smooth
