import pytest

from hodgeforge.core.errors import InvalidIntersectionData, NonHTStrata
from hodgeforge.hodge.rescaling import f_pq, h_pq, ht_condition, speciality
from hodgeforge.spectral.assemble import assemble_rescaling
from hodgeforge.spectral.checks import spectral_suite
from hodgeforge.spectral.pages import RELATIVE, e2_relative
from hodgeforge.toric.blowup import PencilResolution, lg_strata, resolve_order
from hodgeforge.toric.fan import projective_space_fan, smooth_refine, spanning_fan
from hodgeforge.toric.laurent import pole_analysis, standard_laurent
from hodgeforge.toric.polytope import LatticePolytope, standard_polytopes


def _setup(name):
    p = LatticePolytope.from_points(standard_polytopes()[name], label=name)
    return p, standard_laurent(p)


@pytest.fixture(scope="module")
def p3_run():
    p, L = _setup("p3")
    return lg_strata(p, L)


@pytest.fixture(scope="module")
def cube_run():
    p, L = _setup("octahedron")
    return lg_strata(p, L)


def test_ray_orders():
    assert resolve_order(3, "forward") == [0, 1, 2]
    assert resolve_order(3, "reverse") == [2, 1, 0]
    assert resolve_order(3, [1, 2, 0]) == [1, 2, 0]
    with pytest.raises(InvalidIntersectionData):
        resolve_order(3, [0, 0, 1])


def test_positive_genus_base_curve_is_not_hodge_tate():
    big = LatticePolytope.from_points([(-1, -1, -1), (3, -1, -1), (-1, 3, -1), (-1, -1, 3)], label="big")
    fan = projective_space_fan(3)
    poles = pole_analysis(fan, standard_laurent(big), big)
    with pytest.raises(NonHTStrata):
        PencilResolution(fan, poles)


def test_p3_base_locus_bookkeeping():
    p, L = _setup("p3")
    fan = smooth_refine(spanning_fan(p), p)
    res = PencilResolution(fan, pole_analysis(fan, L, p))
    assert len(res.curves) == 22
    assert len(res.points) == 24
    assert len(res.basis) == 53
    for i in range(len(fan.rays)):
        s = res.surface(i)
        res.check_surface(s, res.restriction_matrix(s))


@pytest.mark.slow
def test_p3_strata_layout(p3_run):
    s, fan, _ = p3_run
    assert [len(s.level(m)) for m in range(4)] == [1, 34, 96, 64]
    assert s.pieces["X"].betti == {0: 1, 2: 53, 4: 53, 6: 1}
    assert s.is_hodge_tate()


@pytest.mark.slow
@pytest.mark.parametrize("run,dims", [("p3_run", {0: 1, 2: 1, 4: 1, 6: 1}),
                                      ("cube_run", {0: 1, 2: 3, 4: 3, 6: 1})])
def test_lg_pipeline_is_hodge_tate_and_special(run, dims, request):
    s, _, _ = request.getfixturevalue(run)
    pages, ledger = spectral_suite(s)
    assert ledger.all_ok(), ledger.failures()
    rel = pages[RELATIVE]
    assert rel.abutment_dims() == {3: sum(dims.values())}
    assert rel.graded(3) == dims
    model = assemble_rescaling(s, rel)
    assert ht_condition(model).ok
    assert speciality(model).ok
    assert f_pq(model) == h_pq(model)


@pytest.mark.slow
def test_relative_page_does_not_depend_on_ray_order(cube_run):
    p, L = _setup("octahedron")
    forward, _, _ = cube_run
    reverse, _, _ = lg_strata(p, L, ray_order="reverse")
    a, b = e2_relative(forward), e2_relative(reverse)
    assert a.abutment_dims() == b.abutment_dims()
    for q in a.degrees():
        assert a.graded(q) == b.graded(q)
