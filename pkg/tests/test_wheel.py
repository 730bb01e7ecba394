import pytest

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import DegenerationFails, OutOfRange
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.pool import run_pool
from hodgeforge.geometry.wheel import load_wheel_spec, wheel_euler_oracle, wheel_strata
from hodgeforge.hodge.rescaling import f_pq, h_pq, ht_condition, speciality
from hodgeforge.spectral.assemble import assemble_rescaling, monodromy_weight_check, nilpotency_ranks
from hodgeforge.spectral.checks import lefschetz_pairing_check, spectral_suite, strata_euler
from hodgeforge.spectral.kgrid import build_K
from hodgeforge.spectral.pages import e2_nearby, e2_open, e2_relative, mv_divisor


@pytest.mark.parametrize("d", [2, 9])
def test_euler_oracle_values(d):
    assert wheel_euler_oracle(d) == (12 - d, 0, 12 - d)


def test_euler_oracle_range():
    with pytest.raises(OutOfRange):
        wheel_euler_oracle(12)
    with pytest.raises(OutOfRange):
        load_wheel_spec(1)


def test_cycle_shape_and_incidence_ranks():
    assert load_wheel_spec(4).cycle_matrix()[0] == [-2, 1, 0, 1]
    assert load_wheel_spec(2).cycle_matrix() == [[-2, 2], [2, -2]]
    s2 = wheel_strata(2)
    assert la.rank(s2.rho(1, 0)) == 1
    s3 = wheel_strata(3)
    assert la.rank(s3.rho(1, 0)) == 2
    assert la.rank(s3.gamma(2, 0)) == 2
    assert strata_euler(s3)["D"] == 3


def test_grid_for_three_wheel():
    grid = build_K(wheel_strata(3))
    assert [grid.cells[(0, q - 2, 0)].dim if (0, q - 2, 0) in grid.cells else 0 for q in range(5)] == [1, 0, 10, 0, 1]
    assert grid.cells[(-1, -1, 0)].dim == 3
    assert grid.cells[(-2, 0, 0)].dim == 3


@pytest.mark.parametrize("d", [2, 3, 5, 9])
def test_pages_match_the_classical_limits(d):
    s = wheel_strata(d)
    assert e2_relative(s).graded(2) == {0: 1, 2: 10 - d, 4: 1}
    near = e2_nearby(s)
    assert near.graded(0) == {0: 1}
    assert near.graded(1) == {0: 1, 2: 1}
    assert near.graded(2) == {2: 1}
    opn = e2_open(s)
    assert opn.graded(0) == {0: 1}
    assert opn.graded(1) == {}
    assert opn.graded(2) == {2: 10 - d, 4: 1}
    div = mv_divisor(s)
    assert div.graded(0) == {0: 1}
    assert div.graded(1) == {0: 1}
    assert div.graded(2) == {2: d}


def test_relative_euler_matches_oracle_for_every_d():
    for d in range(2, 10):
        assert e2_relative(wheel_strata(d)).euler_e2() == wheel_euler_oracle(d)[2]


def test_sweep_is_hodge_tate_and_special():
    def job(d):
        model = assemble_rescaling(wheel_strata(d))
        return d, ht_condition(model).ok, f_pq(model) == h_pq(model), speciality(model).ok

    for d, ht, fh, special in run_pool([lambda d=d: job(d) for d in range(2, 10)], threads=4):
        assert ht and fh and special, d


def test_five_wheel_full_suite():
    s = wheel_strata(5)
    pages, ledger = spectral_suite(s, threads=2)
    assert ledger.all_ok(), ledger.failures()
    model = assemble_rescaling(s, pages["relative"])
    assert monodromy_weight_check(model, pages["relative"]).all_ok()
    # one chain through Gr_4 -> Gr_2 -> Gr_0, the rest of Gr_2 is killed by N
    assert nilpotency_ranks(model, 2) == [2, 1]
    assert f_pq(model) == {(0, 2): 1, (1, 1): 5, (2, 0): 1}


def test_two_realizations_give_the_same_graded_output():
    chain = wheel_strata(load_wheel_spec(3, "chain"))
    triangle = wheel_strata(load_wheel_spec(3, "triangle"))
    for build in (e2_relative, e2_nearby, e2_open, mv_divisor):
        a, b = build(chain), build(triangle)
        assert a.table()["e2"] == b.table()["e2"]
    assert f_pq(assemble_rescaling(chain)) == f_pq(assemble_rescaling(triangle))
    _, ledger = spectral_suite(triangle)
    assert ledger.all_ok(), ledger.failures()


def test_corrupted_restriction_breaks_psi_adjointness():
    s = wheel_strata(3)
    s.restriction[("C1", 0)][2] = -s.restriction[("C1", 0)][2]
    s.invalidate()
    ledger = lefschetz_pairing_check(s, build_K(s))
    assert "relative.psi.adjoint" in ledger.failures()


def test_lefschetz_failure_on_a_curve_stops_degeneration():
    s = wheel_strata(3)
    s.lefschetz["C1"][0] = RationalMatrix.zeros(1, 1)
    s.invalidate()
    with pytest.raises(DegenerationFails) as err:
        e2_relative(s)
    assert err.value.location["piece"] == "C1"
    _, ledger = spectral_suite(s)
    failed = ledger.failures()
    for kind in ("relative", "nearby", "open", "divisor"):
        assert f"{kind}.degenerates_at_e2" in failed
        assert f"{kind}.build" not in ledger.names()
    assert ledger.snapshot()["relative.degenerates_at_e2"]["detail"]["location"]["piece"] == "C1"


def test_healthy_wheel_records_the_purity_witness():
    _, ledger = spectral_suite(wheel_strata(3))
    entry = ledger.snapshot()["divisor.degenerates_at_e2"]
    assert entry["ok"]
    # three curves and three points
    assert entry["detail"] == {"by": "weight purity", "pieces": 6}
