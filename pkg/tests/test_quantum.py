from fractions import Fraction

import pytest

from hodgeforge.core.errors import OutOfRange
from hodgeforge.toric.quantum import conjugation_defect, pn_quantum_flatness, quantum_c1, sample_points


def test_classical_limit_on_p1():
    m = quantum_c1(1, 0)
    # c_1 * h = 2 h.h = 0 classically
    assert m[0, 1] == 0
    assert m[1, 0] == 2


def test_quantum_correction_on_p2():
    m = quantum_c1(2, 1)
    assert m[0, 2] == 3
    assert quantum_c1(2, Fraction(1, 2))[0, 2] == Fraction(3, 8)


def test_conjugation_identity_at_a_fixed_point():
    assert conjugation_defect(2, 2, 3) is None
    assert conjugation_defect(3, Fraction(-1, 3), Fraction(5, 7)) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_flatness_on_random_samples(n):
    verdict = pn_quantum_flatness(n, count=10, seed=n)
    assert verdict.ok
    assert len(verdict.samples) == 10
    assert verdict.classical_limit


def test_sampling_is_seeded_and_avoids_zero_theta():
    pts = sample_points(25, seed=7)
    assert pts == sample_points(25, seed=7)
    assert all(theta != 0 for theta, _ in pts)


def test_range_and_zero_theta():
    with pytest.raises(OutOfRange):
        pn_quantum_flatness(7)
    with pytest.raises(OutOfRange):
        pn_quantum_flatness(2, samples=[(0, 1)])
