"""Small quantum cohomology of P^n and the flatness of theta^(-mu).

H^*(P^n) has basis 1, h, ..., h^n. In the c_1 log tau parametrization the
small quantum product is h * h^k = h^(k+1) for k < n and h * h^n = tau^(n+1).
With mu = diag(0, 1, ..., n) the rescaling theta^(-mu) is flat exactly when

    c_1 *_tau = theta^mu (c_1 *_(theta tau) / theta) theta^(-mu)

holds, which is checked entry by entry at rational sample points.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hodgeforge.core.errors import OutOfRange
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.toric.cohomology import sr_cohomology
from hodgeforge.toric.fan import projective_space_fan

QUANTUM_MAX_N = 6
# the Stanley-Reisner comparison gets expensive beyond this
CLASSICAL_CROSS_CHECK_MAX_N = 3
SAMPLE_NUMERATORS = range(-9, 10)
SAMPLE_DENOMINATORS = range(1, 8)


def quantum_c1(n: int, tau) -> RationalMatrix:
    """Matrix of c_1 *_tau on (1, h, ..., h^n); column k is the image of h^k."""
    tau = Fraction(tau)
    rows = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for k in range(n):
        rows[k + 1][k] = Fraction(n + 1)
    rows[0][n] = (n + 1) * tau ** (n + 1)
    return RationalMatrix.from_rows(rows, cols=n + 1)


def theta_power(n: int, theta, sign: int = 1) -> RationalMatrix:
    theta = Fraction(theta)
    return RationalMatrix.from_rows([[theta ** (sign * p) if p == q else Fraction(0) for q in range(n + 1)]
                                     for p in range(n + 1)], cols=n + 1)


def conjugation_defect(n: int, theta, tau) -> Optional[Tuple[int, int]]:
    """First entry where both sides of the flatness identity differ, or None."""
    theta, tau = Fraction(theta), Fraction(tau)
    lhs = quantum_c1(n, tau)
    rhs = theta_power(n, theta) @ quantum_c1(n, theta * tau).scale(1 / theta) @ theta_power(n, theta, -1)
    for i in range(n + 1):
        for j in range(n + 1):
            if lhs[i, j] != rhs[i, j]:
                return i, j
    return None


@dataclass
class FlatnessVerdict:
    n: int
    samples: List[Tuple[Fraction, Fraction]] = field(default_factory=list)
    failure: Optional[dict] = None
    classical_limit: bool = True

    @property
    def ok(self) -> bool:
        return self.failure is None and self.classical_limit


def _classical_matches(n: int) -> bool:
    """tau = 0 recovers classical c_1 cup, compared with the Stanley-Reisner ring when small."""
    limit = quantum_c1(n, 0)
    shift = RationalMatrix.from_rows([[Fraction(n + 1) if i == j + 1 else Fraction(0) for j in range(n + 1)]
                                      for i in range(n + 1)], cols=n + 1)
    if limit != shift:
        return False
    if n > CLASSICAL_CROSS_CHECK_MAX_N:
        return True
    ring = sr_cohomology(projective_space_fan(n))
    # each degree is spanned by a single monomial, a power of one hyperplane class
    return all(ring.cup(ring.c1(), k)[0, 0] == n + 1 for k in range(n))


def sample_points(count: int, seed: int = 0) -> List[Tuple[Fraction, Fraction]]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        num = rng.choice(list(SAMPLE_NUMERATORS), size=2)
        den = rng.choice(list(SAMPLE_DENOMINATORS), size=2)
        theta, tau = Fraction(int(num[0]), int(den[0])), Fraction(int(num[1]), int(den[1]))
        if theta:
            out.append((theta, tau))
    return out


def pn_quantum_flatness(n: int, samples: Optional[Sequence[Tuple[object, object]]] = None,
                        count: int = 10, seed: int = 0) -> FlatnessVerdict:
    if not 1 <= n <= QUANTUM_MAX_N:
        raise OutOfRange(f"P^{n} outside 1..{QUANTUM_MAX_N}", {"n": n})
    points = [(Fraction(a), Fraction(b)) for a, b in samples] if samples is not None else sample_points(count, seed)
    verdict = FlatnessVerdict(n, points)
    for theta, tau in points:
        if theta == 0:
            raise OutOfRange("theta must be nonzero", {"theta": "0"})
        bad = conjugation_defect(n, theta, tau)
        if bad is not None:
            verdict.failure = {"theta": theta, "tau": tau, "entry": bad}
            logging.warning(f"[toric:p{n}] flatness identity fails at theta={theta}, tau={tau}, entry {bad}")
            break
    verdict.classical_limit = _classical_matches(n)
    logging.info(f"[toric:p{n}] quantum flatness on {len(points)} samples: ok={verdict.ok}")
    return verdict
