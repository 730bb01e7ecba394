"""Rational elliptic surfaces whose fibre at infinity is a wheel of d rational curves.

X is P^2 blown up at nine points, H^2(X) the odd unimodular lattice with
basis H, E1..E9, and the wheel components are explicit class vectors read
from data/wheel_classes.json.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from hodgeforge.core.constants import WHEEL_D_MAX, WHEEL_D_MIN, WHEEL_EULER_X
from hodgeforge.core.errors import InvalidIntersectionData, OutOfRange
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.utils import read_json
from hodgeforge.spectral.strata import Piece, StrataComplex, make_strata

DATA_FILE = Path(__file__).resolve().parent.parent / "data" / "wheel_classes.json"


@dataclass(frozen=True)
class WheelSurfaceSpec:
    d: int
    classes: Tuple[Tuple[int, ...], ...]
    ample: Tuple[int, ...]
    gram_diagonal: Tuple[int, ...]
    fiber: Tuple[int, ...]
    realization: str = "chain"

    @property
    def rank(self) -> int:
        return len(self.gram_diagonal)

    def dot(self, a, b) -> int:
        return sum(g * x * y for g, x, y in zip(self.gram_diagonal, a, b))

    def cycle_matrix(self) -> List[List[int]]:
        return [[self.dot(a, b) for b in self.classes] for a in self.classes]

    def expected_meetings(self, i: int, j: int) -> int:
        """Number of points where C_i and C_j (0-based, i != j) meet in a d-wheel."""
        if self.d == 2:
            return 2
        return 1 if (j - i) % self.d in (1, self.d - 1) else 0


def _check_d(d: int):
    if not WHEEL_D_MIN <= d <= WHEEL_D_MAX:
        raise OutOfRange(f"wheel length d={d} outside {WHEEL_D_MIN}..{WHEEL_D_MAX}", {"d": d})


def load_wheel_spec(d: int, realization: str = "chain", path: Path = DATA_FILE) -> WheelSurfaceSpec:
    _check_d(d)
    data = read_json(path)
    if data is None:
        raise FileNotFoundError(f"wheel class data not found at {path}")
    entry = data.get("realizations", {}).get(realization, {}).get(str(d))
    if entry is None:
        raise InvalidIntersectionData(f"no {realization!r} realization recorded for d={d}",
                                      {"d": d, "realization": realization})
    spec = WheelSurfaceSpec(d, tuple(tuple(c) for c in entry["classes"]), tuple(entry["ample"]),
                            tuple(data["gram_diagonal"]), tuple(data["fiber"]), realization)
    validate_wheel_spec(spec)
    return spec


def validate_wheel_spec(spec: WheelSurfaceSpec):
    """Affine-cycle shape, sum equal to the fibre, and an ample class positive on every component."""
    if len(spec.classes) != spec.d:
        raise InvalidIntersectionData(f"{len(spec.classes)} classes for a {spec.d}-wheel", {"d": spec.d})
    total = [sum(c[k] for c in spec.classes) for k in range(spec.rank)]
    if tuple(total) != spec.fiber:
        raise InvalidIntersectionData("wheel classes do not sum to the fibre class", {"d": spec.d})
    if spec.dot(spec.fiber, spec.fiber) != 0:
        raise InvalidIntersectionData("fibre class does not square to zero", {"d": spec.d})
    gram = spec.cycle_matrix()
    for i in range(spec.d):
        for j in range(spec.d):
            want = -2 if i == j else spec.expected_meetings(i, j)
            if gram[i][j] != want:
                raise InvalidIntersectionData(f"C{i + 1}.C{j + 1} = {gram[i][j]}, expected {want}",
                                              {"d": spec.d, "i": i + 1, "j": j + 1})
    if spec.dot(spec.ample, spec.ample) <= 0 or any(spec.dot(spec.ample, c) <= 0 for c in spec.classes):
        raise InvalidIntersectionData("Lefschetz class is not positive on the wheel", {"d": spec.d})


def _point_index_sets(d: int) -> List[Tuple[str, Tuple[int, int]]]:
    if d == 2:
        return [("P12a", (1, 2)), ("P12b", (1, 2))]
    pts = [(f"P{i}{i + 1}", (i, i + 1)) for i in range(1, d)]
    pts.append((f"P1{d}", (1, d)))
    return pts


def wheel_strata(spec) -> StrataComplex:
    """Strata of the wheel: X, d copies of P^1 and d points, with maps from the lattice."""
    if isinstance(spec, int):
        spec = load_wheel_spec(spec)
    d, r = spec.d, spec.rank
    g = spec.gram_diagonal
    one = RationalMatrix.identity(1)
    omega = RationalMatrix.column_vector(spec.ample)

    pieces = [Piece("X", 0, (), {0: 1, 2: r, 4: 1})]
    pairing = {"X": {0: one, 2: RationalMatrix.from_rows([[g[i] if i == j else 0 for j in range(r)]
                                                          for i in range(r)]), 4: one}}
    lefschetz = {"X": {0: omega, 2: RationalMatrix.from_rows([[g[k] * spec.ample[k] for k in range(r)]])}}
    restriction = {}
    for i, c in enumerate(spec.classes, start=1):
        pid = f"C{i}"
        pieces.append(Piece(pid, 1, (i,), {0: 1, 2: 1}, ("X",)))
        pairing[pid] = {0: one, 2: one}
        lefschetz[pid] = {0: RationalMatrix.from_rows([[spec.dot(spec.ample, c)]])}
        restriction[(pid, 0)] = {0: one, 2: RationalMatrix.from_rows([[g[k] * c[k] for k in range(r)]])}
    for pid, (a, b) in _point_index_sets(d):
        # removing a leaves C_b, removing b leaves C_a
        pieces.append(Piece(pid, 2, (a, b), {0: 1}, (f"C{b}", f"C{a}")))
        pairing[pid] = {0: one}
        lefschetz[pid] = {}
        restriction[(pid, 0)] = {0: one}
        restriction[(pid, 1)] = {0: one}
    label = f"wheel-{d}" if spec.realization == "chain" else f"wheel-{d}-{spec.realization}"
    s = make_strata(2, pieces, restriction, pairing, lefschetz, label=label)
    logging.info(f"[geometry:{label}] chi(D) = {sum((-1) ** (m - 1) * s.euler(m) for m in (1, 2))}")
    return s


def wheel_euler_oracle(d: int) -> Tuple[int, int, int]:
    """(chi(Y), chi(Y_inf), chi(Y, Y_inf)) from chi(X) = 12 and chi(wheel) = d."""
    _check_d(d)
    chi_y = WHEEL_EULER_X - d
    chi_fibre = 0
    return chi_y, chi_fibre, chi_y - chi_fibre
