"""Laurent polynomials with Newton polytope P: pole orders, faces Q_rho and the nondegeneracy probe."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hodgeforge.core.constants import PROBE_SAMPLE_VALUES, PROBE_TRIALS_DEFAULT
from hodgeforge.core.errors import SupportViolation
from hodgeforge.core.utils import parse_rational
from hodgeforge.toric.fan import Fan
from hodgeforge.toric.polytope import LatticePolytope, Vector, affine_rank, dot, faces, lattice_length

DEGENERATE = "degenerate"
PROBABLY_NONDEGENERATE = "probably-nondegenerate"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LaurentData:
    support: Tuple[Tuple[Vector, Fraction], ...]
    label: str = ""

    @classmethod
    def from_terms(cls, terms: Sequence[Tuple[Sequence[int], object]], label: str = "") -> "LaurentData":
        acc: Dict[Vector, Fraction] = {}
        for m, c in terms:
            key = tuple(int(x) for x in m)
            acc[key] = acc.get(key, Fraction(0)) + parse_rational(c)
        return cls(tuple(sorted((m, c) for m, c in acc.items() if c != 0)), label)

    @property
    def exponents(self) -> List[Vector]:
        return [m for m, _ in self.support]

    @property
    def dim(self) -> int:
        return len(self.support[0][0])

    def newton_polytope(self) -> LatticePolytope:
        return LatticePolytope.from_points(self.exponents, label=self.label)

    def restricted(self, indices) -> List[Tuple[Vector, Fraction]]:
        return [self.support[i] for i in sorted(indices)]


def _monomial(x: Sequence[Fraction], m: Vector) -> Fraction:
    out = Fraction(1)
    for xi, e in zip(x, m):
        out *= xi ** e
    return out


def evaluate(terms: Sequence[Tuple[Vector, Fraction]], x: Sequence[Fraction]) -> Fraction:
    return sum((c * _monomial(x, m) for m, c in terms), Fraction(0))


def log_gradient(terms: Sequence[Tuple[Vector, Fraction]], x: Sequence[Fraction]) -> List[Fraction]:
    """(x_i d/dx_i) f at x."""
    d = len(x)
    out = [Fraction(0)] * d
    for m, c in terms:
        v = c * _monomial(x, m)
        for i in range(d):
            if m[i]:
                out[i] += m[i] * v
    return out


def check_support(L: LaurentData, p: LatticePolytope):
    """conv(support) = P: every vertex of P is a monomial and no monomial leaves P."""
    exps = set(L.exponents)
    for v in p.vertices:
        if v not in exps:
            raise SupportViolation("vertex of P missing from the support", {"vertex": v})
    for m in exps:
        if not p.contains(m):
            raise SupportViolation("monomial outside P", {"exponent": m})


@dataclass
class RayFace:
    ray: int
    u: Vector
    pole_order: int
    vertices: List[Vector]
    dim: int
    genus: int = 0


@dataclass
class WallFace:
    cone: Tuple[int, int]
    vertices: List[Vector]
    dim: int
    length: int


@dataclass
class PoleData:
    rays: List[RayFace]
    walls: Dict[Tuple[int, int], WallFace] = field(default_factory=dict)

    def points_on(self, i: int, j: int) -> int:
        """Base points of the pencil on the curve D_{ij}."""
        w = self.walls.get((min(i, j), max(i, j)))
        return w.length if w is not None and w.dim == 1 else 0


def pole_analysis(fan: Fan, L: LaurentData, p: Optional[LatticePolytope] = None) -> PoleData:
    p = p or L.newton_polytope()
    if affine_rank(L.exponents) != p.dim:
        raise SupportViolation("support does not span P", {"rank": affine_rank(L.exponents)})
    check_support(L, p)
    facets = p.facets()
    rays = []
    for i, u in enumerate(fan.rays):
        lo = min(dot(m, u) for m in L.exponents)
        if lo != -1:
            raise SupportViolation(f"pole order {-lo} along D_{i}", {"ray": u, "pole_order": -lo})
        _, verts = p.face_of(u)
        dim = affine_rank(verts)
        genus = 0
        if dim == p.dim - 1:
            facet = next(f for f in facets if {p.vertices[k] for k in f.points} == set(verts))
            genus = p.interior_points_of_facet(facet)
        rays.append(RayFace(i, u, -lo, verts, dim, genus))
    data = PoleData(rays)
    for a, b in fan.cones_of_dim(2):
        common = [v for v in rays[a].vertices if v in rays[b].vertices]
        dim = affine_rank(common) if common else -1
        length = lattice_length(common) if dim == 1 else 0
        data.walls[(a, b)] = WallFace((a, b), common, dim, length)
    n_curves = sum(1 for r in rays if r.dim >= 1)
    n_points = sum(w.length for w in data.walls.values())
    logging.info(f"[toric:{L.label or 'laurent'}] poles of order 1 along {len(rays)} divisors, "
                 f"{n_curves} base curves, {n_points} base points on walls")
    return data


@dataclass
class ProbeVerdict:
    status: str
    faces_probed: int
    samples: int
    witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.status == PROBABLY_NONDEGENERATE


def nondegeneracy_probe(L: LaurentData, trials: int = PROBE_TRIALS_DEFAULT, seed: int = 0) -> ProbeVerdict:
    """Random rational torus points per face; a common zero of f_Q and its log-gradient certifies degeneracy."""
    if trials <= 0 or not L.support:
        return ProbeVerdict(INCONCLUSIVE, 0, 0)
    rng = np.random.default_rng(seed)
    values = [Fraction(v) for v in PROBE_SAMPLE_VALUES]
    face_list = faces(L.exponents)
    samples = 0
    for face in face_list:
        terms = L.restricted(face)
        if len(terms) < 2:
            continue
        for _ in range(trials):
            x = [values[int(k)] for k in rng.integers(0, len(values), size=L.dim)]
            samples += 1
            if evaluate(terms, x) != 0:
                continue
            if all(g == 0 for g in log_gradient(terms, x)):
                witness = {"face": [m for m, _ in terms], "point": x}
                logging.warning(f"[toric:{L.label or 'laurent'}] degenerate face {witness['face']} at {x}")
                return ProbeVerdict(DEGENERATE, len(face_list), samples, witness)
    logging.info(f"[toric:{L.label or 'laurent'}] probe: {len(face_list)} faces, {samples} samples, no common zero")
    return ProbeVerdict(PROBABLY_NONDEGENERATE, len(face_list), samples)


def standard_laurent(p: LatticePolytope, label: str = "") -> LaurentData:
    """Sum of the vertex monomials of P with coefficient one."""
    return LaurentData.from_terms([(v, 1) for v in p.vertices], label=label or p.label)
