"""Lattice polytopes: exact facets, reflexivity and lattice-point enumeration.

scipy's ConvexHull proposes the facet planes in floating point; every normal,
level and incidence used afterwards is recomputed exactly over the integers.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import FacetNotUnimodular, NotReflexive
from hodgeforge.core.linalg import RationalMatrix

Vector = Tuple[int, ...]


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def primitive(v: Sequence) -> Vector:
    """Smallest integer vector on the ray through a rational vector."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    return tuple(x // g for x in ints)


def affine_rank(points: Sequence[Vector]) -> int:
    if len(points) < 2:
        return 0
    base = points[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    return la.rank(RationalMatrix.from_rows(diffs, cols=len(base)))


def lattice_length(points: Sequence[Vector]) -> int:
    """Lattice length of a segment given by its lattice points (0 for a single point)."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) < 2:
        return 0
    if affine_rank(pts) != 1:
        raise ValueError("lattice length is only defined for segments")
    a, b = pts[0], pts[-1]
    g = 0
    for x, y in zip(a, b):
        g = gcd(g, abs(x - y))
    return g


@dataclass(frozen=True)
class Facet:
    points: FrozenSet[int]   # indices of the input points lying on the facet
    normal: Vector           # primitive, pointing into the polytope
    level: int               # <m, normal> = level on the facet, >= level on the polytope


def _hyperplane(points: Sequence[Vector]) -> Optional[Vector]:
    base = points[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in points[1:]]
    ker = la.kernel_basis(RationalMatrix.from_rows(diffs, cols=len(base)))
    if ker.cols != 1:
        return None
    return primitive(ker.column(0))


def exact_facets(points: Sequence[Vector]) -> List[Facet]:
    """Facets of conv(points), full-dimensional in its ambient lattice."""
    pts = [tuple(int(x) for x in p) for p in points]
    d = len(pts[0])
    if affine_rank(pts) != d:
        raise NotReflexive("polytope is not full-dimensional", {"affine_rank": affine_rank(pts), "dim": d})
    if d == 1:
        values = [p[0] for p in pts]
        lo, hi = min(values), max(values)
        return [Facet(frozenset(i for i, v in enumerate(values) if v == lo), (1,), lo),
                Facet(frozenset(i for i, v in enumerate(values) if v == hi), (-1,), -hi)]
    hull = ConvexHull(np.array(pts, dtype=float))
    seen = set()
    facets: List[Facet] = []
    for simplex in hull.simplices:
        normal = _hyperplane([pts[i] for i in simplex])
        if normal is None:
            continue
        level = dot(pts[simplex[0]], normal)
        values = [dot(p, normal) for p in pts]
        if all(v <= level for v in values):
            normal, level, values = tuple(-x for x in normal), -level, [-v for v in values]
        if not all(v >= level for v in values):
            raise NotReflexive("hull facet candidate is not a supporting plane", {"normal": normal})
        if normal in seen:
            continue
        seen.add(normal)
        facets.append(Facet(frozenset(i for i, v in enumerate(values) if v == level), normal, level))
    return sorted(facets, key=lambda f: f.normal)


def faces(points: Sequence[Vector]) -> List[FrozenSet[int]]:
    """Every nonempty face of conv(points) as the set of input points on it, the polytope included."""
    facets = exact_facets(points)
    found = {frozenset(range(len(points)))}
    frontier = {f.points for f in facets}
    while frontier:
        found |= frontier
        nxt = set()
        for a, b in itertools.combinations(sorted(found, key=sorted), 2):
            meet = a & b
            if meet and meet not in found:
                nxt.add(meet)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass
class LatticePolytope:
    vertices: Tuple[Vector, ...]
    label: str = ""
    _facets: Optional[List[Facet]] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[int]], label: str = "") -> "LatticePolytope":
        pts = sorted(set(tuple(int(x) for x in p) for p in points))
        if len(pts[0]) == 1:
            verts = [min(pts), max(pts)]
        elif affine_rank(pts) < len(pts[0]):
            # left for exact_facets to reject
            verts = pts
        else:
            hull = ConvexHull(np.array(pts, dtype=float))
            verts = sorted(pts[i] for i in hull.vertices)
        return cls(tuple(verts), label)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def facets(self) -> List[Facet]:
        if self._facets is None:
            self._facets = exact_facets(self.vertices)
        return self._facets

    def contains(self, m: Sequence[int]) -> bool:
        return all(dot(m, f.normal) >= f.level for f in self.facets())

    def lattice_points(self) -> List[Vector]:
        lo = [min(v[k] for v in self.vertices) for k in range(self.dim)]
        hi = [max(v[k] for v in self.vertices) for k in range(self.dim)]
        box = itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)])
        return [m for m in box if self.contains(m)]

    def face_of(self, u: Sequence[int]) -> Tuple[int, List[Vector]]:
        """(min <m,u>, vertices attaining it)."""
        values = [dot(v, u) for v in self.vertices]
        lo = min(values)
        return lo, [v for v, x in zip(self.vertices, values) if x == lo]

    def interior_points_of_facet(self, facet: Facet) -> int:
        """Lattice points in the relative interior of a facet."""
        count = 0
        others = [f for f in self.facets() if f.normal != facet.normal]
        for m in self.lattice_points():
            if dot(m, facet.normal) == facet.level and all(dot(m, f.normal) != f.level for f in others):
                count += 1
        return count


@dataclass
class ReflexiveVerdict:
    polytope: LatticePolytope
    facets: List[Facet]
    unimodular: bool
    bad_facets: List[Facet] = field(default_factory=list)

    @property
    def normals(self) -> List[Vector]:
        return [f.normal for f in self.facets]


def validate_reflexive(p: LatticePolytope, require_unimodular: bool = True) -> ReflexiveVerdict:
    """Every facet on <m, u_F> = -1 with u_F primitive; facet vertices a Z-basis when required."""
    facets = p.facets()
    for f in facets:
        if f.level >= 0:
            raise NotReflexive("origin is not an interior point", {"normal": f.normal, "level": f.level})
        if f.level != -1:
            raise NotReflexive(f"facet at lattice distance {-f.level}", {"normal": f.normal, "level": f.level})
    bad = []
    for f in facets:
        verts = [p.vertices[i] for i in sorted(f.points)]
        if len(verts) != p.dim:
            bad.append(f)
            continue
        det = la.determinant(RationalMatrix.from_rows(verts, cols=p.dim))
        if abs(det) != 1:
            bad.append(f)
    verdict = ReflexiveVerdict(p, facets, not bad, bad)
    logging.info(f"[toric:{p.label or 'polytope'}] reflexive, {len(facets)} facets, unimodular={not bad}")
    if bad and require_unimodular:
        f = bad[0]
        raise FacetNotUnimodular("facet vertices do not form a lattice basis",
                                 {"normal": f.normal, "vertices": [p.vertices[i] for i in sorted(f.points)]})
    return verdict


def polar_boundary_points(p: LatticePolytope) -> List[Vector]:
    """Nonzero lattice points u with min_{m in P} <m, u> = -1, in lexicographic order."""
    normals = [f.normal for f in p.facets()]
    lo = [min(u[k] for u in normals) for k in range(p.dim)]
    hi = [max(u[k] for u in normals) for k in range(p.dim)]
    out = []
    for u in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if not any(u):
            continue
        if min(dot(v, u) for v in p.vertices) == -1:
            out.append(tuple(u))
    return out


def standard_polytopes() -> Dict[str, List[Vector]]:
    return {
        "p2": [(1, 0), (0, 1), (-1, -1)],
        "p3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
        "octahedron": [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)],
    }
