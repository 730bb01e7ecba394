"""Complete fans in N: spanning (normal) fan, face fan and smooth refinement."""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import NotComplete, NotSmooth, RefinementFailed
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.toric.polytope import LatticePolytope, Vector, dot, polar_boundary_points, primitive

Cone = Tuple[int, ...]


def _cone_facets(rays: Sequence[Vector], cone: Cone) -> List[Tuple[FrozenSet[int], Vector]]:
    """Facets of a full-dimensional cone as (ray subset, inward normal)."""
    n = len(rays[0])
    out = {}
    for sub in itertools.combinations(cone, n - 1):
        ker = la.kernel_basis(RationalMatrix.from_rows([rays[i] for i in sub], cols=n))
        if ker.cols != 1:
            continue
        normal = primitive(ker.column(0))
        values = [dot(rays[i], normal) for i in cone]
        if all(v <= 0 for v in values):
            normal = tuple(-x for x in normal)
            values = [-v for v in values]
        if any(v < 0 for v in values):
            continue
        face = frozenset(i for i, v in zip(cone, values) if v == 0)
        out[face] = normal
    return sorted(out.items(), key=lambda kv: sorted(kv[0]))


@dataclass(frozen=True)
class Fan:
    rays: Tuple[Vector, ...]
    cones: Tuple[Cone, ...]   # maximal cones as sorted ray-index tuples
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    @property
    def is_simplicial(self) -> bool:
        return all(len(c) == self.dim for c in self.cones)

    def index(self, cone: Cone) -> int:
        """Lattice index of a simplicial maximal cone (1 when unimodular)."""
        if len(cone) != self.dim:
            return 0
        return abs(int(la.determinant(RationalMatrix.from_rows([self.rays[i] for i in cone], cols=self.dim))))

    def is_smooth_cone(self, cone: Cone) -> bool:
        return self.index(cone) == 1

    @property
    def is_smooth(self) -> bool:
        return all(self.is_smooth_cone(c) for c in self.cones)

    def cones_of_dim(self, d: int) -> List[Cone]:
        """All d-dimensional cones of a simplicial fan."""
        if not self.is_simplicial:
            raise NotSmooth("faces of non-simplicial cones are not enumerated", {"fan": self.label})
        found = set()
        for c in self.cones:
            found.update(itertools.combinations(c, d))
        return sorted(found)

    def contains(self, point: Sequence[int], cone: Cone) -> bool:
        return all(dot(point, normal) >= 0 for _, normal in _cone_facets(self.rays, cone))

    def neighbours(self, i: int) -> List[int]:
        return sorted({j for c in self.cones if i in c for j in c if j != i})

    def check_complete(self):
        """Every codimension-one cone of a simplicial fan lies in exactly two maximal cones."""
        counts: Dict[Cone, int] = {}
        for c in self.cones:
            for wall in itertools.combinations(c, self.dim - 1):
                counts[wall] = counts.get(wall, 0) + 1
        for wall, k in counts.items():
            if k != 2:
                raise NotComplete(f"wall lies in {k} maximal cones", {"wall": wall, "fan": self.label})

    def check_smooth(self):
        for c in self.cones:
            if not self.is_smooth_cone(c):
                raise NotSmooth("maximal cone is not unimodular", {"cone": c, "index": self.index(c),
                                                                    "fan": self.label})


def make_fan(rays: Sequence[Sequence[int]], cones: Sequence[Sequence[int]], label: str = "") -> Fan:
    return Fan(tuple(tuple(int(x) for x in r) for r in rays), tuple(sorted(tuple(sorted(c)) for c in cones)),
               label)


def spanning_fan(p: LatticePolytope) -> Fan:
    """Normal fan of P: rays u_F, one maximal cone per vertex generated by the facets through it."""
    facets = p.facets()
    rays = [f.normal for f in facets]
    cones = []
    for vi in range(len(p.vertices)):
        cones.append([k for k, f in enumerate(facets) if vi in f.points])
    fan = make_fan(rays, cones, label=f"{p.label or 'P'}-normal")
    logging.info(f"[toric:{fan.label}] {len(fan.rays)} rays, {len(fan.cones)} maximal cones, "
                 f"simplicial={fan.is_simplicial}")
    return fan


def face_fan(p: LatticePolytope) -> Fan:
    """Cones over the facets of P; rays are the vertices of P."""
    for v in p.vertices:
        if primitive(v) != tuple(v):
            raise NotSmooth("vertex is not a primitive lattice vector", {"vertex": v})
    cones = [sorted(f.points) for f in p.facets()]
    return make_fan(p.vertices, cones, label=f"{p.label or 'P'}-face")


def stellar_subdivision(fan: Fan, v: Vector) -> Fan:
    """Star subdivision at v: every maximal cone containing v is coned off from v over its far facets."""
    rays = list(fan.rays)
    if v in rays:
        return fan
    rays.append(tuple(v))
    iv = len(rays) - 1
    cones: List[Cone] = []
    hit = 0
    for c in fan.cones:
        if not fan.contains(v, c):
            cones.append(c)
            continue
        hit += 1
        for face, normal in _cone_facets(fan.rays, c):
            if dot(v, normal) > 0:
                cones.append(tuple(sorted(face | {iv})))
    if not hit:
        raise RefinementFailed("subdivision point lies in no cone", {"point": v, "fan": fan.label})
    return Fan(tuple(rays), tuple(sorted(cones)), fan.label)


def smooth_refine(fan: Fan, p: LatticePolytope) -> Fan:
    """Pull the boundary lattice points of the polar polytope in lexicographic order until smooth."""
    current = fan
    for v in polar_boundary_points(p):
        if v in current.rays:
            continue
        containing = [c for c in current.cones if current.contains(v, c)]
        if all(current.is_smooth_cone(c) for c in containing):
            continue
        current = stellar_subdivision(current, v)
        logging.debug(f"[toric:{fan.label}] pulled {v}, {len(current.cones)} cones")
    bad = [c for c in current.cones if not current.is_smooth_cone(c)]
    if bad:
        raise RefinementFailed("no unimodular subdivision from the polar boundary points",
                               {"cone": bad[0], "index": current.index(bad[0]), "fan": fan.label})
    for u in current.rays:
        lo = min(dot(m, u) for m in p.vertices)
        if lo != -1:
            raise RefinementFailed("ray does not attain -1 on the polytope", {"ray": u, "min": lo})
    current.check_complete()
    logging.info(f"[toric:{fan.label}] smooth refinement: {len(current.rays)} rays, {len(current.cones)} cones")
    return current


def fan_from_mapping(data: dict, label: str = "") -> Fan:
    return make_fan(data["rays"], data["cones"], label or data.get("label", ""))


def projective_space_fan(n: int) -> Fan:
    """Rays e_1..e_n and -(e_1+...+e_n); every n of them span a cone."""
    rays = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)] + [tuple([-1] * n)]
    return make_fan(rays, itertools.combinations(range(n + 1), n), label=f"p{n}")
