"""Strata of the pole divisor of a toric Landau-Ginzburg model.

The pencil f = t on X_Sigma has base locus Z = closure{f = 0} cap D, a curve
Z_rho inside every D_rho whose face Q_rho is not a vertex. Blowing up the Z_rho
one ray at a time (in `ray_order`) resolves the pencil; D stays simple normal
crossing and its components are the toric surfaces D_rho blown up at the base
points on their invariant curves. A base point on D_tau is blown up in the
surface of the ray of tau that comes later.

Cohomology of the blown-up 3-fold is modelled through H^2 generators
P_a (pulled-back toric divisors) and E_t (exceptional divisors) with triple
numbers

    P.P.E = 0,  P.E_t.E_t = -P.B_t,  E_t^3 = -deg N_{B_t},
    E_t.E_t.E_s = -#(B_t cap E_s) for s blown up before t,

and H^4 as the dual of H^2. Surfaces carry their own lattices of invariant
and exceptional curves; restrictions are cross-checked against the 3-fold
numbers before any strata are built.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from hodgeforge.core import linalg as la
from hodgeforge.core.constants import AMPLE_MULTIPLIERS
from hodgeforge.core.errors import InvalidIntersectionData, NonHTStrata
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.spectral.checks import hodge_riemann_failures
from hodgeforge.spectral.strata import Piece, StrataComplex, make_strata
from hodgeforge.toric.cohomology import ToricIntersection, ample_class
from hodgeforge.toric.fan import Fan, smooth_refine, spanning_fan
from hodgeforge.toric.laurent import LaurentData, PoleData, pole_analysis
from hodgeforge.toric.polytope import LatticePolytope, dot, lattice_length, validate_reflexive

FORWARD = "forward"
REVERSE = "reverse"

Vec = Dict[int, Fraction]
ONE = RationalMatrix.identity(1)


@dataclass(frozen=True)
class BaseCurve:
    index: int        # position in the blow-up sequence
    ray: int
    component: int
    components: int


@dataclass(frozen=True)
class BasePoint:
    wall: Tuple[int, int]
    slot: int
    surface: int      # ray whose surface receives the exceptional curve
    centre: int       # base curve whose blow-up separates the point

    def curve_in_surface(self) -> int:
        """The other ray of the wall: the point sits on C_{surface, other}."""
        a, b = self.wall
        return b if a == self.surface else a


def resolve_order(n_rays: int, ray_order: Union[str, Sequence[int], None]) -> List[int]:
    if ray_order is None or ray_order == FORWARD:
        return list(range(n_rays))
    if ray_order == REVERSE:
        return list(range(n_rays - 1, -1, -1))
    order = [int(r) for r in ray_order]
    if sorted(order) != list(range(n_rays)):
        raise InvalidIntersectionData("ray order is not a permutation of the rays", {"order": order})
    return order


@dataclass
class SurfaceModel:
    ray: int
    nbrs: List[int]
    points: List[BasePoint]
    gram: RationalMatrix          # on generators: C_j for j in nbrs, then e_p
    basis: List[int]              # generator positions forming a basis of H^2
    convert: RationalMatrix       # generator coefficients -> basis coordinates

    @property
    def h2(self) -> int:
        return len(self.basis)

    def curve(self, j: int) -> int:
        return self.nbrs.index(j)

    def gram_basis(self) -> RationalMatrix:
        return RationalMatrix.from_rows([[self.gram[a, b] for b in self.basis] for a in self.basis],
                                        cols=len(self.basis))

    def degree_row(self, gen: int) -> RationalMatrix:
        """Row functional y -> y.g on H^2 for a generator g."""
        return RationalMatrix.from_rows([[self.gram[b, gen] for b in self.basis]], cols=len(self.basis))


class PencilResolution:
    """Intersection theory of X_Sigma blown up along the base curves of the pencil."""

    def __init__(self, fan: Fan, poles: PoleData, ray_order=None):
        self.fan = fan
        self.poles = poles
        self.inter = ToricIntersection(fan)
        self.R = len(fan.rays)
        self.order = resolve_order(self.R, ray_order)
        self.rank_of = {r: k for k, r in enumerate(self.order)}
        for rf in poles.rays:
            if rf.genus:
                raise NonHTStrata(f"base curve in D_{rf.ray + 1} has genus {rf.genus}",
                                  {"ray": rf.u, "genus": rf.genus})
        self.curves: List[BaseCurve] = []
        for r in self.order:
            rf = poles.rays[r]
            if rf.dim <= 0:
                continue
            count = self._components(r)
            for c in range(count):
                self.curves.append(BaseCurve(len(self.curves), r, c, count))
        self.curve_of = {(c.ray, c.component): c.index for c in self.curves}
        self.points: List[BasePoint] = []
        for (a, b) in sorted(poles.walls):
            for slot in range(poles.points_on(a, b)):
                later, earlier = (a, b) if self.rank_of[a] > self.rank_of[b] else (b, a)
                centre = self.curve_of[(earlier, self._through(earlier, slot))]
                self.points.append(BasePoint((a, b), slot, later, centre))
        self.shared: Dict[Tuple[int, int], int] = {}
        for p in self.points:
            for t in self.curves:
                if t.index != p.centre and self.on_curve(p, t):
                    key = (p.centre, t.index)
                    self.shared[key] = self.shared.get(key, 0) + 1
        self.fixed = tuple(fan.cones[0])
        self.basis = [a for a in range(self.R) if a not in self.fixed] + [self.R + t.index for t in self.curves]
        self.position = {g: k for k, g in enumerate(self.basis)}
        U = RationalMatrix.from_columns([fan.rays[a] for a in self.fixed], rows=3)
        self._fixed_dual = la.inverse(U)
        self._cache: Dict[Tuple[int, int, int], Fraction] = {}
        logging.info(f"[toric:{fan.label}] resolving the pencil: {len(self.curves)} base curves, "
                     f"{len(self.points)} base points, b2 = {len(self.basis)}")

    # --- base locus bookkeeping ---
    def _components(self, r: int) -> int:
        rf = self.poles.rays[r]
        if rf.dim == 1:
            # the face is an edge; Z_rho splits into one line per lattice step
            return lattice_length(rf.vertices)
        return 1

    def _through(self, r: int, slot: int) -> int:
        return slot if self._components(r) > 1 else 0

    def on_curve(self, p: BasePoint, t: BaseCurve) -> bool:
        return t.ray in p.wall and (t.components == 1 or t.component == p.slot)

    # --- triple numbers on generators ---
    def p_dot_b(self, a: int, t: int) -> Fraction:
        c = self.curves[t]
        anti = self.inter.anticanonical()
        return self.inter.product({a: Fraction(1)}, anti, {c.ray: Fraction(1)}) / c.components

    def anti_dot_b(self, t: int) -> Fraction:
        """-K.B_t on the variety where B_t is blown up."""
        c = self.curves[t]
        anti = self.inter.anticanonical()
        base = self.inter.product(anti, anti, {c.ray: Fraction(1)}) / c.components
        return base - sum(self.shared.get((s, t), 0) for s in range(t))

    def _gen_triple(self, x: int, y: int, z: int) -> Fraction:
        key = tuple(sorted((x, y, z)))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        ps = [g for g in key if g < self.R]
        es = [g - self.R for g in key if g >= self.R]
        if not es:
            val = self.inter.triple(*ps)
        elif len(es) == 1:
            val = Fraction(0)
        elif len(es) == 2:
            val = -self.p_dot_b(ps[0], es[0]) if es[0] == es[1] else Fraction(0)
        else:
            s, t, u = es
            if s == t == u:
                # E^3 = -deg N_B with deg N_B = -K.B - 2 for a rational centre
                val = -(self.anti_dot_b(s) - 2)
            elif t == u:
                val = -Fraction(self.shared.get((s, t), 0))
            else:
                val = Fraction(0)
        self._cache[key] = val
        return val

    def triple(self, x: Vec, y: Vec, z: Vec) -> Fraction:
        total = Fraction(0)
        for a, ca in x.items():
            for b, cb in y.items():
                for c, cc in z.items():
                    if ca and cb and cc:
                        total += ca * cb * cc * self._gen_triple(a, b, c)
        return total

    # --- classes ---
    def proper(self, i: int) -> Vec:
        v: Vec = {i: Fraction(1)}
        for c in self.curves:
            if c.ray == i:
                v[self.R + c.index] = Fraction(-1)
        return v

    def coords(self, v: Vec) -> List[Fraction]:
        out = [Fraction(0)] * len(self.basis)
        for g, c in v.items():
            if g in self.position:
                out[self.position[g]] += c
                continue
            # fixed ray: D_a = -sum_{b not fixed} <m_a, u_b> D_b
            m = self._fixed_dual.row(self.fixed.index(g))
            for b in range(self.R):
                if b not in self.fixed:
                    out[self.position[b]] -= c * dot(m, self.fan.rays[b])
        return out

    def omega(self, ample: Vec, k: int) -> Vec:
        v: Vec = {g: k * Fraction(c) for g, c in ample.items()}
        for c in self.curves:
            v[self.R + c.index] = Fraction(-1)
        return v

    # --- surfaces ---
    def surface(self, i: int) -> SurfaceModel:
        nbrs = self.fan.neighbours(i)
        pts = [p for p in self.points if p.surface == i]
        g = len(nbrs) + len(pts)
        rows = [[Fraction(0)] * g for _ in range(g)]
        for a, j in enumerate(nbrs):
            for b, k in enumerate(nbrs):
                rows[a][b] = self.inter.triple(i, j, k)
            rows[a][a] -= sum(1 for p in pts if p.curve_in_surface() == j)
        for e, p in enumerate(pts):
            col = len(nbrs) + e
            a = nbrs.index(p.curve_in_surface())
            rows[a][col] = rows[col][a] = Fraction(1)
            rows[col][col] = Fraction(-1)
        gram = RationalMatrix.from_rows(rows, cols=g)
        _, pivots, rk = la.rref(gram)
        expected = len(nbrs) - 2 + len(pts)
        if rk != expected:
            raise InvalidIntersectionData(f"surface D_{i + 1} has Picard rank {rk}, expected {expected}",
                                          {"ray": self.fan.rays[i]})
        basis = list(pivots)
        gbb = RationalMatrix.from_rows([[gram[a, b] for b in basis] for a in basis], cols=rk)
        gb_all = RationalMatrix.from_rows([gram.row(a) for a in basis], cols=g)
        return SurfaceModel(i, nbrs, pts, gram, basis, la.inverse(gbb) @ gb_all)

    def restrict(self, s: SurfaceModel, v: Vec) -> List[Fraction]:
        """Generator coefficients on D_i of the restriction of a 3-fold class."""
        i = s.ray
        g = len(s.nbrs) + len(s.points)
        out = [Fraction(0)] * g

        def pull(j: int, c: Fraction):
            out[s.nbrs.index(j)] += c
            for e, p in enumerate(s.points):
                if p.curve_in_surface() == j:
                    out[len(s.nbrs) + e] += c

        m = self.inter.dual(i)
        for gen, c in v.items():
            if not c:
                continue
            if gen < self.R:
                if gen == i:
                    for j in s.nbrs:
                        pull(j, -c * dot(m, self.fan.rays[j]))
                elif gen in s.nbrs:
                    pull(gen, c)
                continue
            curve = self.curves[gen - self.R]
            if curve.ray == i:
                # B_t = Z_i / components minus the exceptional curves over its points
                for j in s.nbrs:
                    pull(j, c * (1 - dot(m, self.fan.rays[j])) / curve.components)
                for e, p in enumerate(s.points):
                    if self.on_curve(p, curve):
                        out[len(s.nbrs) + e] -= c
            else:
                for e, p in enumerate(s.points):
                    if p.centre == curve.index:
                        out[len(s.nbrs) + e] += c
        return out

    def restriction_matrix(self, s: SurfaceModel) -> RationalMatrix:
        cols = [s.convert.apply(self.restrict(s, {g: Fraction(1)})) for g in self.basis]
        return RationalMatrix.from_columns(cols, rows=s.h2)

    def check_surface(self, s: SurfaceModel, r: RationalMatrix):
        """D_i.x.y on the 3-fold equals x|.y| on the surface for basis classes x, y."""
        on_surface = r.transpose() @ s.gram_basis() @ r
        d = self.proper(s.ray)
        for a, x in enumerate(self.basis):
            for b in range(a, len(self.basis)):
                want = self.triple(d, {x: Fraction(1)}, {self.basis[b]: Fraction(1)})
                if on_surface[a, b] != want:
                    raise InvalidIntersectionData(
                        f"restriction to D_{s.ray + 1} disagrees with triple numbers",
                        {"ray": self.fan.rays[s.ray], "generators": (x, self.basis[b]),
                         "surface": str(on_surface[a, b]), "threefold": str(want)})


def _cone_ids(a: int, b: int) -> str:
    return f"{a + 1}.{b + 1}"


def blowup_strata(fan: Fan, L: LaurentData, ray_order=FORWARD, poles: Optional[PoleData] = None,
                  label: str = "") -> StrataComplex:
    """Strata of D after resolving the pencil, with a Lefschetz class k.A - sum E."""
    poles = poles or pole_analysis(fan, L)
    res = PencilResolution(fan, poles, ray_order)
    label = label or f"lg-{L.label or fan.label}"
    r2 = len(res.basis)
    surfaces = {i: res.surface(i) for i in range(res.R)}
    restr2 = {}
    for i, s in surfaces.items():
        restr2[i] = res.restriction_matrix(s)
        res.check_surface(s, restr2[i])

    pieces = [Piece("X", 0, (), {0: 1, 2: r2, 4: r2, 6: 1})]
    restriction = {}
    pairing = {"X": {0: ONE, 2: RationalMatrix.identity(r2), 4: RationalMatrix.identity(r2), 6: ONE}}
    for i, s in surfaces.items():
        pid = f"D{i + 1}"
        pieces.append(Piece(pid, 1, (i + 1,), {0: 1, 2: s.h2, 4: 1}, ("X",)))
        pairing[pid] = {0: ONE, 2: s.gram_basis(), 4: ONE}
        restriction[(pid, 0)] = {0: ONE, 2: restr2[i],
                                 4: RationalMatrix.from_rows([res.coords(res.proper(i))], cols=r2)}
    walls = fan.cones_of_dim(2)
    for a, b in walls:
        pid = f"C{_cone_ids(a, b)}"
        pieces.append(Piece(pid, 2, (a + 1, b + 1), {0: 1, 2: 1}, (f"D{b + 1}", f"D{a + 1}")))
        pairing[pid] = {0: ONE, 2: ONE}
        restriction[(pid, 0)] = {0: ONE, 2: surfaces[b].degree_row(surfaces[b].curve(a))}
        restriction[(pid, 1)] = {0: ONE, 2: surfaces[a].degree_row(surfaces[a].curve(b))}
    for a, b, c in fan.cones_of_dim(3):
        pid = f"P{a + 1}.{b + 1}.{c + 1}"
        parents = (f"C{_cone_ids(b, c)}", f"C{_cone_ids(a, c)}", f"C{_cone_ids(a, b)}")
        pieces.append(Piece(pid, 3, (a + 1, b + 1, c + 1), {0: 1}, parents))
        pairing[pid] = {0: ONE}
        restriction[(pid, 0)] = restriction[(pid, 1)] = restriction[(pid, 2)] = {0: ONE}

    ample = ample_class(res.inter, res.fixed)
    for k in AMPLE_MULTIPLIERS:
        omega = res.omega(ample, k)
        lefschetz = _lefschetz_data(res, surfaces, walls, omega)
        if lefschetz is None:
            logging.debug(f"[toric:{label}] multiplier {k} is not positive on the strata")
            continue
        try:
            s = make_strata(3, pieces, restriction, pairing, lefschetz, label=label)
        except InvalidIntersectionData as exc:
            logging.debug(f"[toric:{label}] multiplier {k}: {exc}")
            continue
        if hodge_riemann_failures(s):
            logging.debug(f"[toric:{label}] multiplier {k} fails Hodge-Riemann")
            continue
        logging.info(f"[toric:{label}] Lefschetz class {k}.A - sum E, ray order {res.order[:6]}...")
        return s
    raise InvalidIntersectionData("no Lefschetz class found among the ample multipliers",
                                  {"multipliers": list(AMPLE_MULTIPLIERS)})


def _lefschetz_data(res: PencilResolution, surfaces: Dict[int, SurfaceModel], walls, omega: Vec):
    w = res.coords(omega)
    if res.triple(omega, omega, omega) <= 0:
        return None
    r2 = len(res.basis)
    l2 = [[res.triple(omega, {res.basis[c]: Fraction(1)}, {res.basis[k]: Fraction(1)}) for c in range(r2)]
          for k in range(r2)]
    data = {"X": {0: RationalMatrix.column_vector(w), 2: RationalMatrix.from_rows(l2, cols=r2),
                  4: RationalMatrix.from_rows([w], cols=r2)}}
    restricted = {}
    for i, s in surfaces.items():
        wi = s.convert.apply(res.restrict(s, omega))
        restricted[i] = wi
        gw = s.gram_basis().apply(wi)
        if sum(x * y for x, y in zip(wi, gw)) <= 0:
            return None
        data[f"D{i + 1}"] = {0: RationalMatrix.column_vector(wi), 2: RationalMatrix.from_rows([gw], cols=s.h2)}
    for a, b in walls:
        deg = (surfaces[a].degree_row(surfaces[a].curve(b)).apply(restricted[a]))[0]
        other = (surfaces[b].degree_row(surfaces[b].curve(a)).apply(restricted[b]))[0]
        if deg != other or deg != res.triple(omega, res.proper(a), res.proper(b)):
            raise InvalidIntersectionData("curve degree differs between its two surfaces",
                                          {"curve": (a + 1, b + 1), "degrees": (str(deg), str(other))})
        if deg <= 0:
            return None
        data[f"C{_cone_ids(a, b)}"] = {0: RationalMatrix.from_rows([[deg]], cols=1)}
    for cone in res.fan.cones_of_dim(3):
        data["P" + ".".join(str(x + 1) for x in cone)] = {}
    return data


def lg_strata(p: LatticePolytope, L: LaurentData, ray_order=FORWARD) -> Tuple[StrataComplex, Fan, PoleData]:
    """Polytope and Laurent data to strata: validation, refinement, poles and blow-ups."""
    validate_reflexive(p)
    fan = smooth_refine(spanning_fan(p), p)
    poles = pole_analysis(fan, L, p)
    s = blowup_strata(fan, L, ray_order, poles, label=f"lg-{p.label or L.label or 'toric'}")
    return s, fan, poles
