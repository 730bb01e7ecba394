"""Cohomology of smooth complete toric varieties.

Two independent presentations: the Stanley-Reisner quotient (any dimension)
and triple intersection numbers from wall relations (dimension three). The
Fano rescaling model and the ample class search are built on top of them.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import InvalidIntersectionData, NotSmooth
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.rescaling import RescalingModel, make_rescaling_model, tate_twist_model
from hodgeforge.toric.fan import Fan
from hodgeforge.toric.polytope import dot

Monomial = Tuple[int, ...]
DivisorClass = Mapping[int, Fraction]


def _require_smooth_complete(fan: Fan):
    if not fan.is_simplicial:
        raise NotSmooth("fan is not simplicial", {"fan": fan.label})
    fan.check_smooth()
    fan.check_complete()


@dataclass
class SRCohomology:
    """H^{2k}(X_Sigma; Q) as the degree-k part of the Stanley-Reisner quotient."""
    fan: Fan
    bases: List[List[Monomial]]             # standard monomials per degree
    _projectors: List[RationalMatrix] = field(repr=False)
    _monomials: List[List[Monomial]] = field(repr=False)

    @property
    def n(self) -> int:
        return self.fan.dim

    def betti(self) -> List[int]:
        return [len(b) for b in self.bases]

    def reduce(self, k: int, vector: Dict[Monomial, Fraction]) -> List[Fraction]:
        """Coordinates in the standard monomial basis of a degree-k polynomial."""
        index = {m: i for i, m in enumerate(self._monomials[k])}
        col = [Fraction(0)] * len(index)
        for m, c in vector.items():
            col[index[tuple(sorted(m))]] += c
        return self._projectors[k].apply(col)

    def cup(self, divisor: DivisorClass, k: int) -> RationalMatrix:
        """Matrix of (divisor cup): H^{2k} -> H^{2k+2} in standard monomial coordinates."""
        cols = []
        for b in self.bases[k]:
            poly: Dict[Monomial, Fraction] = {}
            for rho, c in divisor.items():
                if c:
                    m = tuple(sorted(b + (rho,)))
                    poly[m] = poly.get(m, Fraction(0)) + Fraction(c)
            cols.append(self.reduce(k + 1, poly))
        if not cols:
            return RationalMatrix.zeros(len(self.bases[k + 1]), 0)
        return RationalMatrix.from_columns(cols, rows=len(self.bases[k + 1]))

    def c1(self) -> Dict[int, Fraction]:
        return {i: Fraction(1) for i in range(len(self.fan.rays))}

    def integral(self, monomial: Monomial) -> Fraction:
        """Degree of a top-degree monomial, normalised by a maximal cone being one point."""
        top = self.reduce(self.n, {tuple(sorted(monomial)): Fraction(1)})
        point = self.reduce(self.n, {tuple(self.fan.cones[0]): Fraction(1)})
        return top[0] / point[0]

    def hard_lefschetz(self, divisor: Optional[DivisorClass] = None) -> bool:
        """L^{n-2k}: H^{2k} -> H^{2n-2k} is an isomorphism for every k."""
        divisor = divisor or self.c1()
        for k in range(self.n // 2 + 1):
            if len(self.bases[self.n - k]) != len(self.bases[k]):
                return False
            m = RationalMatrix.identity(len(self.bases[k]))
            for j in range(self.n - 2 * k):
                m = self.cup(divisor, k + j) @ m
            if la.rank(m) != len(self.bases[k]):
                return False
        return True


def _non_faces(fan: Fan) -> List[Tuple[int, ...]]:
    """Minimal ray sets spanning no cone."""
    cones = [set(c) for c in fan.cones]
    out: List[Tuple[int, ...]] = []
    for size in range(2, fan.dim + 2):
        for sub in itertools.combinations(range(len(fan.rays)), size):
            if any(set(f) <= set(sub) for f in out):
                continue
            if not any(set(sub) <= c for c in cones):
                out.append(sub)
    return out


def sr_cohomology(fan: Fan) -> SRCohomology:
    _require_smooth_complete(fan)
    r, n = len(fan.rays), fan.dim
    non_faces = _non_faces(fan)
    bases, projectors, monomials = [], [], []
    for k in range(n + 1):
        mons = list(itertools.combinations_with_replacement(range(r), k))
        index = {m: i for i, m in enumerate(mons)}
        rel_cols = []
        for m in mons:
            if any(all(x in m for x in nf) for nf in non_faces):
                col = [0] * len(mons)
                col[index[m]] = 1
                rel_cols.append(col)
        if k:
            for lower in itertools.combinations_with_replacement(range(r), k - 1):
                for coord in range(n):
                    col = [Fraction(0)] * len(mons)
                    for rho, u in enumerate(fan.rays):
                        if u[coord]:
                            col[index[tuple(sorted(lower + (rho,)))]] += u[coord]
                    if any(col):
                        rel_cols.append(col)
        rel = la.column_space(RationalMatrix.from_columns(rel_cols, rows=len(mons))) if rel_cols \
            else RationalMatrix.zeros(len(mons), 0)
        reps = la.complement(rel, RationalMatrix.identity(len(mons)))
        basis = [mons[next(i for i in range(len(mons)) if reps[i, j] == 1)] for j in range(reps.cols)]
        # [reps | rel] is square and invertible; its first rows read off quotient coordinates
        inv = la.inverse(la.hstack([reps, rel]))
        rows = [inv.row(i) for i in range(reps.cols)]
        projectors.append(RationalMatrix.from_rows(rows, cols=len(mons)) if rows
                          else RationalMatrix.zeros(0, len(mons)))
        bases.append(basis)
        monomials.append(mons)
    ring = SRCohomology(fan, bases, projectors, monomials)
    betti = ring.betti()
    if betti != betti[::-1]:
        raise InvalidIntersectionData("Stanley-Reisner dimensions violate Poincare duality", {"betti": betti})
    logging.info(f"[toric:{fan.label}] Stanley-Reisner Betti numbers {betti}")
    return ring


def fano_rescaling(fan: Fan, label: str = "") -> RescalingModel:
    """H^*(X) with lambda(h^p) = n - p in degree n and N = c_1 cup.

    Assembled in degree 0 with lambda = (n - 2p)/2, then moved by n half Tate twists.
    """
    ring = sr_cohomology(fan)
    n = ring.n
    betti = ring.betti()
    total = sum(betti)
    weights: List[Fraction] = []
    offsets = []
    for p, b in enumerate(betti):
        offsets.append(len(weights))
        weights.extend([Fraction(n - 2 * p, 2)] * b)
    rows = [[Fraction(0)] * total for _ in range(total)]
    c1 = ring.c1()
    for p in range(n):
        block = ring.cup(c1, p)
        for i in range(block.rows):
            for j in range(block.cols):
                rows[offsets[p + 1] + i][offsets[p] + j] = block[i, j]
    N = RationalMatrix.from_rows(rows, cols=total)
    model = make_rescaling_model({0: (weights, None if N.is_zero() else N)}, label=label or fan.label)
    return tate_twist_model(model, n)


class ToricIntersection:
    """Triple intersection numbers D_a.D_b.D_c of a smooth complete toric 3-fold."""

    def __init__(self, fan: Fan):
        if fan.dim != 3:
            raise NotSmooth("triple numbers need a 3-dimensional fan", {"dim": fan.dim})
        _require_smooth_complete(fan)
        self.fan = fan
        self.cones3 = {frozenset(c) for c in fan.cones}
        self.cones2 = {frozenset(c) for c in fan.cones_of_dim(2)}
        self.triple = lru_cache(maxsize=None)(self._triple)

    def dual(self, a: int, b: Optional[int] = None) -> List[Fraction]:
        """m in M with <m,u_a> = 1 and <m,u_b> = 0, read off a maximal cone through a (and b)."""
        cone = next(c for c in self.fan.cones if a in c and (b is None or b in c))
        order = [a] + ([b] if b is not None else []) + [x for x in cone if x not in (a, b)]
        U = RationalMatrix.from_columns([self.fan.rays[x] for x in order], rows=3)
        return la.inverse(U).row(0)

    def _distinct(self, a: int, b: int, c: int) -> int:
        return 1 if frozenset((a, b, c)) in self.cones3 else 0

    def _triple(self, a: int, b: int, c: int) -> Fraction:
        a, b, c = sorted((a, b, c))
        if a != b and b != c:
            return Fraction(self._distinct(a, b, c))
        if a == b == c:
            m = self.dual(a)
            return -sum((dot(m, u) * self.triple(rho, a, a) for rho, u in enumerate(self.fan.rays) if rho != a),
                        Fraction(0))
        double, single = (a, c) if a == b else (c, a)
        if frozenset((double, single)) not in self.cones2:
            return Fraction(0)
        m = self.dual(double, single)
        return -sum((dot(m, u) * self._distinct(rho, double, single)
                     for rho, u in enumerate(self.fan.rays) if rho not in (double, single)), Fraction(0))

    def product(self, x: DivisorClass, y: DivisorClass, z: DivisorClass) -> Fraction:
        total = Fraction(0)
        for a, ca in x.items():
            if not ca:
                continue
            for b, cb in y.items():
                if not cb:
                    continue
                for c, cc in z.items():
                    if cc:
                        total += ca * cb * cc * self.triple(a, b, c)
        return total

    def anticanonical(self) -> Dict[int, Fraction]:
        return {i: Fraction(1) for i in range(len(self.fan.rays))}

    def curve_degrees(self, divisor: DivisorClass) -> Dict[Tuple[int, int], Fraction]:
        """D.C_tau for every invariant curve C_tau."""
        out = {}
        for t in self.cones2:
            a, b = sorted(t)
            out[(a, b)] = self.product(divisor, {a: Fraction(1)}, {b: Fraction(1)})
        return out


def triple_numbers(fan: Fan) -> ToricIntersection:
    return ToricIntersection(fan)


def cross_check_triples(fan: Fan, ring: Optional[SRCohomology] = None) -> Optional[Tuple[int, int, int]]:
    """First triple where wall relations and the Stanley-Reisner ring disagree, or None."""
    ring = ring or sr_cohomology(fan)
    inter = ToricIntersection(fan)
    for t in itertools.combinations_with_replacement(range(len(fan.rays)), 3):
        if inter.triple(*t) != ring.integral(t):
            return t
    return None


def ample_class(inter: ToricIntersection, fixed: Sequence[int]) -> Dict[int, Fraction]:
    """Integral ample divisor supported off the rays in `fixed`, via toric Kleiman and linprog.

    Feasibility of D.C_tau >= 1 for every invariant curve is solved in floating
    point, the solution is rationalised and then re-verified exactly.
    """
    rays = [i for i in range(len(inter.fan.rays)) if i not in set(fixed)]
    walls = sorted(tuple(sorted(t)) for t in inter.cones2)
    A = np.array([[-float(inter.triple(r, a, b)) for r in rays] for a, b in walls])
    res = linprog(np.zeros(len(rays)), A_ub=A, b_ub=-np.ones(len(walls)), bounds=[(-1000, 1000)] * len(rays),
                  method="highs")
    if not res.success:
        raise InvalidIntersectionData("no ample class found: the fan is not projective",
                                      {"fan": inter.fan.label, "status": res.message})
    approx = [Fraction(float(x)).limit_denominator(1000) for x in res.x]
    den = 1
    for x in approx:
        den = den * x.denominator // gcd(den, x.denominator)
    divisor = {r: x * int(den) for r, x in zip(rays, approx)}
    bad = sorted(w for w, deg in inter.curve_degrees(divisor).items() if deg <= 0)
    if bad:
        raise InvalidIntersectionData("rationalised ample class fails Kleiman's criterion",
                                      {"fan": inter.fan.label, "curve": bad[0]})
    logging.info(f"[toric:{inter.fan.label}] ample class found on {len(walls)} invariant curves")
    return divisor
