"""Bounded first-quadrant double complexes and the filtration images of their columns."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import AmbientMismatch, InjectivityFails, NotAComplex
from hodgeforge.core.filtration import Filtration, make_filtration
from hodgeforge.core.linalg import RationalMatrix

Bidegree = Tuple[int, int]

COMMUTING = "commuting"
ANTICOMMUTING = "anticommuting"


@dataclass
class DoubleComplex:
    spaces: Dict[Bidegree, int]
    d1: Dict[Bidegree, RationalMatrix] = field(default_factory=dict)
    d2: Dict[Bidegree, RationalMatrix] = field(default_factory=dict)
    signs: Optional[str] = None  # detected by validate() when left unset

    def dim(self, p: int, q: int) -> int:
        return self.spaces.get((p, q), 0)

    def map1(self, p: int, q: int) -> RationalMatrix:
        return self.d1.get((p, q)) or RationalMatrix.zeros(self.dim(p + 1, q), self.dim(p, q))

    def map2(self, p: int, q: int) -> RationalMatrix:
        return self.d2.get((p, q)) or RationalMatrix.zeros(self.dim(p, q + 1), self.dim(p, q))

    def degrees(self) -> range:
        if not self.spaces:
            return range(0)
        tot = [p + q for p, q in self.spaces]
        return range(min(tot), max(tot) + 1)

    def pieces(self, k: int) -> List[Bidegree]:
        return sorted((p, q) for (p, q), d in self.spaces.items() if p + q == k and d > 0)


@dataclass
class CohomologyGroup:
    degree: int
    dim: int
    cocycles: RationalMatrix
    coboundaries: RationalMatrix
    representatives: RationalMatrix


def make_double_complex(spaces: Mapping[Bidegree, int], d1: Mapping[Bidegree, RationalMatrix],
                        d2: Mapping[Bidegree, RationalMatrix], signs: Optional[str] = None) -> DoubleComplex:
    dc = DoubleComplex({tuple(k): int(v) for k, v in spaces.items() if int(v) > 0},
                       {tuple(k): v for k, v in d1.items()}, {tuple(k): v for k, v in d2.items()}, signs)
    validate(dc)
    return dc


def validate(dc: DoubleComplex) -> str:
    """Check shapes and the square-zero identities; fixes the sign convention."""
    for (p, q), d in dc.spaces.items():
        if p < 0 or q < 0:
            raise NotAComplex(f"C^{p},{q} lies outside the first quadrant", {"p": p, "q": q})
    for name, maps, target in (("d1", dc.d1, lambda p, q: (p + 1, q)), ("d2", dc.d2, lambda p, q: (p, q + 1))):
        for (p, q), m in maps.items():
            tp, tq = target(p, q)
            if (m.rows, m.cols) != (dc.dim(tp, tq), dc.dim(p, q)):
                raise AmbientMismatch(f"{name} at ({p},{q}) has shape {m.rows}x{m.cols}", {"map": name, "p": p, "q": q})
    commute = anticommute = True
    for (p, q) in dc.spaces:
        if not (dc.map1(p + 1, q) @ dc.map1(p, q)).is_zero():
            raise NotAComplex(f"d1 d1 != 0 at ({p},{q})", {"p": p, "q": q})
        if not (dc.map2(p, q + 1) @ dc.map2(p, q)).is_zero():
            raise NotAComplex(f"d2 d2 != 0 at ({p},{q})", {"p": p, "q": q})
        a = dc.map2(p + 1, q) @ dc.map1(p, q)
        b = dc.map1(p, q + 1) @ dc.map2(p, q)
        commute = commute and a == b
        anticommute = anticommute and (a + b).is_zero()
    if dc.signs is None:
        if anticommute:
            dc.signs = ANTICOMMUTING
        elif commute:
            dc.signs = COMMUTING
    ok = {COMMUTING: commute, ANTICOMMUTING: anticommute}.get(dc.signs, False)
    if not ok:
        raise NotAComplex("d1 and d2 neither commute nor anticommute")
    return dc.signs


def total_differential(dc: DoubleComplex, k: int) -> RationalMatrix:
    src = dc.pieces(k)
    dst = dc.pieces(k + 1)
    rows = [dc.dim(*b) for b in dst]
    cols = [dc.dim(*b) for b in src]
    blocks = [[RationalMatrix.zeros(r, c) for c in cols] for r in rows]
    for j, (p, q) in enumerate(src):
        for i, (tp, tq) in enumerate(dst):
            if (tp, tq) == (p + 1, q):
                blocks[i][j] = dc.map1(p, q)
            elif (tp, tq) == (p, q + 1):
                m = dc.map2(p, q)
                blocks[i][j] = m.scale(-1) if dc.signs == COMMUTING and p % 2 else m
    if not rows or not cols:
        return RationalMatrix.zeros(sum(rows), sum(cols))
    return la.vstack([la.hstack(r) for r in blocks])


def _column_filtration_basis(dc: DoubleComplex, k: int, m: int) -> RationalMatrix:
    """F_m C^k: pieces C^{p,q} with -p <= m."""
    n = sum(dc.dim(*b) for b in dc.pieces(k))
    idx = []
    off = 0
    for (p, q) in dc.pieces(k):
        d = dc.dim(p, q)
        if -p <= m:
            idx.extend(range(off, off + d))
        off += d
    return la.standard_basis(n, idx)


def total_cohomology(dc: DoubleComplex) -> Dict[int, CohomologyGroup]:
    if dc.signs is None:
        validate(dc)
    out = {}
    for k in dc.degrees():
        n = sum(dc.dim(*b) for b in dc.pieces(k))
        d_out = total_differential(dc, k)
        d_in = total_differential(dc, k - 1)
        Z = la.kernel_basis(d_out) if n else RationalMatrix.zeros(0, 0)
        B = la.column_space(d_in) if d_in.cols else RationalMatrix.zeros(n, 0)
        if (d_out @ d_in).rows and not (d_out @ d_in).is_zero():
            raise NotAComplex(f"total differential does not square to zero at degree {k}", {"k": k})
        reps = la.complement(B, Z) if n else RationalMatrix.zeros(0, 0)
        out[k] = CohomologyGroup(k, Z.cols - B.cols, Z, B, reps)
    dims = {k: h.dim for k, h in out.items()}
    logging.debug(f"[hodge:dc] total cohomology dims {dims}")
    return out


def column_filtration_images(dc: DoubleComplex) -> Dict[int, Filtration]:
    """G_m H^k = image of H^k(F_m C) in H^k(C), after checking those maps are injective."""
    coh = total_cohomology(dc)
    out = {}
    for k, h in coh.items():
        n = h.cocycles.rows
        ps = [p for p, _ in dc.pieces(k)] + [p for p, _ in dc.pieces(k - 1)]
        if not ps:
            out[k] = make_filtration(h.dim, [(0, RationalMatrix.identity(h.dim))])
            continue
        lo, hi = -max(ps) - 1, -min(ps)
        d_in = total_differential(dc, k - 1)
        # coordinates on H^k: images of the representatives modulo B
        Q = la.quotient_matrix(n, h.coboundaries)
        basis = Q @ h.representatives
        steps = []
        for m in range(lo, hi + 1):
            Fm = _column_filtration_basis(dc, k, m)
            if d_in.cols:
                Fprev = _column_filtration_basis(dc, k - 1, m)
                image = la.column_space(d_in @ Fprev) if Fprev.cols else RationalMatrix.zeros(n, 0)
            else:
                image = RationalMatrix.zeros(n, 0)
            if la.subspace_meet(h.coboundaries, Fm).cols != image.cols:
                raise InjectivityFails(f"H^{k}(F_{m}) -> H^{k} is not injective", {"k": k, "m": m})
            cyc = la.subspace_meet(h.cocycles, Fm) if h.dim else RationalMatrix.zeros(n, 0)
            if cyc.cols:
                coords = la.coordinates(basis, Q @ cyc)
                steps.append((m, la.column_space(coords)))
            else:
                steps.append((m, RationalMatrix.zeros(h.dim, 0)))
        out[k] = make_filtration(h.dim, steps) if h.dim else make_filtration(0, [(0, RationalMatrix.zeros(0, 0))])
    return out


def column_cohomology_dim(dc: DoubleComplex, k: int, m: int) -> int:
    """dim H^k(Gr^F_m C), the cohomology of column p = -m in total degree k."""
    p = -m
    q = k - p
    if q < 0:
        return 0
    d_out = dc.map2(p, q)
    d_in = dc.map2(p, q - 1)
    return dc.dim(p, q) - la.rank(d_out) - la.rank(d_in)
