"""E1 pages, their rows of fixed weight, and E2.

Every page is stored row by row: the E1 term at (w, q) is a direct sum of
stratum cohomology groups, each pure of weight w, and d1 maps (w, q) to
(w, q+1). Rows are independent, so E2 is computed per weight on the worker
pool.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import D1SquareNonzero, DegenerationFails
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.pool import run_pool
from hodgeforge.spectral.kgrid import KGrid, build_K, check_d1_square, d1_component
from hodgeforge.spectral.strata import Piece, StrataComplex, hard_lefschetz_failure

Term = Tuple[int, int]  # (weight, q)

RELATIVE = "relative"
NEARBY = "nearby"
OPEN = "open"
DIVISOR = "divisor"


@dataclass(frozen=True)
class Summand:
    key: tuple
    level: int
    degree: int
    twist: int  # Hodge type p = degree/2 + twist
    weight: int
    q: int
    dim: int

    @property
    def hodge_p(self) -> Optional[int]:
        if self.degree % 2:
            return None
        return self.degree // 2 + self.twist


@dataclass
class E2Term:
    weight: int
    q: int
    dim: int
    cocycles: RationalMatrix
    coboundaries: RationalMatrix
    representatives: RationalMatrix
    hodge_p: Optional[int]


@dataclass
class SpectralPage:
    kind: str
    strata: StrataComplex
    terms: Dict[Term, List[Summand]]
    d1: Dict[Term, RationalMatrix] = field(default_factory=dict)
    e2: Dict[Term, E2Term] = field(default_factory=dict)
    grid: Optional[KGrid] = None

    def e1_dim(self, w: int, q: int) -> int:
        return sum(s.dim for s in self.terms.get((w, q), []))

    def e2_dim(self, w: int, q: int) -> int:
        t = self.e2.get((w, q))
        return t.dim if t else 0

    def weights(self) -> List[int]:
        return sorted({w for w, _ in self.terms})

    def degrees(self) -> List[int]:
        return sorted({q for _, q in self.terms})

    def graded(self, q: int) -> Dict[int, int]:
        """Gr^W dims of the abutment in degree q."""
        return {w: t.dim for (w, qq), t in sorted(self.e2.items()) if qq == q and t.dim}

    def abutment_dims(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for (w, q), t in self.e2.items():
            if t.dim:
                out[q] = out.get(q, 0) + t.dim
        return dict(sorted(out.items()))

    def euler_e1(self) -> int:
        return sum((-1) ** q * self.e1_dim(w, q) for (w, q) in self.terms)

    def euler_e2(self) -> int:
        return sum((-1) ** q * t.dim for (w, q), t in self.e2.items())

    def offsets(self, term: Term) -> Dict[tuple, Tuple[int, Summand]]:
        out, off = {}, 0
        for s in self.terms.get(term, []):
            out[s.key] = (off, s)
            off += s.dim
        return out

    def operator(self, src: Term, dst: Term,
                 fn: Callable[[Summand], Optional[Tuple[tuple, RationalMatrix]]]) -> RationalMatrix:
        """Assemble E1(src) -> E1(dst) from a summand-wise map returning (target key, block)."""
        dst_off = self.offsets(dst)
        rows = self.e1_dim(*dst)
        cols = self.e1_dim(*src)
        acc = [[0] * cols for _ in range(rows)]
        c0 = 0
        for s in self.terms.get(src, []):
            hit = fn(s)
            if hit is not None and hit[0] in dst_off:
                r0, _ = dst_off[hit[0]]
                block = hit[1]
                for a in range(block.rows):
                    for b in range(block.cols):
                        if block[a, b]:
                            acc[r0 + a][c0 + b] += block[a, b]
            c0 += s.dim
        return RationalMatrix.from_rows(acc, cols=cols) if rows else RationalMatrix.zeros(0, cols)

    def table(self) -> Dict[str, Dict[str, int]]:
        """E1/E2 dims keyed "w,q" for page dumps."""
        return {
            "e1": {f"{w},{q}": self.e1_dim(w, q) for (w, q) in sorted(self.terms) if self.e1_dim(w, q)},
            "e2": {f"{w},{q}": t.dim for (w, q), t in sorted(self.e2.items()) if t.dim},
        }


def _d1_matrix(page: SpectralPage, term: Term, block: Callable[[Summand, Summand], Optional[RationalMatrix]]
               ) -> RationalMatrix:
    w, q = term
    src = page.terms.get(term, [])
    dst = page.terms.get((w, q + 1), [])
    rows = sum(s.dim for s in dst)
    cols = sum(s.dim for s in src)
    acc = [[0] * cols for _ in range(rows)]
    c0 = 0
    for s in src:
        r0 = 0
        for t in dst:
            m = block(s, t)
            if m is not None:
                for a in range(m.rows):
                    for b in range(m.cols):
                        if m[a, b]:
                            acc[r0 + a][c0 + b] += m[a, b]
            r0 += t.dim
        c0 += s.dim
    return RationalMatrix.from_rows(acc, cols=cols) if rows else RationalMatrix.zeros(0, cols)


def _row_e2(page: SpectralPage, w: int) -> Dict[Term, E2Term]:
    out = {}
    for q in sorted(q for (ww, q) in page.terms if ww == w):
        n = page.e1_dim(w, q)
        if not n:
            continue
        d_out = page.d1.get((w, q), RationalMatrix.zeros(0, n))
        d_in = page.d1.get((w, q - 1))
        if d_in is not None and d_in.cols and not (d_out @ d_in).is_zero():
            raise D1SquareNonzero(f"{page.kind} page: d1^2 != 0 into weight {w}, degree {q + 1}",
                                  {"page": page.kind, "weight": w, "q": q - 1})
        Z = la.kernel_basis(d_out)
        B = la.column_space(d_in) if d_in is not None and d_in.cols else RationalMatrix.zeros(n, 0)
        reps = la.complement(B, Z) if Z.cols else RationalMatrix.zeros(n, 0)
        types = {s.hodge_p for s in page.terms[(w, q)]}
        p = types.pop() if len(types) == 1 else None
        out[(w, q)] = E2Term(w, q, Z.cols - B.cols, Z, B, reps, p)
        logging.debug(f"[spectral:{page.strata.label}] {page.kind} E2 w={w} q={q}: "
                      f"E1={n} ker={Z.cols} im={B.cols}")
    return out


def _build_page(kind: str, s: StrataComplex, summands: List[Summand],
                block: Callable[[Summand, Summand], Optional[RationalMatrix]],
                grid: Optional[KGrid] = None, threads: Optional[int] = None) -> SpectralPage:
    terms: Dict[Term, List[Summand]] = {}
    for sm in summands:
        terms.setdefault((sm.weight, sm.q), []).append(sm)
    for v in terms.values():
        v.sort(key=lambda sm: sm.key)
    page = SpectralPage(kind, s, dict(sorted(terms.items())), grid=grid)
    for term in page.terms:
        page.d1[term] = _d1_matrix(page, term, block)
    rows = run_pool([(lambda w=w: _row_e2(page, w)) for w in page.weights()], threads)
    for part in rows:
        page.e2.update(part)
    logging.info(f"[spectral:{s.label}] {kind} page: E1 terms={len(page.terms)} "
                 f"E2 dims={page.abutment_dims()}")
    return page


def _k_page(kind: str, s: StrataComplex, shift: int, threads: Optional[int]) -> SpectralPage:
    grid = build_K(s, shift)
    check_d1_square(grid)
    summands = [Summand(c.key, c.level, c.degree, c.k - c.i, c.weight, c.q, c.dim) for c in grid.cells.values()]

    def block(src: Summand, dst: Summand) -> Optional[RationalMatrix]:
        return d1_component(grid, grid.cells[src.key], grid.cells[dst.key])

    return _build_page(kind, s, summands, block, grid, threads)


def e2_relative(s: StrataComplex, threads: Optional[int] = None) -> SpectralPage:
    """Gr^W H^q(Y, Y_inf): E1^{-r,q+r} = (+)_k H^{q-r-2k}(D(2k+r))(-r-k)."""
    page = _k_page(RELATIVE, s, 0, threads)
    degeneration_check(page)
    return page


def e2_nearby(s: StrataComplex, threads: Optional[int] = None) -> SpectralPage:
    """Gr^W H^q(Y_inf), the same grid with strata shifted to D(2k+r+1)."""
    page = _k_page(NEARBY, s, 1, threads)
    degeneration_check(page)
    return page


def e2_open(s: StrataComplex, threads: Optional[int] = None) -> SpectralPage:
    """Gr^W H^q(Y): E1^{-m,q+m} = H^{q-m}(D(m))(-m) with the Gysin differential."""
    summands = []
    for m in range(0, s.max_level() + 1):
        for a in range(0, 2 * s.dim_of(m) + 1):
            d = s.h(m, a)
            if d:
                summands.append(Summand((m, a), m, a, m, a + 2 * m, a + m, d))

    def block(src: Summand, dst: Summand) -> Optional[RationalMatrix]:
        if dst.key == (src.level - 1, src.degree + 2):
            return s.gamma(src.level, src.degree)
        return None

    page = _build_page(OPEN, s, summands, block, threads=threads)
    degeneration_check(page)
    return page


def mv_divisor(s: StrataComplex, threads: Optional[int] = None) -> SpectralPage:
    """Gr^W H^q(D): E1^{m,j} = H^j(D(m+1)) with the restriction differential."""
    summands = []
    for m in range(1, s.max_level() + 1):
        for a in range(0, 2 * s.dim_of(m) + 1):
            d = s.h(m, a)
            if d:
                summands.append(Summand((m, a), m, a, 0, a, a + m - 1, d))

    def block(src: Summand, dst: Summand) -> Optional[RationalMatrix]:
        if dst.key == (src.level + 1, src.degree):
            return s.rho(src.level, src.degree)
        return None

    page = _build_page(DIVISOR, s, summands, block, threads=threads)
    degeneration_check(page)
    return page


def degeneration_check(page: SpectralPage) -> Dict[Term, int]:
    """E3 = E2, checked on the pieces the rows are built from.

    d_s for s >= 2 runs from weight w to weight w + 1 - s. A row summand
    H^a(D(m))(twist) sits in weight a + 2*twist, and that is its actual weight
    only when every piece of D(m) is pure: cohomology inside the real
    dimension, Poincare-symmetric Betti numbers and hard Lefschetz on the
    supplied classes. Those are checked here against the strata data, not
    against the row labels. Returns the E3 dims.
    """
    s = page.strata
    seen = set()
    for (w, q), summands in sorted(page.terms.items()):
        for sm in summands:
            if sm.degree + 2 * sm.twist != w:
                raise DegenerationFails(f"{page.kind} page: summand {sm.key} has weight "
                                        f"{sm.degree + 2 * sm.twist} in row {w}",
                                        {"page": page.kind, "weight": w, "q": q, "summand": list(sm.key)})
            if sm.level in seen:
                continue
            seen.add(sm.level)
            for p in s.level(sm.level):
                bad = _impure_degree(s, p)
                if bad is not None:
                    raise DegenerationFails(f"{page.kind} page: piece {p.pid} is not pure in degree {bad}, "
                                            f"row {w} may carry a higher differential",
                                            {"page": page.kind, "weight": w, "q": q, "piece": p.pid,
                                             "degree": bad})
    return {term: t.dim for term, t in page.e2.items() if t.dim}


def _impure_degree(s: StrataComplex, p: Piece) -> Optional[int]:
    top = 2 * s.dim_of(p.level)
    for a, d in sorted(p.betti.items()):
        if d and not 0 <= a <= top:
            return a
    for a in range(0, top + 1):
        if p.b(a) != p.b(top - a):
            return a
    return hard_lefschetz_failure(s, p)


def induced_on_e2(src_page: SpectralPage, dst_page: SpectralPage, src: Term, dst: Term,
                  op: RationalMatrix) -> RationalMatrix:
    """Matrix of the map E2(src) -> E2(dst) induced by a chain map E1(src) -> E1(dst)."""
    a = src_page.e2.get(src)
    b = dst_page.e2.get(dst)
    if a is None or b is None or not a.dim or not b.dim:
        return RationalMatrix.zeros(b.dim if b else 0, a.dim if a else 0)
    image = op @ a.representatives
    basis = la.hstack([b.representatives, b.coboundaries])
    coords = la.coordinates(basis, image)
    return RationalMatrix.from_rows(coords.to_rows()[:b.dim], cols=a.dim)


def nu_on_term(page: SpectralPage, term: Term) -> RationalMatrix:
    """nu: E1(w, q) -> E1(w-2, q), identity blocks K^{i,j,k} -> K^{i+2,j,k+1}."""
    w, q = term
    return page.operator(term, (w - 2, q), lambda sm: ((sm.key[0] + 2, sm.key[1], sm.key[2] + 1),
                                                      RationalMatrix.identity(sm.dim)))
