"""Strata of a simple normal crossing divisor with their cohomology maps.

D(0) = X and D(m) is the disjoint union of the connected components of the
m-fold intersections. Every component ("piece") at level m knows its ordered
index set I = (i_1 < ... < i_m) and, for each position a, the piece of level
m-1 containing it whose index set is I without i_a. Inserting or removing
the index at position a carries the sign (-1)^(a-1); restriction and Gysin
maps use the same signs.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import AmbientMismatch, D1SquareNonzero, InvalidIntersectionData
from hodgeforge.core.linalg import RationalMatrix

# (child piece id, 0-based position of the removed index)
Incidence = Tuple[str, int]


@dataclass
class Piece:
    pid: str
    level: int
    index_set: Tuple[int, ...]
    betti: Dict[int, int]
    parents: Tuple[str, ...] = ()
    # degrees whose cohomology is not a sum of Q(-p)
    non_tate: Tuple[int, ...] = ()

    def b(self, a: int) -> int:
        return self.betti.get(a, 0)

    @property
    def euler(self) -> int:
        return sum((-1) ** a * d for a, d in self.betti.items())


@dataclass
class StrataComplex:
    n: int
    pieces: Dict[str, Piece]
    restriction: Dict[Incidence, Dict[int, RationalMatrix]]
    gysin: Dict[Incidence, Dict[int, RationalMatrix]]
    lefschetz: Dict[str, Dict[int, RationalMatrix]]
    pairing: Dict[str, Dict[int, RationalMatrix]]
    label: str = "strata"
    _cache: Dict[tuple, RationalMatrix] = field(default_factory=dict, repr=False)

    # --- layout ---
    def level(self, m: int) -> List[Piece]:
        return sorted((p for p in self.pieces.values() if p.level == m), key=lambda p: (p.index_set, p.pid))

    def max_level(self) -> int:
        return max((p.level for p in self.pieces.values()), default=0)

    def dim_of(self, m: int) -> int:
        """Complex dimension of the pieces of D(m)."""
        return self.n - m

    def h(self, m: int, a: int) -> int:
        return sum(p.b(a) for p in self.level(m))

    def offsets(self, m: int, a: int) -> Dict[str, int]:
        out, off = {}, 0
        for p in self.level(m):
            out[p.pid] = off
            off += p.b(a)
        return out

    def is_hodge_tate(self) -> bool:
        for p in self.pieces.values():
            if p.non_tate or any(a % 2 and d for a, d in p.betti.items()):
                return False
        return True

    def euler(self, m: int) -> int:
        return sum(p.euler for p in self.level(m))

    # --- assembled level maps ---
    def rho(self, m: int, a: int) -> RationalMatrix:
        """Signed restriction H^a(D(m)) -> H^a(D(m+1))."""
        key = ("rho", m, a)
        if key not in self._cache:
            rows, cols = self.h(m + 1, a), self.h(m, a)
            acc = [[0] * cols for _ in range(rows)]
            src_off = self.offsets(m, a)
            dst_off = self.offsets(m + 1, a)
            for child in self.level(m + 1):
                for pos, parent in enumerate(child.parents):
                    mat = self.restriction.get((child.pid, pos), {}).get(a)
                    if mat is None or mat.rows == 0 or mat.cols == 0:
                        continue
                    _add_block(acc, mat, dst_off[child.pid], src_off[parent], (-1) ** pos)
            self._cache[key] = RationalMatrix.from_rows(acc, cols=cols) if rows else RationalMatrix.zeros(0, cols)
        return self._cache[key]

    def gamma(self, m: int, a: int) -> RationalMatrix:
        """Signed Gysin H^a(D(m)) -> H^(a+2)(D(m-1))."""
        key = ("gamma", m, a)
        if key not in self._cache:
            rows, cols = self.h(m - 1, a + 2), self.h(m, a)
            acc = [[0] * cols for _ in range(rows)]
            src_off = self.offsets(m, a)
            dst_off = self.offsets(m - 1, a + 2)
            for child in self.level(m):
                for pos, parent in enumerate(child.parents):
                    mat = self.gysin.get((child.pid, pos), {}).get(a)
                    if mat is None or mat.rows == 0 or mat.cols == 0:
                        continue
                    _add_block(acc, mat, dst_off[parent], src_off[child.pid], (-1) ** pos)
            self._cache[key] = RationalMatrix.from_rows(acc, cols=cols) if rows else RationalMatrix.zeros(0, cols)
        return self._cache[key]

    def lef(self, m: int, a: int) -> RationalMatrix:
        return self._block_diag_level("lef", self.lefschetz, m, a, a + 2)

    def gram(self, m: int, a: int) -> RationalMatrix:
        """Intersection pairing H^a(D(m)) x H^(top-a)(D(m)) as a block-diagonal matrix."""
        return self._block_diag_level("gram", self.pairing, m, a, 2 * self.dim_of(m) - a)

    def _block_diag_level(self, tag, source, m, a, b) -> RationalMatrix:
        key = (tag, m, a)
        if key not in self._cache:
            blocks = []
            for p in self.level(m):
                mat = source.get(p.pid, {}).get(a)
                if mat is None:
                    mat = RationalMatrix.zeros(p.b(b), p.b(a)) if tag == "lef" else RationalMatrix.zeros(p.b(a), p.b(b))
                blocks.append(mat)
            self._cache[key] = la.block_diag(blocks)
        return self._cache[key]

    def invalidate(self):
        self._cache.clear()


def _add_block(acc, mat: RationalMatrix, r0: int, c0: int, sign: int):
    for i in range(mat.rows):
        row = acc[r0 + i]
        for j in range(mat.cols):
            v = mat[i, j]
            if v:
                row[c0 + j] = row[c0 + j] + sign * v


def derive_gysin(s: StrataComplex, child: Piece, pos: int, a: int) -> RationalMatrix:
    """Gysin H^a(child) -> H^(a+2)(parent) as the adjoint of restriction.

    With j = 2 dim(child) - a the projection formula reads
    P_parent[j] g = r_j^T P_child[j].
    """
    parent = s.pieces[child.parents[pos]]
    j = 2 * s.dim_of(child.level) - a
    rows, cols = parent.b(a + 2), child.b(a)
    r = s.restriction.get((child.pid, pos), {}).get(j)
    if rows == 0 or cols == 0 or r is None or child.b(j) == 0 or parent.b(j) == 0:
        return RationalMatrix.zeros(rows, cols)
    p_parent = s.pairing[parent.pid][j]
    p_child = s.pairing[child.pid][j]
    return la.inverse(p_parent) @ r.transpose() @ p_child


def make_strata(n: int, pieces: List[Piece], restriction: Dict[Incidence, Dict[int, RationalMatrix]],
                pairing: Dict[str, Dict[int, RationalMatrix]],
                lefschetz: Optional[Dict[str, Dict[int, RationalMatrix]]] = None,
                gysin: Optional[Dict[Incidence, Dict[int, RationalMatrix]]] = None,
                label: str = "strata", validate: bool = True) -> StrataComplex:
    s = StrataComplex(n, {p.pid: p for p in pieces}, dict(restriction), {}, dict(lefschetz or {}),
                      dict(pairing), label)
    _check_layout(s)
    _check_pairings(s)
    if gysin:
        s.gysin = dict(gysin)
    else:
        for p in pieces:
            for pos in range(len(p.parents)):
                s.gysin[(p.pid, pos)] = {a: derive_gysin(s, p, pos, a) for a in p.betti if p.b(a)}
    if validate:
        validate_strata(s)
    logging.info(f"[spectral:{label}] strata n={n}: " +
                 ", ".join(f"D({m})={len(s.level(m))}" for m in range(s.max_level() + 1)))
    return s


def _check_layout(s: StrataComplex):
    for p in s.pieces.values():
        top = 2 * s.dim_of(p.level)
        for a, d in p.betti.items():
            if d and not 0 <= a <= top:
                raise InvalidIntersectionData(f"piece {p.pid} has H^{a} beyond real dimension {top}",
                                              {"piece": p.pid, "degree": a})
        expected = p.level if p.level >= 2 or s.level(0) else 0
        if p.level >= 1 and len(p.parents) != expected:
            raise InvalidIntersectionData(f"piece {p.pid} needs {expected} parents, has {len(p.parents)}",
                                          {"piece": p.pid})
        for pos, parent_id in enumerate(p.parents):
            parent = s.pieces.get(parent_id)
            if parent is None:
                raise InvalidIntersectionData(f"unknown parent {parent_id} of {p.pid}", {"piece": p.pid})
            want = p.index_set[:pos] + p.index_set[pos + 1:]
            if parent.level != p.level - 1 or (p.level >= 2 and parent.index_set != want):
                raise InvalidIntersectionData(f"parent {parent_id} of {p.pid} at position {pos + 1} "
                                              f"should have index set {want}", {"piece": p.pid, "position": pos + 1})
            for a, mat in s.restriction.get((p.pid, pos), {}).items():
                if (mat.rows, mat.cols) != (p.b(a), parent.b(a)):
                    raise AmbientMismatch(f"restriction {parent_id}->{p.pid} in degree {a} has shape "
                                          f"{mat.rows}x{mat.cols}", {"piece": p.pid, "degree": a})


def _check_pairings(s: StrataComplex):
    for p in s.pieces.values():
        top = 2 * s.dim_of(p.level)
        for a in range(0, top + 1):
            if p.b(a) != p.b(top - a):
                raise InvalidIntersectionData(f"Poincare duality fails on {p.pid}: b_{a} != b_{top - a}",
                                              {"piece": p.pid, "degree": a})
            if not p.b(a):
                continue
            g = s.pairing.get(p.pid, {}).get(a)
            if g is None or (g.rows, g.cols) != (p.b(a), p.b(top - a)) or la.rank(g) != p.b(a):
                raise InvalidIntersectionData(f"pairing on {p.pid} in degree {a} is missing or degenerate",
                                              {"piece": p.pid, "degree": a})
            # graded commutativity: x.y = (-1)^{a(top-a)} y.x
            dual = s.pairing[p.pid].get(top - a)
            if dual is None or dual != g.transpose().scale((-1) ** (a * (top - a))):
                raise InvalidIntersectionData(f"pairing on {p.pid} is not graded-symmetric between degrees {a} "
                                              f"and {top - a}", {"piece": p.pid, "degree": a})


def validate_strata(s: StrataComplex):
    """Signed restriction and Gysin square to zero; hard Lefschetz on every piece."""
    top_level = s.max_level()
    for m in range(0, top_level):
        for a in range(0, 2 * s.dim_of(m) + 1):
            if s.h(m, a) and not (s.rho(m + 1, a) @ s.rho(m, a)).is_zero():
                raise D1SquareNonzero(f"restriction squares to a nonzero map on H^{a}(D({m}))",
                                      {"level": m, "degree": a, "map": "rho"})
    for m in range(2, top_level + 1):
        for a in range(0, 2 * s.dim_of(m) + 1):
            if s.h(m, a) and not (s.gamma(m - 1, a + 2) @ s.gamma(m, a)).is_zero():
                raise D1SquareNonzero(f"Gysin squares to a nonzero map on H^{a}(D({m}))",
                                      {"level": m, "degree": a, "map": "gamma"})
    for p in s.pieces.values():
        bad = hard_lefschetz_failure(s, p)
        if bad is not None:
            raise InvalidIntersectionData(f"hard Lefschetz fails on {p.pid} in degree {bad}",
                                          {"piece": p.pid, "degree": bad})


def lefschetz_power(s: StrataComplex, p: Piece, a: int, k: int) -> RationalMatrix:
    out = RationalMatrix.identity(p.b(a))
    for t in range(k):
        step = s.lefschetz.get(p.pid, {}).get(a + 2 * t)
        if step is None:
            return RationalMatrix.zeros(p.b(a + 2 * k), p.b(a))
        out = step @ out
    return out


def hard_lefschetz_failure(s: StrataComplex, p: Piece) -> Optional[int]:
    if p.pid not in s.lefschetz:
        return None
    d = s.dim_of(p.level)
    for a in range(0, d + 1):
        if not p.b(a):
            continue
        if la.rank(lefschetz_power(s, p, a, d - a)) != p.b(a):
            return a
    return None
