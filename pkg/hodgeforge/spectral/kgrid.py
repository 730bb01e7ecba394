"""The K^{i,j,k} grid of a strata complex and its cell-level maps.

K^{i,j,k} = H^{i+j-2k+n}(D(2k-i+s))(i-k), nonzero only for k >= 0 and k >= i.
s = 0 gives the relative page (D(0) = X), s = 1 the nearby-fibre page.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from hodgeforge.core.errors import D1SquareNonzero
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.spectral.strata import StrataComplex

CellKey = Tuple[int, int, int]


@dataclass(frozen=True)
class KCell:
    i: int
    j: int
    k: int
    level: int
    degree: int
    dim: int
    n: int

    @property
    def key(self) -> CellKey:
        return (self.i, self.j, self.k)

    @property
    def twist(self) -> int:
        """Tate twist (i-k)."""
        return self.i - self.k

    @property
    def weight(self) -> int:
        return self.j - self.i + self.n

    @property
    def q(self) -> int:
        return self.j + self.n

    @property
    def hodge_p(self) -> Optional[int]:
        if self.degree % 2:
            return None
        return self.degree // 2 - self.twist


@dataclass
class KGrid:
    strata: StrataComplex
    shift: int
    cells: Dict[CellKey, KCell]

    @property
    def n(self) -> int:
        return self.strata.n

    def cell(self, i: int, j: int, k: int) -> Optional[KCell]:
        return self.cells.get((i, j, k))

    def total(self, i: int, j: int) -> List[KCell]:
        """Summands of K^{i,j} ordered by k."""
        return sorted((c for c in self.cells.values() if c.i == i and c.j == j), key=lambda c: c.k)

    def ij_pairs(self) -> List[Tuple[int, int]]:
        return sorted({(c.i, c.j) for c in self.cells.values()})

    def dims(self) -> Dict[CellKey, int]:
        return {key: c.dim for key, c in sorted(self.cells.items())}


def build_K(s: StrataComplex, shift: int = 0) -> KGrid:
    n = s.n
    cells = {}
    for m in range(shift, s.max_level() + 1):
        for a in range(0, 2 * s.dim_of(m) + 1):
            dim = s.h(m, a)
            if not dim:
                continue
            # m = 2k - i + shift and k >= i force 0 <= k <= m - shift
            for k in range(0, m - shift + 1):
                i = 2 * k + shift - m
                j = a - i + 2 * k - n
                cells[(i, j, k)] = KCell(i, j, k, m, a, dim, n)
    logging.info(f"[spectral:{s.label}] K grid shift={shift}: {len(cells)} cells, "
                 f"total dim {sum(c.dim for c in cells.values())}")
    return KGrid(s, shift, cells)


def d1_targets(grid: KGrid, c: KCell) -> List[KCell]:
    out = []
    for key in ((c.i + 1, c.j + 1, c.k), (c.i + 1, c.j + 1, c.k + 1)):
        t = grid.cells.get(key)
        if t is not None:
            out.append(t)
    return out


def d1_component(grid: KGrid, src: KCell, dst: KCell) -> Optional[RationalMatrix]:
    """d1' = -gamma into (i+1, j+1, k), d1'' = rho into (i+1, j+1, k+1)."""
    if (dst.i, dst.j) != (src.i + 1, src.j + 1):
        return None
    if dst.k == src.k:
        return -grid.strata.gamma(src.level, src.degree)
    if dst.k == src.k + 1:
        return grid.strata.rho(src.level, src.degree)
    return None


def nu_component(grid: KGrid, src: KCell) -> Optional[Tuple[KCell, RationalMatrix]]:
    """nu: K^{i,j,k} -> K^{i+2,j,k+1} is the identity of the underlying space."""
    dst = grid.cells.get((src.i + 2, src.j, src.k + 1))
    if dst is None:
        return None
    return dst, RationalMatrix.identity(src.dim)


def lefschetz_component(grid: KGrid, src: KCell) -> Optional[Tuple[KCell, RationalMatrix]]:
    dst = grid.cells.get((src.i, src.j + 2, src.k))
    if dst is None:
        return None
    return dst, grid.strata.lef(src.level, src.degree)


def check_d1_square(grid: KGrid):
    """Raise D1SquareNonzero at the first cell where d1 d1 != 0."""
    for key in sorted(grid.cells):
        c = grid.cells[key]
        acc: Dict[CellKey, RationalMatrix] = {}
        for mid in d1_targets(grid, c):
            first = d1_component(grid, c, mid)
            for t in d1_targets(grid, mid):
                step = d1_component(grid, mid, t) @ first
                acc[t.key] = acc[t.key] + step if t.key in acc else step
        for tkey, total in acc.items():
            if not total.is_zero():
                raise D1SquareNonzero(f"d1^2 != 0 from K^{key} to K^{tkey}",
                                      {"cell": list(key), "target": list(tkey), "shift": grid.shift})
    logging.debug(f"[spectral:{grid.strata.label}] d1^2 = 0 on {len(grid.cells)} cells")
