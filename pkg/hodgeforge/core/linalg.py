"""Exact dense linear algebra over the rationals.

Subspaces are always passed around as matrices whose columns span them; the
ambient dimension of such a basis matrix is its row count. Pivoting is
deterministic (first nonzero entry in column order) so every output is
reproducible bit for bit.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from hodgeforge.core.errors import AmbientMismatch

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings; floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "item") and not isinstance(x, float):
        # numpy integer scalars
        return as_rational(x.item())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"entries length {len(self.entries)} != {self.rows}x{self.cols}")

    # --- constructors ---
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat: List[Fraction] = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(as_rational(x) for x in r)
        return cls(len(rows), cols, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: Optional[int] = None) -> "RationalMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            if not columns:
                raise ValueError("row count needed for an empty column list")
            rows = len(columns[0])
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        flat = [Fraction(0)] * (n * n)
        for i in range(n):
            flat[i * n + i] = Fraction(1)
        return cls(n, n, tuple(flat))

    @classmethod
    def column_vector(cls, values: Sequence) -> "RationalMatrix":
        return cls.from_rows([[v] for v in values], cols=1)

    # --- access ---
    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> List[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> List[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> List[List[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> List[List[Fraction]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # --- algebra ---
    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows(self.columns(), cols=self.rows)

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise AmbientMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out: List[Fraction] = []
        orows = other.to_rows()
        zero = Fraction(0)
        for i in range(self.rows):
            acc = [zero] * other.cols
            for k, a in enumerate(self.entries[i * self.cols:(i + 1) * self.cols]):
                if a == 0:
                    continue
                brow = orows[k]
                for j in range(other.cols):
                    b = brow[j]
                    if b != 0:
                        acc[j] += a * b
            out.extend(acc)
        return RationalMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        return RationalMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "RationalMatrix":
        c = as_rational(c)
        return RationalMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def power(self, k: int) -> "RationalMatrix":
        if not self.is_square():
            raise AmbientMismatch("power of a non-square matrix")
        out = RationalMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def apply(self, vector: Sequence) -> List[Fraction]:
        if len(vector) != self.cols:
            raise AmbientMismatch(f"vector of length {len(vector)} for {self.cols} columns")
        v = [as_rational(x) for x in vector]
        return [sum((self.entries[i * self.cols + j] * v[j] for j in range(self.cols) if v[j] != 0), Fraction(0))
                for i in range(self.rows)]

    def _same_shape(self, other: "RationalMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise AmbientMismatch(f"shape {self.rows}x{self.cols} vs {other.rows}x{other.cols}")


# --- stacking helpers ---

def hstack(blocks: Sequence[RationalMatrix], rows: Optional[int] = None) -> RationalMatrix:
    blocks = list(blocks)
    if not blocks:
        return RationalMatrix.zeros(rows or 0, 0)
    n = blocks[0].rows
    for b in blocks:
        if b.rows != n:
            raise AmbientMismatch(f"hstack rows {b.rows} != {n}")
    cols: List[List[Fraction]] = []
    for b in blocks:
        cols.extend(b.columns())
    if not cols:
        return RationalMatrix.zeros(n, 0)
    return RationalMatrix.from_columns(cols, rows=n)


def vstack(blocks: Sequence[RationalMatrix], cols: Optional[int] = None) -> RationalMatrix:
    blocks = list(blocks)
    if not blocks:
        return RationalMatrix.zeros(0, cols or 0)
    n = blocks[0].cols
    rows: List[List[Fraction]] = []
    for b in blocks:
        if b.cols != n:
            raise AmbientMismatch(f"vstack cols {b.cols} != {n}")
        rows.extend(b.to_rows())
    return RationalMatrix.from_rows(rows, cols=n)


def block_diag(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    nr = sum(b.rows for b in blocks)
    nc = sum(b.cols for b in blocks)
    flat = [Fraction(0)] * (nr * nc)
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                flat[(r0 + i) * nc + c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return RationalMatrix(nr, nc, tuple(flat))


# --- elimination ---

def _rref_rows(rows: List[List[Fraction]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    m = [list(r) for r in rows]
    pivots: List[int] = []
    piv_r = 0
    nrows = len(m)
    for c in range(ncols):
        if piv_r >= nrows:
            break
        sel = None
        for r in range(piv_r, nrows):
            if m[r][c] != 0:
                sel = r
                break
        if sel is None:
            continue
        if sel != piv_r:
            m[piv_r], m[sel] = m[sel], m[piv_r]
        prow = m[piv_r]
        inv = 1 / prow[c]
        if inv != 1:
            prow = [x * inv if x != 0 else x for x in prow]
            m[piv_r] = prow
        nz = [j for j in range(c, ncols) if prow[j] != 0]
        for r in range(nrows):
            if r == piv_r:
                continue
            f = m[r][c]
            if f == 0:
                continue
            row = m[r]
            for j in nz:
                row[j] -= f * prow[j]
        pivots.append(c)
        piv_r += 1
    return m, pivots


def rref(m: RationalMatrix) -> Tuple[RationalMatrix, Tuple[int, ...], int]:
    """Reduced row echelon form, pivot columns and rank."""
    reduced, pivots = _rref_rows(m.to_rows(), m.cols)
    out = RationalMatrix.from_rows(reduced, cols=m.cols) if m.rows else m
    return out, tuple(pivots), len(pivots)


def rank(m: RationalMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate on the thinner side
    if m.cols < m.rows:
        m = m.transpose()
    return len(_rref_rows(m.to_rows(), m.cols)[1])


def kernel_basis(m: RationalMatrix) -> RationalMatrix:
    """Columns spanning {x : m x = 0}; count is cols - rank."""
    n = m.cols
    if n == 0:
        return RationalMatrix.zeros(0, 0)
    if m.rows == 0:
        return RationalMatrix.identity(n)
    reduced, pivots = _rref_rows(m.to_rows(), n)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    if not basis:
        return RationalMatrix.zeros(n, 0)
    return RationalMatrix.from_columns(basis, rows=n)


def column_space(m: RationalMatrix) -> RationalMatrix:
    """Independent subset of the columns of m spanning its image."""
    if m.cols == 0 or m.rows == 0:
        return RationalMatrix.zeros(m.rows, 0)
    _, pivots = _rref_rows(m.to_rows(), m.cols)
    if not pivots:
        return RationalMatrix.zeros(m.rows, 0)
    return RationalMatrix.from_columns([m.column(j) for j in pivots], rows=m.rows)


def _check_ambient(a: RationalMatrix, b: RationalMatrix):
    if a.rows != b.rows:
        raise AmbientMismatch(f"ambient dimensions differ: {a.rows} vs {b.rows}",
                              {"left": a.rows, "right": b.rows})


def subspace_sum(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    _check_ambient(a, b)
    return column_space(hstack([a, b]))


def subspace_meet(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Basis of span(a) meet span(b), via the kernel of [a | -b]."""
    _check_ambient(a, b)
    if a.cols == 0 or b.cols == 0:
        return RationalMatrix.zeros(a.rows, 0)
    a = column_space(a)
    b = column_space(b)
    if a.cols == 0 or b.cols == 0:
        return RationalMatrix.zeros(a.rows, 0)
    ker = kernel_basis(hstack([a, -b]))
    if ker.cols == 0:
        return RationalMatrix.zeros(a.rows, 0)
    coeffs = RationalMatrix.from_rows(ker.to_rows()[:a.cols], cols=ker.cols)
    return column_space(a @ coeffs)


def dim(basis: RationalMatrix) -> int:
    return rank(basis)


def contains(big: RationalMatrix, small: RationalMatrix) -> bool:
    """span(small) is inside span(big)."""
    _check_ambient(big, small)
    if small.cols == 0:
        return True
    return rank(hstack([big, small])) == rank(big)


def span_equal(a: RationalMatrix, b: RationalMatrix) -> bool:
    return contains(a, b) and contains(b, a)


def quotient_matrix(ambient_dim: int, sub: RationalMatrix) -> RationalMatrix:
    """Surjection onto ambient/span(sub); its kernel is exactly span(sub)."""
    if sub.rows != ambient_dim:
        raise AmbientMismatch(f"subspace lives in dimension {sub.rows}, ambient is {ambient_dim}")
    if sub.cols == 0:
        return RationalMatrix.identity(ambient_dim)
    functionals = kernel_basis(sub.transpose())
    if functionals.cols == 0:
        return RationalMatrix.zeros(0, ambient_dim)
    return functionals.transpose()


def solve(a: RationalMatrix, b: RationalMatrix) -> Optional[RationalMatrix]:
    """One solution x of a x = b (b may have several columns), or None."""
    if a.rows != b.rows:
        raise AmbientMismatch(f"solve: {a.rows} equations vs right-hand side of {b.rows} rows")
    n = a.cols
    aug = [ra + rb for ra, rb in zip(a.to_rows(), b.to_rows())]
    reduced, pivots = _rref_rows(aug, n + b.cols)
    if any(p >= n for p in pivots):
        return None
    x = [[Fraction(0)] * b.cols for _ in range(n)]
    for r, p in enumerate(pivots):
        for j in range(b.cols):
            x[p][j] = reduced[r][n + j]
    return RationalMatrix.from_rows(x, cols=b.cols) if n else RationalMatrix.zeros(0, b.cols)


def inverse(m: RationalMatrix) -> RationalMatrix:
    if not m.is_square():
        raise AmbientMismatch("inverse of a non-square matrix")
    x = solve(m, RationalMatrix.identity(m.rows))
    if x is None or rank(m) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return x


def coordinates(basis: RationalMatrix, vectors: RationalMatrix) -> RationalMatrix:
    """Coordinates of vectors (columns) in an independent basis; ValueError if outside the span."""
    x = solve(basis, vectors)
    if x is None:
        raise ValueError("vector is not in the span of the basis")
    return x


def complement(sub: RationalMatrix, within: RationalMatrix) -> RationalMatrix:
    """Columns of `within` completing a basis of span(sub) to one of span(sub + within)."""
    _check_ambient(sub, within)
    if within.cols == 0 or sub.rows == 0:
        return RationalMatrix.zeros(sub.rows, 0)
    base = column_space(sub)
    # pivots of [base | within] beyond the base block pick the complement
    joined = hstack([base, within])
    _, pivots = _rref_rows(joined.to_rows(), joined.cols)
    picked = [within.column(p - base.cols) for p in pivots if p >= base.cols]
    if not picked:
        return RationalMatrix.zeros(sub.rows, 0)
    return RationalMatrix.from_columns(picked, rows=sub.rows)


def determinant(m: RationalMatrix) -> Fraction:
    if not m.is_square():
        raise AmbientMismatch("determinant of a non-square matrix")
    rows = m.to_rows()
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        sel = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if sel is None:
            return Fraction(0)
        if sel != c:
            rows[c], rows[sel] = rows[sel], rows[c]
            det = -det
        p = rows[c][c]
        det *= p
        for r in range(c + 1, n):
            f = rows[r][c] / p
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


def standard_basis(n: int, indices: Iterable[int]) -> RationalMatrix:
    idx = list(indices)
    cols = []
    for i in idx:
        v = [0] * n
        v[i] = 1
        cols.append(v)
    if not cols:
        return RationalMatrix.zeros(n, 0)
    return RationalMatrix.from_columns(cols, rows=n)
