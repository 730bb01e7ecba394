"""Increasing exhaustive filtrations and monodromy weight filtrations.

A filtration is a step function m -> G_m: zero below ``lo``, the whole space
from ``hi`` on, and in between it equals the last stored step at or below m.
Equality of filtrations is span equality at every index.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import (AmbientMismatch, HodgeforgeError, NotExhaustive,
                                    NotNested, NotNilpotent)
from hodgeforge.core.linalg import RationalMatrix


@dataclass(frozen=True)
class Filtration:
    ambient_dim: int
    steps: Tuple[Tuple[int, RationalMatrix], ...]
    lo: int
    hi: int

    def step(self, m: int) -> RationalMatrix:
        if m >= self.hi:
            return RationalMatrix.identity(self.ambient_dim)
        if m < self.lo:
            return RationalMatrix.zeros(self.ambient_dim, 0)
        current = RationalMatrix.zeros(self.ambient_dim, 0)
        for idx, basis in self.steps:
            if idx > m:
                break
            current = basis
        return current

    def dim_at(self, m: int) -> int:
        return self.step(m).cols

    def graded_dim(self, m: int) -> int:
        return self.dim_at(m) - self.dim_at(m - 1)

    def graded_dims(self) -> Dict[int, int]:
        out = {}
        for m in range(self.lo, self.hi + 1):
            g = self.graded_dim(m)
            if g:
                out[m] = g
        return out

    def shift(self, s: int) -> "Filtration":
        """G'_{m+s} = G_m."""
        return Filtration(self.ambient_dim, tuple((i + s, b) for i, b in self.steps), self.lo + s, self.hi + s)

    def equals(self, other: "Filtration") -> bool:
        if self.ambient_dim != other.ambient_dim:
            return False
        lo = min(self.lo, other.lo) - 1
        hi = max(self.hi, other.hi) + 1
        for m in range(lo, hi + 1):
            a, b = self.step(m), other.step(m)
            if a.cols != b.cols or not la.span_equal(a, b):
                return False
        return True

    def maps_into(self, op: RationalMatrix, target: Optional["Filtration"] = None, offset: int = 0) -> Optional[int]:
        """First m with op(G_m) not inside target_{m+offset}, or None."""
        target = target or self
        if op.cols != self.ambient_dim or op.rows != target.ambient_dim:
            raise AmbientMismatch("operator does not match filtered spaces")
        for m in range(min(self.lo, target.lo - offset) - 1, max(self.hi, target.hi - offset) + 1):
            src = self.step(m)
            if src.cols == 0:
                continue
            if not la.contains(target.step(m + offset), op @ src):
                return m
        return None

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "lo": self.lo, "hi": self.hi,
                "graded_dims": self.graded_dims()}


def make_filtration(ambient_dim: int, steps: Iterable[Tuple[int, RationalMatrix]]) -> Filtration:
    ordered = sorted(((int(i), b) for i, b in steps), key=lambda t: t[0])
    if not ordered:
        raise NotExhaustive("filtration has no steps", {"ambient_dim": ambient_dim})
    seen = set()
    cleaned: List[Tuple[int, RationalMatrix]] = []
    prev: Optional[RationalMatrix] = None
    for idx, basis in ordered:
        if idx in seen:
            raise NotNested(f"index {idx} given twice", {"index": idx})
        seen.add(idx)
        if basis.rows != ambient_dim:
            raise AmbientMismatch(f"step {idx} lives in dimension {basis.rows}, ambient is {ambient_dim}",
                                  {"index": idx})
        basis = la.column_space(basis) if basis.cols else basis
        if prev is not None and not la.contains(basis, prev):
            raise NotNested(f"G_{idx - 1} is not contained in G_{idx}", {"index": idx})
        cleaned.append((idx, basis))
        prev = basis
    if cleaned[-1][1].cols != ambient_dim:
        raise NotExhaustive(f"top step G_{cleaned[-1][0]} has dimension {cleaned[-1][1].cols} < {ambient_dim}",
                            {"index": cleaned[-1][0]})
    nonzero = [i for i, b in cleaned if b.cols > 0]
    full = [i for i, b in cleaned if b.cols == ambient_dim]
    lo = nonzero[0] if nonzero else full[0]
    hi = full[0]
    kept = tuple((i, b) for i, b in cleaned if lo <= i <= hi)
    return Filtration(ambient_dim, kept, lo, hi)


def graded_dim(f: Filtration, m: int) -> int:
    return f.graded_dim(m)


def grading_to_filtration(weights: Sequence, ambient_dim: Optional[int] = None) -> Filtration:
    """G_m = span of basis vectors e_i with -p_i <= m, p_i the weight of e_i."""
    ws = [la.as_rational(w) for w in weights]
    n = len(ws) if ambient_dim is None else ambient_dim
    if n != len(ws):
        raise AmbientMismatch(f"{len(ws)} weights for ambient dimension {n}")
    if n == 0:
        return Filtration(0, ((0, RationalMatrix.zeros(0, 0)),), 0, 0)
    cuts = sorted({math.ceil(-w) for w in ws})
    steps = []
    for m in cuts:
        idx = [i for i, w in enumerate(ws) if -w <= m]
        steps.append((m, la.standard_basis(n, idx)))
    return make_filtration(n, steps)


@dataclass(frozen=True)
class NilpotentOp:
    matrix: RationalMatrix
    nilpotency_index: int

    @classmethod
    def of(cls, matrix: RationalMatrix) -> "NilpotentOp":
        if not matrix.is_square():
            raise AmbientMismatch("nilpotent operator must be square")
        n = matrix.rows
        power = RationalMatrix.identity(n)
        for s in range(n + 1):
            if power.is_zero():
                return cls(matrix, s)
            power = power @ matrix
        raise NotNilpotent(f"N^{n} != 0 on a space of dimension {n}", {"dim": n})

    @property
    def dim(self) -> int:
        return self.matrix.rows


def jordan_chains(N: NilpotentOp) -> List[List[List[Fraction]]]:
    """Exact Jordan basis as chains [g, Ng, ..., N^{L-1} g], longest first."""
    n = N.dim
    s = N.nilpotency_index
    if n == 0:
        return []
    M = N.matrix
    powers = [RationalMatrix.identity(n)]
    for _ in range(s):
        powers.append(powers[-1] @ M)
    kernels = [la.kernel_basis(p) for p in powers]
    at_level: Dict[int, List[List[Fraction]]] = {i: [] for i in range(s + 1)}
    chains: List[List[List[Fraction]]] = []
    for level in range(s, 0, -1):
        below = kernels[level - 1]
        present = at_level[level]
        base = la.hstack([below] + ([RationalMatrix.from_columns(present, rows=n)] if present else []))
        new = la.complement(base, kernels[level])
        for g in new.columns():
            chain = [g]
            for _ in range(level - 1):
                chain.append(M.apply(chain[-1]))
            chains.append(chain)
        for chain in chains:
            # element j of a chain of length L sits at level L - j
            L = len(chain)
            j = L - (level - 1)
            if 0 <= j < L:
                at_level[level - 1].append(chain[j])
    return chains


def _filtration_from_weighted_basis(n: int, vectors: List[List[Fraction]], weights: List[int]) -> Filtration:
    if n == 0:
        return Filtration(0, ((0, RationalMatrix.zeros(0, 0)),), 0, 0)
    steps = []
    for w in sorted(set(weights)):
        cols = [v for v, wt in zip(vectors, weights) if wt <= w]
        steps.append((w, RationalMatrix.from_columns(cols, rows=n)))
    return make_filtration(n, steps)


def weight_filtration(N: NilpotentOp, center: int) -> Filtration:
    """Monodromy weight filtration of N centred at ``center``.

    Built from a Jordan-chain basis, then both defining properties are checked
    on the result before it is returned.
    """
    n = N.dim
    if n == 0:
        return Filtration(0, ((center, RationalMatrix.zeros(0, 0)),), center, center)
    vectors: List[List[Fraction]] = []
    weights: List[int] = []
    for chain in jordan_chains(N):
        L = len(chain)
        for j, v in enumerate(chain):
            vectors.append(v)
            weights.append(center + L - 1 - 2 * j)
    W = _filtration_from_weighted_basis(n, vectors, weights)
    bad = verify_weight_filtration(W, N, center)
    if bad is not None:
        raise HodgeforgeError(f"weight filtration failed its defining property: {bad}",
                              {"center": center, "dim": n})
    logging.debug(f"[filtration] W(N) centred at {center}: {W.graded_dims()}")
    return W


def verify_weight_filtration(W: Filtration, N: NilpotentOp, center: int) -> Optional[str]:
    """None when N W_i <= W_{i-2} and N^j: Gr_{c+j} -> Gr_{c-j} is an isomorphism for all j."""
    m = W.maps_into(N.matrix, W, -2)
    if m is not None:
        return f"N(W_{m}) not inside W_{m - 2}"
    span = max(abs(W.hi - center), abs(W.lo - center)) + 1
    power = RationalMatrix.identity(N.dim)
    for j in range(1, span + 1):
        power = power @ N.matrix
        up = W.graded_dim(center + j)
        down = W.graded_dim(center - j)
        if up != down:
            return f"dim Gr_{center + j} = {up} but dim Gr_{center - j} = {down}"
        if up == 0:
            continue
        image = power @ W.step(center + j)
        total = la.subspace_sum(image, W.step(center - j - 1))
        if total.cols != W.dim_at(center - j):
            return f"N^{j} does not map Gr_{center + j} onto Gr_{center - j}"
    return None


def weight_filtration_convolution(N: NilpotentOp, center: int) -> Filtration:
    """W_{c+l} = sum over j >= max(0,-l) of ker N^{l+j+1} meet im N^j."""
    n = N.dim
    if n == 0:
        return Filtration(0, ((center, RationalMatrix.zeros(0, 0)),), center, center)
    s = max(N.nilpotency_index, 1)
    powers = [RationalMatrix.identity(n)]
    for _ in range(2 * s + 1):
        powers.append(powers[-1] @ N.matrix)
    kers = [la.kernel_basis(p) for p in powers]
    ims = [la.column_space(p) for p in powers]
    steps = []
    for ell in range(-s, s + 1):
        acc = RationalMatrix.zeros(n, 0)
        for j in range(max(0, -ell), s + 1):
            a = ell + j + 1
            if a >= len(kers):
                continue
            acc = la.subspace_sum(acc, la.subspace_meet(kers[a], ims[j]))
        steps.append((center + ell, acc))
    return make_filtration(n, steps)


def random_partition(rng, n: int) -> List[int]:
    parts = []
    left = n
    while left > 0:
        k = int(rng.integers(1, left + 1))
        parts.append(k)
        left -= k
    return sorted(parts, reverse=True)


def jordan_matrix(block_sizes: Sequence[int]) -> RationalMatrix:
    """Nilpotent Jordan form with N e_{i+1} = e_i inside each block."""
    n = sum(block_sizes)
    rows = [[0] * n for _ in range(n)]
    start = 0
    for size in block_sizes:
        for i in range(start, start + size - 1):
            rows[i][i + 1] = 1
        start += size
    return RationalMatrix.from_rows(rows, cols=n)


def random_unimodular(rng, n: int, moves: Optional[int] = None) -> RationalMatrix:
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(moves if moves is not None else 2 * n):
        if n < 2:
            break
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        c = int(rng.integers(-2, 3))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return RationalMatrix.from_rows(rows, cols=n)


def random_nilpotent(rng, n: int, block_sizes: Optional[Sequence[int]] = None) -> NilpotentOp:
    """A conjugate P J P^-1 of a Jordan form by a random unimodular P."""
    sizes = list(block_sizes) if block_sizes is not None else random_partition(rng, n)
    J = jordan_matrix(sizes)
    if n == 0:
        return NilpotentOp.of(J)
    P = random_unimodular(rng, n)
    return NilpotentOp.of(P @ J @ la.inverse(P))
