"""Mixed Hodge structure models over the rationals.

F is increasing, with F_{-p} in the role of the classical F^p. Hodge numbers
are indexed by (p, w): p the F-graded index, w the weight.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.constants import FW_SHIFT_CALIBRATED, FW_SHIFT_LITERAL
from hodgeforge.core.errors import AmbientMismatch, NotExact, NotStrict
from hodgeforge.core.filtration import Filtration, make_filtration
from hodgeforge.core.linalg import RationalMatrix

Cell = Tuple[int, int]


@dataclass(frozen=True)
class MixedHodgeModel:
    ambient_dim: int
    F: Filtration
    W: Filtration
    label: str = ""
    # weight -> False when Gr^W_w is known not to be of Tate type
    tate_tags: Optional[Dict[int, bool]] = None

    def __post_init__(self):
        if self.F.ambient_dim != self.ambient_dim or self.W.ambient_dim != self.ambient_dim:
            raise AmbientMismatch(f"model {self.label!r}: F on {self.F.ambient_dim}, W on {self.W.ambient_dim}, "
                                  f"ambient {self.ambient_dim}")


@dataclass
class HodgePolynomial:
    coefficients: Dict[Cell, int]

    def total(self) -> int:
        return sum(self.coefficients.values())

    def monomials(self) -> Dict[Tuple[int, int], int]:
        """Exponents (a, b) of x^a y^b, with a = p and b = w - p."""
        return {(p, w - p): c for (p, w), c in self.coefficients.items() if c}

    def in_xy_subring(self) -> bool:
        return all(a == b for a, b in self.monomials())

    def render(self) -> str:
        terms = []
        for (a, b), c in sorted(self.monomials().items()):
            mono = "".join(s for s in (_pow("x", a), _pow("y", b)) if s) or "1"
            terms.append(mono if c == 1 else f"{c}{mono if mono != '1' else ''}")
        return " + ".join(terms) if terms else "0"


def _pow(var: str, e: int) -> str:
    if e == 0:
        return ""
    return var if e == 1 else f"{var}^{e}"


@dataclass
class HTVerdict:
    ok: bool
    odd_weights: List[int] = field(default_factory=list)
    violations: List[Cell] = field(default_factory=list)
    non_tate_weights: List[int] = field(default_factory=list)
    fw_calibrated: bool = False
    fw_literal: bool = False
    fw_shift: int = FW_SHIFT_CALIBRATED
    fw_failures: List[int] = field(default_factory=list)


def graded_hodge_numbers(m: MixedHodgeModel) -> Dict[Cell, int]:
    out: Dict[Cell, int] = {}
    F, W = m.F, m.W
    for w, gdim in W.graded_dims().items():
        below = W.step(w - 1)
        here = W.step(w)
        base = below.cols
        prev = 0
        for idx in range(F.lo - 1, F.hi + 1):
            meet = la.subspace_meet(F.step(idx), here)
            cur = la.subspace_sum(meet, below).cols - base
            if cur != prev:
                out[(-idx, w)] = out.get((-idx, w), 0) + cur - prev
            prev = cur
        if prev != gdim:
            raise AmbientMismatch(f"F does not exhaust Gr^W_{w}", {"weight": w})
    return out


def hodge_polynomial(m: MixedHodgeModel) -> HodgePolynomial:
    return HodgePolynomial(graded_hodge_numbers(m))


def _fw_range(m: MixedHodgeModel, shift: int) -> range:
    lo = min(-m.F.hi - 1, (m.W.lo - 2 - shift) // 2 - 1)
    hi = max(-m.F.lo + 1, (m.W.hi - 2 - shift) // 2 + 1)
    return range(lo, hi + 1)


def fw_decomposition(m: MixedHodgeModel, shift: int = FW_SHIFT_CALIBRATED) -> List[int]:
    """Indices j where F_{-j} (+) W_{2j+2+shift} = V fails; empty means it holds everywhere."""
    bad = []
    n = m.ambient_dim
    for j in _fw_range(m, shift):
        f = m.F.step(-j)
        w = m.W.step(2 * j + 2 + shift)
        if f.cols + w.cols != n or la.subspace_meet(f, w).cols != 0:
            bad.append(j)
    return bad


def is_hodge_tate(m: MixedHodgeModel, fw_shift: int = FW_SHIFT_CALIBRATED,
                  literal_shift: int = FW_SHIFT_LITERAL) -> HTVerdict:
    cells = graded_hodge_numbers(m)
    odd = sorted(w for w, g in m.W.graded_dims().items() if w % 2 and g)
    violations = sorted(c for c, n in cells.items() if n and c[1] != 2 * c[0])
    non_tate = sorted(w for w, ok in (m.tate_tags or {}).items() if not ok)
    failures = fw_decomposition(m, fw_shift)
    verdict = HTVerdict(
        ok=not odd and not violations and not non_tate,
        odd_weights=odd,
        violations=violations,
        non_tate_weights=non_tate,
        fw_calibrated=not failures,
        fw_literal=not fw_decomposition(m, literal_shift),
        fw_shift=fw_shift,
        fw_failures=failures,
    )
    if not verdict.ok:
        logging.info(f"[hodge:{m.label or 'mhs'}] not Hodge-Tate: cells {violations}, odd weights {odd}")
    return verdict


def tate_twist(m: MixedHodgeModel, k: int) -> MixedHodgeModel:
    """m(k): F'_i = F_{i-k} and W'_w = W_{w+2k}."""
    tags = {w - 2 * k: t for w, t in m.tate_tags.items()} if m.tate_tags else None
    label = f"{m.label}({k})" if m.label else f"({k})"
    return MixedHodgeModel(m.ambient_dim, m.F.shift(k), m.W.shift(-2 * k), label, tags)


def same_structure(a: MixedHodgeModel, b: MixedHodgeModel) -> bool:
    return a.ambient_dim == b.ambient_dim and a.F.equals(b.F) and a.W.equals(b.W)


def _sum_filtration(a: Filtration, b: Filtration) -> Filtration:
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    steps = [(i, la.block_diag([a.step(i), b.step(i)])) for i in range(lo - 1, hi + 1)]
    return make_filtration(a.ambient_dim + b.ambient_dim, steps)


def direct_sum(a: MixedHodgeModel, b: MixedHodgeModel, label: str = "") -> MixedHodgeModel:
    tags = None
    if a.tate_tags or b.tate_tags:
        tags = dict(a.tate_tags or {})
        for w, t in (b.tate_tags or {}).items():
            tags[w] = tags.get(w, True) and t
    return MixedHodgeModel(a.ambient_dim + b.ambient_dim, _sum_filtration(a.F, b.F), _sum_filtration(a.W, b.W),
                           label or f"{a.label}+{b.label}", tags)


@dataclass
class TwoOfThreeResult:
    ok: bool
    left_ht: bool
    middle_ht: bool
    right_ht: bool


def _check_strict(name: str, f_src: Filtration, f_dst: Filtration, op: RationalMatrix):
    lo = min(f_src.lo, f_dst.lo) - 1
    hi = max(f_src.hi, f_dst.hi) + 1
    image = la.column_space(op)
    for i in range(lo, hi + 1):
        src = f_src.step(i)
        dst = f_dst.step(i)
        mapped = op @ src if src.cols else RationalMatrix.zeros(op.rows, 0)
        if not la.contains(dst, mapped):
            raise NotStrict(f"{name} does not respect the filtration at index {i}", {"map": name, "index": i})
        # strict: im(op) meet dst_i == op(src_i)
        if la.subspace_meet(image, dst).cols != la.rank(mapped):
            raise NotStrict(f"{name} is not strict at index {i}", {"map": name, "index": i})


def ht_two_of_three(left: MixedHodgeModel, middle: MixedHodgeModel, right: MixedHodgeModel,
                    maps: Tuple[RationalMatrix, RationalMatrix],
                    fw_shift: int = FW_SHIFT_CALIBRATED) -> TwoOfThreeResult:
    """Short exact sequence 0 -> left -i-> middle -q-> right -> 0 of mixed Hodge models."""
    i, q = maps
    if (i.rows, i.cols) != (middle.ambient_dim, left.ambient_dim) or \
            (q.rows, q.cols) != (right.ambient_dim, middle.ambient_dim):
        raise AmbientMismatch("maps do not match the three models")
    if la.rank(i) != left.ambient_dim:
        raise NotExact("left map is not injective", {"position": "left"})
    if la.rank(q) != right.ambient_dim:
        raise NotExact("right map is not surjective", {"position": "right"})
    if not (q @ i).is_zero() or la.rank(i) + la.rank(q) != middle.ambient_dim:
        raise NotExact("sequence is not exact in the middle", {"position": "middle"})
    for name, src, dst, op in (("i", left, middle, i), ("q", middle, right, q)):
        _check_strict(f"{name}/F", src.F, dst.F, op)
        _check_strict(f"{name}/W", src.W, dst.W, op)
    gl, gm, gr = graded_hodge_numbers(left), graded_hodge_numbers(middle), graded_hodge_numbers(right)
    for cell in set(gl) | set(gm) | set(gr):
        if gm.get(cell, 0) != gl.get(cell, 0) + gr.get(cell, 0):
            raise NotStrict(f"graded sequence not exact at cell {cell}", {"cell": cell})
    lh = is_hodge_tate(left, fw_shift).ok
    mh = is_hodge_tate(middle, fw_shift).ok
    rh = is_hodge_tate(right, fw_shift).ok
    return TwoOfThreeResult(ok=(not (lh and rh)) or mh, left_ht=lh, middle_ht=mh, right_ht=rh)


def tate_model(p: int, label: str = "") -> MixedHodgeModel:
    """Rank-one Q(-p): weight 2p, F-graded index p."""
    one = RationalMatrix.identity(1)
    F = make_filtration(1, [(-p, one)])
    W = make_filtration(1, [(2 * p, one)])
    return MixedHodgeModel(1, F, W, label or f"Q({-p})")


def model_from_cells(cells: List[Cell], label: str = "") -> MixedHodgeModel:
    """Split model: basis vector i sits in F-graded index p_i and weight w_i."""
    n = len(cells)
    if n == 0:
        empty = make_filtration(0, [(0, RationalMatrix.zeros(0, 0))])
        return MixedHodgeModel(0, empty, empty, label)
    f_steps = []
    for idx in sorted({-p for p, _ in cells}):
        f_steps.append((idx, la.standard_basis(n, [k for k, (p, _) in enumerate(cells) if -p <= idx])))
    w_steps = []
    for w in sorted({w for _, w in cells}):
        w_steps.append((w, la.standard_basis(n, [k for k, (_, wk) in enumerate(cells) if wk <= w])))
    return MixedHodgeModel(n, make_filtration(n, f_steps), make_filtration(n, w_steps), label)
