"""Finite models of rescaling structures.

A model is a graded space V = (+) V^k where every V^k carries a lambda-weight
per basis vector (the grading that defines F) and a nilpotent N_k (the
residue that defines W). F_m V^k is the span of basis vectors with
lambda >= -m; W on V^k is the weight filtration of N_k centred at k.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.constants import FW_SHIFT_CALIBRATED, FW_SHIFT_LITERAL, SAITO_SHIFT_DEFAULT
from hodgeforge.core.errors import AmbientMismatch, NotStrict
from hodgeforge.core.filtration import (Filtration, NilpotentOp, grading_to_filtration, make_filtration,
                                        random_unimodular, weight_filtration)
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.hodge.mixed import HTVerdict, MixedHodgeModel, is_hodge_tate

Table = Dict[Tuple, int]


@dataclass(frozen=True)
class TwistTag:
    half_steps: int


@dataclass(frozen=True)
class Component:
    degree: int
    weights: Tuple[Fraction, ...]
    N: NilpotentOp

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def integral(self) -> bool:
        return all(w.denominator == 1 for w in self.weights)

    def hodge_filtration(self) -> Filtration:
        return grading_to_filtration(self.weights)

    def weight_filtration(self) -> Filtration:
        return weight_filtration(self.N, self.degree)


@dataclass(frozen=True)
class RescalingModel:
    components: Tuple[Component, ...]
    label: str = ""

    def component(self, k: int) -> Optional[Component]:
        for c in self.components:
            if c.degree == k:
                return c
        return None

    def degrees(self) -> List[int]:
        return [c.degree for c in self.components]

    def dims(self) -> Dict[int, int]:
        return {c.degree: c.dim for c in self.components}


def make_component(degree: int, weights: Sequence, N: Optional[RationalMatrix] = None) -> Component:
    ws = tuple(la.as_rational(w) for w in weights)
    n = len(ws)
    mat = N if N is not None else RationalMatrix.zeros(n, n)
    if (mat.rows, mat.cols) != (n, n):
        raise AmbientMismatch(f"N_{degree} is {mat.rows}x{mat.cols} but V^{degree} has dimension {n}",
                              {"degree": degree})
    op = NilpotentOp.of(mat)
    if n:
        F = grading_to_filtration(ws)
        bad = F.maps_into(op.matrix, F, 1)
        if bad is not None:
            raise NotStrict(f"N_{degree} does not map F_{bad} into F_{bad + 1}", {"degree": degree, "index": bad})
    return Component(int(degree), ws, op)


def make_rescaling_model(components: Mapping[int, Tuple[Sequence, Optional[RationalMatrix]]],
                         label: str = "") -> RescalingModel:
    comps = [make_component(k, w, N) for k, (w, N) in sorted(components.items())]
    return RescalingModel(tuple(c for c in comps if c.dim), label)


def tate_object(half_steps: int) -> RescalingModel:
    """T(-h/2): one vector in degree h with lambda-weight h/2 and N = 0."""
    return make_rescaling_model({half_steps: ([Fraction(half_steps, 2)], None)}, label=f"T(-{half_steps}/2)")


def f_pq(m: RescalingModel) -> Table:
    """f^{p,q} = dim Gr^F_{-p} V^{p+q}; p may be half-integral on odd half-twists."""
    out: Table = {}
    for c in m.components:
        for w in c.weights:
            p = _int_or_frac(w)
            key = (p, _int_or_frac(c.degree - w))
            out[key] = out.get(key, 0) + 1
    return out


def h_pq(m: RescalingModel) -> Table:
    """h^{p,q} = dim Gr^W_{2p} V^{p+q}; odd weights are reported by odd_weight_dims."""
    out: Table = {}
    for c in m.components:
        for w, g in c.weight_filtration().graded_dims().items():
            if w % 2:
                continue
            key = (w // 2, c.degree - w // 2)
            out[key] = out.get(key, 0) + g
    return out


def odd_weight_dims(m: RescalingModel) -> Dict[Tuple[int, int], int]:
    out = {}
    for c in m.components:
        for w, g in c.weight_filtration().graded_dims().items():
            if w % 2:
                out[(c.degree, w)] = g
    return out


def _int_or_frac(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def mixed_model(c: Component, label: str = "") -> MixedHodgeModel:
    return MixedHodgeModel(c.dim, c.hodge_filtration(), c.weight_filtration(), label or f"V^{c.degree}")


@dataclass
class HTConditionResult:
    ok: bool
    per_degree: Dict[int, HTVerdict] = field(default_factory=dict)
    non_integral: Dict[int, List[Fraction]] = field(default_factory=dict)

    def certificate(self) -> Dict[int, dict]:
        cert = {}
        for k, v in self.per_degree.items():
            if not v.ok:
                cert[k] = {"cells": v.violations, "odd_weights": v.odd_weights}
        for k, ws in self.non_integral.items():
            cert.setdefault(k, {})["non_integral_weights"] = ws
        return cert


def ht_condition(m: RescalingModel, fw_shift: int = FW_SHIFT_CALIBRATED,
                 literal_shift: int = FW_SHIFT_LITERAL) -> HTConditionResult:
    result = HTConditionResult(ok=True)
    for c in m.components:
        if not c.integral:
            result.non_integral[c.degree] = sorted({w for w in c.weights if w.denominator != 1})
            result.ok = False
            continue
        verdict = is_hodge_tate(mixed_model(c, f"{m.label}:V^{c.degree}"), fw_shift, literal_shift)
        result.per_degree[c.degree] = verdict
        result.ok = result.ok and verdict.ok
    logging.info(f"[hodge:{m.label or 'model'}] Hodge-Tate condition {'holds' if result.ok else 'fails'}")
    return result


@dataclass
class OpposedResult:
    ok: bool
    failing_p: List[int] = field(default_factory=list)
    not_invariant: Optional[int] = None
    shift: int = SAITO_SHIFT_DEFAULT


def halve_weights(W: Filtration) -> Filtration:
    """G_l = W_{2l}."""
    lo = W.lo // 2 - 1
    hi = -((-W.hi) // 2) + 1
    return make_filtration(W.ambient_dim, [(l, W.step(2 * l)) for l in range(lo, hi + 1)])


def saito_opposed(F: Filtration, G: Filtration, N: Optional[NilpotentOp] = None,
                  shift: int = SAITO_SHIFT_DEFAULT) -> OpposedResult:
    """N G_k <= G_k for all k, and F_{-p} (+) G_{p+1+shift} = V for every p."""
    if F.ambient_dim != G.ambient_dim or (N is not None and N.dim != F.ambient_dim):
        raise AmbientMismatch("opposedness needs one ambient space", {"F": F.ambient_dim, "G": G.ambient_dim})
    n = F.ambient_dim
    res = OpposedResult(ok=True, shift=shift)
    if N is not None:
        res.not_invariant = G.maps_into(N.matrix, G, 0)
        if res.not_invariant is not None:
            res.ok = False
    lo = min(-F.hi, G.lo - 1 - shift) - 1
    hi = max(-F.lo, G.hi - 1 - shift) + 2
    for p in range(lo, hi):
        f = F.step(-p)
        g = G.step(p + 1 + shift)
        if f.cols + g.cols != n or la.subspace_meet(f, g).cols:
            res.failing_p.append(p)
    if res.failing_p:
        res.ok = False
    return res


@dataclass
class SpecialityResult:
    ok: bool
    per_degree: Dict[int, OpposedResult] = field(default_factory=dict)

    def certificate(self) -> Dict[int, dict]:
        return {k: {"failing_p": r.failing_p, "not_invariant": r.not_invariant}
                for k, r in self.per_degree.items() if not r.ok}


def speciality(m: RescalingModel, shift: int = SAITO_SHIFT_DEFAULT) -> SpecialityResult:
    """Opposedness of F and G_l = W_{2l} on every V^k."""
    result = SpecialityResult(ok=True)
    for c in m.components:
        if not c.integral:
            # F is indexed by integers only after an even total twist
            c = _shift_to_integral(c)
        r = saito_opposed(c.hodge_filtration(), halve_weights(c.weight_filtration()), c.N, shift)
        result.per_degree[c.degree] = r
        result.ok = result.ok and r.ok
    logging.info(f"[hodge:{m.label or 'model'}] special: {result.ok}")
    return result


def _shift_to_integral(c: Component) -> Component:
    return Component(c.degree + 1, tuple(w + Fraction(1, 2) for w in c.weights), c.N)


def tate_twist_model(m: RescalingModel, half_steps) -> RescalingModel:
    """Tensor with T(-h/2): degrees move by h and lambda-weights by h/2."""
    h = half_steps.half_steps if isinstance(half_steps, TwistTag) else int(half_steps)
    comps = tuple(Component(c.degree + h, tuple(w + Fraction(h, 2) for w in c.weights), c.N)
                  for c in m.components)
    return RescalingModel(comps, m.label)


def same_model(a: RescalingModel, b: RescalingModel) -> bool:
    if a.degrees() != b.degrees():
        return False
    for x, y in zip(a.components, b.components):
        if x.weights != y.weights or x.N.matrix != y.N.matrix:
            return False
    return True


def random_ht_model(rng, max_dim: int = 8, degrees: Sequence[int] = (0, 1, 2, 3, 4),
                    label: str = "random-ht") -> RescalingModel:
    """Hodge-Tate model from Jordan chains, conjugated inside each lambda-block.

    In degree k a chain of length L has weights k+L-1-2j, so L must have the
    parity of k+1; the element N^j g then gets lambda = (k+L-1)/2 - j.
    """
    comps = {}
    for k in degrees:
        budget = int(rng.integers(0, max_dim + 1))
        lengths: List[int] = []
        while budget > 0:
            L = int(rng.integers(1, budget + 1))
            if (L - k - 1) % 2:
                L -= 1
            if L <= 0:
                break
            lengths.append(L)
            budget -= L
        if not lengths:
            continue
        weights: List[int] = []
        pairs: List[Tuple[int, int]] = []  # (source, target) of N
        for L in lengths:
            start = len(weights)
            for j in range(L):
                weights.append((k + L - 1) // 2 - j)
                if j:
                    pairs.append((start + j - 1, start + j))
        n = len(weights)
        rows = [[0] * n for _ in range(n)]
        for src, dst in pairs:
            rows[dst][src] = 1
        N = RationalMatrix.from_rows(rows, cols=n)
        P = _graded_unimodular(rng, weights)
        comps[k] = (weights, P @ N @ la.inverse(P))
    return make_rescaling_model(comps, label)


def _graded_unimodular(rng, weights: Sequence[int]) -> RationalMatrix:
    n = len(weights)
    P = RationalMatrix.identity(n).to_rows()
    for lam in sorted(set(weights)):
        idx = [i for i, w in enumerate(weights) if w == lam]
        block = random_unimodular(rng, len(idx))
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                P[i][j] = block[a, b]
    return RationalMatrix.from_rows(P, cols=n)
