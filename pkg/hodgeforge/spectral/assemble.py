"""The rescaling model of an LG pair read off the relative page.

V^q is E2 of the relative page in degree q. The weight-w piece sits in
Hodge index p = w/2 (the strata are Hodge-Tate), and N is induced by nu.
"""
import logging
from fractions import Fraction
from typing import Optional

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import NonHTStrata
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.registry import CheckLedger
from hodgeforge.hodge.rescaling import RescalingModel, make_rescaling_model
from hodgeforge.spectral.pages import SpectralPage, e2_relative, induced_on_e2, nu_on_term
from hodgeforge.spectral.strata import StrataComplex


def _require_hodge_tate(s: StrataComplex):
    for p in sorted(s.pieces.values(), key=lambda p: (p.level, p.pid)):
        odd = [a for a, d in p.betti.items() if a % 2 and d]
        if p.non_tate or odd:
            raise NonHTStrata(f"stratum {p.pid} carries non-Tate cohomology",
                              {"piece": p.pid, "degrees": sorted(set(p.non_tate) | set(odd))})


def assemble_rescaling(s: StrataComplex, page: Optional[SpectralPage] = None,
                       threads: Optional[int] = None) -> RescalingModel:
    _require_hodge_tate(s)
    page = page or e2_relative(s, threads)
    components = {}
    for q in page.degrees():
        pieces = [(w, page.e2[(w, q)]) for w in page.weights() if (w, q) in page.e2 and page.e2[(w, q)].dim]
        if not pieces:
            continue
        offsets, total, weights = {}, 0, []
        for w, t in pieces:
            offsets[w] = total
            total += t.dim
            weights.extend([Fraction(w, 2)] * t.dim)
        acc = [[0] * total for _ in range(total)]
        for w, t in pieces:
            if w - 2 not in offsets:
                continue
            block = induced_on_e2(page, page, (w, q), (w - 2, q), nu_on_term(page, (w, q)))
            r0, c0 = offsets[w - 2], offsets[w]
            for a in range(block.rows):
                for b in range(block.cols):
                    acc[r0 + a][c0 + b] = block[a, b]
        N = RationalMatrix.from_rows(acc, cols=total)
        components[q] = (weights, None if N.is_zero() else N)
    model = make_rescaling_model(components, s.label)
    logging.info(f"[spectral:{s.label}] rescaling model dims {model.dims()}")
    return model


def monodromy_weight_check(model: RescalingModel, page: SpectralPage,
                           ledger: Optional[CheckLedger] = None) -> CheckLedger:
    """The monodromy weight filtration of N centred at q reproduces the E2 weights."""
    ledger = ledger or CheckLedger(page.strata.label)
    failing = []
    for c in model.components:
        got = c.weight_filtration().graded_dims()
        want = page.graded(c.degree)
        if {w: d for w, d in got.items() if d} != want:
            failing.append({"degree": c.degree, "monodromy": got, "spectral": want})
    ledger.record("relative.monodromy_weight", not failing, {"failing": failing} if failing else None)
    return ledger


def nilpotency_ranks(model: RescalingModel, degree: int) -> list:
    """Ranks of N, N^2, ... on V^degree until they vanish."""
    c = model.component(degree)
    if c is None:
        return []
    out, power = [], c.N.matrix
    while not power.is_zero():
        out.append(la.rank(power))
        power = c.N.matrix @ power
    return out
