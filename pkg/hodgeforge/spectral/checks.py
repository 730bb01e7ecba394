"""Invariant suite for the weight spectral sequence.

Every check records into a CheckLedger instead of raising, so a single run
reports all failing axioms at once. `les_check` can be asked to raise
ExactnessFail for callers that want the first failure as an exception.
"""
import logging
from typing import Dict, List, Optional, Tuple

from hodgeforge.core import linalg as la
from hodgeforge.core.errors import D1SquareNonzero, DegenerationFails, ExactnessFail, HodgeforgeError
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.registry import CheckLedger
from hodgeforge.spectral.kgrid import (KCell, KGrid, d1_component, d1_targets, lefschetz_component,
                                       nu_component)
from hodgeforge.spectral.pages import (DIVISOR, NEARBY, OPEN, RELATIVE, SpectralPage, e2_nearby, e2_open,
                                       e2_relative, induced_on_e2, mv_divisor, nu_on_term)
from hodgeforge.spectral.strata import StrataComplex, lefschetz_power


def epsilon(a: int) -> int:
    return -1 if (a * (a - 1) // 2) % 2 else 1


# --- nu ---

def _nu_power(grid: KGrid, c: KCell, r: int) -> Optional[KCell]:
    cur = c
    for _ in range(r):
        hit = nu_component(grid, cur)
        if hit is None:
            return None
        cur = hit[0]
    return cur


def _nu_power_matrix(grid: KGrid, src: List[KCell], dst: List[KCell], r: int) -> RationalMatrix:
    rows = sum(c.dim for c in dst)
    cols = sum(c.dim for c in src)
    offsets, off = {}, 0
    for c in dst:
        offsets[c.key] = off
        off += c.dim
    acc = [[0] * cols for _ in range(rows)]
    c0 = 0
    for c in src:
        t = _nu_power(grid, c, r)
        if t is not None and t.key in offsets:
            r0 = offsets[t.key]
            for x in range(c.dim):
                acc[r0 + x][c0 + x] = 1
        c0 += c.dim
    return RationalMatrix.from_rows(acc, cols=cols) if rows else RationalMatrix.zeros(0, cols)


def _compare_paths(first: Dict[tuple, RationalMatrix], second: Dict[tuple, RationalMatrix]) -> Optional[tuple]:
    for key in sorted(set(first) | set(second)):
        a = first.get(key)
        b = second.get(key)
        if a is None:
            a = RationalMatrix.zeros(b.rows, b.cols)
        if b is None:
            b = RationalMatrix.zeros(a.rows, a.cols)
        if a != b:
            return key
    return None


def _accumulate(acc: Dict[tuple, RationalMatrix], key: tuple, m: RationalMatrix):
    acc[key] = acc[key] + m if key in acc else m


def nu_check(grid: KGrid, page: Optional[SpectralPage] = None, ledger: Optional[CheckLedger] = None) -> CheckLedger:
    """nu^i: K^{-i,j} = K^{i,j}, ker nu^{i+1} on K^{-i,j} is K^{-i,j,0}, [d1, nu] = 0, and nu^r on E2."""
    ledger = ledger or CheckLedger(grid.strata.label)
    tag = "nearby" if grid.shift else "relative"
    bad_iso, bad_ker = [], []
    for (i, j) in sorted({(abs(i), j) for i, j in grid.ij_pairs() if i}):
        src, dst = grid.total(-i, j), grid.total(i, j)
        ds, dd = sum(c.dim for c in src), sum(c.dim for c in dst)
        if ds != dd or (ds and la.rank(_nu_power_matrix(grid, src, dst, i)) != ds):
            bad_iso.append([i, j])
    for (i, j) in grid.ij_pairs():
        if i <= 0:
            ii = -i
            src = grid.total(-ii, j)
            dst = grid.total(ii + 2, j)
            if not src:
                continue
            ker = la.kernel_basis(_nu_power_matrix(grid, src, dst, ii + 1)) if dst else \
                RationalMatrix.identity(sum(c.dim for c in src))
            idx, off = [], 0
            for c in src:
                if c.k == 0:
                    idx.extend(range(off, off + c.dim))
                off += c.dim
            expected = la.standard_basis(off, idx)
            if not la.span_equal(ker, expected):
                bad_ker.append([-ii, j])
    ledger.record(f"{tag}.nu.grid_isomorphism", not bad_iso, {"failing_ij": bad_iso} if bad_iso else None)
    ledger.record(f"{tag}.nu.kernel", not bad_ker, {"failing_ij": bad_ker} if bad_ker else None)

    bad_comm = []
    for key in sorted(grid.cells):
        c = grid.cells[key]
        left: Dict[tuple, RationalMatrix] = {}
        right: Dict[tuple, RationalMatrix] = {}
        for t in d1_targets(grid, c):
            hit = nu_component(grid, t)
            if hit is not None:
                _accumulate(left, hit[0].key, hit[1] @ d1_component(grid, c, t))
        hit = nu_component(grid, c)
        if hit is not None:
            mid = hit[0]
            for t in d1_targets(grid, mid):
                _accumulate(right, t.key, d1_component(grid, mid, t) @ hit[1])
        where = _compare_paths(left, right)
        if where is not None:
            bad_comm.append([list(key), list(where)])
    ledger.record(f"{tag}.nu.commutes_with_d1", not bad_comm, {"failing": bad_comm[:5]} if bad_comm else None)

    if page is not None and not bad_comm:
        bad_e2 = nu_e2_failures(page)
        ledger.record(f"{tag}.nu.e2_isomorphism", not bad_e2, {"failing_qr": bad_e2} if bad_e2 else None)
    return ledger


def nu_e2_failures(page: SpectralPage) -> List[List[int]]:
    """(q, r) where nu^r: Gr^W_{q+r} -> Gr^W_{q-r} of the abutment is not an isomorphism."""
    out = []
    for q in page.degrees():
        top = max((w for (w, qq), t in page.e2.items() if qq == q and t.dim), default=None)
        if top is None:
            continue
        for r in range(1, abs(top - q) + 1):
            hi, lo = page.e2_dim(q + r, q), page.e2_dim(q - r, q)
            if hi != lo:
                out.append([q, r])
                continue
            if not hi:
                continue
            op = RationalMatrix.identity(page.e1_dim(q + r, q))
            for step in range(r):
                op = nu_on_term(page, (q + r - 2 * step, q)) @ op
            induced = induced_on_e2(page, page, (q + r, q), (q - r, q), op)
            if la.rank(induced) != hi:
                out.append([q, r])
    return out


# --- Lefschetz and polarization ---

def psi_partner(grid: KGrid, i: int, j: int) -> Tuple[int, int]:
    """(i, j) of the cells paired with K^{i,j}; the nearby grid is centred one degree lower."""
    return -i, -j - 2 * grid.shift


def psi_block(grid: KGrid, x: KCell, y: KCell) -> Optional[RationalMatrix]:
    """psi on K^{i,j,k} x K^{-i,-j,k-i}: eps(i+j-n) times the stratum pairing."""
    if (y.i, y.j) != psi_partner(grid, x.i, x.j) or y.k != x.k - x.i:
        return None
    return grid.strata.gram(x.level, x.degree).scale(epsilon(x.i + x.j - grid.n + 2 * grid.shift))


def is_positive_definite(q: RationalMatrix) -> bool:
    """Symmetric elimination; every pivot must be positive."""
    if q != q.transpose():
        return False
    rows = q.to_rows()
    n = q.rows
    for c in range(n):
        p = rows[c][c]
        if p <= 0:
            return False
        for r in range(c + 1, n):
            f = rows[r][c] / p
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return True


def hodge_riemann_failures(s: StrataComplex) -> List[dict]:
    out = []
    for piece in s.pieces.values():
        if piece.pid not in s.lefschetz:
            continue
        d = s.dim_of(piece.level)
        for a in range(0, d + 1, 2):
            if not piece.b(a):
                continue
            prim = la.kernel_basis(lefschetz_power(s, piece, a, d - a + 1))
            if not prim.cols:
                continue
            form = s.pairing[piece.pid][a] @ lefschetz_power(s, piece, a, d - a)
            form = form.scale((-1) ** (a // 2))
            if not is_positive_definite(prim.transpose() @ form @ prim):
                out.append({"piece": piece.pid, "degree": a})
    return out


def lefschetz_pairing_check(s: StrataComplex, grid: KGrid, ledger: Optional[CheckLedger] = None) -> CheckLedger:
    ledger = ledger or CheckLedger(s.label)
    tag = "nearby" if grid.shift else "relative"
    bad_comm, bad_psi = [], []
    for key in sorted(grid.cells):
        c = grid.cells[key]
        left: Dict[tuple, RationalMatrix] = {}
        right: Dict[tuple, RationalMatrix] = {}
        for t in d1_targets(grid, c):
            hit = lefschetz_component(grid, t)
            if hit is not None:
                _accumulate(left, hit[0].key, hit[1] @ d1_component(grid, c, t))
        hit = lefschetz_component(grid, c)
        if hit is not None:
            for t in d1_targets(grid, hit[0]):
                _accumulate(right, t.key, d1_component(grid, hit[0], t) @ hit[1])
        where = _compare_paths(left, right)
        if where is not None:
            bad_comm.append([list(key), list(where)])

        # psi(d1 x, y) = psi(x, d1 y) for y paired with K^{i+1,j+1}
        for y in grid.total(*psi_partner(grid, c.i + 1, c.j + 1)):
            lhs = RationalMatrix.zeros(c.dim, y.dim)
            for t in d1_targets(grid, c):
                form = psi_block(grid, t, y)
                if form is not None:
                    lhs = lhs + d1_component(grid, c, t).transpose() @ form
            rhs = RationalMatrix.zeros(c.dim, y.dim)
            for u in d1_targets(grid, y):
                form = psi_block(grid, c, u)
                if form is not None:
                    rhs = rhs + form @ d1_component(grid, y, u)
            if lhs != rhs:
                bad_psi.append([list(key), list(y.key)])
    ledger.record(f"{tag}.lefschetz.commutes_with_d1", not bad_comm, {"failing": bad_comm[:5]} if bad_comm else None)
    ledger.record(f"{tag}.psi.adjoint", not bad_psi, {"failing": bad_psi[:5]} if bad_psi else None)
    hr = hodge_riemann_failures(s)
    ledger.record("strata.hodge_riemann", not hr, {"failing": hr} if hr else None)
    return ledger


# --- exact sequences ---

def exactness_failure(dims: List[int]) -> Optional[int]:
    """Position where a sequence 0 -> V_0 -> ... -> V_last -> 0 of these dims cannot be exact."""
    image = 0
    for pos, d in enumerate(dims):
        image = d - image
        if image < 0:
            return pos
    return len(dims) - 1 if image else None


def _dims(page: Optional[SpectralPage], q: int, w: int) -> int:
    return page.e2_dim(w, q) if page is not None else 0


def page_is_hodge_tate(page: SpectralPage) -> bool:
    return all(t.hodge_p is not None and t.weight == 2 * t.hodge_p for t in page.e2.values() if t.dim)


def les_check(rel: SpectralPage, open_: SpectralPage, near: SpectralPage, ledger: Optional[CheckLedger] = None,
              raise_on_failure: bool = False) -> CheckLedger:
    """... -> H^k(Y,Y_inf) -> H^k(Y) -> H^k(Y_inf) -> H^{k+1}(Y,Y_inf) -> ..., weight by weight."""
    ledger = ledger or CheckLedger(rel.strata.label)
    n = rel.strata.n
    weights = sorted(set(rel.weights()) | set(open_.weights()) | set(near.weights()))
    failing = []
    for w in weights:
        seq = []
        for k in range(0, 2 * n + 1):
            seq.extend([_dims(rel, k, w), _dims(open_, k, w), _dims(near, k, w)])
        pos = exactness_failure(seq)
        if pos is not None:
            failing.append({"weight": w, "k": pos // 3, "term": ("relative", "open", "nearby")[pos % 3]})
    total = []
    for k in range(0, 2 * n + 1):
        total.extend([rel.abutment_dims().get(k, 0), open_.abutment_dims().get(k, 0),
                      near.abutment_dims().get(k, 0)])
    ledger.record("les.per_weight", not failing, {"failing": failing} if failing else None)
    ledger.record("les.total", exactness_failure(total) is None)
    hts = [page_is_hodge_tate(p) for p in (rel, open_, near)]
    ledger.record("les.ht_two_of_three", sum(hts) != 2, {"relative": hts[0], "open": hts[1], "nearby": hts[2]})
    if failing and raise_on_failure:
        raise ExactnessFail("long exact sequence of the pair fails", failing[0])
    return ledger


def clemens_schmid_check(near: SpectralPage, divisor: SpectralPage, ledger: Optional[CheckLedger] = None,
                         raise_on_failure: bool = False) -> CheckLedger:
    """H_{2n-k}(D)(-n) -> H^k(D) -> H^k(Y_inf) -> H^k(Y_inf)(-1) -> H_{2n-2-k}(D)(-n) -> H^{k+2}(D)."""
    ledger = ledger or CheckLedger(near.strata.label)
    n = near.strata.n

    def homology(k: int, w: int) -> int:
        # Gr_w of H_{2n-k}(D)(-n) is dual to Gr_{2n-w} H^{2n-k}(D)
        return _dims(divisor, 2 * n - k, 2 * n - w)

    weights = sorted(set(near.weights()) | {w + 2 for w in near.weights()} |
                     {2 * n - w for w in divisor.weights()} | set(divisor.weights()))
    failing = []
    for parity in (0, 1):
        for w in weights:
            seq = []
            for k in range(parity, 2 * n + 1, 2):
                seq.extend([homology(k, w), _dims(divisor, k, w), _dims(near, k, w), _dims(near, k, w - 2)])
            k_end = parity + 2 * ((2 * n - parity) // 2 + 1)
            seq.append(homology(k_end, w))
            pos = exactness_failure(seq)
            if pos is not None:
                failing.append({"parity": parity, "weight": w, "position": pos})
    ledger.record("clemens_schmid.per_weight", not failing, {"failing": failing} if failing else None)
    if failing and raise_on_failure:
        raise ExactnessFail("Clemens-Schmid sequence fails", failing[0])
    return ledger


# --- Euler characteristics ---

def strata_euler(s: StrataComplex) -> Dict[str, int]:
    top = s.max_level()
    chi_x = s.euler(0)
    chi_d = sum((-1) ** (m - 1) * s.euler(m) for m in range(1, top + 1))
    chi_near = sum((-1) ** (m - 1) * m * s.euler(m) for m in range(1, top + 1))
    chi_y = chi_x - chi_d
    return {"X": chi_x, "D": chi_d, "Y": chi_y, "Y_inf": chi_near, "Y,Y_inf": chi_y - chi_near}


def euler_check(s: StrataComplex, pages: Dict[str, SpectralPage], ledger: Optional[CheckLedger] = None) -> CheckLedger:
    ledger = ledger or CheckLedger(s.label)
    chi = strata_euler(s)
    expected = {RELATIVE: chi["Y,Y_inf"], OPEN: chi["Y"], NEARBY: chi["Y_inf"], DIVISOR: chi["D"]}
    for kind, page in sorted(pages.items()):
        got = page.euler_e2()
        ledger.record(f"euler.{kind}", got == expected[kind], {"expected": expected[kind], "got": got})
        ledger.record(f"euler.{kind}.e1", page.euler_e1() == got, {"e1": page.euler_e1(), "e2": got})
    return ledger


# --- the whole suite ---

def spectral_suite(s: StrataComplex, threads: Optional[int] = None,
                   ledger: Optional[CheckLedger] = None) -> Tuple[Dict[str, SpectralPage], CheckLedger]:
    """Build the four pages and run every spectral invariant; construction errors become failed checks."""
    ledger = ledger or CheckLedger(s.label)
    pages: Dict[str, SpectralPage] = {}
    builders = ((RELATIVE, e2_relative), (NEARBY, e2_nearby), (OPEN, e2_open), (DIVISOR, mv_divisor))
    for kind, build in builders:
        try:
            pages[kind] = build(s, threads)
        except D1SquareNonzero as exc:
            ledger.record(f"{kind}.d1_square_zero", False, {"error": type(exc).__name__, "message": str(exc)})
            continue
        except DegenerationFails as exc:
            ledger.record(f"{kind}.d1_square_zero", True)
            ledger.record(f"{kind}.degenerates_at_e2", False, {"by": "weight purity", "message": str(exc),
                                                               "location": exc.location})
            continue
        except HodgeforgeError as exc:
            ledger.record(f"{kind}.build", False, {"error": type(exc).__name__, "message": str(exc)})
            continue
        # the builders square every d1 and run degeneration_check before returning
        ledger.record(f"{kind}.d1_square_zero", True)
        levels = sorted({sm.level for terms in pages[kind].terms.values() for sm in terms})
        ledger.record(f"{kind}.degenerates_at_e2", True,
                      {"by": "weight purity", "pieces": sum(len(s.level(m)) for m in levels)})
    for kind in (RELATIVE, NEARBY):
        page = pages.get(kind)
        if page is not None and page.grid is not None:
            nu_check(page.grid, page, ledger)
            lefschetz_pairing_check(s, page.grid, ledger)
    if all(k in pages for k in (RELATIVE, OPEN, NEARBY)):
        les_check(pages[RELATIVE], pages[OPEN], pages[NEARBY], ledger)
    if NEARBY in pages and DIVISOR in pages:
        clemens_schmid_check(pages[NEARBY], pages[DIVISOR], ledger)
    euler_check(s, pages, ledger)
    failed = ledger.failures()
    logging.info(f"[spectral:{s.label}] suite: {len(ledger.names()) - len(failed)} passed, {len(failed)} failed")
    return pages, ledger
