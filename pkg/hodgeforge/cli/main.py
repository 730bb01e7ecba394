import argparse
import json
import logging
import sys
import time
from contextlib import contextmanager
from typing import Dict, List, Optional

from hodgeforge.cli.report import JSON, MD, RunReport, input_digest, render
from hodgeforge.config.loader import HodgeforgeConfig, apply_env_overrides, load_config
from hodgeforge.core.constants import WHEEL_D_MAX, WHEEL_D_MIN
from hodgeforge.core.errors import HodgeforgeError, SchemaError
from hodgeforge.core.pool import run_pool
from hodgeforge.core.registry import CheckLedger
from hodgeforge.geometry.wheel import load_wheel_spec, wheel_euler_oracle, wheel_strata
from hodgeforge.hodge.rescaling import RescalingModel, f_pq, h_pq, ht_condition, speciality
from hodgeforge.io.schema import FAN, LAURENT, POLYTOPE, STRATA, WHEEL, dump_strata, load
from hodgeforge.spectral.assemble import assemble_rescaling, monodromy_weight_check
from hodgeforge.spectral.checks import spectral_suite
from hodgeforge.spectral.pages import RELATIVE, e2_relative
from hodgeforge.spectral.strata import StrataComplex
from hodgeforge.toric.blowup import lg_strata
from hodgeforge.toric.cohomology import cross_check_triples, fano_rescaling, sr_cohomology
from hodgeforge.toric.fan import Fan, face_fan, projective_space_fan
from hodgeforge.toric.laurent import DEGENERATE, nondegeneracy_probe, standard_laurent
from hodgeforge.toric.polytope import validate_reflexive
from hodgeforge.toric.quantum import pn_quantum_flatness

CHECK_ALL, CHECK_NONE = "all", "none"


@contextmanager
def _timed(timings: Dict[str, float], stage: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + time.perf_counter() - t0


def _model_verdicts(report: RunReport, model: RescalingModel, cfg: HodgeforgeConfig, ledger: CheckLedger):
    report.add_model(model)
    ht = ht_condition(model, cfg.checks.fw_shift, cfg.checks.fw_shift_literal)
    sp = speciality(model, cfg.checks.saito_shift)
    report.ht, report.special = ht.ok, sp.ok
    report.ht_certificate, report.special_certificate = ht.certificate(), sp.certificate()
    report.extra["fw_literal"] = {k: v.fw_literal for k, v in sorted(ht.per_degree.items())}
    # a Hodge-Tate model always has f = h and is always special
    ledger.record("model.ht_implies_f_equals_h", not ht.ok or f_pq(model) == h_pq(model))
    ledger.record("model.ht_implies_special", not ht.ok or sp.ok)


def _downstream(report: RunReport, s: StrataComplex, cfg: HodgeforgeConfig, ledger: CheckLedger,
                check: str = CHECK_ALL, dump_pages: bool = False):
    threads = cfg.pool.threads
    with _timed(report.timings, "spectral"):
        if check == CHECK_ALL:
            pages, ledger = spectral_suite(s, threads, ledger)
        else:
            pages = {RELATIVE: e2_relative(s, threads)}
    if dump_pages:
        report.extra["pages"] = {kind: page.table() for kind, page in sorted(pages.items())}
    rel = pages.get(RELATIVE)
    if rel is None:
        return pages
    if not s.is_hodge_tate():
        ledger.record("strata.hodge_tate", False, {"label": s.label})
        return pages
    with _timed(report.timings, "assemble"):
        model = assemble_rescaling(s, rel, threads)
        if check == CHECK_ALL:
            monodromy_weight_check(model, rel, ledger)
        _model_verdicts(report, model, cfg, ledger)
    return pages


def _emit(s: StrataComplex, path: Optional[str]):
    if not path:
        return
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dump_strata(s), fh, indent=1, sort_keys=True)
        fh.write("\n")
    logging.info(f"[cli:{s.label}] strata written to {path}")


def run_wheel(d: int, cfg: HodgeforgeConfig, realization: str = "chain", check: str = CHECK_ALL,
              emit: Optional[str] = None) -> RunReport:
    spec = load_wheel_spec(d, realization)
    report = RunReport("wheel", f"wheel-{d}", input_digest({"kind": WHEEL, "d": d, "realization": realization}))
    ledger = CheckLedger(report.label)
    with _timed(report.timings, "strata"):
        s = wheel_strata(spec)
    _emit(s, emit)
    pages = _downstream(report, s, cfg, ledger, check)
    rel = pages.get(RELATIVE)
    if rel is not None:
        want = wheel_euler_oracle(d)[2]
        ledger.record("wheel.euler_oracle", rel.euler_e2() == want, {"e2": rel.euler_e2(), "expected": want})
    report.attach(ledger)
    return report


def run_toric(polytope, laurent, raw: dict, cfg: HodgeforgeConfig, check: str = CHECK_ALL,
              emit: Optional[str] = None) -> RunReport:
    report = RunReport("toric", polytope.label or laurent.label or "toric", input_digest(raw))
    ledger = CheckLedger(report.label)
    with _timed(report.timings, "probe"):
        probe = nondegeneracy_probe(laurent, cfg.probe.trials, cfg.probe.seed)
    report.extra["probe"] = {"status": probe.status, "faces": probe.faces_probed, "samples": probe.samples}
    ledger.record("toric.nondegenerate", probe.status != DEGENERATE, probe.witness)
    if probe.status == DEGENERATE:
        report.attach(ledger)
        return report
    with _timed(report.timings, "strata"):
        s, fan, poles = lg_strata(polytope, laurent, cfg.toric.ray_order)
    report.extra["fan"] = {"rays": len(fan.rays), "cones": len(fan.cones),
                           "base_points": sum(poles.points_on(a, b) for a, b in poles.walls)}
    _emit(s, emit)
    _downstream(report, s, cfg, ledger, check)
    report.attach(ledger)
    return report


def run_fano(fan: Fan, raw: dict, cfg: HodgeforgeConfig, pn: Optional[int] = None) -> RunReport:
    report = RunReport("fano", fan.label or "fano", input_digest(raw))
    ledger = CheckLedger(report.label)
    with _timed(report.timings, "ring"):
        ring = sr_cohomology(fan)
        model = fano_rescaling(fan)
    n, betti = ring.n, ring.betti()
    report.extra["betti"] = betti
    f = f_pq(model)
    matches = all(f.get((p, n - p), 0) == betti[n - p] for p in range(n + 1)) and sum(f.values()) == sum(betti)
    ledger.record("fano.f_matches_betti", matches, {"f": f, "betti": betti})
    ledger.record("fano.hard_lefschetz", ring.hard_lefschetz())
    if n == 3:
        bad = cross_check_triples(fan, ring)
        ledger.record("fano.triples_match_ring", bad is None, {"triple": bad})
    _model_verdicts(report, model, cfg, ledger)
    if pn is not None:
        with _timed(report.timings, "quantum"):
            verdict = pn_quantum_flatness(pn, count=cfg.toric.quantum_samples, seed=cfg.probe.seed)
        ledger.record("quantum.flatness", verdict.ok, verdict.failure)
        report.extra["quantum_samples"] = len(verdict.samples)
    report.attach(ledger)
    return report


def run_strata(s: StrataComplex, raw: dict, cfg: HodgeforgeConfig, check: str = CHECK_ALL,
               dump_pages: bool = False) -> RunReport:
    report = RunReport("strata", s.label, input_digest(raw))
    ledger = CheckLedger(report.label)
    _downstream(report, s, cfg, ledger, check, dump_pages)
    report.attach(ledger)
    return report


def run_check(path: str, cfg: HodgeforgeConfig) -> RunReport:
    """Whatever the file holds, run its pipeline with every check."""
    kind, obj, raw = load(path)
    if kind == STRATA:
        return run_strata(obj, raw, cfg)
    if kind == WHEEL:
        return run_wheel(obj.d, cfg, obj.realization)
    if kind == FAN:
        return run_fano(obj, raw, cfg)
    if kind == POLYTOPE:
        return run_toric(obj, standard_laurent(obj), raw, cfg)
    if kind == LAURENT:
        return run_toric(obj.newton_polytope(), obj, raw, cfg)
    raise SchemaError(f"no pipeline for input kind {kind!r}", {"file": path})


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=[MD, JSON], help="Report format (default from config)")
    p.add_argument("--seed", type=int, help="Seed for the nondegeneracy probe and quantum samples")
    p.add_argument("--fw-shift", type=int, help="Index shift of the F/W complementarity test")
    p.add_argument("--timings", action="store_true", help="Append stage timings to the report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser("hodgeforge")
    p.add_argument("--config", "-c", help="Path to YAML config")
    p.add_argument("--log-level", help="Logging level (default WARNING)")
    p.add_argument("--threads", type=int, help="Worker pool cap")
    sub = p.add_subparsers(dest="command")
    sub.required = True

    w = sub.add_parser("wheel", help="Elliptic surfaces with a wheel at infinity")
    _common(w)
    which = w.add_mutually_exclusive_group(required=True)
    which.add_argument("--d", type=int, help=f"Wheel length, {WHEEL_D_MIN}..{WHEEL_D_MAX}")
    which.add_argument("--all", action="store_true", help=f"Sweep d = {WHEEL_D_MIN}..{WHEEL_D_MAX}")
    w.add_argument("--realization", default="chain")
    w.add_argument("--check", choices=[CHECK_ALL, CHECK_NONE], default=CHECK_ALL)
    w.add_argument("--emit-strata", help="Write the strata file here")

    t = sub.add_parser("toric", help="Landau-Ginzburg model of a reflexive polytope")
    _common(t)
    t.add_argument("--polytope", required=True)
    t.add_argument("--laurent", help="Laurent data (default: sum of vertex monomials)")
    t.add_argument("--ray-order", help="forward | reverse")
    t.add_argument("--trials", type=int, help="Probe samples per face")
    t.add_argument("--check", choices=[CHECK_ALL, CHECK_NONE], default=CHECK_ALL)
    t.add_argument("--emit-strata", help="Write the strata file here")

    f = sub.add_parser("fano", help="Rescaling model of a smooth toric Fano variety")
    _common(f)
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--fan")
    src.add_argument("--polytope", help="Use the face fan of this polytope")
    src.add_argument("--pn", type=int, help="Projective space of this dimension, with quantum flatness")

    s = sub.add_parser("strata", help="Weight spectral sequence of a strata file")
    _common(s)
    s.add_argument("--file", required=True)
    s.add_argument("--check", choices=[CHECK_ALL, CHECK_NONE], default=CHECK_ALL)
    s.add_argument("--dump", choices=["pages"])

    c = sub.add_parser("check", help="Run every check on any input file")
    _common(c)
    c.add_argument("file")
    return p


def _configure(args) -> HodgeforgeConfig:
    cfg = apply_env_overrides(load_config(args.config))
    if args.threads is not None:
        cfg.pool.threads = max(1, args.threads)
    if getattr(args, "format", None):
        cfg.report.format = args.format
    if getattr(args, "seed", None) is not None:
        cfg.probe.seed = args.seed
    if getattr(args, "fw_shift", None) is not None:
        cfg.checks.fw_shift = args.fw_shift
    if getattr(args, "timings", False):
        cfg.report.timings = True
    if getattr(args, "ray_order", None):
        cfg.toric.ray_order = args.ray_order
    if getattr(args, "trials", None) is not None:
        cfg.probe.trials = args.trials
    if args.log_level:
        cfg.log_level = args.log_level
    return cfg


def _dispatch(args, cfg: HodgeforgeConfig) -> List[RunReport]:
    if args.command == "wheel":
        if args.all:
            jobs = [lambda d=d: run_wheel(d, cfg, args.realization, args.check)
                    for d in range(WHEEL_D_MIN, WHEEL_D_MAX + 1)]
            return run_pool(jobs, cfg.pool.threads)
        return [run_wheel(args.d, cfg, args.realization, args.check, args.emit_strata)]
    if args.command == "toric":
        _, polytope, raw_p = load(args.polytope, expect=POLYTOPE)
        validate_reflexive(polytope)
        if args.laurent:
            _, laurent, raw_l = load(args.laurent, expect=LAURENT)
        else:
            laurent, raw_l = standard_laurent(polytope), None
        raw = {"polytope": raw_p, "laurent": raw_l, "ray_order": cfg.toric.ray_order}
        return [run_toric(polytope, laurent, raw, cfg, args.check, args.emit_strata)]
    if args.command == "fano":
        if args.pn is not None:
            return [run_fano(projective_space_fan(args.pn), {"kind": "pn", "n": args.pn}, cfg, pn=args.pn)]
        if args.fan:
            _, fan, raw = load(args.fan, expect=FAN)
        else:
            _, polytope, raw = load(args.polytope, expect=POLYTOPE)
            validate_reflexive(polytope)
            fan = face_fan(polytope)
        return [run_fano(fan, raw, cfg)]
    if args.command == "strata":
        _, s, raw = load(args.file, expect=STRATA)
        return [run_strata(s, raw, cfg, args.check, args.dump == "pages")]
    return [run_check(args.file, cfg)]


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _configure(args)
    except (OSError, ValueError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=getattr(logging, str(cfg.log_level).upper(), logging.WARNING),
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        reports = _dispatch(args, cfg)
    except HodgeforgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(reports, cfg.report.format, cfg.report.timings) + "\n")
    failed = [name for r in reports for name, v in r.checks.items() if not v["ok"]]
    if failed:
        logging.warning(f"[cli] {len(failed)} checks failed: {', '.join(failed[:5])}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
