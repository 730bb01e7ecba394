import json

import pytest

from hodgeforge.cli.main import main, run_toric
from hodgeforge.config.loader import load_config
from hodgeforge.toric.laurent import LaurentData
from hodgeforge.toric.polytope import standard_polytopes


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
    return str(path)


def test_wheel_markdown(capsys):
    code, out, _ = _run(capsys, "wheel", "--d", "3", "--format", "md")
    assert code == 0
    assert out.startswith("# hodgeforge wheel: wheel-3")
    assert "- HT: true" in out
    assert "- special: true" in out
    assert "| 1 | 1 | 7 | 7 |" in out
    assert "FAIL" not in out


def test_wheel_out_of_range(capsys):
    code, out, err = _run(capsys, "wheel", "--d", "12")
    assert code == 2
    assert out == ""
    assert err.startswith("error: OutOfRange")
    assert len(err.strip().splitlines()) == 1


def test_json_report_is_byte_stable(capsys):
    _, first, _ = _run(capsys, "wheel", "--d", "4", "--format", "json")
    _, second, _ = _run(capsys, "wheel", "--d", "4", "--format", "json")
    assert first == second
    body = json.loads(first)
    assert body["schema"] == "hodgeforge/v1"
    assert body["ok"] and body["hodge_tate"] and body["special"]
    assert {(r["p"], r["q"]): r["f"] for r in body["tables"]["2"]} == {(0, 2): 1, (1, 1): 6, (2, 0): 1}
    assert body["checks"]["wheel.euler_oracle"]["ok"]
    assert "timings" not in body


def test_timings_only_on_request(capsys):
    _, out, _ = _run(capsys, "wheel", "--d", "2", "--format", "json", "--timings")
    assert "spectral" in json.loads(out)["timings"]


def test_wheel_sweep(capsys):
    code, out, _ = _run(capsys, "--threads", "2", "wheel", "--all", "--check", "none", "--format", "json")
    assert code == 0
    reports = json.loads(out)
    assert [r["label"] for r in reports] == [f"wheel-{d}" for d in range(2, 10)]
    assert all(r["hodge_tate"] for r in reports)


def test_emitted_strata_replay_through_strata_and_check(tmp_path, capsys):
    path = str(tmp_path / "w5.json")
    _, direct, _ = _run(capsys, "wheel", "--d", "5", "--format", "json", "--emit-strata", path)
    code, replay, _ = _run(capsys, "strata", "--file", path, "--format", "json", "--dump", "pages")
    assert code == 0
    a, b = json.loads(direct), json.loads(replay)
    assert a["tables"] == b["tables"]
    assert b["extra"]["pages"]["relative"]["e2"]["2,2"] == 5
    code, checked, _ = _run(capsys, "check", path, "--format", "json")
    assert code == 0
    assert json.loads(checked)["command"] == "strata"


def test_check_dispatches_wheel_files(tmp_path, capsys):
    path = _write(tmp_path, "wheel.json", {"kind": "wheel", "d": 6})
    code, out, _ = _run(capsys, "check", path, "--format", "json")
    assert code == 0
    assert json.loads(out)["label"] == "wheel-6"


def test_broken_json_points_at_the_line(tmp_path, capsys):
    path = _write(tmp_path, "bad.json", '{\n  "kind": "strata",\n  "n": 2,\n}\n')
    code, _, err = _run(capsys, "check", path)
    assert code == 2
    assert "SchemaError" in err
    assert "line=4" in err


def test_float_coefficients_are_refused(tmp_path, capsys):
    poly = _write(tmp_path, "p3.json", {"kind": "polytope", "vertices": standard_polytopes()["p3"]})
    terms = [{"exponent": list(v), "coefficient": 0.5} for v in standard_polytopes()["p3"]]
    laurent = _write(tmp_path, "f.json", {"kind": "laurent", "terms": terms})
    code, _, err = _run(capsys, "toric", "--polytope", poly, "--laurent", laurent)
    assert code == 2
    assert "terms[0].coefficient" in err


def test_cube_facets_are_rejected(tmp_path, capsys):
    cube = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    poly = _write(tmp_path, "cube.json", {"vertices": cube})
    code, _, err = _run(capsys, "toric", "--polytope", poly)
    assert code == 2
    assert err.startswith("error: FacetNotUnimodular")


def test_fano_projective_plane_with_quantum_flatness(capsys):
    code, out, _ = _run(capsys, "fano", "--pn", "2", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["extra"]["betti"] == [1, 1, 1]
    assert body["checks"]["quantum.flatness"]["ok"]
    assert body["hodge_tate"] and body["special"]


def test_fano_from_polytope_face_fan(tmp_path, capsys):
    poly = _write(tmp_path, "oct.json", {"kind": "polytope", "vertices": standard_polytopes()["octahedron"]})
    code, out, _ = _run(capsys, "fano", "--polytope", poly, "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["extra"]["betti"] == [1, 3, 3, 1]
    assert body["checks"]["fano.triples_match_ring"]["ok"]


def test_degenerate_laurent_fails_the_probe_check():
    L = LaurentData.from_terms([((2, 0), 1), ((1, 1), -2), ((0, 2), 1), ((-1, -1), 1)], label="square")
    cfg = load_config()
    cfg.probe.seed = 3
    report = run_toric(L.newton_polytope(), L, {"terms": "square"}, cfg)
    assert not report.ok
    assert report.extra["probe"]["status"] == "degenerate"
    assert report.ht is None


def test_legacy_config_key_is_rejected(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.yaml", "threads: 2\n")
    code, _, err = _run(capsys, "--config", cfg, "wheel", "--d", "3")
    assert code == 2
    assert "Legacy config key 'threads'" in err


@pytest.mark.slow
def test_toric_p3_end_to_end(tmp_path, capsys):
    poly = _write(tmp_path, "p3.json", {"kind": "polytope", "vertices": standard_polytopes()["p3"], "label": "p3"})
    code, out, _ = _run(capsys, "toric", "--polytope", poly, "--format", "json")
    assert code == 0, out
    body = json.loads(out)
    assert body["extra"]["fan"] == {"rays": 34, "cones": 64, "base_points": 24}
    assert body["hodge_tate"] and body["special"]
