import json
from fractions import Fraction

import numpy as np
import pytest

from hodgeforge.core.pool import run_pool, thread_cap
from hodgeforge.core.registry import CheckLedger
from hodgeforge.core.utils import canonical_json, parse_rational, read_json, safe_json


def test_parse_rational():
    assert parse_rational(3) == 3
    assert parse_rational(" -7/21 ") == Fraction(-1, 3)
    assert parse_rational(Fraction(2, 5)) == Fraction(2, 5)
    for bad in (0.5, True, "1.5", "2e3", None):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_safe_json_shapes():
    data = {(1, 2): Fraction(3, 4), "big": 2 ** 60, "np": np.int64(5), "s": {2, 1}, "f": Fraction(4, 2)}
    out = safe_json(data)
    assert out == {"1,2": "3/4", "big": str(2 ** 60), "np": 5, "s": [1, 2], "f": 2}
    assert json.loads(canonical_json(data)) == out
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_read_json_fallback(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{not json", encoding="utf-8")
    assert read_json(str(path), fallback={}) == {}
    path.write_text('{"a": 1}', encoding="utf-8")
    assert read_json(str(path)) == {"a": 1}


def test_ledger_keeps_reruns_red():
    ledger = CheckLedger("t")
    ledger.record("a", True)
    ledger.record("b", False, {"why": 1})
    ledger.record("a", False)
    ledger.record("a", True)
    assert ledger.failures() == ["a", "b"]
    assert ledger.snapshot()["b"] == {"ok": False, "detail": {"why": 1}}
    other = CheckLedger("u")
    other.record("c", True)
    ledger.merge(other, prefix="sub.")
    assert ledger.names() == ["a", "b", "sub.c"]
    assert not ledger.all_ok()


def test_pool_keeps_submission_order():
    assert run_pool([lambda i=i: i * i for i in range(20)], threads=3) == [i * i for i in range(20)]
    assert run_pool([], threads=3) == []


def test_pool_reraises_first_error():
    def boom():
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        run_pool([lambda: 1, boom, lambda: 2], threads=2)


def test_thread_cap_env(monkeypatch):
    monkeypatch.delenv("HODGEFORGE_THREADS", raising=False)
    assert thread_cap(None) == 4
    assert thread_cap(0) == 1
    monkeypatch.setenv("HODGEFORGE_THREADS", "2")
    assert thread_cap(8) == 2
    assert thread_cap(None) == 2
    monkeypatch.setenv("HODGEFORGE_THREADS", "lots")
    assert thread_cap(3) == 3
