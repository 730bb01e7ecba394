import logging
import threading
import time
from typing import Any, Dict, List, Optional


class CheckLedger:
    """Named check results collected across a pipeline run."""

    def __init__(self, label: str = "run"):
        self.label = label
        self._store: Dict[str, dict] = {}
        self._lock = threading.Lock()

    def record(self, name: str, ok: bool, detail: Optional[Any] = None) -> bool:
        entry = {"ok": bool(ok), "detail": detail, "at": time.time()}
        with self._lock:
            prev = self._store.get(name)
            if prev is not None:
                # a re-run check only stays green if every run passed
                entry["ok"] = prev["ok"] and entry["ok"]
                entry["runs"] = prev.get("runs", 1) + 1
            self._store[name] = entry
        if not ok:
            logging.warning(f"[check:{self.label}] {name} failed: {detail}")
        else:
            logging.debug(f"[check:{self.label}] {name} ok")
        return bool(ok)

    def merge(self, other: "CheckLedger", prefix: str = ""):
        for name, entry in other.snapshot().items():
            self.record(prefix + name, entry["ok"], entry["detail"])

    def failures(self) -> List[str]:
        with self._lock:
            return sorted(k for k, v in self._store.items() if not v["ok"])

    def all_ok(self) -> bool:
        return not self.failures()

    def names(self) -> List[str]:
        with self._lock:
            return sorted(self._store)

    def snapshot(self) -> Dict[str, dict]:
        # timestamps stay out so reports are byte-stable
        with self._lock:
            return {k: {"ok": v["ok"], "detail": v["detail"]} for k, v in sorted(self._store.items())}
