"""Run reports: one record per pipeline run, rendered as markdown or JSON.

The body is a pure function of the input and the package version; timings
are only added when asked for.
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from hodgeforge import __version__
from hodgeforge.core.constants import REPORT_SCHEMA
from hodgeforge.core.registry import CheckLedger
from hodgeforge.core.utils import canonical_json, safe_json
from hodgeforge.hodge.rescaling import RescalingModel, f_pq, h_pq

MD, JSON = "md", "json"


def input_digest(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


@dataclass
class RunReport:
    command: str
    label: str
    digest: str
    tables: Dict[int, List[dict]] = field(default_factory=dict)
    ht: Optional[bool] = None
    ht_certificate: Dict[int, dict] = field(default_factory=dict)
    special: Optional[bool] = None
    special_certificate: Dict[int, dict] = field(default_factory=dict)
    checks: Dict[str, dict] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v["ok"] for v in self.checks.values())

    def add_model(self, model: RescalingModel):
        """Per-degree f/h table from a rescaling model."""
        f, h = f_pq(model), h_pq(model)
        for c in model.components:
            rows = []
            for (p, q) in sorted(set(f) | set(h), key=lambda pq: (pq[0], pq[1])):
                if p + q != c.degree:
                    continue
                rows.append({"p": p, "q": q, "f": f.get((p, q), 0), "h": h.get((p, q), 0)})
            self.tables[c.degree] = rows

    def attach(self, ledger: CheckLedger):
        self.checks = ledger.snapshot()

    def to_json(self, with_timings: bool = False) -> Dict[str, Any]:
        body = {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "command": self.command,
            "label": self.label,
            "input_sha256": self.digest,
            "tables": {str(k): v for k, v in sorted(self.tables.items())},
            "hodge_tate": self.ht,
            "hodge_tate_certificate": self.ht_certificate,
            "special": self.special,
            "special_certificate": self.special_certificate,
            "checks": self.checks,
            "ok": self.ok,
        }
        if self.extra:
            body["extra"] = self.extra
        if with_timings:
            body["timings"] = {k: round(v, 4) for k, v in self.timings.items()}
        return safe_json(body)


def _verdict(x: Optional[bool]) -> str:
    return "n/a" if x is None else str(bool(x)).lower()


def render_md(r: RunReport, with_timings: bool = False) -> str:
    out = [f"# hodgeforge {r.command}: {r.label}", "",
           f"- version: {__version__}",
           f"- input sha256: `{r.digest}`",
           f"- HT: {_verdict(r.ht)}",
           f"- special: {_verdict(r.special)}", ""]
    for degree, rows in sorted(r.tables.items()):
        out += [f"## degree {degree}", "", "| p | q | f | h |", "|---|---|---|---|"]
        out += [f"| {row['p']} | {row['q']} | {row['f']} | {row['h']} |" for row in rows]
        out.append("")
    for key, value in sorted(r.extra.items()):
        out.append(f"- {key}: {json.dumps(safe_json(value), sort_keys=True)}")
    if r.extra:
        out.append("")
    if r.ht_certificate:
        out.append(f"- HT certificate: {json.dumps(safe_json(r.ht_certificate), sort_keys=True)}")
    if r.special_certificate:
        out.append(f"- speciality certificate: {json.dumps(safe_json(r.special_certificate), sort_keys=True)}")
    if r.checks:
        out += ["## checks", ""]
        for name, entry in r.checks.items():
            mark = "ok" if entry["ok"] else "FAIL"
            detail = f" {json.dumps(safe_json(entry['detail']), sort_keys=True)}" if entry["detail"] and not entry["ok"] else ""
            out.append(f"- [{mark}] {name}{detail}")
        out.append("")
    if with_timings and r.timings:
        out += ["## timings", ""]
        out += [f"- {k}: {v:.3f}s" for k, v in r.timings.items()]
        out.append("")
    return "\n".join(out)


def render(reports: List[RunReport], fmt: str = MD, with_timings: bool = False) -> str:
    if fmt == JSON:
        payload = [r.to_json(with_timings) for r in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2, sort_keys=True)
    return "\n".join(render_md(r, with_timings) for r in reports)
