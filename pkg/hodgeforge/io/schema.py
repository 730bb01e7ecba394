"""Input files: UTF-8 JSON validated by pydantic models, converted to exact objects.

Rationals travel as ints or "num/den" strings; every validation problem is
reported as SchemaError carrying the file, the field path and, for broken
JSON, the line.
"""
import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError

from hodgeforge.core.constants import REPORT_SCHEMA
from hodgeforge.core.errors import SchemaError
from hodgeforge.core.linalg import RationalMatrix
from hodgeforge.core.utils import parse_rational, safe_json
from hodgeforge.spectral.strata import Piece, StrataComplex, make_strata
from hodgeforge.toric.fan import Fan, make_fan
from hodgeforge.toric.laurent import LaurentData
from hodgeforge.toric.polytope import LatticePolytope

# ints or "num/den" strings; floats are rejected later by parse_rational
Scalar = Any
Matrix = List[List[Scalar]]

STRATA, POLYTOPE, LAURENT, FAN, WHEEL = "strata", "polytope", "laurent", "fan", "wheel"


class PieceModel(BaseModel):
    pid: str
    level: int
    index_set: List[int] = Field(default_factory=list)
    betti: Dict[int, int]
    parents: List[str] = Field(default_factory=list)
    non_tate: List[int] = Field(default_factory=list)


class RestrictionModel(BaseModel):
    child: str
    position: int
    maps: Dict[int, Matrix]


class StrataModel(BaseModel):
    n: int
    label: str = "strata"
    pieces: List[PieceModel]
    restriction: List[RestrictionModel] = Field(default_factory=list)
    pairing: Dict[str, Dict[int, Matrix]]
    lefschetz: Dict[str, Dict[int, Matrix]] = Field(default_factory=dict)


class PolytopeModel(BaseModel):
    vertices: List[List[int]]
    label: str = ""


class TermModel(BaseModel):
    exponent: List[int]
    coefficient: Scalar


class LaurentModel(BaseModel):
    terms: List[TermModel]
    label: str = ""


class FanModel(BaseModel):
    rays: List[List[int]]
    cones: List[List[int]]
    label: str = ""


class WheelModel(BaseModel):
    d: int
    realization: str = "chain"


MODELS = {STRATA: StrataModel, POLYTOPE: PolytopeModel, LAURENT: LaurentModel, FAN: FanModel, WHEEL: WheelModel}


def read_input(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}", {"file": path})
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", {"file": path, "line": exc.lineno, "column": exc.colno})
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", {"file": path, "field": "$"})
    return data


def sniff_kind(data: Dict[str, Any]) -> str:
    if "kind" in data:
        return str(data["kind"])
    for key, kind in (("pieces", STRATA), ("vertices", POLYTOPE), ("terms", LAURENT), ("rays", FAN), ("d", WHEEL)):
        if key in data:
            return kind
    raise SchemaError("cannot tell the input kind", {"keys": sorted(data)})


def validate(data: Dict[str, Any], kind: str, source: str = "<input>") -> BaseModel:
    model = MODELS.get(kind)
    if model is None:
        raise SchemaError(f"unknown input kind {kind!r}", {"file": source})
    body = {k: v for k, v in data.items() if k not in ("kind", "schema")}
    try:
        return model(**body)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first.get("loc", ()))
        raise SchemaError(f"{kind} field {where or '$'}: {first.get('msg')}",
                          {"file": source, "field": where, "errors": len(exc.errors())})


def _rational(value: Scalar, where: str, source: str) -> Fraction:
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: {exc}", {"file": source, "field": where})


def to_matrix(rows: Matrix, where: str, source: str = "<input>") -> RationalMatrix:
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise SchemaError(f"{where}: ragged matrix", {"file": source, "field": where})
    cols = widths.pop() if widths else 0
    return RationalMatrix.from_rows([[_rational(x, f"{where}[{i}][{j}]", source) for j, x in enumerate(r)]
                                     for i, r in enumerate(rows)], cols=cols)


def strata_from_model(m: StrataModel, source: str = "<input>") -> StrataComplex:
    pieces = [Piece(p.pid, p.level, tuple(p.index_set), {int(a): int(d) for a, d in p.betti.items()},
                    tuple(p.parents), tuple(p.non_tate)) for p in m.pieces]
    restriction = {}
    for r in m.restriction:
        restriction[(r.child, r.position)] = {int(a): to_matrix(mat, f"restriction.{r.child}.{r.position}.{a}", source)
                                              for a, mat in r.maps.items()}

    def _per_piece(block: Dict[str, Dict[int, Matrix]], name: str):
        return {pid: {int(a): to_matrix(mat, f"{name}.{pid}.{a}", source) for a, mat in maps.items()}
                for pid, maps in block.items()}

    lefschetz = _per_piece(m.lefschetz, "lefschetz") if m.lefschetz else None
    return make_strata(m.n, pieces, restriction, _per_piece(m.pairing, "pairing"), lefschetz, label=m.label)


def polytope_from_model(m: PolytopeModel, source: str = "<input>") -> LatticePolytope:
    if not m.vertices:
        raise SchemaError("polytope has no vertices", {"file": source, "field": "vertices"})
    if len({len(v) for v in m.vertices}) != 1:
        raise SchemaError("vertices differ in dimension", {"file": source, "field": "vertices"})
    return LatticePolytope.from_points(m.vertices, label=m.label)


def laurent_from_model(m: LaurentModel, source: str = "<input>") -> LaurentData:
    if not m.terms:
        raise SchemaError("Laurent polynomial has no terms", {"file": source, "field": "terms"})
    terms = [(t.exponent, _rational(t.coefficient, f"terms[{i}].coefficient", source)) for i, t in enumerate(m.terms)]
    return LaurentData.from_terms(terms, label=m.label)


def fan_from_model(m: FanModel, source: str = "<input>") -> Fan:
    n = {len(r) for r in m.rays}
    if len(n) != 1:
        raise SchemaError("rays differ in dimension", {"file": source, "field": "rays"})
    for i, c in enumerate(m.cones):
        if any(not 0 <= x < len(m.rays) for x in c):
            raise SchemaError(f"cone {i} refers to a missing ray", {"file": source, "field": f"cones.{i}"})
    return make_fan(m.rays, m.cones, label=m.label)


def convert(kind: str, model: BaseModel, source: str = "<input>"):
    if kind == STRATA:
        return strata_from_model(model, source)
    if kind == POLYTOPE:
        return polytope_from_model(model, source)
    if kind == LAURENT:
        return laurent_from_model(model, source)
    if kind == FAN:
        return fan_from_model(model, source)
    return model


def load(path: str, expect: Optional[str] = None):
    """Read, validate and convert one input file; returns (kind, object, raw data)."""
    data = read_input(path)
    kind = sniff_kind(data)
    if expect is not None and kind != expect:
        raise SchemaError(f"expected a {expect} file, found {kind}", {"file": path})
    model = validate(data, kind, path)
    logging.info(f"[io:{kind}] loaded {path}")
    return kind, convert(kind, model, path), data


def _matrix_rows(m: RationalMatrix) -> Matrix:
    return safe_json(m.to_rows())


def dump_strata(s: StrataComplex) -> Dict[str, Any]:
    """StrataComplex as a strata input file; Gysin maps are rederived on load."""
    pieces = sorted(s.pieces.values(), key=lambda p: (p.level, p.index_set, p.pid))
    return {
        "kind": STRATA,
        "schema": REPORT_SCHEMA,
        "n": s.n,
        "label": s.label,
        "pieces": [{"pid": p.pid, "level": p.level, "index_set": list(p.index_set),
                    "betti": {str(a): d for a, d in sorted(p.betti.items())}, "parents": list(p.parents),
                    "non_tate": list(p.non_tate)} for p in pieces],
        "restriction": [{"child": child, "position": pos,
                         "maps": {str(a): _matrix_rows(m) for a, m in sorted(maps.items())}}
                        for (child, pos), maps in sorted(s.restriction.items())],
        "pairing": {pid: {str(a): _matrix_rows(m) for a, m in sorted(maps.items())}
                    for pid, maps in sorted(s.pairing.items())},
        "lefschetz": {pid: {str(a): _matrix_rows(m) for a, m in sorted(maps.items())}
                      for pid, maps in sorted(s.lefschetz.items())},
    }
