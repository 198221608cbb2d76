"""Recompute a census file from positions alone and diff against what it claims."""

from __future__ import annotations

import jsonschema
import numpy as np

from .bounds import IndexPolynomial
from .census import (CensusRecord, CensusResult, KeyStore, compare_with_bounds, hard_checks,
                     mcmillan_bartky_check)
from .config import Classification, Configuration, MassVector, classify, config_key
from .spectral import TOL_DEGENERATE, TOL_EIG, morse_index
from . import kernels

RESIDUAL_TOL = 1e-11
DISTANCE_TOL = 1e-10
EIG_TOL = 1e-8

_NUM = {"type": "number"}
_RECORD = {
    "type": "object",
    "required": ["id", "positions", "distances", "orientation", "index", "eigenvalues",
                 "degenerate", "gap", "collinear", "convex", "cyclic_order", "residual", "lambda"],
    "properties": {
        "id": {"type": "integer", "minimum": 0},
        "source": {"type": "string"},
        "positions": {"type": "array", "items": {"type": "array", "items": _NUM,
                                                  "minItems": 2, "maxItems": 2}},
        "distances": {"type": "array", "items": _NUM},
        "orientation": {"enum": [-1, 0, 1]},
        "index": {"type": "integer", "minimum": 0},
        "eigenvalues": {"type": "array", "items": _NUM},
        "degenerate": {"type": "boolean"},
        "gap": _NUM,
        "collinear": {"type": "boolean"},
        "convex": {"type": ["boolean", "null"]},
        "cyclic_order": {"type": ["array", "null"], "items": {"type": "integer"}},
        "residual": _NUM,
        "lambda": _NUM,
    },
}

CENSUS_SCHEMA = {
    "title": "planarcc census",
    "type": "object",
    "required": ["format", "version", "n", "masses", "saturated", "degenerate_found",
                 "morse_poly", "total", "records", "comparisons", "hard_checks"],
    "properties": {
        "format": {"const": "planarcc-census"},
        "version": {"const": 1},
        "run_config": {"type": "object"},
        "n": {"type": "integer", "minimum": 3},
        "masses": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                   "minItems": 3},
        "epsilon": {"type": ["number", "null"]},
        "epsilon_sweep": {"type": ["array", "null"], "items": _NUM},
        "saturated": {"type": "boolean"},
        "starts_used": {"type": "integer", "minimum": 0},
        "polishes": {"type": "integer", "minimum": 0},
        "degenerate_found": {"type": "boolean"},
        "morse_poly": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "total": {"type": "integer", "minimum": 0},
        "hard_checks": {"type": "object"},
        "comparisons": {"type": "object"},
        "mcmillan_bartky": {"type": ["object", "null"]},
        "records": {"type": "array", "items": _RECORD},
    },
}


class SchemaError(ValueError):
    pass


def validate_schema(data) -> None:
    try:
        jsonschema.validate(data, CENSUS_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(exc.message) from exc
    n = data["n"]
    if len(data["masses"]) != n:
        raise SchemaError(f"{len(data['masses'])} masses for n={n}")
    for rec in data["records"]:
        if len(rec["positions"]) != n:
            raise SchemaError(f"record {rec['id']}: {len(rec['positions'])} positions for n={n}")


def verify_census(data: dict) -> list[str]:
    """Return a list of human-readable mismatches (empty when the file checks out)."""
    validate_schema(data)
    cfg = data.get("run_config") or {}
    tol_eig = cfg.get("tol_eig", TOL_EIG)
    tol_deg = cfg.get("tol_degenerate", TOL_DEGENERATE)
    masses = MassVector(data["masses"])
    problems: list[str] = []
    records: list[CensusRecord] = []
    store = KeyStore()

    for rec in data["records"]:
        rid = rec["id"]
        c = Configuration.from_points(rec["positions"], masses)
        f, lam = kernels.residual(c.positions, masses.array)
        norm = float(np.abs(f).max())
        limit = RESIDUAL_TOL * masses.residual_scale
        if not norm < limit:
            problems.append(f"record {rid}: residual {norm:.3g} >= {limit:g}")
            continue
        if abs(lam - rec["lambda"]) > 1e-9 * max(1.0, abs(lam)):
            problems.append(f"record {rid}: lambda {lam!r} != stored {rec['lambda']!r}")
        report = morse_index(c, tol_eig, tol_deg, critical_tol=RESIDUAL_TOL)
        if report.index != rec["index"]:
            problems.append(f"record {rid}: index {report.index} != stored {rec['index']}")
        if report.degenerate != rec["degenerate"]:
            problems.append(f"record {rid}: degenerate {report.degenerate} != stored")
        eig = np.array(report.eigenvalues)
        stored = np.array(rec["eigenvalues"], dtype=float)
        if eig.shape != stored.shape or np.abs(eig - stored).max() > EIG_TOL * np.abs(eig).max():
            problems.append(f"record {rid}: eigenvalues differ from stored")
        key = config_key(c)
        if (key.orientation != rec["orientation"]
                or len(rec["distances"]) != len(key.distances)
                or np.abs(key.distances - np.array(rec["distances"])).max() > DISTANCE_TOL):
            problems.append(f"record {rid}: key differs from stored")
        cls = classify(c)
        stored_cls = Classification(rec["collinear"], rec["convex"],
                                    tuple(rec["cyclic_order"]) if rec["cyclic_order"] else None)
        if cls != stored_cls:
            problems.append(f"record {rid}: classification {cls} != stored {stored_cls}")
        if not store.add(key):
            problems.append(f"record {rid}: duplicate of an earlier record")
        records.append(CensusRecord(c, key, report, cls, norm, float(lam),
                                    rec.get("source", "")))

    counts = [0] * (data["n"] - 1)
    for r in records:
        k = r.index_report.index
        counts += [0] * (k + 1 - len(counts))
        counts[k] += 1
    if len(records) == len(data["records"]):
        if counts != data["morse_poly"]:
            problems.append(f"morse_poly {data['morse_poly']} != recount {counts}")
        if sum(counts) != data["total"]:
            problems.append(f"total {data['total']} != recount {sum(counts)}")
    result = CensusResult(
        masses=masses, records=records, morse_poly=IndexPolynomial(counts),
        saturated=data["saturated"], starts_used=data.get("starts_used", 0),
        degenerate_found=any(r.index_report.degenerate for r in records),
        polishes=data.get("polishes", 0), converged=0)
    if result.degenerate_found != data["degenerate_found"]:
        problems.append("degenerate_found flag differs from recomputation")
    result.comparisons = compare_with_bounds(result)
    if result.comparisons != data["comparisons"]:
        problems.append("bound comparisons differ from recomputation")
    checks = hard_checks(result)
    if checks != data["hard_checks"]:
        problems.append(f"hard checks differ from recomputation: {checks}")
    mb = mcmillan_bartky_check(result) if data["n"] == 4 else None
    if mb != data.get("mcmillan_bartky"):
        problems.append("McMillan-Bartky report differs from recomputation")
    return problems
