"""JSON / CSV / text renderings of bound tables and census results."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .bounds import BoundTable
from .census import CensusResult, hard_checks

FORMAT = "planarcc-census"
VERSION = 1


def _index_header(n: int) -> list[str]:
    return [f"Index {k}" for k in range(n - 1)] + ["Total"]


def _text_table(title: str, header: list[str], rows: list[tuple[str, list[int]]]) -> str:
    label_w = max([len(title)] + [len(r[0]) for r in rows]) + 2
    col_w = max([len(h) for h in header] + [len(str(v)) for _, vals in rows for v in vals]) + 2
    lines = [title.ljust(label_w) + "".join(h.rjust(col_w) for h in header)]
    for label, vals in rows:
        lines.append(label.ljust(label_w) + "".join(str(v).rjust(col_w) for v in vals))
    return "\n".join(lines)


def bounds_rows(table: BoundTable) -> list[tuple[str, list[int]]]:
    return [(BoundTable.LABELS[name], coeffs + [total]) for name, coeffs, total in table.rows()]


def bounds_to_dict(table: BoundTable) -> dict:
    return {
        "n": table.n,
        "rows": {name: {"coeffs": coeffs, "total": total}
                 for name, coeffs, total in table.rows()},
    }


def render_bounds(table: BoundTable, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(bounds_to_dict(table), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row"] + [f"index_{k}" for k in range(table.n - 1)] + ["total"])
        for name, coeffs, total in table.rows():
            w.writerow([name] + coeffs + [total])
        return buf.getvalue().rstrip("\n")
    if fmt == "text":
        return _text_table(f"n={table.n}", _index_header(table.n), bounds_rows(table))
    raise ValueError(f"unknown format {fmt!r}")


def record_to_dict(i: int, r) -> dict:
    rep = r.index_report
    cls = r.classification
    return {
        "id": i,
        "source": r.source,
        "positions": [[float(a), float(b)] for a, b in r.configuration.positions],
        "distances": [float(d) for d in r.key.distances],
        "orientation": int(r.key.orientation),
        "index": rep.index,
        "eigenvalues": list(rep.eigenvalues),
        "degenerate": rep.degenerate,
        "gap": rep.gap,
        "collinear": cls.collinear,
        "convex": cls.convex,
        "cyclic_order": list(cls.cyclic_order) if cls.cyclic_order else None,
        "residual": r.residual_norm,
        "lambda": r.lam,
    }


def census_to_dict(result: CensusResult, run_config: dict | None = None,
                   epsilon: float | None = None, epsilon_sweep: list | None = None) -> dict:
    counts = result.counts()
    return {
        "format": FORMAT,
        "version": VERSION,
        "run_config": run_config or {},
        "n": result.n,
        "masses": list(result.masses.values),
        "epsilon": epsilon,
        "epsilon_sweep": epsilon_sweep,
        "saturated": result.saturated,
        "starts_used": result.starts_used,
        "polishes": result.polishes,
        "degenerate_found": result.degenerate_found,
        "morse_poly": counts,
        "total": sum(counts),
        "hard_checks": hard_checks(result),
        "comparisons": result.comparisons,
        "mcmillan_bartky": result.mcmillan_bartky,
        "records": [record_to_dict(i, r) for i, r in enumerate(result.records)],
    }


def dumps(data: dict) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(data, indent=1, allow_nan=False) + "\n"


CSV_FIELDS = ["id", "source", "index", "collinear", "convex", "cyclic_order", "orientation",
              "degenerate", "gap", "residual", "lambda", "eigenvalues", "positions"]


def census_csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in data["records"]:
        row = {k: rec[k] for k in CSV_FIELDS if k not in ("cyclic_order", "eigenvalues", "positions")}
        row["cyclic_order"] = "-".join(map(str, rec["cyclic_order"])) if rec["cyclic_order"] else ""
        row["eigenvalues"] = ";".join(repr(e) for e in rec["eigenvalues"])
        row["positions"] = ";".join(f"{x!r} {y!r}" for x, y in rec["positions"])
        w.writerow(row)
    return buf.getvalue()


def write_census(data: dict, out: str | Path) -> tuple[Path, Path]:
    """Write ``out`` (JSON) and the sibling ``.csv`` summary; returns both paths."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps(data))
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(census_csv(data))
    return out, csv_path


def census_summary(data: dict) -> str:
    """Paper-style table (census row plus the four bound rows) and the check block."""
    n = data["n"]
    counts = data["morse_poly"]
    header = _index_header(max(n, len(counts) + 1))
    rows = [("census", counts + [data["total"]])]
    comp = data["comparisons"]
    rows += [("bouquet", _bound_row(n, "bouquet")), ("first Palmore", _bound_row(n, "first_palmore")),
             ("McCord", comp["mccord"]["bound"] + [sum(comp["mccord"]["bound"])]),
             ("Ignored Palmore", comp["ignored_palmore"]["bound"]
              + [sum(comp["ignored_palmore"]["bound"])])]
    masses = ",".join(repr(m) for m in data["masses"])
    eps = f"  epsilon={data['epsilon']!r}" if data.get("epsilon") is not None else ""
    lines = [f"masses={masses}{eps}", _text_table(f"n={n}", header, rows), "",
             "counts: " + " ".join(map(str, counts)) + f" | {data['total']}",
             f"saturated: {'yes' if data['saturated'] else 'NO'} "
             f"(random starts used {data['starts_used']}, polishes {data['polishes']})",
             f"degenerate: {'YES' if data['degenerate_found'] else 'no'}"]
    hc = data["hard_checks"]
    lines.append(f"Moulton count: {hc['moulton_count']['found']}/{hc['moulton_count']['expected']} "
                 f"{_ok(hc['moulton_count']['pass'])}")
    lines.append(f"reflection parity: {_ok(hc['reflection_parity']['pass'])}")
    lines.append(f"Morse inequalities (bouquet): {_ok(comp['bouquet_morse']['pass'])}")
    lines.append(f"equivariant Morse inequalities: {_ok(comp['equivariant']['pass'])}")
    lines.append(f"per-index >= McCord: {_ok(comp['mccord']['pass'])} "
                 f"margins {comp['mccord']['margins']}")
    fp = comp["first_palmore_total"]
    lines.append(f"total >= first Palmore ({fp['bound']}): {_ok(fp['pass'])} margin {fp['margin']}")
    ip = comp["ignored_palmore"]
    lines.append(f"ignored Palmore (reported only): "
                 f"{'consistent' if ip['consistent'] else 'below'} margins {ip['margins']}")
    if "simo_range" in comp:
        s = comp["simo_range"]
        lines.append(f"expected range {s['range']} (reported only): "
                     f"{'inside' if s['inside'] else 'OUTSIDE'}")
    mb = data.get("mcmillan_bartky")
    if mb and mb.get("applicable"):
        missing = [k for k, v in mb["orderings"].items() if not v]
        lines.append(f"convex minimum per cyclic ordering: {_ok(mb['all_satisfied'])}"
                     + (f" missing {missing}" if missing else ""))
    if not comp["binding"]:
        lines.append("comparisons are NOT binding (unsaturated or degenerate)")
    return "\n".join(lines)


def _bound_row(n: int, name: str) -> list[int]:
    from .bounds import bound_table
    poly = getattr(bound_table(n), name)
    return poly.padded(n - 1) + [poly.total]


def _ok(flag: bool) -> str:
    return "ok" if flag else "FAIL"
