# mixedspec/operations/export.py
"""
Deterministic text rendering of result files.

CSV uses '.' decimals with 17 significant digits and LF line endings; JSON uses sorted
keys, two-space indentation and a trailing newline, with non-finite numbers written as
strings. Identical inputs give byte-identical text.
"""
import csv
import io
import json
import math
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from mixedspec.operations.series import FieldGrid
from mixedspec.schemas.report import ConvergenceTable, DegeneracyScan

FIELD_COLUMNS = ("x", "t", "side", "u", "u_t", "u_tt", "u_xx")


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return "%.17g" % value


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return "NaN" if math.isnan(obj) else ("Infinity" if obj > 0 else "-Infinity")
    if isinstance(obj, dict):
        return {key: _jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(value) for value in obj]
    return obj


def render_json(model: BaseModel) -> str:
    payload = _jsonable(model.model_dump(mode="json", by_alias=True))
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _render_rows(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_fields_csv(grid: FieldGrid) -> str:
    """fields.csv: one row per (x, t) node, x-major; u_tt left empty when unavailable."""
    rows = ((fmt(x), fmt(t), side, fmt(u), fmt(ut), fmt(utt), fmt(uxx))
            for x, t, side, u, ut, utt, uxx in grid.rows())
    return _render_rows(FIELD_COLUMNS, rows)


def render_convergence_csv(table: ConvergenceTable) -> str:
    """convergence.csv: N and the error per field, closed by a 'slope' row."""
    fields: List[str] = sorted(table.slopes)
    rows = [[str(row.n)] + [fmt(row.errors[name]) for name in fields] + [fmt(row.coefficient)]
            for row in table.rows]
    rows.append(["slope"] + [fmt(table.slopes[name]) for name in fields] + [""])
    return _render_rows(["N"] + fields + ["coefficient"], rows)


def render_degeneracy_csv(scan: DegeneracyScan) -> str:
    rows = [[str(n), fmt(lam), fmt(value), fmt(abs(value))]
            for n, (lam, value) in enumerate(zip(scan.lambdas, scan.values), start=1)]
    return _render_rows(["n", "lambda_n", "value", "abs_value"], rows)
