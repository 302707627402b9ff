"""Report documents: JSON (schema-validated) and CSV time series.

Every CLI command emits the same top-level document shape: tool version,
command name, optional seed, notes, and a command-specific report body.
Non-finite floats serialize as null so the documents stay valid JSON;
the convention is recorded in the schema description.
"""

import csv
import io
import json
import math
from dataclasses import fields, is_dataclass
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .curves import TimeWindow, quantity_values
from .geometry import SurfacePoint, TangentVector

# dataclass field names renamed on the wire
_FIELD_NAMES = {"lam": "lambda"}


def to_jsonable(obj):
    """Recursively convert reports (dataclasses, numpy values) to plain
    JSON-compatible structures; non-finite numbers become null."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, SurfacePoint):
        return to_jsonable(obj.coords)
    if isinstance(obj, TangentVector):
        return {"base": to_jsonable(obj.base), "vec": to_jsonable(obj.vec)}
    if is_dataclass(obj):
        out = {}
        for f in fields(obj):
            out[_FIELD_NAMES.get(f.name, f.name)] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj)!r}")


def build_document(command: str, report, seed=None, notes=()) -> dict:
    doc = {
        "tool_version": __version__,
        "command": command,
        "seed": seed,
        "notes": [str(n) for n in notes],
        "report": to_jsonable(report),
    }
    validate_document(doc)
    return doc


_SCHEMA = None


def report_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("manifold_landau").joinpath(
            "schemas/report.schema.json").read_text(encoding="utf-8")
        _SCHEMA = json.loads(text)
    return _SCHEMA


def validate_document(doc: dict) -> None:
    jsonschema.validate(instance=doc, schema=report_schema())


def emit_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)


def parse_document(text: str) -> dict:
    doc = json.loads(text)
    validate_document(doc)
    return doc


# ---------------------------------------------------------------------------
# CSV emission (RFC-4180 quoting via the csv module)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def curve_time_series(curve, window: TimeWindow, aux=None) -> str:
    """Time series for plotting: t, speed, covariant acceleration norm,
    and (when an auxiliary function is supplied) v = <grad U o x, x'>
    and U o x."""
    ts = window.grid()
    X, Xd, Xdd = curve.batch(ts)
    speed = np.linalg.norm(Xd, axis=1)
    accel = quantity_values(curve, ts, "covariant_accel_norm")
    cols = [ts, speed, accel]
    header = ["t", "speed", "covariant_accel_norm"]
    if aux is not None:
        grads = aux.gradient_batch(X)
        v = np.einsum("ni,ni->n", grads, Xd)
        cols += [v, aux.value_batch(X)]
        header += ["v", "aux_value"]
    rows = zip(*[[repr(float(x)) for x in col] for col in cols])
    return _csv_text(header, rows)


def scalar_time_series(curve, window: TimeWindow) -> str:
    """Scalar-curve series: t, f, f', f''."""
    ts = window.grid()
    X, Xd, Xdd = curve.batch(ts)
    rows = ((repr(float(t)), repr(float(x[0])), repr(float(d[0])), repr(float(dd[0])))
            for t, x, d, dd in zip(ts, X, Xd, Xdd))
    return _csv_text(["t", "f", "fprime", "fsecond"], rows)


def cap_point_table(points: np.ndarray, cap) -> str:
    """Per-point view of a cap-center solution: inner product with the
    center and chordal distance."""
    dots = points @ cap.e.coords
    chord = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * dots))
    rows = ((repr(float(p[0])), repr(float(p[1])), repr(float(p[2])),
             repr(float(d)), repr(float(c)))
            for p, d, c in zip(points, dots, chord))
    return _csv_text(["x", "y", "z", "inner_product", "chordal_distance"], rows)


def probe_table(result) -> str:
    rows = [(result.family, repr(result.best_q), repr(result.best_sqrt_q),
             repr(result.q_upper), result.evaluations, result.skipped,
             result.budget, result.seed)]
    return _csv_text(
        ["family", "best_q", "best_sqrt_q", "q_upper", "evaluations",
         "skipped", "budget", "seed"], rows)


def constant_table(lc) -> str:
    return _csv_text(["C", "residual"], [(repr(lc.C), repr(lc.residual))])
