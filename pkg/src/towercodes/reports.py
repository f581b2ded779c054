"""Report serialization: canonical JSON, delimited curve tables, schema
validation, and the matplotlib figures rendered next to the delimited
output.

Everything written here is byte-deterministic: keys are sorted, floats go
through repr, no timestamps, and the figure renderer runs on the Agg
backend with a pinned style.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .bounds import BoundCurve  # noqa: E402


def sanitize(obj):
    """Make report payloads JSON-serializable (Fractions become strings)."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, set):
        return sorted(sanitize(v) for v in obj)
    return obj


def canonical_json(payload) -> str:
    return json.dumps(sanitize(payload), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(payload), encoding="utf-8")
    return path


def curves_to_csv(curves: list[BoundCurve]) -> str:
    """Wide delimited table: one row per grid delta, one column per curve."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    kinds = [c.kind for c in curves]
    writer.writerow(["delta"] + kinds)
    grid = curves[0].grid
    for i, (d, _) in enumerate(grid):
        row = [repr(float(d))]
        for c in curves:
            row.append(repr(float(c.grid[i][1])))
        writer.writerow(row)
    return buf.getvalue()


def write_csv(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


_CURVE_STYLE = {
    "GV": dict(color="#1f77b4", ls="-"),
    "TVZ": dict(color="#d62728", ls="-"),
    "SX_IMPROVED": dict(color="#2ca02c", ls="--"),
    "SELF_DUAL_NEW": dict(color="#9467bd", ls="-."),
    "ISO_DUAL_OLD": dict(color="#8c564b", ls=":"),
}


def render_bounds_figure(curves: list[BoundCurve], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    for c in curves:
        xs = [float(d) for d, _ in c.grid]
        ys = [v for _, v in c.grid]
        ax.plot(xs, ys, label=c.kind, lw=1.4, **_CURVE_STYLE.get(c.kind, {}))
    ax.set_xlabel(r"relative minimum distance $\delta$")
    ax.set_ylabel(r"rate $R$")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.grid(alpha=0.3, lw=0.5)
    ax.legend(frameon=False, fontsize=9)
    ax.set_title(f"asymptotic bounds over GF({curves[0].q})", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})   # keep bytes reproducible
    plt.close(fig)
    return path


def validate_report(payload, schema_name: str):
    """Validate a payload against a schema shipped with the package."""
    import importlib.resources as res

    import jsonschema
    text = (res.files("towercodes") / "schemas" / schema_name).read_text()
    jsonschema.validate(sanitize(payload), json.loads(text))
