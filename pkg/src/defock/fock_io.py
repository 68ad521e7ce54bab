"""Serialization and artifact emission: CSV tables, SVG line plots,
state-document round trips.

All writers are deterministic: identical inputs produce byte-identical
files (no timestamps, no locale dependence).  Reals are written with 17
significant digits so that re-parsing reproduces the exact double.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .states import FockState

__all__ = [
    "ScanTable",
    "format_real",
    "write_csv",
    "read_csv",
    "write_svg_lineplot",
    "state_roundtrip",
]


def format_real(x: float) -> str:
    """Shortest 17-significant-digit decimal; round-trips any finite double."""
    return format(float(x), ".17g")


@dataclass
class ScanTable:
    """Rectangular numeric table with named columns and a provenance header."""

    columns: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValidationError("ragged row in ScanTable")

    def append(self, row):
        if len(row) != len(self.columns):
            raise ValidationError("row length does not match columns")
        self.rows.append(list(row))

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _format_cell(value) -> str:
    if isinstance(value, str):
        if any(ch in value for ch in ",\n\r\""):
            raise ValidationError(f"cell value needs quoting, unsupported: {value!r}")
        return value
    if isinstance(value, bool):
        raise ValidationError("boolean cells are ambiguous; use 0/1")
    if isinstance(value, int):
        return str(value)
    return format_real(value)


def write_csv(table: ScanTable, path) -> None:
    """RFC-4180-style CSV with LF endings and '# key=value' provenance lines."""
    lines = [f"# {k}={v}" for k, v in table.provenance.items()]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path) -> ScanTable:
    """Parse a file written by :func:`write_csv`; numeric cells become floats."""
    provenance = {}
    columns = None
    rows = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        if not raw:
            continue
        if raw.startswith("#"):
            key, _, value = raw[1:].strip().partition("=")
            provenance[key] = value
            continue
        cells = raw.split(",")
        if columns is None:
            columns = cells
            continue
        parsed = []
        for cell in cells:
            try:
                parsed.append(float(cell))
            except ValueError:
                parsed.append(cell)
        rows.append(parsed)
    if columns is None:
        raise ValidationError(f"no header row in {path}")
    return ScanTable(columns=columns, rows=rows, provenance=provenance)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, count: int = 5):
    if not lo < hi:
        lo, hi = lo - 1.0, hi + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def write_svg_lineplot(table: ScanTable, x_col: str, y_cols, path,
                       style: dict | None = None) -> None:
    """Standalone SVG 1.1 line plot with linear axes and a legend.

    Rows whose x or y value is not finite are skipped.  Output depends
    only on the inputs.
    """
    style = dict(style or {})
    if x_col not in table.columns:
        raise ValidationError(f"unknown x column {x_col!r}")
    for col in y_cols:
        if col not in table.columns:
            raise ValidationError(f"unknown y column {col!r}")

    width, height = 640.0, 420.0
    ml, mr, mt, mb = 72.0, 18.0, 24.0, 52.0
    inner_w, inner_h = width - ml - mr, height - mt - mb

    def _finite(values):
        return [v for v in values if isinstance(v, float) and v == v and abs(v) != float("inf")]

    xs = _finite(table.column(x_col))
    ys = []
    for col in y_cols:
        ys.extend(_finite(table.column(col)))
    if not xs or not ys:
        xs = xs or [0.0, 1.0]
        ys = ys or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * inner_w

    def sy(y):
        return mt + (1.0 - (y - y_lo) / (y_hi - y_lo)) * inner_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
        f'<rect x="{ml:g}" y="{mt:g}" width="{inner_w:g}" height="{inner_h:g}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(
            f'<line x1="{px:.2f}" y1="{mt + inner_h:.2f}" x2="{px:.2f}" '
            f'y2="{mt + inner_h + 5:.2f}" stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{mt + inner_h + 18:.2f}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{tx:.4g}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(
            f'<line x1="{ml - 5:.2f}" y1="{py:.2f}" x2="{ml:.2f}" y2="{py:.2f}" '
            'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 8:.2f}" y="{py + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{ty:.4g}</text>'
        )
    parts.append(
        f'<text x="{ml + inner_w / 2:.2f}" y="{height - 12:.2f}" font-size="12" '
        f'text-anchor="middle" font-family="sans-serif">{style.get("xlabel", x_col)}</text>'
    )
    if "title" in style:
        parts.append(
            f'<text x="{ml + inner_w / 2:.2f}" y="{mt - 8:.2f}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif">{style["title"]}</text>'
        )

    x_vals = table.column(x_col)
    for i, col in enumerate(y_cols):
        color = _PALETTE[i % len(_PALETTE)]
        pts = []
        for xv, yv in zip(x_vals, table.column(col)):
            if not (isinstance(xv, float) and isinstance(yv, float)):
                continue
            if xv != xv or yv != yv:
                continue
            pts.append(f"{sx(xv):.2f},{sy(yv):.2f}")
        if pts:
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{" ".join(pts)}"/>'
            )
        ly = mt + 16.0 + 16.0 * i
        parts.append(
            f'<line x1="{ml + inner_w - 150:.2f}" y1="{ly - 4:.2f}" '
            f'x2="{ml + inner_w - 130:.2f}" y2="{ly - 4:.2f}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{ml + inner_w - 125:.2f}" y="{ly:.2f}" font-size="11" '
            f'font-family="sans-serif">{col}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")


def state_roundtrip(state: FockState) -> FockState:
    """Serialize-then-parse identity; amplitudes survive bit-exactly."""
    return FockState.from_json(state.to_json())
