"""Deterministic JSON / CSV / SVG serialization of results."""
from __future__ import annotations

import dataclasses
import io
import json
import math
from pathlib import Path

import numpy as np


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def identity_rows(report):
    for rho, (est, se, _), tgt in zip(report.rho_grid, report.estimates, report.targets):
        dev = (est - tgt) / se if se > 0 else (0.0 if est == tgt else math.copysign(math.inf, est - tgt))
        yield rho, est, se, tgt, dev


def identity_csv(report) -> str:
    buf = io.StringIO()
    buf.write("rho,estimate,std_error,target,deviation_in_se\n")
    for row in identity_rows(report):
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def identity_svg(report, width: int = 480, height: int = 360) -> str:
    """Estimates with 3-SE bars over the arcsin curve on rho in [-1, 1]."""
    pad = 40

    def px(rho):
        return pad + (rho + 1.0) / 2.0 * (width - 2 * pad)

    def py(val):
        return height - pad - (val + 1.0) / 2.0 * (height - 2 * pad)

    curve = " ".join(f"{px(r):.2f},{py(2 / math.pi * math.asin(r)):.2f}"
                     for r in np.linspace(-1.0, 1.0, 201))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>',
        f'<polyline points="{curve}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>',
    ]
    for rho, est, se, _, _ in identity_rows(report):
        x = px(rho)
        out.append(f'<line x1="{x:.2f}" y1="{py(est - 3 * se):.2f}" x2="{x:.2f}" '
                   f'y2="{py(est + 3 * se):.2f}" stroke="#d62728"/>')
        out.append(f'<circle cx="{x:.2f}" cy="{py(est):.2f}" r="3" fill="#d62728"/>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
               'font-size="12">rho</text>')
    out.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" '
               f'transform="rotate(-90 12 {height / 2:.0f})">E[sign sign]</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
