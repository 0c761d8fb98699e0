"""JSON run reports and SVG change point plots.

JSON schema (keys in this order)::

    t               number of observations T
    d               dimension
    method          "divisive" | "agglomerative"
    alpha, variant  energy statistic settings
    change_points   0-based indices; c means [0, c) and [c, T) differ
    p_values        per tested split, detection order (divisive only)
    statistics      scaled divergence per tested split (divisive) or per
                    neighbouring cluster pair (agglomerative)
    config          full run configuration, including the input path
    elapsed_seconds wall-clock seconds, or null when timing is disabled
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .energy import EnergyConfig
from .segmentation import ChangePointResult, DetectConfig

SVG_WIDTH = 1000
PANEL_HEIGHT = 200
MAX_PANELS = 8
MARKER_CLASS = "change-point"
MARKER_COLOR = "green"

_MARGIN_LEFT = 60
_MARGIN_RIGHT = 20
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 30


@dataclass
class RunReport:
    t: int
    d: int
    source: str | None
    method: str
    result: ChangePointResult
    elapsed_seconds: float | None = None
    initial_block: int | None = None

    def __post_init__(self):
        for cp in self.result.change_points:
            if not (0 < cp < self.t):
                raise ValueError(f"change point {cp} outside (0, {self.t})")

    def to_dict(self) -> dict:
        cfg = self.result.config
        config = cfg.as_dict()
        config["initial_block"] = self.initial_block
        config["input"] = self.source
        return {
            "t": self.t,
            "d": self.d,
            "method": self.method,
            "alpha": cfg.energy.alpha,
            "variant": cfg.energy.variant,
            "change_points": [int(c) for c in self.result.change_points],
            "p_values": [float(p) for p in self.result.p_values],
            "statistics": [float(s) for s in self.result.statistics],
            "config": config,
            "elapsed_seconds": self.elapsed_seconds,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunReport":
        c = obj["config"]
        cfg = DetectConfig(
            energy=EnergyConfig(alpha=obj["alpha"], variant=obj["variant"]),
            min_size=c["min_size"],
            n_permutations=c["n_permutations"],
            sig_level=c["sig_level"],
            kappa_mode=c["kappa_mode"],
            seed=c["seed"],
            max_change_points=c["max_change_points"],
            grid=c["grid"],
        )
        result = ChangePointResult(
            change_points=list(obj["change_points"]),
            p_values=list(obj["p_values"]),
            statistics=list(obj["statistics"]),
            config=cfg,
        )
        return cls(obj["t"], obj["d"], c.get("input"), obj["method"], result,
                   obj["elapsed_seconds"], c.get("initial_block"))


def emit_json(report: RunReport, path) -> None:
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    Path(path).write_text(text)


def load_report(path) -> RunReport:
    return RunReport.from_dict(json.loads(Path(path).read_text()))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(series, change_points) -> str:
    """SVG 1.1 document: one stacked panel per dimension (at most 8), the
    series drawn as a polyline and each change point as a green vertical line
    spanning the panel."""
    data = np.asarray(series, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    T, d = data.shape
    if T < 1 or d < 1:
        raise ValueError("series must have at least one observation and one dimension")
    panels = min(d, MAX_PANELS)
    height = PANEL_HEIGHT * panels
    plot_w = SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = PANEL_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def x_of(i: float) -> float:
        return _MARGIN_LEFT + (i / (T - 1) * plot_w if T > 1 else plot_w / 2)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_WIDTH}" '
        f'height="{height}" viewBox="0 0 {SVG_WIDTH} {height}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{height}" fill="white"/>',
    ]
    if d > MAX_PANELS:
        out.append(
            f'<text class="notice" x="{SVG_WIDTH - _MARGIN_RIGHT}" y="14" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">'
            f'{escape(f"showing first {MAX_PANELS} of {d} dimensions")}</text>'
        )
    for k in range(panels):
        top = k * PANEL_HEIGHT + _MARGIN_TOP
        col = data[:, k]
        lo, hi = float(col.min()), float(col.max())
        span = hi - lo

        def y_of(v: float) -> float:
            if span == 0:
                return top + plot_h / 2
            return top + (hi - v) / span * plot_h

        out.append(f'<g class="panel" id="panel-{k + 1}">')
        out.append(
            f'<rect x="{_MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{plot_h}" '
            f'fill="none" stroke="#999999" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{_fmt(top + plot_h / 2)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">x{k + 1}</text>'
        )
        out.append(
            f'<text x="{_MARGIN_LEFT - 4}" y="{top + 10}" text-anchor="end" font-family="sans-serif" '
            f'font-size="9">{escape(f"{hi:.4g}")}</text>'
        )
        out.append(
            f'<text x="{_MARGIN_LEFT - 4}" y="{top + plot_h}" text-anchor="end" font-family="sans-serif" '
            f'font-size="9">{escape(f"{lo:.4g}")}</text>'
        )
        pts = " ".join(f"{_fmt(x_of(i))},{_fmt(y_of(v))}" for i, v in enumerate(col))
        out.append(f'<polyline fill="none" stroke="#1f4e79" stroke-width="1" points="{pts}"/>')
        for cp in change_points:
            # the boundary sits between observations cp - 1 and cp
            x = _fmt(x_of(cp - 0.5))
            out.append(
                f'<line class="{MARKER_CLASS}" x1="{x}" y1="{top}" x2="{x}" y2="{top + plot_h}" '
                f'stroke="{MARKER_COLOR}" stroke-width="1.5"/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(series, result: ChangePointResult, path) -> None:
    Path(path).write_text(render_svg(series, result.change_points))
