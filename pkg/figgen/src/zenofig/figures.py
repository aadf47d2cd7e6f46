"""Figure rendering: survival curves, Fisher scaling with slope fits, and
cascade deviation versus stage count.

Output is deterministic: the Agg/SVG backends are configured with a fixed
hash salt and the SVG date metadata stripped, so identical inputs give
byte-identical images.  Both PNG and SVG are written for every figure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "zenofig"

import matplotlib.pyplot as plt
import numpy as np

from .tables import Table, TableError, read_table

KINDS = ("survival-curves", "fisher-scaling", "cascade-deviation")
SCALES = ("linear", "log")

FIGSIZE = (6.0, 4.0)
DPI = 150


class FigureSpecError(ValueError):
    """The figure spec file is invalid."""


@dataclass(frozen=True)
class SeriesInput:
    path: str
    label: str


@dataclass
class FigureSpec:
    kind: str
    inputs: list[SeriesInput]
    output: str
    title: str | None = None
    x_scale: str | None = None  # None -> per-kind default
    y_scale: str | None = None
    group_by: str | None = None  # series-grouping column (fisher-scaling)


@dataclass
class RenderSummary:
    """What render produced: the written image paths and, for scaling plots,
    the fitted log-log slope per series label."""

    outputs: list[str]
    slopes: dict[str, float] = field(default_factory=dict)


def load_figure_spec(path: str) -> FigureSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FigureSpecError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FigureSpecError("figure spec must be a JSON object")
    allowed = {"kind", "inputs", "output", "title", "x_scale", "y_scale", "group_by"}
    unknown = set(data) - allowed
    if unknown:
        raise FigureSpecError(f"unknown fields: {sorted(unknown)}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise FigureSpecError(f"kind must be one of {list(KINDS)}, got {kind!r}")
    raw_inputs = data.get("inputs")
    if not isinstance(raw_inputs, list) or not raw_inputs:
        raise FigureSpecError("inputs must be a nonempty list")
    inputs = []
    base = Path(path).resolve().parent
    for entry in raw_inputs:
        if isinstance(entry, str):
            entry = {"path": entry, "label": Path(entry).stem}
        if not isinstance(entry, dict) or "path" not in entry:
            raise FigureSpecError(f"bad input entry {entry!r}")
        p = entry["path"]
        if not Path(p).is_absolute():
            p = str(base / p)
        inputs.append(SeriesInput(path=p, label=str(entry.get("label", Path(p).stem))))
    output = data.get("output")
    if not isinstance(output, str) or not output:
        raise FigureSpecError("output path is required")
    if not Path(output).is_absolute():
        output = str(base / output)
    for axis in ("x_scale", "y_scale"):
        if data.get(axis) is not None and data[axis] not in SCALES:
            raise FigureSpecError(f"{axis} must be one of {list(SCALES)}")
    return FigureSpec(
        kind=kind,
        inputs=inputs,
        output=output,
        title=data.get("title"),
        x_scale=data.get("x_scale"),
        y_scale=data.get("y_scale"),
        group_by=data.get("group_by"),
    )


def _require_rows(table: Table, path: str) -> None:
    if not table.rows:
        raise TableError(f"{path} is an empty table")


def _new_axes():
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    return fig, ax


def _save(fig, output: str) -> list[str]:
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    png = out if out.suffix == ".png" else out.with_suffix(".png")
    svg = png.with_suffix(".svg")
    fig.savefig(png, format="png")
    fig.savefig(svg, format="svg", metadata={"Date": None})
    plt.close(fig)
    return [str(png), str(svg)]


def _render_survival(spec: FigureSpec) -> RenderSummary:
    fig, ax = _new_axes()
    for series in spec.inputs:
        table = read_table(series.path)
        _require_rows(table, series.path)
        x = np.asarray(table.column("ratio"), dtype=float)
        order = np.argsort(x)
        for column, style in (
            ("p_exact", "-"),
            ("p_quadratic", "--"),
            ("p_gaussian", ":"),
        ):
            y = np.asarray(table.column(column), dtype=float)
            label = column if len(spec.inputs) == 1 else f"{series.label} {column}"
            ax.plot(x[order], y[order], style, label=label)
    ax.set_xlabel(r"$\tau / \tau_{qz}$")
    ax.set_ylabel("survival probability")
    ax.set_xscale(spec.x_scale or "linear")
    ax.set_yscale(spec.y_scale or "linear")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.set_title(spec.title or "exact vs. quadratic vs. Gaussian survival")
    return RenderSummary(outputs=_save(fig, spec.output))


def _fit_slope(x: np.ndarray, y: np.ndarray) -> float:
    mask = (x > 0) & (y > 0)
    if mask.sum() < 2:
        raise TableError("need at least two positive points for a log-log slope fit")
    slope, _ = np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)
    return float(slope)


def _render_fisher(spec: FigureSpec) -> RenderSummary:
    fig, ax = _new_axes()
    group_col = spec.group_by or "family"
    slopes: dict[str, float] = {}
    for series in spec.inputs:
        table = read_table(series.path)
        _require_rows(table, series.path)
        groups = table.column(group_col)
        n = np.asarray(table.column("n_qubits"), dtype=float)
        f = np.asarray(table.column("fisher_quadratic"), dtype=float)
        for label in dict.fromkeys(groups):  # first-appearance order
            sel = np.array([g == label for g in groups])
            order = np.argsort(n[sel])
            slope = _fit_slope(n[sel][order], f[sel][order])
            slopes[str(label)] = slope
            ax.plot(n[sel][order], f[sel][order], "o-", label=f"{label} (slope {slope:.2f})")
    ax.set_xlabel("number of qubits N")
    ax.set_ylabel("Fisher information F")
    ax.set_xscale(spec.x_scale or "log")
    ax.set_yscale(spec.y_scale or "log")
    ax.legend()
    ax.set_title(spec.title or "Fisher information scaling")
    return RenderSummary(outputs=_save(fig, spec.output), slopes=slopes)


def _render_cascade(spec: FigureSpec) -> RenderSummary:
    fig, ax = _new_axes()
    epsilon = None
    for series in spec.inputs:
        table = read_table(series.path)
        _require_rows(table, series.path)
        m = np.asarray(table.column("m"), dtype=float)
        dev = np.asarray(table.column("zeno_deviation"), dtype=float)
        order = np.argsort(m)
        ax.plot(m[order], dev[order], "o-", label=series.label)
        if "epsilon" in table.metadata:
            epsilon = float(table.metadata["epsilon"])
    ax.axhline(epsilon if epsilon is not None else 0.05, color="gray", linestyle="--",
               linewidth=1, label=r"$\varepsilon$")
    ax.set_xlabel("stage count m")
    ax.set_ylabel("deviation from the input state")
    ax.set_xscale(spec.x_scale or "log")
    ax.set_yscale(spec.y_scale or "log")
    ax.legend()
    ax.set_title(spec.title or "Zeno-cut cascade deviation vs. stage count")
    return RenderSummary(outputs=_save(fig, spec.output))


_RENDERERS = {
    "survival-curves": _render_survival,
    "fisher-scaling": _render_fisher,
    "cascade-deviation": _render_cascade,
}


def render(spec: FigureSpec) -> RenderSummary:
    """Render one figure spec to PNG + SVG; inputs are never mutated."""
    return _RENDERERS[spec.kind](spec)
