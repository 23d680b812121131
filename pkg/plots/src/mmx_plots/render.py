"""Figure construction for the four supported kinds.

Rendering is read-only over its inputs and deterministic: a rerun with
the same inputs overwrites the output with identical bytes (fixed dpi,
fixed PNG metadata, no timestamps of our own).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")  # file output only, never a display

import matplotlib.pyplot as plt

from .schema import (
    LYAPUNOV_COLUMNS,
    TRACE_COLUMNS,
    load_report,
    load_spectral,
    load_trace,
)

KINDS = ("convergence", "slope", "lyapunov", "spectral")

# fixed output knobs keep reruns byte-identical
_DPI = 110
_METADATA = {"Software": "mmx-plot"}
_FIGSIZE = (6.4, 4.4)

# log-scale floor for exact-zero deviations
_DEV_FLOOR = 1e-18


@dataclass(frozen=True)
class FigureSpec:
    """One figure request.

    kind selects the renderer; inputs are trace CSVs for convergence and
    lyapunov, sweep report JSONs for slope, a spectral report JSON for
    spectral. Slope figures default to log-log axes; the scale fields
    override the kind's default when set.
    """

    kind: str
    inputs: tuple[Path, ...]
    output: Path
    epsilon: float | None = None
    xscale: str | None = None
    yscale: str | None = None
    title: str | None = None


def fit_label(slope: float, r2: float) -> str:
    # the annotated slope is the figure's contract: 3 decimals, verbatim
    return f"fit: T ~ eps^{slope:.3f} (r2 = {r2:.4f})"


def render(spec: FigureSpec) -> list[Path]:
    """Render spec.output and return the written paths."""
    fig, _ = build_figure(spec)
    save_figure(fig, spec.output)
    return [spec.output]


def save_figure(fig, path: Path) -> None:
    """Write fig to path with the fixed output knobs, then close it."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=_DPI, metadata=_METADATA)
    finally:
        plt.close(fig)


def build_figure(spec: FigureSpec):
    """Build the matplotlib Figure plus an info dict for callers.

    Exposed separately from render so tests and the CLI can inspect what
    was drawn (annotated slope, curve data) without decoding the image.
    """
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind: {spec.kind}")
    builder = {
        "convergence": _build_convergence,
        "slope": _build_slope,
        "lyapunov": _build_lyapunov,
        "spectral": _build_spectral,
    }[spec.kind]
    fig, ax, info = builder(spec)
    if spec.xscale:
        ax.set_xscale(spec.xscale)
    if spec.yscale:
        ax.set_yscale(spec.yscale)
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    return fig, info


def _new_axes():
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _build_convergence(spec: FigureSpec):
    fig, ax = _new_axes()
    info: dict = {"curves": {}, "first_hits": {}}
    drew = False
    for path in spec.inputs:
        trace = load_trace(path, TRACE_COLUMNS)
        t = trace.columns["t"]
        gs = trace.columns["gs_primal"]
        if not t:
            continue
        ax.plot(t, gs, label=f"{trace.label} gs", linewidth=1.4)
        info["curves"][trace.label] = (t, gs)
        if len(spec.inputs) == 1:
            # single-trace figures show the full residual picture
            ax.plot(t, trace.columns["gs_dual"], label="gs dual", linewidth=1.0)
            ax.plot(t, trace.columns["os"], label="os", linewidth=1.0)
        if spec.epsilon is not None:
            hit = next(
                (tt for tt, g in zip(t, gs) if g <= spec.epsilon), None
            )
            info["first_hits"][trace.label] = hit
            if hit is not None:
                ax.axvline(hit, color="grey", alpha=0.4, linewidth=0.8)
        drew = True
    if spec.epsilon is not None and drew:
        ax.axhline(
            spec.epsilon, linestyle="--", color="black", linewidth=1.0,
            label=f"eps = {spec.epsilon:g}",
        )
    ax.set_xlabel("iteration t")
    ax.set_ylabel("residual")
    if drew:
        ax.set_yscale("log")
        ax.legend(fontsize=8)
    else:
        ax.text(
            0.5, 0.5, "no audited rows", transform=ax.transAxes,
            ha="center", va="center", color="grey",
        )
    return fig, ax, info


def _build_slope(spec: FigureSpec):
    fig, ax = _new_axes()
    info: dict = {"annotated_slope": None, "series": {}}
    single = len(spec.inputs) == 1
    for path in spec.inputs:
        rep = load_report(path)
        eps, hits = rep.sorted_points()
        label = f"{rep.label}: {fit_label(rep.slope, rep.r2)}"
        pts = ax.plot(eps, hits, "o", markersize=5, label=label)
        color = pts[0].get_color()
        info["series"][rep.label] = (eps, hits, rep.slope)
        if eps:
            # fitted power law over the observed range
            grid = [min(eps), max(eps)]
            line = [math.exp(rep.intercept) * e**rep.slope for e in grid]
            ax.plot(grid, line, "-", color=color, linewidth=1.2)
            if single and rep.predicted_slope is not None:
                # reference line with the predicted slope through the
                # deepest observed point
                anchor_e, anchor_t = eps[0], hits[0]
                ref = [
                    anchor_t * (e / anchor_e) ** rep.predicted_slope
                    for e in grid
                ]
                ax.plot(
                    grid, ref, "--", color="black", linewidth=1.0,
                    label=f"predicted slope {rep.predicted_slope:g}",
                )
        if single:
            info["annotated_slope"] = float(f"{rep.slope:.3f}")
            ax.annotate(
                fit_label(rep.slope, rep.r2),
                xy=(0.03, 0.06), xycoords="axes fraction", fontsize=9,
                bbox={"boxstyle": "round", "fc": "white", "alpha": 0.8},
            )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("target eps")
    ax.set_ylabel("first-hit T")
    ax.legend(fontsize=7)
    return fig, ax, info


def _build_lyapunov(spec: FigureSpec):
    fig, ax = _new_axes()
    info: dict = {"ascents": {}}
    drew = False
    positive = True
    for path in spec.inputs:
        trace = load_trace(path, LYAPUNOV_COLUMNS)
        t = trace.columns["t"]
        psi = trace.columns["psi"]
        if not t:
            continue
        ax.plot(t, psi, label=f"{trace.label} psi", linewidth=1.4)
        ups = sum(1 for a, b in zip(psi, psi[1:]) if b > a)
        info["ascents"][trace.label] = ups
        positive = positive and all(v > 0.0 for v in psi)
        drew = True
    if drew:
        total = sum(info["ascents"].values())
        ax.annotate(
            f"ascent steps: {total}",
            xy=(0.03, 0.92), xycoords="axes fraction", fontsize=9,
        )
        if positive:
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    else:
        ax.text(
            0.5, 0.5, "no audited rows", transform=ax.transAxes,
            ha="center", va="center", color="grey",
        )
    ax.set_xlabel("iteration t")
    ax.set_ylabel("potential")
    return fig, ax, info


def _build_spectral(spec: FigureSpec):
    fig, ax = _new_axes()
    info: dict = {"worst": None, "all_ok": None}
    for path in spec.inputs:
        rep = load_spectral(path)
        devs = [max(d, _DEV_FLOOR) for d in rep.rel_deviations]
        ax.plot(
            rep.closed_values, devs, "o", markersize=4,
            label=f"{rep.label} (worst {rep.worst:.2e})",
        )
        info["worst"] = rep.worst
        info["all_ok"] = rep.all_ok
    ax.axhline(
        1e-8, linestyle="--", color="black", linewidth=1.0,
        label="tolerance 1e-8",
    )
    ax.set_yscale("log")
    ax.set_xlabel("closed-form eigenvalue")
    ax.set_ylabel("rel. deviation from numeric")
    ax.legend(fontsize=8)
    return fig, ax, info
