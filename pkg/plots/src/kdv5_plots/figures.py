"""Figure rendering for kdv5 experiment outputs.

Each figure kind is a pure function of its input files; re-rendering with a
fixed toolchain is byte-stable.  The kappa_decay kind annotates the
least-squares slope of log(value) against log(kappa) and reports it in the
returned result.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_conserved, read_snapshots, read_table

FIGURE_KINDS = ("drift", "kappa_decay", "ls_scan", "waterfall")


@dataclass(frozen=True)
class FigureSpec:
    input_paths: tuple[str, ...]
    kind: str
    output_path: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}")
        if not self.input_paths:
            raise ValueError("at least one input path is required")


@dataclass
class RenderResult:
    path: str
    annotations: dict


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=spec.options.get("figsize", (6.4, 4.2)))
    return fig, ax


def _save(fig, spec: FigureSpec) -> str:
    out = spec.output_path
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    metadata = {"Date": None} if out.endswith(".svg") else None
    fig.savefig(out, dpi=spec.options.get("dpi", 120), metadata=metadata)
    plt.close(fig)
    return out


def _render_drift(spec: FigureSpec) -> RenderResult:
    series = read_conserved(spec.input_paths[0])
    fig, ax = _new_axes(spec)
    floor = float(spec.options.get("floor", 1e-18))
    for name in sorted(series):
        data = series[name]
        t, values = data[:, 0], data[:, 1]
        ref = abs(values[0]) if abs(values[0]) > 1e-12 else 1.0
        drift = np.abs(values - values[0]) / ref
        ax.semilogy(t, np.maximum(drift, floor), label=name)
    if series:
        ax.legend(fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.set_title("conserved-quantity drift")
    return RenderResult(_save(fig, spec), {"series": len(series)})


def _render_kappa_decay(spec: FigureSpec) -> RenderResult:
    value_column = spec.options.get("value_column", "remainder")
    table = read_table(spec.input_paths[0], ("kappa", value_column))
    kappa = table["kappa"]
    values = table[value_column]
    keep = np.isfinite(values) & (values > 0)
    slope = np.nan
    fig, ax = _new_axes(spec)
    ax.loglog(kappa[keep], values[keep], "o-")
    if np.count_nonzero(keep) >= 2:
        slope = float(np.polyfit(np.log(kappa[keep]), np.log(values[keep]), 1)[0])
        ax.annotate(f"slope = {slope:.3f}", xy=(0.05, 0.08),
                    xycoords="axes fraction")
    ax.set_xlabel("kappa")
    ax.set_ylabel(value_column)
    ax.set_title("decay in kappa")
    return RenderResult(_save(fig, spec), {"slope": slope})


def _render_ls_scan(spec: FigureSpec) -> RenderResult:
    table = read_table(spec.input_paths[0], ("z", "kappa", "ls_value"))
    fig, ax = _new_axes(spec)
    kappas = np.unique(table["kappa"])
    for kappa in kappas:
        mask = table["kappa"] == kappa
        ax.plot(table["z"][mask], table["ls_value"][mask], label=f"kappa={kappa:g}")
    if len(kappas):
        ax.legend(fontsize=8)
    ax.set_xlabel("center z")
    ax.set_ylabel("local smoothing value")
    ax.set_title("local-smoothing scan")
    return RenderResult(_save(fig, spec), {"kappas": len(kappas)})


def _render_waterfall(spec: FigureSpec) -> RenderResult:
    meta_path = spec.input_paths[1] if len(spec.input_paths) > 1 else None
    times, states, x, _meta = read_snapshots(spec.input_paths[0], meta_path)
    max_traces = int(spec.options.get("max_traces", 24))
    stride = max(1, len(times) // max_traces)
    span = float(np.max(np.abs(states))) or 1.0
    gap = float(spec.options.get("offset", 1.5)) * span
    fig, ax = _new_axes(spec)
    for rank, index in enumerate(range(0, len(times), stride)):
        ax.plot(x, states[index] + rank * gap, lw=0.8, color="black")
    ax.set_xlabel("x")
    ax.set_yticks([])
    ax.set_title(f"q(t, x), t = {times[0]:g} .. {times[-1]:g}")
    return RenderResult(_save(fig, spec), {"traces": len(range(0, len(times), stride))})


_RENDERERS = {
    "drift": _render_drift,
    "kappa_decay": _render_kappa_decay,
    "ls_scan": _render_ls_scan,
    "waterfall": _render_waterfall,
}


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns the written path and figure annotations."""
    return _RENDERERS[spec.kind](spec)
