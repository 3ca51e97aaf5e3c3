"""Figure rendering from run artifacts.

Every kind maps a FigureSpec (input paths plus style options) to one image
file. Rendering is deterministic: identical inputs and style give identical
bytes. Inputs are opened read-only and never modified.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_bifurcation, read_field_dump, read_state, read_trajectory

__all__ = ["FigureSpec", "KINDS", "plot"]

KINDS = (
    "timeseries",
    "phase2d",
    "phase3d",
    "mode_heatmap",
    "bifurcation",
    "field_snapshot",
    "energy_panel",
)

# fixed visual defaults so identical inputs render to identical bytes
_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "rbcplots",
}
_CYCLE = ("tab:blue", "black", "tab:red", "tab:green", "tab:orange", "tab:purple")


@dataclass
class FigureSpec:
    """One figure: what to draw, from which files, with which style knobs."""

    kind: str
    inputs: list[str]
    out: str
    style: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("figure spec has no inputs")


def plot(spec: FigureSpec) -> str:
    """Render the figure and return the output path."""
    with plt.rc_context(_RC):
        fig = _RENDERERS[spec.kind](spec)
        try:
            _save(fig, spec.out)
        finally:
            plt.close(fig)
    return spec.out


def _save(fig, out: str) -> None:
    ext = os.path.splitext(out)[1].lower()
    metadata: dict = {}
    if ext == ".png":
        metadata = {"Software": "rbcplots"}
    elif ext == ".svg":
        metadata = {"Date": None}
    elif ext == ".pdf":
        metadata = {"CreationDate": None}
    fig.savefig(out, metadata=metadata)


def _label(path: str) -> str:
    base = os.path.basename(path)
    parent = os.path.basename(os.path.dirname(path))
    return parent or os.path.splitext(base)[0]


def _render_timeseries(spec: FigureSpec):
    column = spec.style.get("column", "Z")
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    for path, color in zip(spec.inputs, _CYCLE):
        data = read_trajectory(path)
        if column not in data:
            raise SchemaError(f"trajectory CSV {path!r} is missing column {column!r}")
        ax.plot(data["t"], data[column], color=color, lw=0.9, label=_label(path))
    ax.set_xlabel("t")
    ax.set_ylabel(column)
    if len(spec.inputs) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_phase2d(spec: FigureSpec):
    x_col = spec.style.get("x", "X")
    y_col = spec.style.get("y", "Z")  # the vertical-mode amplitude goes up
    fig, ax = plt.subplots(figsize=(4.2, 4.2))
    for path, color in zip(spec.inputs, _CYCLE):
        data = read_trajectory(path)
        for col in (x_col, y_col):
            if col not in data:
                raise SchemaError(f"trajectory CSV {path!r} is missing column {col!r}")
        ax.plot(data[x_col], data[y_col], color=color, lw=0.7, label=_label(path))
    ax.set_xlabel(x_col)
    ax.set_ylabel(y_col)
    if len(spec.inputs) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_phase3d(spec: FigureSpec):
    fig = plt.figure(figsize=(4.8, 4.4))
    ax = fig.add_subplot(projection="3d")
    for path, color in zip(spec.inputs, _CYCLE):
        data = read_trajectory(path)
        ax.plot(data["X"], data["Y"], data["Z"], color=color, lw=0.6, label=_label(path))
    ax.set_xlabel("X")
    ax.set_ylabel("Y")
    ax.set_zlabel("Z")
    if len(spec.inputs) > 1:
        ax.legend(loc="upper left", fontsize=8)
    return fig


def _render_mode_heatmap(spec: FigureSpec):
    which = spec.style.get("field", "psi")
    if which not in ("psi", "theta"):
        raise SchemaError(f"mode_heatmap style 'field' must be psi or theta, got {which!r}")
    doc = read_state(spec.inputs[0])
    amps = np.abs(doc[f"{which}_hat"])
    floor = float(spec.style.get("floor", 1e-16))
    logamp = np.log10(np.maximum(amps, floor))
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    # rows are streamwise order l (0..L), columns vertical order m (1..M)
    im = ax.imshow(
        logamp.T,
        origin="lower",
        aspect="auto",
        extent=(-0.5, doc["L"] + 0.5, 0.5, doc["M"] + 0.5),
        cmap=spec.style.get("cmap", "viridis"),
    )
    ax.set_xlabel("l")
    ax.set_ylabel("m")
    ax.grid(False)
    symbol = "ψ" if which == "psi" else "θ"
    fig.colorbar(im, ax=ax, label=f"log10 |{symbol}_lm|")
    fig.tight_layout()
    return fig


def _render_bifurcation(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    band_r: list[float] = []
    band_lo: list[float] = []
    band_hi: list[float] = []
    for path, color in zip(spec.inputs, _CYCLE):
        rows = [r for r in read_bifurcation(path) if not r["kind"].startswith("error")]
        rs, zs = [], []
        for row in rows:
            if row["z_max_min"] is None or row["z_max_max"] is None:
                continue
            if row["kind"] in ("LimitTorus", "Chaotic"):
                band_r.append(row["r"])
                band_lo.append(row["z_max_min"])
                band_hi.append(row["z_max_max"])
            else:
                rs.append(row["r"])
                zs.append(0.5 * (row["z_max_min"] + row["z_max_max"]))
        ax.plot(rs, zs, ".", color=color, ms=3, label=_label(path))
    if band_r:
        order = np.argsort(band_r)
        ax.fill_between(
            np.asarray(band_r)[order],
            np.asarray(band_lo)[order],
            np.asarray(band_hi)[order],
            color="0.6",
            alpha=0.6,
            lw=0,
            label="Z_max range",
        )
    ax.set_xlabel("r")
    ax.set_ylabel("Z_max")
    if len(spec.inputs) > 1 or band_r:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def _render_field_snapshot(spec: FigureSpec):
    doc = read_field_dump(spec.inputs[0])
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 4.6), sharex=True)
    for ax, name, symbol in ((axes[0], "psi", "ψ"), (axes[1], "theta", "θ")):
        f = doc[name]
        vmax = float(np.max(np.abs(f))) or 1.0
        im = ax.pcolormesh(
            doc["x"], doc["z"], f.T, cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="auto"
        )
        ax.set_ylabel("z")
        ax.grid(False)
        fig.colorbar(im, ax=ax, label=symbol)
    axes[1].set_xlabel("x")
    fig.tight_layout()
    return fig


def _render_energy_panel(spec: FigureSpec):
    data = read_trajectory(spec.inputs[0])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 4.8), sharex=True)
    for col, color in (("E_K", "tab:blue"), ("E_P", "tab:red"), ("E_T", "black")):
        ax1.plot(data["t"], data[col], color=color, lw=0.9, label=col)
    ax1.set_ylabel("energy")
    ax1.legend(loc="best", fontsize=8)
    rate = np.gradient(data["E_T"], data["t"])
    ax2.plot(data["t"], data["Q"], color="tab:red", lw=0.9, label="Q")
    ax2.plot(data["t"], data["V"], color="tab:blue", lw=0.9, label="V")
    ax2.plot(data["t"], data["Q"] + data["V"], color="black", lw=0.9, label="Q+V")
    ax2.plot(data["t"], rate, color="tab:green", lw=0.9, ls="--", label="dE_T/dt")
    ax2.set_xlabel("t")
    ax2.set_ylabel("rate")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "timeseries": _render_timeseries,
    "phase2d": _render_phase2d,
    "phase3d": _render_phase3d,
    "mode_heatmap": _render_mode_heatmap,
    "bifurcation": _render_bifurcation,
    "field_snapshot": _render_field_snapshot,
    "energy_panel": _render_energy_panel,
}
