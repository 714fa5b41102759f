"""Deterministic figure rendering from exported data files.

Every plot kind validates its input schema before touching matplotlib;
schema mismatches raise SchemaError (the CLI maps that to a nonzero
exit).  Rendering is style-pinned and seed-free so identical inputs
produce identical image bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

TWO_PI = 2.0 * math.pi

KINDS = ("portrait", "orbit", "manifold", "melnikov", "regimemap")

STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 0.9,
}


class SchemaError(ValueError):
    """Input file does not match the expected export schema."""


@dataclass
class PlotJob:
    kind: str
    inputs: list[str]
    output: str
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("no input files given")


def _read_csv(path, expected_header):
    text = Path(path).read_text().splitlines()
    if not text:
        raise SchemaError(f"{path}: empty file")
    header = text[0].strip()
    if header != expected_header:
        raise SchemaError(
            f"{path}: expected header {expected_header!r}, got {header!r}")
    if len(text) < 2:
        raise SchemaError(f"{path}: no data rows")
    data = np.loadtxt(text[1:], delimiter=",", ndmin=2)
    if data.shape[1] != len(expected_header.split(",")):
        raise SchemaError(f"{path}: wrong column count")
    return data


def _sibling(path, old, new):
    p = Path(path)
    if p.name.endswith(old):
        cand = p.with_name(p.name[: -len(old)] + new)
        if cand.exists():
            return cand
    return None


def _apply_ranges(ax, job):
    if job.x_range:
        ax.set_xlim(*job.x_range)
    if job.y_range:
        ax.set_ylim(*job.y_range)


def _render_portrait(job: PlotJob):
    n = len(job.inputs)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.2), squeeze=False)
    for ax, path in zip(axes[0], job.inputs):
        data = _read_csv(path, "level,branch,x,y")
        levels = data[:, 0]
        branch = data[:, 1]
        key = np.round(levels, 12)
        meta = None
        meta_path = _sibling(path, "levels.csv", "critical_points.json")
        if meta_path is not None:
            meta = json.loads(meta_path.read_text())
        sep_levels = set()
        if meta:
            sep_levels = {round(v, 12) for v in meta["separatrix_levels"]}
        for lvl in np.unique(key):
            on_sep = lvl in sep_levels
            sel = key == lvl
            for br in np.unique(branch[sel]):
                seg = data[sel & (branch == br)]
                ax.plot(seg[:, 2], seg[:, 3],
                        color="crimson" if on_sep else "steelblue",
                        lw=1.4 if on_sep else 0.6,
                        zorder=3 if on_sep else 2)
        if meta:
            sx = [p["x"] for p in meta["saddles"]]
            sy = [p["y"] for p in meta["saddles"]]
            cx = [p["x"] for p in meta["centers"]]
            cy = [p["y"] for p in meta["centers"]]
            ax.plot(sx, sy, "x", color="black", ms=6, mew=1.4, zorder=4)
            ax.plot(cx, cy, "o", mfc="none", mec="black", ms=5, zorder=4)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(Path(path).stem.replace("_levels", ""), fontsize=8)
        _apply_ranges(ax, job)
    fig.tight_layout()
    return fig


def _render_orbit(job: PlotJob):
    n = len(job.inputs)
    fig, axes = plt.subplots(n, 1, figsize=(6.0, 2.4 * n), squeeze=False)
    for ax, path in zip(axes[:, 0], job.inputs):
        data = _read_csv(path, "t,x,y,x_lift,y_lift,energy")
        x_mod = np.mod(data[:, 3], TWO_PI)
        ax.plot(x_mod, data[:, 4], ",", color="navy", ms=0.5)
        ax.set_xlim(0, TWO_PI)
        ax.set_xlabel("x mod 2pi")
        ax.set_ylabel("lifted y")
        ax.set_title(Path(path).stem, fontsize=8)
        if job.y_range:
            ax.set_ylim(*job.y_range)
    fig.tight_layout()
    return fig


def _render_manifold(job: PlotJob):
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    colors = ("crimson", "seagreen", "darkorange", "slateblue")
    for k, path in enumerate(job.inputs):
        data = _read_csv(path, "s,x,y")
        ax.plot(data[:, 1], data[:, 2], color=colors[k % len(colors)],
                lw=0.8, label=Path(path).stem)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=7)
    _apply_ranges(ax, job)
    fig.tight_layout()
    return fig


def _render_melnikov(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.2, 3.2))
    for path in job.inputs:
        data = _read_csv(path, "t0,M")
        ax.plot(data[:, 0], data[:, 1], color="navy")
        zeros_path = _sibling(path, "profile.csv", "zeros.json")
        if zeros_path is not None:
            meta = json.loads(zeros_path.read_text())
            for z in meta.get("zeros", []):
                ax.plot(z["t0"], 0.0, "o", mfc="none", mec="crimson", ms=6)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("t0")
    ax.set_ylabel("M(t0)")
    _apply_ranges(ax, job)
    fig.tight_layout()
    return fig


_VERDICT_COLOR = {"confined": "#2166ac", "overlapped": "#b2182b",
                  "undetermined": "#cccccc"}


def _render_regimemap(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    path = job.inputs[0]
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != "eps,mu,verdict,evidence_id":
        raise SchemaError(f"{path}: not a regime-map export")
    eps, mu, col = [], [], []
    for line in text[1:]:
        fields = line.split(",")
        if len(fields) != 4:
            raise SchemaError(f"{path}: malformed row {line!r}")
        eps.append(float(fields[0]))
        mu.append(float(fields[1]))
        if fields[2] not in _VERDICT_COLOR:
            raise SchemaError(f"{path}: unknown verdict {fields[2]!r}")
        col.append(_VERDICT_COLOR[fields[2]])
    ax.scatter(eps, mu, c=col, marker="s", s=36, linewidths=0)
    summary = _sibling(path, "regimemap.csv", "summary.json")
    if summary is not None:
        meta = json.loads(summary.read_text())
        stars = [(b["mu"], b["eps_star"]) for b in meta["boundary"]
                 if b["eps_star"] is not None]
        if stars:
            ax.plot([e for _, e in stars], [m for m, _ in stars],
                    "k--", lw=1.0, label="eps*(mu)")
            ax.legend(fontsize=7)
    ax.set_yscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel("mu")
    _apply_ranges(ax, job)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "portrait": _render_portrait,
    "orbit": _render_orbit,
    "manifold": _render_manifold,
    "melnikov": _render_melnikov,
    "regimemap": _render_regimemap,
}


def render(job: PlotJob) -> str:
    """Render one job to its output path and return the path."""
    for path in job.inputs:
        if not Path(path).exists():
            raise SchemaError(f"input not found: {path}")
    with plt.rc_context(STYLE):
        fig = _RENDERERS[job.kind](job)
        try:
            fig.savefig(job.output, metadata={"Software": "overlaplab"})
        finally:
            plt.close(fig)
    return job.output
