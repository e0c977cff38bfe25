"""Render figures from a run directory's CSVs and manifest.

All data is read from persisted files; nothing is recomputed.  Each figure
carries a caption block embedding the manifest hash, so a rendered figure
can always be traced back to the exact run that produced it.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.fonttype"] = "none"  # keep captions as real text
matplotlib.rcParams["svg.hashsalt"] = "figgen"  # stable element ids

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGURE_KINDS = ("nnsd", "eta_scan", "rk_scan", "sff", "csr_scan", "dsff",
                "dspf")


class FigureError(Exception):
    pass


@dataclass
class FigureSpec:
    kind: str
    run_dir: Path
    out_path: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        self.run_dir = Path(self.run_dir)
        self.out_path = Path(self.out_path)
        if self.kind not in FIGURE_KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; "
                              f"choose from {', '.join(FIGURE_KINDS)}")
        if not (self.run_dir / "manifest.json").exists():
            raise FigureError(f"no manifest.json under {self.run_dir}")


def manifest_hash(run_dir: Path) -> str:
    h = hashlib.sha256()
    with open(Path(run_dir) / "manifest.json", "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_table(path: Path, columns: list[str]) -> dict[str, np.ndarray]:
    """Read a CSV with the given column schema; comment lines start with #."""
    if not path.exists():
        raise FigureError(f"missing input file {path}")
    with open(path, newline="") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    if not rows:
        raise FigureError(f"{path} is empty")
    header = [c.strip() for c in rows[0]]
    for col in columns:
        if col not in header:
            raise FigureError(f"{path}: missing column {col!r} "
                              f"(found {header})")
    idx = {c: header.index(c) for c in columns}
    data = rows[1:]
    return {c: np.array([float(r[idx[c]]) for r in data]) for c in columns}


def point_dirs(run_dir: Path) -> list[Path]:
    """Per-point output directories, ordered by (gamma, g)."""
    out = []
    for gdir in sorted(Path(run_dir).glob("gamma_*")):
        out.extend(sorted(gdir.glob("g_*")))
    if not out:
        raise FigureError(f"no parameter-point directories under {run_dir}")
    return out


def _point_label(point: Path) -> str:
    g = point.name.removeprefix("g_")
    gamma = point.parent.name.removeprefix("gamma_")
    return f"g={g}, gamma={gamma}"


def reference_tables(run_dir: Path) -> dict[str, dict[str, np.ndarray]]:
    """ref_nnsd_<kind>.csv overlays found at the run-dir root."""
    refs = {}
    for path in sorted(Path(run_dir).glob("ref_nnsd_*.csv")):
        kind = path.stem.removeprefix("ref_nnsd_")
        refs[kind] = read_table(path, ["s", "pdf"])
    return refs


def _caption(fig, run_dir: Path, extra: str = ""):
    text = f"run manifest sha256 {manifest_hash(run_dir)}"
    if extra:
        text += f" | {extra}"
    fig.text(0.01, 0.005, text, fontsize=5, family="monospace")


def _finish(fig, spec: FigureSpec, extra: str = ""):
    _caption(fig, spec.run_dir, extra)
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    suffix = spec.out_path.suffix.lower()
    if suffix not in (".svg", ".pdf"):
        raise FigureError(f"output must be .svg or .pdf, got {suffix!r}")
    # strip volatile metadata so identical inputs give identical files
    meta = {"Date": None} if suffix == ".svg" else {"CreationDate": None}
    fig.savefig(spec.out_path, metadata=meta)
    plt.close(fig)
    return spec.out_path


def _grid(n: int):
    cols = min(n, 3)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 3 * rows),
                             squeeze=False)
    flat = axes.ravel()
    for ax in flat[n:]:
        ax.set_visible(False)
    return fig, flat


def render_nnsd(spec: FigureSpec) -> Path:
    points = [p for p in point_dirs(spec.run_dir) if (p / "nnsd.csv").exists()]
    if not points:
        raise FigureError("no nnsd.csv in any point directory")
    refs = reference_tables(spec.run_dir)
    fig, axes = _grid(len(points))
    for ax, point in zip(axes, points):
        t = read_table(point / "nnsd.csv", ["bin_center", "pdf"])
        width = (t["bin_center"][1] - t["bin_center"][0]
                 if len(t["bin_center"]) > 1 else 0.1)
        ax.bar(t["bin_center"], t["pdf"], width=width, color="lightsteelblue",
               edgecolor="none", label="spectrum")
        for kind, ref in refs.items():
            ax.plot(ref["s"], ref["pdf"], lw=1.2, label=kind)
        ax.set_xlabel("s")
        ax.set_ylabel("P(s)")
        ax.set_title(_point_label(point), fontsize=8)
        ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec, f"{len(points)} points, {len(refs)} references")


def _scan_files(run_dir: Path, stem: str) -> list[Path]:
    single = run_dir / f"{stem}.csv"
    if single.exists():
        return [single]
    return sorted(run_dir.glob(f"{stem}_gamma_*.csv"))


def render_eta_scan(spec: FigureSpec) -> Path:
    files = _scan_files(spec.run_dir, "eta_scan")
    if not files:
        raise FigureError("no eta_scan CSV at the run-dir root "
                          "(produced by sweep runs)")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for path in files:
        with open(path) as f:
            xcol = f.readline().split(",")[0].strip()
        t = read_table(path, [xcol, "eta"])
        ax.plot(t[xcol], t["eta"], "o-", label=path.stem)
    ax.set_xlabel("g / g_c")
    ax.set_ylabel("eta")
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.axhline(1.0, color="0.8", lw=0.5)
    ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec)


def render_rk_scan(spec: FigureSpec) -> Path:
    path = spec.run_dir / "rk_scan.csv"
    t = read_table(path, ["g", "k", "r_mean"])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for k in np.unique(t["k"]):
        sel = t["k"] == k
        ax.plot(t["g"][sel], t["r_mean"][sel], "o-", label=f"k={int(k)}")
    ax.set_xlabel("g")
    ax.set_ylabel("<r_k>")
    ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec)


def render_sff(spec: FigureSpec) -> Path:
    points = [p for p in point_dirs(spec.run_dir) if (p / "sff.csv").exists()]
    if not points:
        raise FigureError("no sff.csv in any point directory")
    fig, axes = _grid(len(points))
    for ax, point in zip(axes, points):
        t = read_table(point / "sff.csv", ["t", "raw", "smoothed"])
        pos = t["t"] > 0
        # exactly two channels: raw without time averaging (light) on top of
        # the time-averaged curve (solid)
        ax.loglog(t["t"][pos], t["raw"][pos], color="0.8", lw=0.6,
                  label="raw")
        ax.loglog(t["t"][pos], t["smoothed"][pos], color="C0", lw=1.4,
                  label="smoothed")
        ax.set_xlabel("t")
        ax.set_ylabel("SFF")
        ax.set_title(_point_label(point), fontsize=8)
        ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec, f"{len(points)} points")


def render_csr_scan(spec: FigureSpec) -> Path:
    files = _scan_files(spec.run_dir, "csr_scan")
    if not files:
        raise FigureError("no csr_scan CSV at the run-dir root")
    fig, (ax_r, ax_c) = plt.subplots(1, 2, figsize=(8, 3.5))
    for path in files:
        t = read_table(path, ["g_over_gcgamma", "r_mean", "cos_mean"])
        ax_r.plot(t["g_over_gcgamma"], t["r_mean"], "o-", label=path.stem)
        ax_c.plot(t["g_over_gcgamma"], -t["cos_mean"], "s-", label=path.stem)
    ax_r.set_xlabel("g / g_c_gamma")
    ax_r.set_ylabel("<r>")
    ax_c.set_xlabel("g / g_c_gamma")
    ax_c.set_ylabel("-<cos theta>")
    ax_r.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec)


def render_dsff(spec: FigureSpec) -> Path:
    points = [p for p in point_dirs(spec.run_dir) if (p / "dsff.csv").exists()]
    if not points:
        raise FigureError("no dsff.csv in any point directory")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for point in points:
        t = read_table(point / "dsff.csv", ["tau", "value"])
        pos = t["tau"] > 0
        ax.loglog(t["tau"][pos], t["value"][pos], lw=1.0,
                  label=_point_label(point))
    ax.set_xlabel("tau")
    ax.set_ylabel("DSFF")
    ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec, f"{len(points)} points")


def render_dspf(spec: FigureSpec) -> Path:
    points = [p for p in point_dirs(spec.run_dir) if (p / "dspf.csv").exists()]
    if not points:
        raise FigureError("no dspf.csv in any point directory")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for point in points:
        t = read_table(point / "dspf.csv", ["t", "mean", "sem"])
        pos = t["t"] > 0
        line, = ax.plot(t["t"][pos], t["mean"][pos], lw=1.2,
                        label=_point_label(point))
        ax.fill_between(t["t"][pos], t["mean"][pos] - t["sem"][pos],
                        t["mean"][pos] + t["sem"][pos],
                        color=line.get_color(), alpha=0.25, lw=0)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("DSPF")
    ax.legend(fontsize=6)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return _finish(fig, spec, f"{len(points)} points")


_RENDERERS = {
    "nnsd": render_nnsd,
    "eta_scan": render_eta_scan,
    "rk_scan": render_rk_scan,
    "sff": render_sff,
    "csr_scan": render_csr_scan,
    "dsff": render_dsff,
    "dspf": render_dspf,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure kind from a run directory to spec.out_path."""
    return _RENDERERS[spec.kind](spec)


def load_manifest(run_dir: Path) -> dict:
    with open(Path(run_dir) / "manifest.json") as f:
        return json.load(f)
