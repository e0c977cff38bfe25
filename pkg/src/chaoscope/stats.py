"""Spacing histograms, reference distributions, and spacing-ratio statistics."""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .spectra import ComplexSpectrum, RealSpectrum
from .unfolding import UnfoldedSpectrum

POISSON1D = "poisson1d"
GOE = "goe"
POISSON2D = "poisson2d"
GINUE = "ginue"

R1_POISSON = 2 * np.log(2) - 1          # ~0.38629
R1_GOE = 4 - 2 * np.sqrt(3)             # ~0.53590


@dataclass
class Histogram:
    bin_edges: np.ndarray
    pdf: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


@dataclass
class RatioSummary:
    r_mean: float
    r_sem: float
    count: int
    k: int | None = None
    cos_mean: float | None = None


def spacings_of(u: UnfoldedSpectrum) -> np.ndarray:
    """Nearest-neighbor spacings from an unfolded spectrum."""
    kind = u.procedure.get("kind")
    if kind == "density_rescale":
        return np.asarray(u.values, dtype=float)
    if kind in ("poly_staircase", "identity"):
        return np.diff(np.sort(np.asarray(u.values, dtype=float)))
    raise ValueError(f"cannot derive spacings from procedure {kind!r}")


def nnsd(u: UnfoldedSpectrum, bins: int = 40) -> Histogram:
    """Density-normalized spacing histogram on [0, s_max].

    s_max is max(4, 99th percentile of the spacings); spacings beyond it are
    dropped before normalization.
    """
    s = spacings_of(u)
    if s.size < 1:
        raise ValueError("not enough values for a spacing histogram")
    s_max = max(4.0, float(np.percentile(s, 99)))
    pdf, edges = np.histogram(s, bins=bins, range=(0.0, s_max), density=True)
    return Histogram(edges, pdf)


def _load_table(kind: str):
    path = importlib.resources.files("chaoscope").joinpath(f"data/ref_nnsd_{kind}.csv")
    rows = []
    with path.open() as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("s,"):
                continue
            a, b = line.split(",")
            rows.append((float(a), float(b)))
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


@lru_cache(maxsize=None)
def _table(kind: str):
    try:
        return _load_table(kind)
    except FileNotFoundError as exc:
        raise FileNotFoundError(
            f"reference NNSD table for {kind!r} not found; regenerate it with "
            f"`chaoscope baseline --kind {kind} --write-table`"
        ) from exc


def reference_pdf(kind: str, s) -> np.ndarray:
    """Reference NNSD evaluated at spacing(s) s.

    Closed forms for the 1D Poisson and GOE cases; linear interpolation of
    shipped sampled-ensemble tables for the 2D Poisson and GinUE cases.
    """
    s = np.asarray(s, dtype=float)
    if kind == POISSON1D:
        return np.exp(-s)
    if kind == GOE:
        return (np.pi * s / 2.0) * np.exp(-np.pi * s ** 2 / 4.0)
    if kind in (POISSON2D, GINUE):
        xs, ps = _table(kind)
        return np.interp(s, xs, ps, left=0.0, right=0.0)
    raise ValueError(f"unknown reference kind {kind!r}")


def eta(p_sys: Histogram, rmt_kind: str) -> float:
    """Normalized squared distance of a spacing histogram from Poisson.

    Numerator: bin sum of (P_sys - P_Poisson)^2 times bin width, references
    evaluated at bin centers.  Denominator: fine-grid quadrature of
    (P_Poisson - P_RMT)^2.  Poisson means 1D for GOE, 2D for GinUE.
    """
    if rmt_kind == GOE:
        poi = POISSON1D
    elif rmt_kind == GINUE:
        poi = POISSON2D
    else:
        raise ValueError("rmt_kind must be GOE or GinUE")
    centers, widths = p_sys.centers, p_sys.widths
    num = np.sum((p_sys.pdf - reference_pdf(poi, centers)) ** 2 * widths)
    grid = np.linspace(0.0, 12.0, 8001)
    diff = reference_pdf(poi, grid) - reference_pdf(rmt_kind, grid)
    den = np.trapezoid(diff ** 2, grid)
    return float(num / den)


def spacing_ratio_k(levels: RealSpectrum, k: int = 1) -> RatioSummary:
    """Average k-th order spacing ratio of raw (non-unfolded) levels.

    r_k^i = min(a, 1/a) with a = (E_{i+2k} - E_{i+k}) / (E_{i+k} - E_i).
    Samples with a zero denominator are skipped.
    """
    e = levels.levels
    if e.size < 2 * k + 1:
        raise ValueError(f"need at least {2 * k + 1} levels for k={k}")
    upper = e[2 * k:] - e[k:-k]
    lower = e[k:-k] - e[:-2 * k]
    ok = (lower != 0) & (upper != 0)
    if not np.any(ok):
        raise ValueError("all spacing-ratio denominators vanish (degenerate input)")
    a = upper[ok] / lower[ok]
    r = np.minimum(a, 1.0 / a)
    sem = float(r.std(ddof=1) / np.sqrt(r.size)) if r.size > 1 else 0.0
    return RatioSummary(float(r.mean()), sem, int(r.size), k=k)


def complex_spacing_ratio(s: ComplexSpectrum) -> RatioSummary:
    """Average complex spacing ratio z_i = (NN_i - lambda_i) / (NNN_i - lambda_i)."""
    pts = s.points
    if pts.size < 3:
        raise ValueError("need at least 3 eigenvalues")
    xy = np.column_stack([pts.real, pts.imag])
    tree = cKDTree(xy)
    d, idx = tree.query(xy, k=3)
    dup = np.nonzero(d[:, 1] == 0)[0]
    if dup.size:
        raise ValueError(f"duplicate eigenvalues at indices {dup.tolist()[:10]}")
    z = (pts[idx[:, 1]] - pts) / (pts[idx[:, 2]] - pts)
    r = np.abs(z)
    sem = float(r.std(ddof=1) / np.sqrt(r.size))
    return RatioSummary(
        float(r.mean()), sem, int(r.size), cos_mean=float(np.cos(np.angle(z)).mean())
    )
