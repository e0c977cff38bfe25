"""Dense eigensolving, cutoff-convergence filtering, and window selection."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.spatial import cKDTree

from .models import OperatorMatrix


@dataclass
class RealSpectrum:
    """Ascending real eigenvalues plus provenance metadata."""

    levels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if not np.all(np.isfinite(self.levels)):
            raise ValueError("non-finite eigenvalues")
        self.levels = np.sort(self.levels)

    @property
    def count(self) -> int:
        return self.levels.size


@dataclass
class ComplexSpectrum:
    """Complex eigenvalues, deterministically sorted by (Re, Im)."""

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        if not np.all(np.isfinite(self.points)):
            raise ValueError("non-finite eigenvalues")
        order = np.lexsort((self.points.imag, self.points.real))
        self.points = self.points[order]

    @property
    def count(self) -> int:
        return self.points.size


def eig_symmetric(h: OperatorMatrix, check_residual: bool = False) -> RealSpectrum:
    """All eigenvalues of a real symmetric matrix, ascending."""
    m = h.values
    if not np.allclose(m, m.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(m).max())):
        raise ValueError("matrix is not symmetric")
    if check_residual:
        w, v = sla.eigh(m)
        scale = np.abs(m).max() or 1.0
        rng = np.random.default_rng(0)
        for k in rng.integers(0, w.size, size=min(5, w.size)):
            res = np.linalg.norm(m @ v[:, k] - w[k] * v[:, k]) / scale
            if res > 1e-9:
                raise RuntimeError(f"eigenpair residual {res:.2e} at index {k}")
    else:
        w = sla.eigvalsh(m)
    return RealSpectrum(w)


def eig_symmetric_full(h: OperatorMatrix):
    """(RealSpectrum, eigenvector columns) for when states are needed."""
    w, v = sla.eigh(h.values)
    return RealSpectrum(w), v


def eig_general(l: OperatorMatrix) -> ComplexSpectrum:
    """All complex eigenvalues of a general square matrix."""
    w = sla.eigvals(l.values)
    return ComplexSpectrum(w)


def _as_points(spec) -> np.ndarray:
    if isinstance(spec, RealSpectrum):
        return spec.levels.astype(complex)
    return spec.points


def convergence_filter(spectra: list, tol: float):
    """Keep eigenvalues of the largest-cutoff spectrum converged w.r.t. the
    second largest.

    A value is kept when it has a partner within ``tol`` (absolute for real,
    Euclidean for complex) in the previous spectrum; candidate pairs are
    matched greedily by distance without reuse.  The input list must be
    ordered by increasing cutoff.
    """
    if len(spectra) < 2:
        raise ValueError("need at least two spectra at distinct cutoffs")
    big, prev = spectra[-1], spectra[-2]
    pts_a = _as_points(big)
    pts_b = _as_points(prev)
    xy_a = np.column_stack([pts_a.real, pts_a.imag])
    xy_b = np.column_stack([pts_b.real, pts_b.imag])
    tree = cKDTree(xy_b)
    pairs = tree.query_ball_point(xy_a, r=tol)
    cand = [
        (abs(pts_a[i] - pts_b[jj]), i, jj)
        for i, js in enumerate(pairs)
        for jj in js
    ]
    cand.sort()
    used_a, used_b = set(), set()
    keep = []
    for _, i, jj in cand:
        if i in used_a or jj in used_b:
            continue
        used_a.add(i)
        used_b.add(jj)
        keep.append(i)
    keep.sort()
    vals = pts_a[keep]
    meta = dict(big.meta)
    meta.update(convergence_tol=tol, kept=len(keep), of=len(pts_a),
                empty_warning=len(keep) == 0)
    if isinstance(big, RealSpectrum):
        return RealSpectrum(vals.real, meta)
    return ComplexSpectrum(vals, meta)


def central_window(s: RealSpectrum, fraction: float = 0.6) -> RealSpectrum:
    """Central ceil(fraction * count) levels by index."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    n = s.count
    keep = int(np.ceil(fraction * n))
    start = (n - keep) // 2
    meta = dict(s.meta)
    meta.update(window_fraction=fraction)
    return RealSpectrum(s.levels[start:start + keep], meta)


def liouvillian_window(
    s: ComplexSpectrum, alpha: float, gamma: float, photon_cutoff: int
) -> ComplexSpectrum:
    """Keep eigenvalues with Re(lambda) in [-alpha * gamma * M, 0]."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lo = -alpha * gamma * photon_cutoff
    mask = (s.points.real >= lo) & (s.points.real <= 0)
    meta = dict(s.meta)
    meta.update(window_re=[lo, 0.0], alpha=alpha)
    return ComplexSpectrum(s.points[mask], meta)


def exclude_zero_modes(s: ComplexSpectrum, tol: float = 1e-8) -> ComplexSpectrum:
    """Drop steady-state eigenvalues (|lambda| < tol) before statistics."""
    mask = np.abs(s.points) >= tol
    meta = dict(s.meta)
    meta.update(zero_modes_excluded=int((~mask).sum()))
    return ComplexSpectrum(s.points[mask], meta)


def _jsonable(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        if isinstance(v, np.ndarray):
            out[k] = v.tolist()
        elif isinstance(v, (np.floating, np.integer, np.bool_)):
            out[k] = v.item()
        else:
            out[k] = v
    return out


def write_real_csv(s: RealSpectrum, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "energy"])
        for i, e in enumerate(s.levels):
            w.writerow([i, repr(float(e))])
    with open(str(path) + ".meta.json", "w") as f:
        json.dump(_jsonable(s.meta), f, indent=1, sort_keys=True)


def write_complex_csv(s: ComplexSpectrum, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(s.points):
            w.writerow([i, repr(float(z.real)), repr(float(z.imag))])
    with open(str(path) + ".meta.json", "w") as f:
        json.dump(_jsonable(s.meta), f, indent=1, sort_keys=True)
