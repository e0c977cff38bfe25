"""Seeded random-matrix and Poisson ensembles with averaged reference statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .dynamics import CurveSeries, dsff, log_time_grid, sff
from .spectra import ComplexSpectrum, RealSpectrum, central_window
from .stats import GINUE, GOE, Histogram, POISSON1D, POISSON2D
from .unfolding import UnfoldedSpectrum, rescale_complex_spacings, unfold_real

_KIND_TAG = {GOE: 1, GINUE: 2, POISSON1D: 3, POISSON2D: 4}

TABLE_VERSION = 1


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    realizations: int
    seed: int

    def __post_init__(self):
        if self.kind not in _KIND_TAG:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")


def _rng(spec: EnsembleSpec, idx: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, _KIND_TAG[spec.kind], idx])


def sample_spectrum(spec: EnsembleSpec, realization_index: int):
    """One seeded realization; deterministic in (seed, kind, index).

    GOE: eigenvalues of (X + X^T)/2 with X i.i.d. N(0,1).
    GinUE: eigenvalues of entries (u + i v)/sqrt(2).
    Poisson1D: cumulative sums of Exp(1) spacings.
    Poisson2D: n i.i.d. uniform points in a square of side sqrt(n).
    """
    rng = _rng(spec, realization_index)
    n = spec.n
    if spec.kind == GOE:
        x = rng.standard_normal((n, n))
        return RealSpectrum(sla.eigvalsh((x + x.T) / 2.0),
                            {"ensemble": GOE, "n": n, "realization": realization_index})
    if spec.kind == GINUE:
        m = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        return ComplexSpectrum(sla.eigvals(m),
                               {"ensemble": GINUE, "n": n,
                                "realization": realization_index})
    if spec.kind == POISSON1D:
        return RealSpectrum(np.cumsum(rng.exponential(1.0, size=n)),
                            {"ensemble": POISSON1D, "n": n,
                             "realization": realization_index})
    side = np.sqrt(n)
    pts = rng.uniform(0, side, size=n) + 1j * rng.uniform(0, side, size=n)
    return ComplexSpectrum(pts, {"ensemble": POISSON2D, "n": n,
                                 "realization": realization_index})


def unfold_reference(spec: EnsembleSpec, spectrum) -> UnfoldedSpectrum:
    """Ensemble-appropriate unfolding matching the system pipeline.

    GOE goes through the staircase fit on its central 60%; GinUE eigenvalues
    are rescaled by 1/sqrt(n) (circular law, flat bulk density); both Poisson
    ensembles already have unit mean density.
    """
    if spec.kind == GOE:
        return unfold_real(central_window(spectrum, 0.6), degree=10)
    if spec.kind == GINUE:
        return UnfoldedSpectrum(spectrum.points / np.sqrt(spec.n),
                                {"kind": "identity", "rescale": "1/sqrt(n)"},
                                dict(spectrum.meta))
    if spec.kind == POISSON1D:
        return UnfoldedSpectrum(spectrum.levels, {"kind": "identity"},
                                dict(spectrum.meta))
    return UnfoldedSpectrum(spectrum.points, {"kind": "identity"},
                            dict(spectrum.meta))


GINUE_BULK_RADIUS = 0.85  # fraction of the circular-law radius kept for spacings


def ensemble_spacings(spec: EnsembleSpec) -> np.ndarray:
    """Pooled unit-mean spacings over all realizations (for NNSD tables).

    GinUE spacings are taken from the circular-law bulk
    (|lambda| < 0.85 sqrt(n)); the edge statistics are not universal and
    contaminate the small-s repulsion.
    """
    pools = []
    for idx in range(spec.realizations):
        sp = sample_spectrum(spec, idx)
        if spec.kind in (GOE, POISSON1D):
            u = unfold_reference(spec, sp)
            pools.append(np.diff(np.sort(np.asarray(u.values, dtype=float))))
        else:
            if spec.kind == GINUE:
                keep = np.abs(sp.points) < GINUE_BULK_RADIUS * np.sqrt(spec.n)
                sp = ComplexSpectrum(sp.points[keep], dict(sp.meta))
            pools.append(rescale_complex_spacings(sp).values)
    s = np.concatenate(pools)
    return s / s.mean()


def ensemble_nnsd(spec: EnsembleSpec, bins: int = 100, s_max: float = 4.0) -> Histogram:
    s = ensemble_spacings(spec)
    pdf, edges = np.histogram(s, bins=bins, range=(0.0, s_max), density=True)
    return Histogram(edges, pdf)


def ensemble_curve(spec: EnsembleSpec, indicator: str, grid=None, **kwargs):
    """Realization-averaged SFF or DSFF curve (with standard errors), or an
    NNSD histogram pooled over realizations."""
    if indicator == "nnsd":
        return ensemble_nnsd(spec, **kwargs)
    if grid is None:
        grid = log_time_grid()
    runs = []
    for idx in range(spec.realizations):
        u = unfold_reference(spec, sample_spectrum(spec, idx))
        if indicator == "sff":
            runs.append(sff(u, grid).raw)
        elif indicator == "dsff":
            runs.append(dsff(u, grid, **kwargs).raw)
        else:
            raise ValueError(f"unknown indicator {indicator!r}")
    runs = np.array(runs)
    mean = runs.mean(axis=0)
    sem = (runs.std(axis=0, ddof=1) / np.sqrt(len(runs))
           if len(runs) > 1 else np.zeros_like(mean))
    return CurveSeries(np.asarray(grid, dtype=float), mean, sem=sem,
                       meta={"definition": indicator, "ensemble": spec.kind,
                             "n": spec.n, "realizations": spec.realizations,
                             "seed": spec.seed})


def write_nnsd_table(spec: EnsembleSpec, path, bins: int = 100, s_max: float = 4.0):
    """Cache an ensemble NNSD as a versioned reference table."""
    hist = ensemble_nnsd(spec, bins=bins, s_max=s_max)
    header = {"kind": spec.kind, "n": spec.n, "realizations": spec.realizations,
              "seed": spec.seed, "bins": bins, "s_max": s_max,
              "version": TABLE_VERSION}
    with open(path, "w") as f:
        f.write("# " + json.dumps(header, sort_keys=True) + "\n")
        f.write("s,pdf\n")
        for s, p in zip(hist.centers, hist.pdf):
            f.write(f"{float(s)!r},{float(p)!r}\n")
    return hist
