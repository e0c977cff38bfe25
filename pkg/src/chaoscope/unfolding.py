"""Unfolding procedures for real and complex spectra.

Three routes: polynomial fit to the counting staircase (real spectra),
Gaussian-density rescaling of nearest-neighbor spacings (complex spectra,
spacing statistics), and a complex power map (complex spectra, form-factor
work).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .spectra import ComplexSpectrum, RealSpectrum


@dataclass
class UnfoldedSpectrum:
    """Unfolded values together with the procedure that produced them.

    ``values`` are unfolded levels (poly_staircase), scaled nearest-neighbor
    spacings (density_rescale), or mapped complex eigenvalues (power_map).
    """

    values: np.ndarray
    procedure: dict
    meta: dict = field(default_factory=dict)


def unfold_real(s: RealSpectrum, degree: int = 10) -> UnfoldedSpectrum:
    """Unfold a real spectrum to unit mean density.

    Least-squares fit of a degree-``degree`` polynomial to the cumulative
    counting staircase N(E_i) = i, then map each level through the fit.
    Non-monotone fits are rejected (sampled at 10x the level count).
    """
    levels = s.levels
    if degree < 1:
        raise ValueError("polynomial degree must be >= 1")
    if levels.size < degree + 10:
        raise ValueError(f"need at least {degree + 10} levels for degree {degree}")
    counts = np.arange(1, levels.size + 1, dtype=float)
    poly = np.polynomial.Polynomial.fit(levels, counts, degree)
    grid = np.linspace(levels[0], levels[-1], 10 * levels.size)
    vals = poly(grid)
    if np.any(np.diff(vals) <= 0):
        raise ValueError(
            f"degree-{degree} staircase fit is not monotone on the spectrum range; "
            "try a lower degree"
        )
    unfolded = poly(levels)
    return UnfoldedSpectrum(
        unfolded,
        {"kind": "poly_staircase", "degree": degree},
        dict(s.meta),
    )


def nn_spacings(points: np.ndarray) -> np.ndarray:
    """Euclidean distance from each complex point to its nearest neighbor."""
    xy = np.column_stack([points.real, points.imag])
    tree = cKDTree(xy)
    d, _ = tree.query(xy, k=2)
    return d[:, 1]


def gaussian_density(
    z: np.ndarray, points: np.ndarray, sigma: float, chunk: int = 2048
) -> np.ndarray:
    """Smoothed spectral density (1 / 2 pi sigma^2 M) sum_i exp(-|z - z_i|^2 / 2 sigma^2)."""
    z = np.atleast_1d(z)
    out = np.empty(z.size)
    norm = 1.0 / (2 * np.pi * sigma ** 2 * points.size)
    for lo in range(0, z.size, chunk):
        zz = z[lo:lo + chunk, None]
        d2 = np.abs(zz - points[None, :]) ** 2
        out[lo:lo + chunk] = norm * np.exp(-d2 / (2 * sigma ** 2)).sum(axis=1)
    return out


def rescale_complex_spacings(
    s: ComplexSpectrum, sigma_factor: float = 4.5
) -> UnfoldedSpectrum:
    """Density-rescaled nearest-neighbor spacings with mean exactly 1.

    Raw spacings s_i are multiplied by sqrt(rho(lambda_i)) of the Gaussian
    smoothed density (bandwidth sigma_factor times the mean raw spacing),
    then divided by their mean.
    """
    pts = s.points
    if pts.size < 2:
        raise ValueError("need at least 2 eigenvalues")
    raw = nn_spacings(pts)
    n_dup = int((raw == 0).sum())
    sigma = sigma_factor * raw.mean()
    if sigma == 0:
        raise ValueError("all points coincide")
    rho = gaussian_density(pts, pts, sigma)
    scaled = raw * np.sqrt(rho)
    scaled = scaled / scaled.mean()
    meta = dict(s.meta)
    if n_dup:
        meta["duplicate_points"] = n_dup
    return UnfoldedSpectrum(
        scaled,
        {"kind": "density_rescale", "sigma_factor": sigma_factor},
        meta,
    )


def _branch_power(w: np.ndarray, nu: float) -> np.ndarray:
    # w^nu with arg(w) in (0, 2pi]: branch cut along the positive real axis,
    # points on the cut take the arg -> 2pi side.
    theta = np.angle(w)  # (-pi, pi]
    theta = np.where(theta <= 0, theta + 2 * np.pi, theta)
    r = np.abs(w)
    out = r ** nu * np.exp(1j * nu * theta)
    return np.where(w == 0, 0.0, out)


def density_peak(points: np.ndarray, sigma_factor: float = 4.5, grid_n: int = 200):
    """Maximizer of the Gaussian smoothed density on a grid over the bounding box."""
    sigma = sigma_factor * nn_spacings(points).mean()
    xs = np.linspace(points.real.min(), points.real.max(), grid_n)
    ys = np.linspace(points.imag.min(), points.imag.max(), grid_n)
    gx, gy = np.meshgrid(xs, ys)
    z = (gx + 1j * gy).ravel()
    rho = gaussian_density(z, points, sigma)
    return z[np.argmax(rho)]


def power_map_unfold(
    s: ComplexSpectrum,
    a: complex = -1j,
    nu: float = 1.0 / 3.0,
    z0="auto",
) -> UnfoldedSpectrum:
    """Map eigenvalues through z -> A (z - z0)^nu.

    ``z0="auto"`` centers the map at the density maximum (same Gaussian
    estimator as the spacing rescale, on a 200 x 200 grid).
    """
    if nu == 0:
        raise ValueError("nu must be nonzero")
    pts = s.points
    if z0 == "auto":
        z0 = density_peak(pts)
    mapped = a * _branch_power(pts - z0, nu)
    return UnfoldedSpectrum(
        mapped,
        {
            "kind": "power_map",
            "A": [float(np.real(a)), float(np.imag(a))],
            "nu": nu,
            "z0": [float(np.real(z0)), float(np.imag(z0))],
            "branch": "(0, 2pi]",
        },
        dict(s.meta),
    )
