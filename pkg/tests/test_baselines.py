import numpy as np
import pytest

from chaoscope import (
    EnsembleSpec,
    ensemble_curve,
    ensemble_nnsd,
    eta,
    sample_spectrum,
    unfold_reference,
)
from chaoscope.stats import GINUE, GOE, POISSON1D, POISSON2D


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec("gue", 100, 1, 0)
    with pytest.raises(ValueError):
        EnsembleSpec(GOE, 1, 1, 0)
    with pytest.raises(ValueError):
        EnsembleSpec(GOE, 100, 0, 0)


def test_sampling_is_deterministic_and_independent():
    spec = EnsembleSpec(GOE, 50, 2, 123)
    a = sample_spectrum(spec, 0).levels
    b = sample_spectrum(spec, 0).levels
    c = sample_spectrum(spec, 1).levels
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_kinds_do_not_share_streams():
    a = sample_spectrum(EnsembleSpec(POISSON1D, 64, 1, 5), 0).levels
    b = sample_spectrum(EnsembleSpec(POISSON2D, 64, 1, 5), 0).points
    assert not np.allclose(a, b.real)


def test_poisson1d_spacings_are_exponential():
    spec = EnsembleSpec(POISSON1D, 200_000, 1, 7)
    s = np.diff(np.concatenate([[0.0], sample_spectrum(spec, 0).levels]))
    assert s.mean() == pytest.approx(1.0, abs=0.01)
    assert s.std() == pytest.approx(1.0, abs=0.01)
    assert s.min() > 0


def test_goe_semicircle_support():
    n = 400
    w = sample_spectrum(EnsembleSpec(GOE, n, 1, 9), 0).levels
    # semicircle of radius sqrt(2 n) for variance-1/2 off-diagonals
    r = np.sqrt(2.0 * n)
    assert np.abs(w).max() < 1.1 * r
    assert np.abs(w).max() > 0.9 * r
    inner = np.abs(w) < r / np.sqrt(2)
    assert inner.mean() > 0.5  # bulk concentration


def test_ginue_circular_law():
    n = 1000
    z = sample_spectrum(EnsembleSpec(GINUE, n, 1, 11), 0).points
    r = np.abs(z) / np.sqrt(n)
    assert r.max() < 1.1
    # uniform disc: P(|z|/sqrt(n) < q) = q^2
    assert (r < 0.5).mean() == pytest.approx(0.25, abs=0.05)


def test_poisson2d_fills_square():
    n = 5000
    z = sample_spectrum(EnsembleSpec(POISSON2D, n, 1, 13), 0).points
    side = np.sqrt(n)
    assert z.real.min() >= 0 and z.real.max() <= side
    assert (z.real < side / 2).mean() == pytest.approx(0.5, abs=0.03)


def test_unfold_reference_goe_unit_mean_spacing():
    spec = EnsembleSpec(GOE, 800, 1, 15)
    u = unfold_reference(spec, sample_spectrum(spec, 0))
    s = np.diff(np.sort(np.asarray(u.values)))
    assert s.mean() == pytest.approx(1.0, abs=0.05)


def test_ensemble_nnsd_normalized_and_converged():
    spec = EnsembleSpec(POISSON1D, 5000, 4, 17)
    h = ensemble_nnsd(spec, bins=50)
    assert np.sum(h.pdf * h.widths) == pytest.approx(1.0, abs=0.02)
    assert eta(h, GOE) < 0.02


def test_goe_ensemble_nnsd_is_wigner_like():
    spec = EnsembleSpec(GOE, 300, 20, 19)
    h = ensemble_nnsd(spec, bins=50)
    assert eta(h, GOE) == pytest.approx(1.0, abs=0.08)


def test_ensemble_sff_plateau():
    # Poisson SFF has no ramp; its plateau sits at 1/N
    spec = EnsembleSpec(POISSON1D, 200, 10, 21)
    grid = np.geomspace(10.0, 100.0, 50)
    c = ensemble_curve(spec, "sff", grid=grid)
    assert c.raw.mean() == pytest.approx(1.0 / spec.n, rel=0.3)
    assert c.sem is not None and np.all(c.sem >= 0)


def test_ensemble_dsff_tau_zero():
    spec = EnsembleSpec(GINUE, 60, 3, 23)
    c = ensemble_curve(spec, "dsff", grid=np.array([0.0]))
    assert c.raw[0] == pytest.approx(1.0)


def test_unknown_indicator_rejected():
    with pytest.raises(ValueError):
        ensemble_curve(EnsembleSpec(GOE, 50, 1, 25), "nope")
