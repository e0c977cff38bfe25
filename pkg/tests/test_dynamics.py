import numpy as np
import pytest

from chaoscope import (
    CurveSeries,
    Model,
    ModelParams,
    UnfoldedSpectrum,
    cgs,
    dsff,
    dspf,
    log_time_grid,
    moving_average,
    plateau_level,
    sff,
)
from chaoscope.dynamics import _SteppedPropagator
from chaoscope.models import build_liouvillian, unvec, vec


def uspec(values):
    return UnfoldedSpectrum(np.asarray(values), {"kind": "identity"})


def params(g, j, m, gamma=0.0):
    return ModelParams(1.0, 1.0, g, j, m, gamma=gamma)


def test_sff_single_level_is_one():
    c = sff(uspec([2.0]), np.array([0.0, 1.0, 7.3]))
    assert np.allclose(c.raw, 1.0)


def test_sff_at_t_zero_is_one():
    rng = np.random.default_rng(0)
    c = sff(uspec(rng.standard_normal(30)), np.array([0.0]))
    assert c.raw[0] == pytest.approx(1.0)


def test_sff_two_levels_closed_form():
    # |1 + e^{i d t}|^2 / 4 = cos^2(d t / 2)
    d = 1.7
    t = np.linspace(0, 10, 101)
    c = sff(uspec([0.0, d]), t)
    assert np.allclose(c.raw, np.cos(d * t / 2) ** 2, atol=1e-12)


def test_sff_translation_invariance():
    rng = np.random.default_rng(1)
    levels = rng.standard_normal(40)
    t = log_time_grid(1e-1, 1e2, 50)
    a = sff(uspec(levels), t).raw
    b = sff(uspec(levels + 13.0), t).raw
    assert np.allclose(a, b, atol=1e-10)


def test_moving_average_matches_direct_sum():
    rng = np.random.default_rng(2)
    t = log_time_grid(1e-2, 1e3, 300)
    raw = rng.random(t.size)
    win = 0.5
    sm = moving_average(CurveSeries(t, raw), win=win).smoothed
    oracle = np.empty_like(raw)
    for i, ti in enumerate(t):
        mask = (t >= ti * (1 - win / 2)) & (t <= ti * (1 + win / 2))
        oracle[i] = raw[mask].mean() if mask.any() else raw[i]
    assert np.allclose(sm, oracle, atol=1e-12)


def test_moving_average_constant_curve_unchanged():
    t = log_time_grid(1e-2, 1e2, 100)
    sm = moving_average(CurveSeries(t, np.full(t.size, 0.37))).smoothed
    assert np.allclose(sm, 0.37)


def test_moving_average_t_zero_passthrough():
    t = np.concatenate([[0.0], np.geomspace(1e-2, 1, 10)])
    raw = np.arange(t.size, dtype=float)
    sm = moving_average(CurveSeries(t, raw)).smoothed
    assert sm[0] == raw[0]


def test_moving_average_rejects_bad_window():
    with pytest.raises(ValueError):
        moving_average(CurveSeries(np.arange(3.0), np.arange(3.0)), win=0.0)


def test_dsff_real_spectrum_reduces_to_projected_sff():
    # for real points, the projection at angle phi multiplies times by cos(phi)
    rng = np.random.default_rng(3)
    levels = rng.standard_normal(25)
    tau = np.linspace(0.0, 5.0, 40)
    phi = 3 * np.pi / 4
    c = dsff(uspec(levels.astype(complex)), tau, phi=phi, dphi=0.0, n_phi=1)
    oracle = sff(uspec(levels), tau * np.cos(phi)).raw
    assert np.allclose(c.raw, oracle, atol=1e-12)


def test_dsff_at_tau_zero_is_one():
    rng = np.random.default_rng(4)
    pts = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    c = dsff(uspec(pts), np.array([0.0]))
    assert c.raw[0] == pytest.approx(1.0)


def test_dsff_angle_average_is_mean_of_single_angles():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal(15) + 1j * rng.standard_normal(15)
    tau = np.geomspace(0.1, 10, 20)
    phi, dphi, n_phi = 3 * np.pi / 4, np.pi / 16, 8
    avg = dsff(uspec(pts), tau, phi=phi, dphi=dphi, n_phi=n_phi).raw
    singles = [
        dsff(uspec(pts), tau, phi=ang, dphi=0.0, n_phi=1).raw
        for ang in phi + np.linspace(-dphi / 2, dphi / 2, n_phi)
    ]
    assert np.allclose(avg, np.mean(singles, axis=0), atol=1e-12)


def test_cgs_infinite_temperature_uniform():
    state = cgs(np.array([0.0, 1.0, 5.0]), beta=0.0)
    assert np.allclose(state.amplitudes, 1 / np.sqrt(3))


def test_cgs_amplitude_ratios():
    e = np.array([0.0, 2.0])
    state = cgs(e, beta=1.0)
    assert state.amplitudes[1] / state.amplitudes[0] == pytest.approx(np.exp(-1.0))
    assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0)


def test_cgs_shift_invariance():
    e = np.array([3.0, 4.0, 9.0])
    a = cgs(e, 2.0).amplitudes
    b = cgs(e + 700.0, 2.0).amplitudes  # would overflow without the shift
    assert np.allclose(a, b)
    with pytest.raises(ValueError):
        cgs(e, -0.5)


def test_plateau_level_last_decade():
    t = np.geomspace(1e-2, 1e2, 401)
    raw = np.where(t >= 10.0, 2.0, 0.0)
    c = CurveSeries(t, raw)
    assert plateau_level(c) == pytest.approx(2.0)


def test_stepped_propagator_matches_expm():
    rng = np.random.default_rng(6)
    m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    m = m - np.abs(m).sum() * np.eye(12) * 0.01
    v = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    prop = _SteppedPropagator(m)
    for dt in (0.0, 0.037, 0.5, 2.3):
        import scipy.linalg as sla
        oracle = sla.expm(m * dt) @ v
        got = prop.advance(v, dt)
        assert np.abs(got - oracle).max() < 1e-10 * max(np.abs(oracle).max(), 1.0)


def test_dspf_starts_at_one():
    c = dspf(params(0.4, 0.5, 3, gamma=0.5), beta=1.0,
             grid=np.array([0.0, 0.1]))
    assert c.raw[0] == pytest.approx(1.0, abs=1e-10)


def test_dspf_closed_system_beta_zero_equals_sff():
    p = params(0.6, 1.0, 4, gamma=0.0)
    grid = log_time_grid(1e-2, 1e2, 60)
    c = dspf(p, beta=0.0, grid=grid, backend="direct")
    from chaoscope import build_hamiltonian, eig_symmetric
    levels = eig_symmetric(build_hamiltonian(p)).levels
    oracle = sff(uspec(levels), grid).raw
    assert np.abs(c.raw - oracle).max() < 1e-10


def test_dspf_long_time_matches_steady_state_overlap():
    p = params(0.5, 0.5, 3, gamma=1.0)
    grid = np.array([0.0, 200.0])
    c = dspf(p, beta=0.7, grid=grid, backend="direct")
    # oracle: overlap with the Liouvillian null vector, trace-normalized
    liou = build_liouvillian(p).values
    w, v = np.linalg.eig(liou)
    rho = unvec(v[:, int(np.argmin(np.abs(w)))])
    rho = rho / np.trace(rho)
    from chaoscope import build_hamiltonian, eig_symmetric_full
    spec, vecs = eig_symmetric_full(build_hamiltonian(p))
    psi = cgs(spec.levels, 0.7, vecs).product_basis_state()
    oracle = float(np.real(psi.conj() @ rho @ psi))
    assert c.raw[-1] == pytest.approx(oracle, abs=1e-6)


def test_dspf_trajectories_agree_with_direct():
    p = params(0.5, 0.5, 2, gamma=0.4)
    grid = np.geomspace(0.1, 20.0, 12)
    direct = dspf(p, beta=0.0, grid=grid, backend="direct")
    traj = dspf(p, beta=0.0, grid=grid, backend="trajectories",
                n_traj=300, seed=7)
    sem = np.maximum(traj.sem, 1e-4)
    assert np.all(np.abs(traj.raw - direct.raw) < 3.5 * sem)


def test_dspf_trajectories_deterministic_in_seed():
    p = params(0.3, 0.5, 2, gamma=0.6)
    grid = np.geomspace(0.1, 5.0, 6)
    a = dspf(p, beta=1.0, grid=grid, backend="trajectories", n_traj=5, seed=11)
    b = dspf(p, beta=1.0, grid=grid, backend="trajectories", n_traj=5, seed=11)
    assert np.array_equal(a.raw, b.raw)


def test_dspf_backend_cap():
    with pytest.raises(MemoryError):
        dspf(params(0.3, 0.5, 4, gamma=0.2), beta=0.0,
             grid=np.array([0.0]), backend="direct", state_cap=10)
    auto = dspf(params(0.3, 0.5, 2, gamma=0.2), beta=0.0,
                grid=np.array([0.0, 0.5]), state_cap=10, n_traj=3)
    assert auto.meta["backend"] == "trajectories"
