"""Time-domain indicators: SFF, DSFF, coherent Gibbs states, and the
dissipative survival probability (trajectory unraveling or direct
Liouvillian propagation)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .models import ModelParams, OperatorMatrix, build_hamiltonian, build_liouvillian, \
    full_space_annihilation, unvec, vec
from .spectra import eig_symmetric_full
from .unfolding import UnfoldedSpectrum

DEFAULT_DSPF_STATE_CAP = 250_000  # vec(rho) length above which trajectories take over


@dataclass
class CurveSeries:
    """A sampled curve of time (or tau) with raw and optional smoothed channels."""

    abscissa: np.ndarray
    raw: np.ndarray
    smoothed: np.ndarray | None = None
    sem: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class CoherentGibbsState:
    """Thermal-amplitude pure state over the energy eigenbasis."""

    amplitudes: np.ndarray  # e^{-beta E_n / 2} / sqrt(Z), in ascending-E order
    beta: float
    eigvecs: np.ndarray | None = None  # energy eigenvectors (columns), product basis

    def product_basis_state(self) -> np.ndarray:
        if self.eigvecs is None:
            raise ValueError("eigenvectors not attached")
        return self.eigvecs @ self.amplitudes


def log_time_grid(lo: float = 1e-2, hi: float = 1e4, n: int = 2000,
                  include_zero: bool = True) -> np.ndarray:
    grid = np.geomspace(lo, hi, n)
    if include_zero:
        grid = np.concatenate([[0.0], grid])
    return grid


def sff(u: UnfoldedSpectrum, grid: np.ndarray | None = None) -> CurveSeries:
    """Spectral form factor |sum_i exp(i E_i t)|^2 / N^2 of unfolded levels."""
    levels = np.asarray(u.values, dtype=float)
    if levels.size < 1:
        raise ValueError("empty spectrum")
    if grid is None:
        grid = log_time_grid()
    n = levels.size
    out = np.empty(grid.size)
    chunk = max(1, 4_000_000 // max(n, 1))
    for lo in range(0, grid.size, chunk):
        ph = np.exp(1j * np.outer(grid[lo:lo + chunk], levels))
        out[lo:lo + chunk] = np.abs(ph.sum(axis=1)) ** 2 / n ** 2
    return CurveSeries(grid, out, meta={"definition": "sff", "n_levels": n})


def moving_average(c: CurveSeries, win: float = 0.5) -> CurveSeries:
    """Centered rectangular moving average with width proportional to t.

    At abscissa t the window covers grid points within win * t / 2 of t,
    truncated at the domain edges; t = 0 (zero-width window) is left as is.
    """
    if win <= 0:
        raise ValueError("win must be positive")
    t = c.abscissa
    raw = c.raw
    csum = np.concatenate([[0.0], np.cumsum(raw)])
    lo = np.searchsorted(t, t * (1 - win / 2), side="left")
    hi = np.searchsorted(t, t * (1 + win / 2), side="right")
    counts = hi - lo
    sm = np.where(counts > 0, (csum[hi] - csum[lo]) / np.maximum(counts, 1), raw)
    meta = dict(c.meta)
    meta["win"] = win
    return CurveSeries(t, raw, smoothed=sm, sem=c.sem, meta=meta)


def dsff(
    u: UnfoldedSpectrum,
    grid: np.ndarray | None = None,
    phi: float = 3 * np.pi / 4,
    dphi: float = np.pi / 16,
    n_phi: int = 8,
) -> CurveSeries:
    """Dissipative spectral form factor along direction phi, angle-averaged.

    DSFF(tau, phi) = |sum_n exp(i (x_n cos phi + y_n sin phi) tau)|^2 / N^2,
    averaged over n_phi angles spanning [phi - dphi/2, phi + dphi/2].
    """
    pts = np.asarray(u.values, dtype=complex)
    if pts.size < 1:
        raise ValueError("empty spectrum")
    if grid is None:
        grid = log_time_grid()
    n = pts.size
    angles = phi + np.linspace(-dphi / 2, dphi / 2, n_phi)
    acc = np.zeros(grid.size)
    for ang in angles:
        proj = pts.real * np.cos(ang) + pts.imag * np.sin(ang)
        chunk = max(1, 4_000_000 // max(n, 1))
        for lo in range(0, grid.size, chunk):
            ph = np.exp(1j * np.outer(grid[lo:lo + chunk], proj))
            acc[lo:lo + chunk] += np.abs(ph.sum(axis=1)) ** 2 / n ** 2
    acc /= n_phi
    return CurveSeries(
        grid, acc,
        meta={"definition": "dsff", "phi": phi, "dphi": dphi, "n_phi": n_phi,
              "n_points": n},
    )


def cgs(levels: np.ndarray, beta: float, eigvecs: np.ndarray | None = None
        ) -> CoherentGibbsState:
    """Coherent Gibbs state amplitudes e^{-beta E_n / 2} / sqrt(Z).

    Energies are shifted by E_min before exponentiation; the amplitudes are
    invariant under the shift and the computation cannot overflow.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    e = np.asarray(levels, dtype=float)
    amps = np.exp(-beta * (e - e.min()) / 2.0)
    amps /= np.linalg.norm(amps)
    return CoherentGibbsState(amps, beta, eigvecs)


def plateau_level(c: CurveSeries, channel: str = "raw") -> float:
    """Mean of the curve over the last decade of its abscissa."""
    y = c.raw if channel == "raw" else c.smoothed
    t = c.abscissa
    mask = t >= t[-1] / 10
    return float(y[mask].mean())


# ---------------------------------------------------------------------------
# DSPF backends


class _SteppedPropagator:
    """exp(L t) applied to vectors via a fixed-step propagator.

    A base step h with ||L||_1 h <= 0.1 is exponentiated once; whole steps
    are applied through cached squarings of that propagator (binary
    decomposition of the step count) and the sub-step remainder through a
    Taylor series, which converges fast since ||L r|| <= 0.1.
    """

    def __init__(self, liou: np.ndarray, step_norm: float = 0.1):
        self.l = liou
        norm = np.abs(liou).sum(axis=0).max()  # 1-norm
        self.h = step_norm / norm if norm > 0 else 1.0
        self._powers = [sla.expm(liou * self.h)]

    def _power(self, k: int) -> np.ndarray:
        while len(self._powers) <= k:
            p = self._powers[-1]
            self._powers.append(p @ p)
        return self._powers[k]

    def _taylor(self, v: np.ndarray, r: float) -> np.ndarray:
        out = v.copy()
        term = v
        k = 1
        while True:
            term = (self.l @ term) * (r / k)
            out += term
            if np.linalg.norm(term) < 1e-15 * max(np.linalg.norm(out), 1.0) or k > 60:
                return out
            k += 1

    def advance(self, v: np.ndarray, dt: float) -> np.ndarray:
        if dt < 0:
            raise ValueError("cannot propagate backwards")
        m = int(dt // self.h)
        r = dt - m * self.h
        k = 0
        while m:
            if m & 1:
                v = self._power(k) @ v
            m >>= 1
            k += 1
        if r > 0:
            v = self._taylor(v, r)
        return v


def _dspf_direct(liou: np.ndarray, psi: np.ndarray, grid: np.ndarray,
                 trace_tol: float = 1e-8) -> np.ndarray:
    prop = _SteppedPropagator(liou)
    rho = np.outer(psi, psi.conj()).astype(complex)
    v = vec(rho)
    tr0 = np.trace(rho).real
    out = np.empty(grid.size)
    t_cur = 0.0
    for i, t in enumerate(grid):
        v = prop.advance(v, t - t_cur)
        t_cur = t
        rho_t = unvec(v)
        tr = np.trace(rho_t).real
        if abs(tr - tr0) > trace_tol * max(abs(tr0), 1.0):
            raise RuntimeError(f"trace drift {tr - tr0:.2e} at t={t:g}")
        out[i] = np.real(psi.conj() @ rho_t @ psi)
    return out


def _trajectory_overlaps(h_eff: np.ndarray, jump_op: np.ndarray,
                         psi0: np.ndarray, target: np.ndarray,
                         grid: np.ndarray, rng: np.random.Generator,
                         max_jumps: int = 1_000_000) -> np.ndarray:
    """|<target|psi(t)>|^2 along one quantum-jump trajectory.

    Deterministic no-jump segments are evolved exactly through the
    eigendecomposition of the effective (non-Hermitian) generator; the jump
    time within a segment is located by bisection on the monotone norm decay.
    """
    w, s = sla.eig(h_eff)
    s_inv = sla.inv(s)
    decaying = np.abs(jump_op).max() > 0

    def evolve(phi0_modal, t):
        # phi0_modal = S^-1 psi at segment start; returns psi(t)
        return s @ (np.exp(-1j * w * t) * phi0_modal)

    out = np.empty(grid.size)
    t_seg = 0.0          # absolute time of current segment start
    psi_seg = psi0 / np.linalg.norm(psi0)
    phi_modal = s_inv @ psi_seg
    threshold = rng.random() if decaying else 0.0
    i = 0
    jumps = 0
    while i < grid.size:
        t = grid[i]
        psi_t = evolve(phi_modal, t - t_seg)
        n2 = float(np.vdot(psi_t, psi_t).real)
        if n2 >= threshold or not decaying:
            out[i] = np.abs(np.vdot(target, psi_t)) ** 2 / n2
            i += 1
            continue
        # a jump happened in (t_seg, t]: bisect the norm-decay crossing
        lo, hi = 0.0, t - t_seg
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            psi_mid = evolve(phi_modal, mid)
            nm = float(np.vdot(psi_mid, psi_mid).real)
            if nm >= threshold:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13 * max(hi, 1.0):
                break
        t_jump = t_seg + 0.5 * (lo + hi)
        psi_j = jump_op @ evolve(phi_modal, t_jump - t_seg)
        nrm = np.linalg.norm(psi_j)
        if nrm == 0:
            raise RuntimeError("jump annihilated the state")
        psi_seg = psi_j / nrm
        phi_modal = s_inv @ psi_seg
        t_seg = t_jump
        threshold = rng.random()
        jumps += 1
        if jumps > max_jumps:
            raise RuntimeError("trajectory exceeded the jump budget")
    return out


def dspf(
    params: ModelParams,
    beta: float,
    grid: np.ndarray | None = None,
    backend: str | None = None,
    n_traj: int = 100,
    seed: int = 0,
    state_cap: int = DEFAULT_DSPF_STATE_CAP,
) -> CurveSeries:
    """Survival probability of the coherent Gibbs state under Lindblad flow.

    DSPF(beta, t) = <psi_beta| rho(t) |psi_beta> with rho(0) the CGS
    projector.  ``backend`` is "direct" (vectorized-Liouvillian propagation)
    or "trajectories" (quantum-jump unraveling, effective generator
    H - i gamma a^dag a, jump operator sqrt(2 gamma) a); by default direct is
    used when vec(rho) fits under ``state_cap`` entries.
    """
    if grid is None:
        grid = log_time_grid(1e-2, 1e3, 400)
    grid = np.asarray(grid, dtype=float)
    h_op = build_hamiltonian(params)
    spec, vecs = eig_symmetric_full(h_op)
    state = cgs(spec.levels, beta, vecs)
    psi = state.product_basis_state()
    dim = psi.size
    if backend is None:
        backend = "direct" if dim ** 2 <= state_cap else "trajectories"

    meta = {"definition": "dspf", "beta": beta, "gamma": params.gamma,
            "backend": backend}
    if backend == "direct":
        if dim ** 2 > state_cap:
            raise MemoryError(
                f"vec(rho) holds {dim ** 2} entries, above the cap {state_cap}; "
                "use the trajectory backend"
            )
        liou = build_liouvillian(params).values
        vals = _dspf_direct(liou, psi.astype(complex), grid)
        return CurveSeries(grid, vals, meta=meta)

    if backend != "trajectories":
        raise ValueError(f"unknown backend {backend!r}")
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    a = full_space_annihilation(h_op.basis)
    h_eff = h_op.values - 1j * params.gamma * (a.T @ a)
    jump = np.sqrt(2 * params.gamma) * a
    runs = np.empty((n_traj, grid.size))
    for k in range(n_traj):
        rng = np.random.default_rng([seed, k])
        runs[k] = _trajectory_overlaps(h_eff, jump, psi.astype(complex),
                                       psi.astype(complex), grid, rng)
    mean = runs.mean(axis=0)
    sem = runs.std(axis=0, ddof=1) / np.sqrt(n_traj) if n_traj > 1 else np.zeros_like(mean)
    meta.update(n_traj=n_traj, seed=seed)
    return CurveSeries(grid, mean, sem=sem, meta=meta)
