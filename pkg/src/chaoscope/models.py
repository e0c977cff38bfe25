"""Hamiltonians, symmetry projections, and the Lindblad superoperator.

Covers the collective spin-boson (Dicke) model with counter-rotating terms,
its rotating-wave cousin (Tavis-Cummings), and the cavity-damped master
equation in vectorized (superoperator) form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class Model(str, Enum):
    DICKE = "dicke"
    TAVIS_CUMMINGS = "tavis_cummings"


class Sector(str, Enum):
    EVEN = "even"
    ODD = "odd"
    FULL = "full"


class OperatorKind(str, Enum):
    HAMILTONIAN = "hamiltonian"
    SUPEROPERATOR = "superoperator"
    PROJECTOR = "projector"
    LADDER = "ladder"


# Superoperator construction refuses matrices with more entries than this
# (dim**4 for a dim x dim Hilbert space).  j=2, M=15 (dim 80) needs 40.96e6.
DEFAULT_SUPEROP_ENTRY_CAP = 64_000_000


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of a single spin-boson model instance."""

    omega: float
    omega0: float
    g: float
    j: float
    photon_cutoff: int
    gamma: float = 0.0
    model: Model = Model.DICKE
    sector: Sector = Sector.FULL

    def __post_init__(self):
        if self.omega <= 0 or self.omega0 <= 0:
            raise ValueError("omega and omega0 must be positive")
        if self.g < 0:
            raise ValueError("coupling g must be >= 0")
        if self.gamma < 0:
            raise ValueError("decay rate gamma must be >= 0")
        twoj = 2 * self.j
        if abs(twoj - round(twoj)) > 1e-12 or twoj < 1:
            raise ValueError("2j must be a positive integer")
        if self.photon_cutoff < 1 or int(self.photon_cutoff) != self.photon_cutoff:
            raise ValueError("photon_cutoff must be an integer >= 1")


@dataclass(frozen=True)
class SpinBosonBasis:
    """Ordered |n, m> product basis, lexicographic in (n, m).

    n runs over photon numbers 0..M and m over spin projections -j..j
    (ascending).  Projected bases keep the same (j, M) but a subset of
    entries.
    """

    j: float
    photon_cutoff: int
    entries: tuple = field(default=None)

    def __post_init__(self):
        if self.entries is None:
            ms = [-self.j + k for k in range(int(2 * self.j) + 1)]
            ents = tuple(
                (n, m) for n in range(self.photon_cutoff + 1) for m in ms
            )
            object.__setattr__(self, "entries", ents)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def parities(self) -> np.ndarray:
        """(-1)^(n + m + j) for each basis entry."""
        expo = np.array([round(n + m + self.j) for n, m in self.entries])
        return np.where(expo % 2 == 0, 1, -1)

    def excitations(self) -> np.ndarray:
        """Total excitation n + m + j for each basis entry."""
        return np.array([round(n + m + self.j) for n, m in self.entries])

    def subset(self, mask) -> "SpinBosonBasis":
        ents = tuple(e for e, keep in zip(self.entries, mask) if keep)
        return SpinBosonBasis(self.j, self.photon_cutoff, ents)


@dataclass(frozen=True)
class OperatorMatrix:
    values: np.ndarray
    basis: SpinBosonBasis
    kind: OperatorKind

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def boson_annihilation(cutoff: int) -> np.ndarray:
    """a on the truncated Fock space 0..cutoff: a|n> = sqrt(n)|n-1>."""
    a = np.zeros((cutoff + 1, cutoff + 1))
    ns = np.arange(1, cutoff + 1)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def spin_operators(j: float):
    """(Jz, Jp, Jm) in the m = -j..j (ascending) basis."""
    ms = -j + np.arange(int(2 * j) + 1)
    jz = np.diag(ms)
    jp = np.zeros((len(ms), len(ms)))
    # Jp|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
    amp = np.sqrt(j * (j + 1) - ms[:-1] * (ms[:-1] + 1))
    jp[np.arange(1, len(ms)), np.arange(len(ms) - 1)] = amp
    return jz, jp, jp.T


def full_space_annihilation(basis: SpinBosonBasis) -> np.ndarray:
    """Cavity annihilation operator on the full product basis."""
    a = boson_annihilation(basis.photon_cutoff)
    nspin = int(2 * basis.j) + 1
    return np.kron(a, np.eye(nspin))


def build_hamiltonian(params: ModelParams) -> OperatorMatrix:
    """Dense, real-symmetric Hamiltonian in the lexicographic (n, m) basis.

    Dicke keeps the counter-rotating terms, (a + a^dag)(J+ + J-);
    Tavis-Cummings uses the rotating-wave form a J+ + a^dag J-.
    Both carry the collective coupling g / sqrt(2j).
    """
    basis = SpinBosonBasis(params.j, params.photon_cutoff)
    a = boson_annihilation(params.photon_cutoff)
    jz, jp, jm = spin_operators(params.j)
    nspin = jz.shape[0]
    nph = a.shape[0]

    h = params.omega0 * np.kron(np.eye(nph), jz)
    h += params.omega * np.kron(a.T @ a, np.eye(nspin))
    lam = params.g / np.sqrt(2 * params.j)
    if params.model is Model.DICKE:
        h += lam * np.kron(a + a.T, jp + jm)
    else:
        h += lam * (np.kron(a, jp) + np.kron(a.T, jm))
    return OperatorMatrix(h, basis, OperatorKind.HAMILTONIAN)


def parity_operator(basis: SpinBosonBasis) -> np.ndarray:
    return np.diag(basis.parities().astype(float))


def parity_project(h: OperatorMatrix, sector: Sector) -> OperatorMatrix:
    """Restrict a parity-symmetric Hamiltonian to one Z2 sector."""
    if sector not in (Sector.EVEN, Sector.ODD):
        raise ValueError("sector must be EVEN or ODD")
    par = h.basis.parities()
    # [H, Pi] = 0 iff H_ij vanishes whenever parities differ
    off = np.abs(h.values[par[:, None] != par[None, :]])
    worst = off.max() if off.size else 0.0
    if worst > 1e-10:
        raise ValueError(
            f"Hamiltonian does not commute with parity: max commutator entry {worst:.3e}"
        )
    want = 1 if sector is Sector.EVEN else -1
    mask = par == want
    sub = h.values[np.ix_(mask, mask)]
    return OperatorMatrix(sub, h.basis.subset(mask), h.kind)


def tc_sector_hamiltonian(params: ModelParams, q: int) -> OperatorMatrix:
    """Tavis-Cummings block at fixed total excitation q = n + m + j.

    The sector label bounds the photon number by itself, so no photon
    cutoff enters.  Block dimension is min(q + 1, 2j + 1).
    """
    if params.model is not Model.TAVIS_CUMMINGS:
        raise ValueError("tc_sector_hamiltonian requires a Tavis-Cummings model")
    if q < 0:
        raise ValueError("excitation number q must be >= 0")
    j = params.j
    m_hi = min(j, q - j)
    nm = int(round(m_hi + j)) + 1  # number of allowed m values
    ms = np.array([-j + k for k in range(nm)])
    ns = np.array([q - round(m + j) for m in ms], dtype=float)
    h = np.diag(params.omega0 * ms + params.omega * ns)
    lam = params.g / np.sqrt(2 * j)
    # a J+ couples (n, m) -> (n-1, m+1): sqrt(n) * sqrt(j(j+1) - m(m+1))
    for k in range(nm - 1):
        amp = lam * np.sqrt(ns[k]) * np.sqrt(j * (j + 1) - ms[k] * (ms[k] + 1))
        h[k + 1, k] = amp
        h[k, k + 1] = amp
    ents = tuple((int(n), m) for n, m in zip(ns, ms))
    basis = SpinBosonBasis(j, int(ns.max()) if ns.size else 0, ents)
    return OperatorMatrix(h, basis, OperatorKind.HAMILTONIAN)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return rho.flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n, order="F")


def _vec_convention_self_test():
    # vec(A X B) == (B.T kron A) vec(X) must hold for the chosen stacking.
    rng = np.random.default_rng(12345)
    a, x, b = (rng.standard_normal((3, 3)) for _ in range(3))
    lhs = vec(a @ x @ b)
    rhs = np.kron(b.T, a) @ vec(x)
    assert np.allclose(lhs, rhs, atol=1e-12), "vectorization convention broken"


_vec_convention_self_test()


def build_liouvillian(
    params: ModelParams, entry_cap: int = DEFAULT_SUPEROP_ENTRY_CAP
) -> OperatorMatrix:
    """Vectorized generator of d(rho)/dt = -i[H, rho] + gamma D[a](rho).

    The dissipator is gamma (2 a rho a^dag - a^dag a rho - rho a^dag a).
    Uses column stacking, so vec(A X B) = (B.T kron A) vec(X); the
    vectorized identity is a left null vector (trace preservation).
    """
    basis = SpinBosonBasis(params.j, params.photon_cutoff)
    dim = basis.dim
    if dim ** 4 > entry_cap:
        raise MemoryError(
            f"superoperator would hold {dim ** 4:,} entries "
            f"({dim ** 2} x {dim ** 2}); cap is {entry_cap:,}"
        )
    h = build_hamiltonian(params).values
    a = full_space_annihilation(basis)
    eye = np.eye(dim)
    liou = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    if params.gamma != 0.0:
        ada = a.T @ a
        liou = liou + params.gamma * (
            2.0 * np.kron(a, a)  # a real: conj(a) = a, (a^dag).T = a
            - np.kron(eye, ada)
            - np.kron(ada.T, eye)
        )
    return OperatorMatrix(liou, basis, OperatorKind.SUPEROPERATOR)


def liouvillian_weak_parity_block(
    liou: OperatorMatrix, sector: Sector
) -> OperatorMatrix:
    """Diagonal block of the superoperator with parity signature +1 or -1.

    Photon loss breaks parity conservation of the state but leaves a weak
    Z2 symmetry: the parity superoperator P (x) P commutes with the
    Liouvillian, so its spectrum is the union of two independent sectors
    labeled by the signature parity(row) * parity(column) of each density
    matrix entry.  Spectral statistics (spacings, CSR) must be computed
    within one sector -- the superposed spectrum of both sectors looks
    spuriously Poissonian regardless of how chaotic the dynamics is.
    """
    if liou.kind is not OperatorKind.SUPEROPERATOR:
        raise ValueError("expected a superoperator")
    if sector is Sector.FULL:
        return liou
    par = liou.basis.parities()
    d = liou.basis.dim
    # column stacking: vec index alpha = i + d*j labels rho_{ij}
    sig = np.tile(par, d) * np.repeat(par, d)
    mask = sig == (1 if sector is Sector.EVEN else -1)
    for rows, cols in ((mask, ~mask), (~mask, mask)):
        off = liou.values[np.ix_(rows, cols)]
        if off.size and np.abs(off).max() > 1e-12:
            raise ValueError(
                "superoperator does not commute with parity (x) parity"
            )
    return OperatorMatrix(liou.values[np.ix_(mask, mask)], liou.basis,
                          OperatorKind.SUPEROPERATOR)


def critical_couplings(params: ModelParams):
    """(g_c, g_c_gamma): closed and (Dicke only) dissipative critical couplings."""
    w, w0, gam = params.omega, params.omega0, params.gamma
    if params.model is Model.TAVIS_CUMMINGS:
        return np.sqrt(w * w0), None
    g_c = np.sqrt(w * w0 / 2.0)
    g_cg = 0.5 * np.sqrt((w0 / w) * (gam ** 2 + w ** 2))
    return g_c, g_cg
