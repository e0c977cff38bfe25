"""Quantum-chaos diagnostics for collective spin-boson models.

Spectral indicators (spacing distributions and ratios, eta distance),
dynamical indicators (SFF, DSFF, DSPF), and sampled random-matrix baselines
for the closed and cavity-damped Dicke model and the Tavis-Cummings model.
"""

from .models import (
    Model,
    ModelParams,
    OperatorKind,
    OperatorMatrix,
    Sector,
    SpinBosonBasis,
    build_hamiltonian,
    build_liouvillian,
    critical_couplings,
    liouvillian_weak_parity_block,
    parity_project,
    tc_sector_hamiltonian,
)
from .spectra import (
    ComplexSpectrum,
    RealSpectrum,
    central_window,
    convergence_filter,
    eig_general,
    eig_symmetric,
    eig_symmetric_full,
    exclude_zero_modes,
    liouvillian_window,
)
from .unfolding import (
    UnfoldedSpectrum,
    power_map_unfold,
    rescale_complex_spacings,
    unfold_real,
)
from .stats import (
    GINUE,
    GOE,
    POISSON1D,
    POISSON2D,
    Histogram,
    RatioSummary,
    complex_spacing_ratio,
    eta,
    nnsd,
    reference_pdf,
    spacing_ratio_k,
)
from .dynamics import (
    CoherentGibbsState,
    CurveSeries,
    cgs,
    dsff,
    dspf,
    log_time_grid,
    moving_average,
    plateau_level,
    sff,
)
from .baselines import EnsembleSpec, ensemble_curve, ensemble_nnsd, ensemble_spacings, sample_spectrum, unfold_reference, write_nnsd_table

__version__ = "0.1.0"
