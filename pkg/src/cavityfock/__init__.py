"""Cavity-enhanced heralded Fock states: source, heralding, homodyne data and ML tomography."""

from .cavity import CavitySpec, enhancement, finesse, optimal_input_coupler, rate_curves
from .fock import (
    DensityMatrix,
    PhotonDistribution,
    apply_loss,
    fock_state,
    fock_wavefunction,
    quadrature_pdf,
    squeezed_marginal,
    wigner,
    wigner_min,
)
from .herald import HeraldSpec, Pattern, RateModel, apply_cavity, click_probability, herald_state, predicted_rates
from .homodyne import QuadratureDataset, phase_schedule, sample
from .tomo import TomoConfig, diagonal_maxlik, maxlik, povm_element

__version__ = "0.1.0"
