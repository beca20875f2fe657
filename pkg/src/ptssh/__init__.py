"""Exact and two-state analysis of edge states in PT-symmetric SSH chains."""

__version__ = "0.1.0"

from .bulk import PTPhase, PTPhaseTag, band_gap, dispersion, pt_phase, winding_number
from .edge import (
    EdgeAnsatz,
    EffectiveModel,
    amplitude_cr_analytic,
    ansatz_residual,
    ansatz_states,
    coupling_asymptotic,
    coupling_C,
    effective_model,
    gamma_bar,
    gamma_cr_analytic,
)
from .eig import Spectrum, eig_dense, spectrum_symmetry_residuals, track_pair
from .ep import EPResult, LatticeFamily, ep_sweep, find_ep, identify_edge_pair
from .model import GainProfile, LatticeError, LatticeSpec, build_hamiltonian, make_gain_profile, symmetry_residuals
