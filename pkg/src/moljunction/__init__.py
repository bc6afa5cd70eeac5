"""Vibronic densities of states from Gaussian-state photon statistics, and the
sequential-tunnelling transport they imply for a single-molecule junction."""

from .errors import (
    CutoffError,
    InputError,
    MolJunctionError,
    NumericalContractError,
    NumericalError,
    OccupationError,
    PrecisionWarning,
    ResourceError,
    UnsupportedStateError,
)
from .gaussian import GaussianState, fock_probability, prepare_doktorov_output
from .hafnian import loop_hafnian
from .molparams import DoktorovParameters, Molecule, StateVibrations, doktorov_params
from .sampler import (
    EnergyGrid,
    SamplerConfig,
    bin_energies,
    dos_reconstruct,
    draw_samples,
    enumerate_distribution,
    q_estimate,
)
from .transport import TransportConfig, conductance_map, current_full, iv_curve

__version__ = "0.1.0"

__all__ = [
    "CutoffError",
    "DoktorovParameters",
    "EnergyGrid",
    "GaussianState",
    "InputError",
    "MolJunctionError",
    "Molecule",
    "NumericalContractError",
    "NumericalError",
    "OccupationError",
    "PrecisionWarning",
    "ResourceError",
    "SamplerConfig",
    "StateVibrations",
    "TransportConfig",
    "UnsupportedStateError",
    "bin_energies",
    "conductance_map",
    "current_full",
    "doktorov_params",
    "dos_reconstruct",
    "draw_samples",
    "enumerate_distribution",
    "fock_probability",
    "iv_curve",
    "loop_hafnian",
    "prepare_doktorov_output",
    "q_estimate",
]
