"""Small synthetic molecules for tests, examples and the verification suite.

These are not real chemistry: a single pseudo-atom carries up to three
normal modes so that every quantity stays cheap to enumerate exactly.
"""

from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from . import io
from .molparams import DoktorovParameters, Molecule, StateVibrations


def _rotation(axis, angle):
    return Rotation.from_rotvec(angle * np.asarray(axis, dtype=float) / np.linalg.norm(axis)).as_matrix()


def toy_three_mode():
    """Three coupled modes of one mass-12 pseudo-atom with a small Duschinsky rotation."""
    modes_initial = np.eye(3)
    modes_final = _rotation([1.0, 2.0, 3.0], 0.15)
    return Molecule(
        masses=np.array([12.0]),
        geometry_initial=np.zeros(3),
        geometry_final=np.array([0.06, -0.04, 0.03]),
        initial=StateVibrations(np.array([600.0, 1100.0, 1600.0]), modes_initial),
        final=StateVibrations(np.array([560.0, 1050.0, 1650.0]), modes_final),
    )


def toy_two_mode():
    """Two in-plane modes of a mass-16 pseudo-atom; final-state frequencies 500 and 1200 cm^-1."""
    modes_initial = np.eye(3)[:, :2]
    modes_final = _rotation([0.0, 0.0, 1.0], 0.1)[:, :2]
    return Molecule(
        masses=np.array([16.0]),
        geometry_initial=np.zeros(3),
        geometry_final=np.array([0.08, 0.04, 0.0]),
        initial=StateVibrations(np.array([480.0, 1230.0]), modes_initial),
        final=StateVibrations(np.array([500.0, 1200.0]), modes_final),
    )


def identity_molecule(mode_count=3):
    """Identical initial and final states: no squeezing, no displacement, trivial rotation."""
    if not 1 <= mode_count <= 3:
        raise ValueError("identity_molecule supports 1 to 3 modes")
    freqs = np.array([700.0, 1300.0, 1900.0])[:mode_count]
    modes = np.eye(3)[:, :mode_count]
    return Molecule(
        masses=np.array([14.0]),
        geometry_initial=np.zeros(3),
        geometry_final=np.zeros(3),
        initial=StateVibrations(freqs, modes),
        final=StateVibrations(freqs, modes),
    )


def synthetic_parameters(mode_count=105, active=4, seed=0):
    """A large parameter set where only the first ``active`` modes are excited or coupled.

    Frequencies span 100-3200 cm^-1; the active block gets a random rotation,
    squeezing up to 0.15 and displacements up to 0.5.
    """
    rng = np.random.default_rng(seed)
    omega = np.sort(rng.uniform(100.0, 3200.0, mode_count))
    omega_final = omega * rng.uniform(0.97, 1.03, mode_count)
    u = np.eye(mode_count)
    q, _ = np.linalg.qr(rng.normal(size=(active, active)))
    u[:active, :active] = q
    squeeze = np.zeros(mode_count)
    squeeze[:active] = rng.uniform(-0.15, 0.15, active)
    alpha = np.zeros(mode_count)
    alpha[:active] = rng.uniform(-0.5, 0.5, active)
    return DoktorovParameters(
        u_left=u,
        u_right=np.eye(mode_count),
        squeeze=squeeze,
        alpha=alpha,
        omega_initial=omega,
        omega_final=omega_final,
    )


def example_config(molecule_file, output_dir="out"):
    """Config for the toy pipeline: 5000 samples, 201 bias points and 4 gate points."""
    return {
        "molecule": str(molecule_file),
        "direction": "both",
        "sampler": {"seed": 42, "sample_count": 5000, "max_total_photons": 8},
        "histogram": {"eps_min_eV": -0.5, "eps_max_eV": 0.5, "bins": 200},
        "transport": {"temperature_K": 10.0},
        "bias_grid": {"start_mV": -1000.0, "stop_mV": 1000.0, "points": 201},
        "gate_grid": {"start_mV": -100.0, "stop_mV": 100.0, "points": 4},
        "output_dir": str(output_dir),
    }


def write_example(directory, molecule=None):
    """Write ``molecule.json`` and ``config.json`` into ``directory`` and return the config path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    mol = molecule if molecule is not None else toy_three_mode()
    io.write_json(directory / "molecule.json", io.molecule_to_dict(mol))
    io.write_json(directory / "config.json", example_config("molecule.json"))
    return directory / "config.json"
