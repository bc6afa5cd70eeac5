r"""Molecular vibrational data and Doktorov gate parameters.

The Duschinsky relation between the normal coordinates of two electronic
states,

.. math::
    \mathbf{q}' = U_D \mathbf{q} + \mathbf{d},

is converted into the parameters of the Doktorov operator
:math:`\hat{D}(\alpha)\hat{R}(U_L)\hat{S}(r)\hat{R}(U_R)` through the
singular value decomposition of :math:`J = \Omega' U_D \Omega^{-1}`.
"""

from dataclasses import dataclass

import numpy as np

from .constants import AMU_KG, ANGSTROM_M, CM1_TO_RAD_S, HBAR_JS
from .errors import InputError, NumericalError

_ORTHONORMAL_TOL = 1e-6


@dataclass(frozen=True)
class MolecularStructure:
    """Atomic masses (amu) and a Cartesian geometry (Angstrom) of one electronic state."""

    masses: np.ndarray
    geometry: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        geometry = np.asarray(self.geometry, dtype=float).ravel()
        if masses.ndim != 1 or masses.size == 0:
            raise InputError("masses must be a non-empty vector")
        if np.any(masses <= 0):
            raise InputError("all atomic masses must be positive")
        if geometry.size != 3 * masses.size:
            raise InputError(
                f"geometry has {geometry.size} entries, expected 3*{masses.size}"
            )
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "geometry", geometry)

    @property
    def atom_count(self):
        return self.masses.size


@dataclass(frozen=True)
class StateVibrations:
    """Normal-mode frequencies (cm^-1) and mass-weighted mode vectors (columns)."""

    frequencies: np.ndarray
    mode_matrix: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        modes = np.atleast_2d(np.asarray(self.mode_matrix, dtype=float))
        if freqs.ndim != 1 or freqs.size == 0:
            raise InputError("frequencies must be a non-empty vector")
        if np.any(freqs <= 0):
            raise InputError("all vibrational frequencies must be positive")
        if modes.shape[1] != freqs.size:
            raise InputError(
                f"mode matrix has {modes.shape[1]} columns but {freqs.size} frequencies"
            )
        if modes.shape[0] % 3 != 0:
            raise InputError("mode matrix row count must be 3*atom_count")
        gram = modes.T @ modes
        if np.max(np.abs(gram - np.eye(freqs.size))) > _ORTHONORMAL_TOL:
            raise InputError("mode matrix columns are not orthonormal")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "mode_matrix", modes)

    @property
    def mode_count(self):
        return self.frequencies.size

    @property
    def atom_count(self):
        return self.mode_matrix.shape[0] // 3


@dataclass(frozen=True)
class DuschinskyData:
    u_d: np.ndarray
    d: np.ndarray


@dataclass(frozen=True)
class DoktorovParameters:
    """Gate parameters of the Doktorov circuit for one transition direction.

    Attributes:
        u_left (array): interferometer applied after squeezing
        u_right (array): interferometer applied before squeezing (acts trivially on vacuum)
        squeeze (array): squeezing parameters, ``ln`` of the singular values of ``J``
        alpha (array): dimensionless displacement amplitudes
        omega_initial (array): initial-state frequencies in cm^-1
        omega_final (array): final-state frequencies in cm^-1
    """

    u_left: np.ndarray
    u_right: np.ndarray
    squeeze: np.ndarray
    alpha: np.ndarray
    omega_initial: np.ndarray
    omega_final: np.ndarray

    def __post_init__(self):
        squeeze = np.asarray(self.squeeze, dtype=float).ravel()
        m = squeeze.size
        fields = {
            "u_left": np.atleast_2d(np.asarray(self.u_left)),
            "u_right": np.atleast_2d(np.asarray(self.u_right)),
            "alpha": np.asarray(self.alpha).ravel(),
            "omega_initial": np.asarray(self.omega_initial, dtype=float).ravel(),
            "omega_final": np.asarray(self.omega_final, dtype=float).ravel(),
        }
        for name in ("u_left", "u_right"):
            if fields[name].shape != (m, m):
                raise InputError(f"{name} must be {m}x{m}, got {fields[name].shape}")
        for name in ("alpha", "omega_initial", "omega_final"):
            if fields[name].size != m:
                raise InputError(f"{name} must have length {m}")
        if np.any(fields["omega_initial"] <= 0) or np.any(fields["omega_final"] <= 0):
            raise InputError("frequencies must be positive")
        object.__setattr__(self, "squeeze", squeeze)
        for name, value in fields.items():
            object.__setattr__(self, name, value)

    @property
    def mode_count(self):
        return self.squeeze.size

    def jacobian(self):
        """Reconstruct ``J = U_L diag(exp(squeeze)) U_R``."""
        return self.u_left @ np.diag(np.exp(self.squeeze)) @ self.u_right

    def permuted(self, order):
        """Relabel modes: output mode ``k`` of the result is mode ``order[k]`` here."""
        order = np.asarray(order)
        return DoktorovParameters(
            u_left=self.u_left[order, :],
            u_right=self.u_right,
            squeeze=self.squeeze,
            alpha=self.alpha[order],
            omega_initial=self.omega_initial,
            omega_final=self.omega_final[order],
        )


def duschinsky_matrix(initial, final):
    """Duschinsky rotation ``U_D = L'^T L`` between two sets of normal modes.

    Args:
        initial (StateVibrations): modes ``L`` of the initial electronic state
        final (StateVibrations): modes ``L'`` of the final electronic state

    Returns:
        array: ``M x M`` Duschinsky matrix
    """
    if initial.mode_matrix.shape != final.mode_matrix.shape:
        raise InputError(
            "initial and final mode matrices differ in shape: "
            f"{initial.mode_matrix.shape} vs {final.mode_matrix.shape}"
        )
    return final.mode_matrix.T @ initial.mode_matrix


def displacement_vector(initial_geom, final_geom, final_modes):
    r"""Mass-weighted displacement :math:`d = L'^T m^{1/2} (x - x')`.

    Returns:
        array: displacement in amu^(1/2) Angstrom, one entry per final-state mode
    """
    if initial_geom.atom_count != final_geom.atom_count:
        raise InputError("structures have different atom counts")
    if not np.array_equal(initial_geom.masses, final_geom.masses):
        raise InputError("initial and final structures carry different masses")
    if final_modes.mode_matrix.shape[0] != 3 * initial_geom.atom_count:
        raise InputError("mode matrix rows do not match 3*atom_count")
    sqrt_m = np.repeat(np.sqrt(initial_geom.masses), 3)
    return final_modes.mode_matrix.T @ (sqrt_m * (initial_geom.geometry - final_geom.geometry))


def doktorov_params(u_d, d, omega_initial, omega_final):
    r"""Derive Doktorov gate parameters from Duschinsky data.

    The squeezing parameters are :math:`r_i = \ln\sigma_i` with :math:`\sigma_i`
    the singular values of :math:`J = \Omega' U_D \Omega^{-1}`, and the
    displacement is :math:`\alpha = \hbar^{-1/2}\Omega' d/\sqrt{2}` evaluated in
    SI units, which makes it dimensionless.

    Args:
        u_d (array): Duschinsky matrix
        d (array): displacement vector in amu^(1/2) Angstrom
        omega_initial (array): initial-state frequencies in cm^-1
        omega_final (array): final-state frequencies in cm^-1

    Returns:
        DoktorovParameters
    """
    u_d = np.atleast_2d(np.asarray(u_d, dtype=float))
    d = np.asarray(d, dtype=float).ravel()
    w = np.asarray(omega_initial, dtype=float).ravel()
    wp = np.asarray(omega_final, dtype=float).ravel()
    m = w.size
    if u_d.shape != (m, m):
        raise InputError(f"Duschinsky matrix must be {m}x{m}, got {u_d.shape}")
    if d.size != m or wp.size != m:
        raise InputError("frequency and displacement vectors must share one length")
    if np.any(w <= 0) or np.any(wp <= 0):
        raise InputError("frequencies must be strictly positive")

    jac = np.diag(np.sqrt(wp)) @ u_d @ np.diag(1.0 / np.sqrt(w))
    try:
        u_left, sigma, u_right = np.linalg.svd(jac)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD of J failed: {exc}") from exc

    omega_final_si = wp * CM1_TO_RAD_S
    d_si = d * np.sqrt(AMU_KG) * ANGSTROM_M
    alpha = np.sqrt(omega_final_si / HBAR_JS) * d_si / np.sqrt(2.0)

    return DoktorovParameters(
        u_left=u_left,
        u_right=u_right,
        squeeze=np.log(sigma),
        alpha=alpha,
        omega_initial=w,
        omega_final=wp,
    )


@dataclass(frozen=True)
class Molecule:
    """Two electronic states sharing one set of atoms."""

    masses: np.ndarray
    geometry_initial: np.ndarray
    geometry_final: np.ndarray
    initial: StateVibrations
    final: StateVibrations

    def structures(self):
        return (
            MolecularStructure(self.masses, self.geometry_initial),
            MolecularStructure(self.masses, self.geometry_final),
        )

    def duschinsky(self, direction="reduction"):
        """Duschinsky data for ``reduction`` (initial -> final) or ``oxidation`` (reverse)."""
        start, end = self.structures()
        modes_a, modes_b = self.initial, self.final
        if direction == "oxidation":
            start, end = end, start
            modes_a, modes_b = modes_b, modes_a
        elif direction != "reduction":
            raise InputError(f"unknown direction {direction!r}")
        return DuschinskyData(
            u_d=duschinsky_matrix(modes_a, modes_b),
            d=displacement_vector(start, end, modes_b),
        )

    def doktorov(self, direction="reduction"):
        data = self.duschinsky(direction)
        if direction == "oxidation":
            w, wp = self.final.frequencies, self.initial.frequencies
        else:
            w, wp = self.initial.frequencies, self.final.frequencies
        return doktorov_params(data.u_d, data.d, w, wp)
