r"""Multimode Gaussian states and their photon-number statistics.

Convention: :math:`\hbar = 1`, :math:`\hat{x} = (\hat{a} + \hat{a}^\dagger)/\sqrt{2}`,
quadratures ordered :math:`(x_1, \ldots, x_M, p_1, \ldots, p_M)`, vacuum
covariance :math:`I/2`.  Gates follow

* squeezing :math:`\hat{S}(r) = \exp[r(\hat{a}^{\dagger 2} - \hat{a}^2)/2]`,
  which scales :math:`x` by :math:`e^{r}` and :math:`p` by :math:`e^{-r}`;
* interferometer :math:`\hat{R}(U)` with :math:`\hat{a} \to U\hat{a}`;
* displacement :math:`\hat{D}(\alpha) = \exp(\alpha\hat{a}^\dagger - \alpha^*\hat{a})`.

Photon-number probabilities of pure states are loop hafnians of the matrix
:math:`B` in :math:`|\psi\rangle \propto \exp(\tfrac12 \hat{a}^{\dagger T} B \hat{a}^\dagger
+ \gamma^T\hat{a}^\dagger)|0\rangle`.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import InputError, ResourceError, UnsupportedStateError
from .hafnian import loop_hafnian

PURITY_RTOL = 1e-8
DEFAULT_PHOTON_CAP = 12


@dataclass(frozen=True)
class GaussianState:
    """First and second quadrature moments of an ``M``-mode state."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.asarray(self.covariance, dtype=float)
        if mean.size % 2 or mean.size == 0:
            raise InputError("mean vector must have even, nonzero length 2M")
        if cov.shape != (mean.size, mean.size):
            raise InputError(f"covariance must be {mean.size}x{mean.size}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def mode_count(self):
        return self.mean.size // 2

    def is_pure(self, rtol=PURITY_RTOL):
        # det(cov) = (1/2)^(2M) for pure states
        det = np.linalg.det(2.0 * self.covariance)
        return abs(det - 1.0) <= rtol

    def reduced(self, modes):
        """Marginal state on the listed modes."""
        modes = np.asarray(modes, dtype=int)
        idx = np.concatenate([modes, modes + self.mode_count])
        return GaussianState(self.mean[idx], self.covariance[np.ix_(idx, idx)])

    def complex_mean(self):
        """Coherent amplitudes ``<a_i>``."""
        m = self.mode_count
        return (self.mean[:m] + 1j * self.mean[m:]) / np.sqrt(2.0)


def _check_len(vec, m, name):
    vec = np.asarray(vec).ravel()
    if vec.size != m:
        raise InputError(f"{name} has length {vec.size}, state has {m} modes")
    return vec


def _symplectic_update(state, s):
    return GaussianState(s @ state.mean, s @ state.covariance @ s.T)


def vacuum(mode_count):
    if mode_count < 1:
        raise InputError("mode_count must be at least 1")
    return GaussianState(np.zeros(2 * mode_count), 0.5 * np.eye(2 * mode_count))


def apply_squeezing(state, squeeze):
    r = _check_len(squeeze, state.mode_count, "squeeze").astype(float)
    s = np.diag(np.concatenate([np.exp(r), np.exp(-r)]))
    return _symplectic_update(state, s)


def apply_interferometer(state, u, atol=1e-8):
    """Apply the passive linear optics transformation ``a -> U a``."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    m = state.mode_count
    if u.shape != (m, m):
        raise InputError(f"interferometer must be {m}x{m}, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(m))) >= atol:
        raise InputError("interferometer matrix is not unitary")
    re, im = u.real, u.imag
    s = np.block([[re, -im], [im, re]])
    return _symplectic_update(state, s)


def apply_displacement(state, alpha):
    alpha = _check_len(alpha, state.mode_count, "alpha").astype(complex)
    shift = np.sqrt(2.0) * np.concatenate([alpha.real, alpha.imag])
    return GaussianState(state.mean + shift, state.covariance)


def prepare_doktorov_output(params):
    """Vacuum -> S(r) -> R(U_L) -> D(alpha).  ``R(U_R)`` leaves vacuum unchanged."""
    state = vacuum(params.mode_count)
    state = apply_squeezing(state, params.squeeze)
    state = apply_interferometer(state, params.u_left)
    return apply_displacement(state, params.alpha)


def mean_photon(state):
    m = state.mode_count
    second = np.diag(state.covariance) + state.mean**2
    return float(np.sum(second[:m] + second[m:] - 1.0) / 2.0)


def mode_mean_photons(state):
    """Per-mode mean photon numbers."""
    m = state.mode_count
    second = np.diag(state.covariance) + state.mean**2
    return (second[:m] + second[m:] - 1.0) / 2.0


def normal_ordered_moments(state):
    r"""Central moments :math:`N_{ij} = \langle a_i^\dagger a_j\rangle`, :math:`M_{ij} = \langle a_i a_j\rangle`."""
    m = state.mode_count
    cov = state.covariance
    vxx, vpp, vxp = cov[:m, :m], cov[m:, m:], cov[:m, m:]
    n_mat = 0.5 * (vxx + vpp + 1j * (vxp - vxp.T)) - 0.5 * np.eye(m)
    m_mat = 0.5 * (vxx - vpp + 1j * (vxp + vxp.T))
    return n_mat, m_mat


@dataclass(frozen=True)
class PureStateKernel:
    """Everything the loop-hafnian formula needs for one pure state.

    Attributes:
        b_matrix (array): symmetric pairing matrix ``B``
        gamma (array): loop weights ``alpha - B alpha*``
        log_prefactor (float): log of ``exp(-|alpha|^2 + Re(alpha*^T B alpha*)) / sqrt(det(I+N))``
    """

    b_matrix: np.ndarray
    gamma: np.ndarray
    log_prefactor: float


def pure_state_kernel(state, check_purity=True):
    if check_purity and not state.is_pure():
        raise UnsupportedStateError("photon probabilities require a pure Gaussian state")
    n_mat, m_mat = normal_ordered_moments(state)
    eye = np.eye(state.mode_count)
    b = np.linalg.solve((eye + n_mat).T, m_mat.T).T
    b = 0.5 * (b + b.T)
    alpha = state.complex_mean()
    gamma = alpha - b @ alpha.conj()
    _, logdet = np.linalg.slogdet(eye + n_mat)
    log_pref = (
        -np.sum(np.abs(alpha) ** 2)
        + np.real(alpha.conj() @ b @ alpha.conj())
        - 0.5 * logdet
    )
    return PureStateKernel(b, gamma, float(log_pref))


def _pattern_matrix(kernel, pattern):
    idx = np.repeat(np.arange(pattern.size), pattern)
    sub = kernel.b_matrix[np.ix_(idx, idx)].copy()
    np.fill_diagonal(sub, kernel.gamma[idx])
    return sub


def _as_pattern(pattern, m):
    pattern = np.asarray(pattern, dtype=int).ravel()
    if pattern.size != m:
        raise InputError(f"pattern has {pattern.size} modes, state has {m}")
    if np.any(pattern < 0):
        raise InputError("photon counts must be nonnegative")
    return pattern


def fock_probability(state, pattern, photon_cap=DEFAULT_PHOTON_CAP, method="trace", kernel=None):
    """Exact probability of a photon-number pattern for a pure Gaussian state.

    Args:
        state (GaussianState): a pure state
        pattern (sequence[int]): photon count per mode
        photon_cap (int): largest total photon number accepted
        method (str): ``"trace"`` (inclusion-exclusion) or ``"enumerate"`` (matching walk)
        kernel (PureStateKernel): precomputed kernel, skips purity check and setup

    Returns:
        float: probability in ``[0, 1]``
    """
    pattern = _as_pattern(pattern, state.mode_count)
    total = int(pattern.sum())
    if total > photon_cap:
        raise ResourceError(f"pattern has {total} photons, above the cap of {photon_cap}")
    if kernel is None:
        kernel = pure_state_kernel(state)
    haf = loop_hafnian(_pattern_matrix(kernel, pattern), method=method) if total else 1.0
    norm = 1.0
    for count in pattern:
        norm *= factorial(int(count))
    prob = np.exp(kernel.log_prefactor) * abs(haf) ** 2 / norm
    return float(prob)
