"""Brute-force Fock-space oracle for the Doktorov circuit.

Gates are built by exponentiating their generators in a truncated number
basis and applied to the vacuum vector.  Nothing here shares code with the
loop-hafnian path, so agreement between the two is a meaningful check.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import InputError, PrecisionWarning, ResourceError

LEAKAGE_TOL = 1e-6
MAX_DIMENSION = 200_000


@dataclass(frozen=True)
class TruncatedFockSpace:
    mode_count: int
    cutoff: int
    budget: int = MAX_DIMENSION

    def __post_init__(self):
        if self.cutoff < 2:
            raise InputError("per-mode cutoff must be at least 2")
        if self.dimension > self.budget:
            raise ResourceError(
                f"{self.cutoff}^{self.mode_count} = {self.dimension} exceeds the "
                f"Fock-space budget of {self.budget}"
            )

    @property
    def dimension(self):
        return self.cutoff**self.mode_count


def annihilation(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


def gate_matrix_squeeze(cutoff, r):
    """``exp[r(a^dag^2 - a^2)/2]`` on the first ``cutoff`` number states."""
    a = annihilation(cutoff)
    ad = a.T
    return scipy.linalg.expm(0.5 * r * (ad @ ad - a @ a)).astype(complex)


def gate_matrix_displace(cutoff, alpha):
    """``exp(alpha a^dag - alpha^* a)`` on the first ``cutoff`` number states."""
    a = annihilation(cutoff).astype(complex)
    return scipy.linalg.expm(alpha * a.T - np.conj(alpha) * a)


def interferometer_hamiltonian(u):
    """Hermitian ``H`` with ``U = exp(iH)``, from a complex Schur (unitary) diagonalisation."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    t, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    h = z @ np.diag(phases) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def _interferometer_generator(cutoff, u):
    """Sparse ``sum_jk H_jk a_j^dag a_k`` on the tensor-product space."""
    h = interferometer_hamiltonian(u)
    m = h.shape[0]
    a = sp.csr_matrix(annihilation(cutoff))
    eye = sp.identity(cutoff, format="csr")

    def embed(op, mode):
        out = None
        for k in range(m):
            factor = op if k == mode else eye
            out = factor if out is None else sp.kron(out, factor, format="csr")
        return out

    lowers = [embed(a, k) for k in range(m)]
    gen = sp.csr_matrix((cutoff**m, cutoff**m), dtype=complex)
    for j in range(m):
        for k in range(m):
            if h[j, k] != 0:
                gen = gen + h[j, k] * (lowers[j].T @ lowers[k])
    return gen


def gate_matrix_interferometer(cutoff, u, budget=4096):
    """Dense ``exp(i a^dag H a)`` on the ``cutoff**M`` tensor-product space."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    space = TruncatedFockSpace(u.shape[0], cutoff, budget=budget)
    gen = _interferometer_generator(space.cutoff, u).toarray()
    return scipy.linalg.expm(1j * gen)


def default_cutoff(squeeze, alpha, budget=MAX_DIMENSION):
    """Per-mode cutoff ``max(30, 10 * nbar)``, capped so that ``C**M`` fits ``budget``.

    ``nbar = sum(|alpha|^2 + sinh^2 r)`` is the total mean photon number, which
    bounds what the interferometer can pile into a single mode.  A floor of 20
    leaves ~1e-8 error for three modes near ``r = 0.6, |alpha| = 1.2``.
    """
    squeeze = np.atleast_1d(np.asarray(squeeze, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha))
    nbar = float(np.sum(np.abs(alpha) ** 2) + np.sum(np.sinh(squeeze) ** 2))
    cap = int(np.floor(budget ** (1.0 / squeeze.size) + 1e-9))
    return int(max(2, min(max(30, np.ceil(10 * nbar)), cap)))


@dataclass(frozen=True)
class OracleState:
    """Truncated output amplitudes, indexed as ``amplitudes[n_1, ..., n_M]``."""

    amplitudes: np.ndarray
    leakage: float

    def probability(self, pattern):
        pattern = tuple(int(n) for n in pattern)
        if len(pattern) != self.amplitudes.ndim:
            raise InputError("pattern length does not match mode count")
        if any(n >= self.amplitudes.shape[0] for n in pattern):
            raise ResourceError("pattern exceeds the oracle cutoff")
        return float(abs(self.amplitudes[pattern]) ** 2)


def circuit_state(squeeze, unitary, alpha, cutoff=None, work_cutoff=None):
    """``D(alpha) R(U) S(r)|0>`` by successive matrix-vector products.

    Single-mode gates are exponentiated at ``work_cutoff`` (default ``4*cutoff``)
    and cropped, which keeps their low-number block free of truncation error.
    """
    squeeze = np.atleast_1d(np.asarray(squeeze, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    unitary = np.atleast_2d(np.asarray(unitary, dtype=complex))
    m = squeeze.size
    if alpha.size != m or unitary.shape != (m, m):
        raise InputError("squeeze, alpha and unitary disagree on mode count")
    if cutoff is None:
        cutoff = default_cutoff(squeeze, alpha)
    space = TruncatedFockSpace(m, cutoff)
    big = work_cutoff or 4 * cutoff

    state = np.ones(1, dtype=complex)
    for r in squeeze:
        column = gate_matrix_squeeze(big, r)[:cutoff, 0]
        state = np.kron(state, column)

    if not np.allclose(unitary, np.eye(m), atol=0, rtol=0):
        gen = _interferometer_generator(cutoff, unitary)
        state = expm_multiply(1j * gen, state)

    tensor = state.reshape((cutoff,) * m)
    for k, a in enumerate(alpha):
        disp = gate_matrix_displace(big, a)[:cutoff, :cutoff]
        tensor = np.moveaxis(np.tensordot(disp, tensor, axes=([1], [k])), 0, k)

    leakage = float(1.0 - np.sum(np.abs(tensor) ** 2))
    if leakage > LEAKAGE_TOL:
        warnings.warn(
            f"Fock truncation at cutoff {space.cutoff} leaks {leakage:.2e} of the norm",
            PrecisionWarning,
            stacklevel=2,
        )
    return OracleState(tensor, leakage)


def doktorov_state(params, cutoff=None, work_cutoff=None):
    return circuit_state(params.squeeze, params.u_left, params.alpha, cutoff, work_cutoff)


def amplitude_probability(params, pattern, cutoff=None):
    """``|<pattern| D(alpha) R(U_L) S(r) |0>|^2`` from the truncated Fock-space circuit."""
    return doktorov_state(params, cutoff).probability(pattern)
