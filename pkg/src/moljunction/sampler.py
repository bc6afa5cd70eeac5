r"""Photon-pattern statistics, transition energies and energy histograms.

At zero temperature the initial vibrational state is the vacuum, so a
pattern :math:`\mathbf{m}` has energy :math:`\sum_k m_k\omega'_k`.  Patterns
are enumerated exhaustively up to a total-photon cutoff, then drawn from the
resulting categorical distribution; the histogram counts give
:math:`q(i) = N_i/N`.
"""

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .constants import CM1_TO_EV
from .errors import CutoffError, InputError
from .gaussian import fock_probability, mode_mean_photons, pure_state_kernel

DROP_BELOW = 1e-14
CHUNK_SIZE = 1 << 16
THREADS_ENV = "MOLJUNCTION_THREADS"


def transition_energy(pattern_initial, pattern_final, omega_initial, omega_final):
    """Transition energy ``sum(m * omega') - sum(n * omega)`` in cm^-1."""
    n = np.asarray(pattern_initial, dtype=float)
    m = np.asarray(pattern_final, dtype=float)
    w = np.asarray(omega_initial, dtype=float)
    wp = np.asarray(omega_final, dtype=float)
    if not (n.shape == m.shape == w.shape == wp.shape):
        raise InputError("patterns and frequency vectors must share one length")
    return float(m @ wp - n @ w)


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    sample_count: int = 5000
    max_total_photons: int = 8
    min_captured_mass: float = 0.999

    def __post_init__(self):
        if self.sample_count < 1:
            raise InputError("sample_count must be at least 1")
        if not 0.0 < self.min_captured_mass <= 1.0:
            raise InputError("min_captured_mass must lie in (0, 1]")
        if self.max_total_photons < 0:
            raise InputError("max_total_photons must be nonnegative")


@dataclass(frozen=True)
class VibronicDistribution:
    """Enumerated photon patterns with probabilities and energies (cm^-1).

    Attributes:
        patterns (array): ``K x M`` integer patterns over all modes
        probabilities (array): length-``K`` probabilities
        energies (array): length-``K`` transition energies in cm^-1
        captured_mass (float): sum of ``probabilities``
        frozen_modes (tuple): modes held at zero photons by the active-space reduction
        frozen_mass_bound (float): upper bound on probability lost to freezing
    """

    patterns: np.ndarray
    probabilities: np.ndarray
    energies: np.ndarray
    captured_mass: float
    frozen_modes: tuple = ()
    frozen_mass_bound: float = 0.0

    def __len__(self):
        return self.probabilities.size

    def __iter__(self):
        for pat, p, e in zip(self.patterns, self.probabilities, self.energies):
            yield tuple(int(x) for x in pat), float(p), float(e)


class VibronicSample(NamedTuple):
    pattern: tuple
    energy: float  # cm^-1


@dataclass(frozen=True)
class SampleSet:
    """``N`` draws from a :class:`VibronicDistribution`, stored column-wise."""

    patterns: np.ndarray
    energies: np.ndarray  # cm^-1

    def __len__(self):
        return self.energies.size

    def __iter__(self) -> Iterator[VibronicSample]:
        for pat, e in zip(self.patterns, self.energies):
            yield VibronicSample(tuple(int(x) for x in pat), float(e))

    @property
    def energies_ev(self):
        return self.energies * CM1_TO_EV


def active_modes(params, alpha_tol=1e-4, squeeze_tol=1e-4, coupling_tol=1e-6):
    """Split modes into active and frozen sets.

    A mode is frozen when its displacement and squeezing are both negligible and
    the interferometer does not couple it to any other mode.
    """
    u = np.abs(params.u_left)
    m = params.mode_count
    offdiag = u - np.diag(np.diag(u))
    frozen = [
        k for k in range(m)
        if abs(params.alpha[k]) < alpha_tol
        and abs(params.squeeze[k]) < squeeze_tol
        and max(offdiag[k].max(initial=0.0), offdiag[:, k].max(initial=0.0)) < coupling_tol
    ]
    active = [k for k in range(m) if k not in frozen]
    return active, frozen


def _patterns_up_to(mode_count, max_total):
    """All nonnegative integer vectors of length ``mode_count`` with sum ``<= max_total``."""
    out = []
    for total in range(max_total + 1):
        # stars and bars
        for bars in itertools.combinations(range(total + mode_count - 1), mode_count - 1):
            prev = -1
            pat = []
            for b in bars:
                pat.append(b - prev - 1)
                prev = b
            pat.append(total + mode_count - 2 - prev)
            out.append(pat)
    return np.array(out, dtype=int).reshape(-1, mode_count)


def _thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def enumerate_distribution(state, params, config, workers=None, reduce_active=True, method="trace"):
    """Exact probabilities of every pattern with at most ``max_total_photons`` photons.

    Args:
        state (GaussianState): output of :func:`~moljunction.gaussian.prepare_doktorov_output`
        params (DoktorovParameters): supplies the final-state frequencies
        config (SamplerConfig): cutoff and captured-mass contract
        workers (int): threads used for pattern blocks (default from ``MOLJUNCTION_THREADS``)
        reduce_active (bool): freeze decoupled, unexcited modes at zero photons

    Returns:
        VibronicDistribution

    Raises:
        CutoffError: captured mass below ``config.min_captured_mass``
    """
    m = state.mode_count
    if params.mode_count != m:
        raise InputError("state and parameters disagree on mode count")
    if reduce_active:
        active, frozen = active_modes(params)
    else:
        active, frozen = list(range(m)), []
    if not active:
        active, frozen = [0], [k for k in range(1, m)]
    frozen_bound = float(np.sum(mode_mean_photons(state)[frozen])) if frozen else 0.0

    sub = state.reduced(active) if frozen else state
    kernel = pure_state_kernel(sub)
    local = _patterns_up_to(len(active), config.max_total_photons)
    cap = max(config.max_total_photons, 1)

    def evaluate(block):
        return [fock_probability(sub, p, photon_cap=cap, method=method, kernel=kernel) for p in block]

    workers = workers or _thread_count()
    if workers > 1 and len(local) > 1:
        blocks = np.array_split(local, workers * 4)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            probs = np.concatenate([np.asarray(b, dtype=float) for b in pool.map(evaluate, blocks)])
    else:
        probs = np.asarray(evaluate(local), dtype=float)

    captured = float(probs.sum())
    if captured < config.min_captured_mass:
        raise CutoffError(captured, config.min_captured_mass, config.max_total_photons)

    keep = probs >= DROP_BELOW
    full = np.zeros((int(keep.sum()), m), dtype=int)
    full[:, active] = local[keep]
    energies = full @ params.omega_final
    return VibronicDistribution(
        patterns=full,
        probabilities=probs[keep],
        energies=energies.astype(float),
        captured_mass=float(probs[keep].sum()),
        frozen_modes=tuple(frozen),
        frozen_mass_bound=frozen_bound,
    )


def draw_samples(dist, config, stream=0):
    """Draw ``config.sample_count`` patterns from ``dist`` renormalised by its captured mass.

    Draws are generated in fixed-size chunks; chunk ``c`` uses the generator
    seeded with ``SeedSequence([seed, stream, c])``, so the result depends only
    on ``(seed, stream, N)`` and never on how chunks are scheduled.
    """
    if len(dist) == 0:
        raise InputError("cannot sample from an empty distribution")
    if dist.captured_mass < config.min_captured_mass:
        raise CutoffError(dist.captured_mass, config.min_captured_mass, config.max_total_photons)
    probs = dist.probabilities / dist.probabilities.sum()
    n = config.sample_count
    picks = []
    for chunk, start in enumerate(range(0, n, CHUNK_SIZE)):
        size = min(CHUNK_SIZE, n - start)
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, stream, chunk]))
        picks.append(rng.choice(probs.size, size=size, p=probs))
    idx = np.concatenate(picks)
    return SampleSet(dist.patterns[idx], dist.energies[idx])


@dataclass(frozen=True)
class EnergyGrid:
    """``bin_count`` equal bins of width ``2*Delta`` covering ``[eps_min, eps_max]`` (eV)."""

    eps_min: float
    eps_max: float
    bin_count: int

    def __post_init__(self):
        if not self.eps_max > self.eps_min:
            raise InputError("eps_max must exceed eps_min")
        if self.bin_count < 1:
            raise InputError("bin_count must be at least 1")

    @property
    def width(self):
        return (self.eps_max - self.eps_min) / self.bin_count

    @property
    def edges(self):
        return np.linspace(self.eps_min, self.eps_max, self.bin_count + 1)

    @property
    def centers(self):
        return self.eps_min + (np.arange(self.bin_count) + 0.5) * self.width

    def locate(self, energies):
        """Bin index of each energy, ``-1`` outside the grid.  Bins are half-open, the last is closed."""
        energies = np.asarray(energies, dtype=float)
        idx = np.searchsorted(self.edges, energies, side="right") - 1
        idx = np.where(energies == self.eps_max, self.bin_count - 1, idx)
        inside = (energies >= self.eps_min) & (energies <= self.eps_max)
        return np.where(inside, idx, -1)


@dataclass(frozen=True)
class EnergyHistogram:
    grid: EnergyGrid
    counts: np.ndarray
    total_samples: int
    out_of_range: int

    @property
    def eps_min(self):
        return self.grid.eps_min

    @property
    def eps_max(self):
        return self.grid.eps_max

    @property
    def bin_count(self):
        return self.grid.bin_count


def bin_energies(energies_ev, eps_min, eps_max, bin_count):
    """Histogram of transition energies given in eV (a :class:`SampleSet` is accepted too)."""
    if isinstance(energies_ev, SampleSet):
        energies_ev = energies_ev.energies_ev
    energies = np.asarray(energies_ev, dtype=float).ravel()
    grid = EnergyGrid(float(eps_min), float(eps_max), int(bin_count))
    idx = grid.locate(energies)
    inside = idx >= 0
    counts = np.bincount(idx[inside], minlength=grid.bin_count).astype(np.int64)
    return EnergyHistogram(grid, counts, int(energies.size), int(np.count_nonzero(~inside)))


def q_estimate(hist):
    """Coarse-grained probabilities ``q(i) = N_i / N``."""
    if hist.total_samples <= 0:
        raise InputError("histogram holds no samples")
    return hist.counts / hist.total_samples


def exact_q(dist, grid, sign=1.0):
    """Bin the enumerated distribution itself (``sign=-1`` mirrors the energy axis)."""
    idx = grid.locate(sign * dist.energies * CM1_TO_EV)
    inside = idx >= 0
    return np.bincount(idx[inside], weights=dist.probabilities[inside], minlength=grid.bin_count) / dist.captured_mass


@dataclass(frozen=True)
class DensityOfStates:
    """Piecewise-constant DOS: height ``q(i)/(2 Delta)`` on each bin."""

    centers: np.ndarray
    heights: np.ndarray
    width: float = field(default=0.0)

    def integral(self):
        return float(np.sum(self.heights) * self.width)

    def __iter__(self):
        return iter(zip(self.centers.tolist(), self.heights.tolist()))

    def __call__(self, eps):
        eps = np.asarray(eps, dtype=float)
        lo = self.centers[0] - 0.5 * self.width
        idx = np.floor((eps - lo) / self.width).astype(int)
        ok = (idx >= 0) & (idx < self.heights.size)
        return np.where(ok, self.heights[np.clip(idx, 0, self.heights.size - 1)], 0.0)


def dos_reconstruct(q, eps_min, eps_max):
    q = np.asarray(q, dtype=float)
    grid = EnergyGrid(float(eps_min), float(eps_max), q.size)
    return DensityOfStates(grid.centers, q / grid.width, grid.width)
