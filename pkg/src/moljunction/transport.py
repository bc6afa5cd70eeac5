r"""Sequential-tunnelling rates, currents and conductance maps.

Energies are in eV and voltages in volts, so a chemical potential
:math:`\mu = \eta V_b` is numerically the same in both.  Each coarse-grained
distribution ``q`` lives on an :class:`~moljunction.sampler.EnergyGrid` of
electron energies; the gate shifts every bin by :math:`-\lambda_g (V_g + V_0)`
before Fermi averaging.

Rates use the binned DOS, e.g.

.. math::
    k^S_{red}(V) = \frac{2\pi}{\hbar}\Gamma_S \sum_i \bar f(i, \mu_S)\, q_{red}(i),

and the current follows from the steady state of the two-state master equation.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import expit

from .constants import BOLTZMANN_EV, ELEMENTARY_CHARGE, HBAR_EVS
from .errors import InputError, OccupationError

RATE_PREFACTOR = 2.0 * np.pi / HBAR_EVS  # s^-1 per eV of coupling


@dataclass(frozen=True)
class TransportConfig:
    """Junction parameters.

    Attributes:
        gamma_source (float): source coupling in eV
        gamma_drain (float): drain coupling in eV
        temperature (float): electrode temperature in K
        bias_fraction (float): ``mu_S = eta*V_b``, ``mu_D = -(1-eta)*V_b``
        gate_lever (float): level shift per volt of gate, ``-lambda_g*V_g``
        gate_offset_mV (float): constant added to every gate voltage
    """

    gamma_source: float = 1e-6
    gamma_drain: float = 1e-6
    temperature: float = 10.0
    bias_fraction: float = 0.5
    gate_lever: float = 1.0
    gate_offset_mV: float = 0.0

    def __post_init__(self):
        if self.gamma_source <= 0 or self.gamma_drain <= 0:
            raise InputError("couplings must be positive")
        if self.temperature < 0:
            raise InputError("temperature must be nonnegative")
        if not 0.0 <= self.bias_fraction <= 1.0:
            raise InputError("bias_fraction must lie in [0, 1]")

    def mu_source(self, v_bias):
        return self.bias_fraction * np.asarray(v_bias, dtype=float)

    def mu_drain(self, v_bias):
        return -(1.0 - self.bias_fraction) * np.asarray(v_bias, dtype=float)

    def level_shift(self, v_gate):
        return -self.gate_lever * (np.asarray(v_gate, dtype=float) + 1e-3 * self.gate_offset_mV)


@dataclass(frozen=True)
class RateSet:
    """The four electron-transfer rates in s^-1 (scalars or equal-shape arrays)."""

    k_red_source: np.ndarray
    k_ox_source: np.ndarray
    k_red_drain: np.ndarray
    k_ox_drain: np.ndarray

    @property
    def total(self):
        return self.k_red_source + self.k_ox_source + self.k_red_drain + self.k_ox_drain

    @property
    def blocked(self):
        """True where every rate vanishes and the current is set to zero by convention."""
        return np.asarray(self.total) == 0


def fermi(eps, mu, temperature):
    """Fermi-Dirac occupation; a step function with ``f(mu) = 1/2`` at ``T = 0``."""
    x = np.asarray(eps, dtype=float) - np.asarray(mu, dtype=float)
    if temperature < 0:
        raise InputError("temperature must be nonnegative")
    if temperature == 0:
        out = np.where(x < 0, 1.0, np.where(x > 0, 0.0, 0.5))
    else:
        out = expit(-x / (BOLTZMANN_EV * temperature))
    return out if out.ndim else float(out)


def _softplus(x):
    return np.logaddexp(0.0, x)


def fermi_window_average(lo, hi, mu, temperature):
    r"""Mean of the Fermi function over ``[lo, hi]``, in closed form.

    Uses :math:`\int f\,d\epsilon = -k_BT\ln(1 + e^{(\mu-\epsilon)/k_BT})`.  Bins
    below :math:`\mu` are evaluated through :math:`1 - \overline{1-f}` so that no
    large logarithms cancel.  Broadcasts over all arguments except ``temperature``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    width = hi - lo
    kt = BOLTZMANN_EV * temperature
    if temperature < 0:
        raise InputError("temperature must be nonnegative")
    if np.all(kt <= 1e-16 * width):
        # thermal corrections are below double precision
        return np.clip((mu - lo) / width, 0.0, 1.0)
    a = (mu - lo) / kt
    b = (mu - hi) / kt
    filled = 0.5 * (a + b) > 0
    lower = kt * (_softplus(a) - _softplus(b)) / width
    upper = 1.0 - kt * (_softplus(-b) - _softplus(-a)) / width
    return np.clip(np.where(filled, upper, lower), 0.0, 1.0)


def fermi_window_average_quad(lo, hi, mu, temperature, epsabs=1e-10):
    """Scalar reference for :func:`fermi_window_average` by adaptive quadrature."""
    width = hi - lo
    points = [mu] if lo < mu < hi else None
    value, _ = integrate.quad(
        lambda e: fermi(e, mu, temperature) / width, lo, hi,
        epsabs=epsabs, epsrel=0, points=points, limit=200,
    )
    return value


@lru_cache(maxsize=65536)
def _cached_average(lo, hi, mu, temperature):
    return float(fermi_window_average(lo, hi, mu, temperature))


def fermi_average(bin_index, grid, mu, temperature, shift=0.0, cached=False):
    """Average occupation over one bin of ``grid`` (shifted by ``shift`` eV)."""
    if not 0 <= bin_index < grid.bin_count:
        raise InputError(f"bin index {bin_index} outside 0..{grid.bin_count - 1}")
    lo = grid.eps_min + bin_index * grid.width + shift
    hi = lo + grid.width
    if cached:
        return _cached_average(float(lo), float(hi), float(mu), float(temperature))
    return float(fermi_window_average(lo, hi, mu, temperature))


def occupation_table(grid, mu, temperature, shift=0.0):
    """``fbar[v, i]`` for every chemical potential ``mu[v]`` and bin ``i``."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    shift = np.broadcast_to(np.asarray(shift, dtype=float), mu.shape)
    lo = grid.eps_min + np.arange(grid.bin_count) * grid.width
    lo = lo[None, :] + shift[:, None]
    return fermi_window_average(lo, lo + grid.width, mu[:, None], temperature)


def _check_q(q, grid):
    q = np.asarray(q, dtype=float).ravel()
    if q.size != grid.bin_count:
        raise InputError(f"q has {q.size} bins, grid has {grid.bin_count}")
    if np.any(q < 0):
        raise InputError("q must be nonnegative")
    return q


def _rates(q, grid, mu, temperature, shift, gamma, empty):
    fbar = occupation_table(grid, mu, temperature, shift)
    weights = 1.0 - fbar if empty else fbar
    return RATE_PREFACTOR * gamma * (weights @ q)


def _scalar(x, like):
    return float(x[0]) if np.ndim(like) == 0 else x


def rate_source(q, grid, v_bias, v_gate, cfg):
    """Reduction rate from the source, ``(2 pi/hbar) Gamma_S sum_i fbar(i, mu_S) q(i)``."""
    q = _check_q(q, grid)
    v_bias = np.asarray(v_bias, dtype=float)
    mu = np.atleast_1d(cfg.mu_source(v_bias))
    shift = np.broadcast_to(cfg.level_shift(v_gate), mu.shape)
    return _scalar(_rates(q, grid, mu, cfg.temperature, shift, cfg.gamma_source, False), v_bias)


def rate_drain(q_ox, grid, v_bias, v_gate, cfg):
    """Oxidation rate into the drain, ``(2 pi/hbar) Gamma_D sum_i [1 - fbar(i, mu_D)] q_ox(i)``."""
    q_ox = _check_q(q_ox, grid)
    v_bias = np.asarray(v_bias, dtype=float)
    mu = np.atleast_1d(cfg.mu_drain(v_bias))
    shift = np.broadcast_to(cfg.level_shift(v_gate), mu.shape)
    return _scalar(_rates(q_ox, grid, mu, cfg.temperature, shift, cfg.gamma_drain, True), v_bias)


def full_rate_set(q_red, q_ox, grid, v_bias, v_gate, cfg):
    """All four rates; reduction rates use ``q_red``, oxidation rates ``q_ox``.

    ``v_bias`` may be an array, in which case every field of the result is too.
    """
    q_red = _check_q(q_red, grid)
    q_ox = _check_q(q_ox, grid)
    v_bias = np.asarray(v_bias, dtype=float)
    mu_s = np.atleast_1d(cfg.mu_source(v_bias))
    mu_d = np.atleast_1d(cfg.mu_drain(v_bias))
    shift = np.broadcast_to(cfg.level_shift(v_gate), mu_s.shape)
    t = cfg.temperature
    gs, gd = cfg.gamma_source, cfg.gamma_drain
    return RateSet(
        k_red_source=_scalar(_rates(q_red, grid, mu_s, t, shift, gs, False), v_bias),
        k_ox_source=_scalar(_rates(q_ox, grid, mu_s, t, shift, gs, True), v_bias),
        k_red_drain=_scalar(_rates(q_red, grid, mu_d, t, shift, gd, False), v_bias),
        k_ox_drain=_scalar(_rates(q_ox, grid, mu_d, t, shift, gd, True), v_bias),
    )


def current_simple(k_s, k_d):
    """Series current ``e k_S k_D / (k_S + k_D)``, zero when both rates vanish."""
    k_s = np.asarray(k_s, dtype=float)
    k_d = np.asarray(k_d, dtype=float)
    if np.any(k_s < 0) or np.any(k_d < 0):
        raise InputError("rates must be nonnegative")
    denom = k_s + k_d
    safe = np.where(denom > 0, denom, 1.0)
    out = np.where(denom > 0, ELEMENTARY_CHARGE * (k_s * k_d) / safe, 0.0)
    return float(out) if out.ndim == 0 else out


def current_full(rates):
    """Steady-state current with all four channels.

    Where every rate is zero the current is returned as 0; ``rates.blocked``
    flags those points.
    """
    num = rates.k_red_source * rates.k_ox_drain - rates.k_ox_source * rates.k_red_drain
    denom = np.asarray(rates.total, dtype=float)
    safe = np.where(denom > 0, denom, 1.0)
    out = np.where(denom > 0, ELEMENTARY_CHARGE * num / safe, 0.0)
    return float(out) if out.ndim == 0 else out


def steady_state(rates):
    """Occupations ``(P_ox, P_red)`` with ``dP_ox/dt = 0``."""
    denom = np.asarray(rates.total, dtype=float)
    if np.any(denom <= 0):
        raise OccupationError("all transfer rates vanish; occupations are undefined")
    # both from their own numerators, so a small occupation keeps full relative precision
    p_ox = (rates.k_ox_source + rates.k_ox_drain) / denom
    p_red = (rates.k_red_source + rates.k_red_drain) / denom
    return p_ox, p_red


def current_from_occupations(rates, side="source"):
    """Current through one electrode given the steady-state occupations."""
    p_ox, p_red = steady_state(rates)
    if side == "source":
        return ELEMENTARY_CHARGE * (p_ox * rates.k_red_source - p_red * rates.k_ox_source)
    if side == "drain":
        return ELEMENTARY_CHARGE * (p_red * rates.k_ox_drain - p_ox * rates.k_red_drain)
    raise InputError(f"unknown electrode {side!r}")


@dataclass(frozen=True)
class IVCurve:
    v_bias: np.ndarray  # V
    current: np.ndarray  # A
    rates: RateSet

    def __iter__(self):
        return iter(zip(self.v_bias.tolist(), self.current.tolist()))


def _check_grid(values, name, min_points=1):
    values = np.asarray(values, dtype=float).ravel()
    if values.size < min_points:
        raise InputError(f"{name} needs at least {min_points} points")
    if values.size > 1 and not (np.all(np.diff(values) > 0) or np.all(np.diff(values) < 0)):
        raise InputError(f"{name} must be strictly monotone")
    return values


def iv_curve(q_red, q_ox, grid, bias_grid, v_gate, cfg):
    bias = _check_grid(bias_grid, "bias grid")
    rates = full_rate_set(q_red, q_ox, grid, bias, v_gate, cfg)
    return IVCurve(bias, np.atleast_1d(current_full(rates)), rates)


@dataclass(frozen=True)
class ConductanceMap:
    """``didv[g, b]`` in A/V on ``gate_grid[g]`` x ``bias_grid[b]`` (both in V)."""

    bias_grid: np.ndarray
    gate_grid: np.ndarray
    current: np.ndarray
    didv: np.ndarray


def differential_conductance(current, bias):
    """dI/dV by central differences inside the grid, one-sided at its ends."""
    bias = np.asarray(bias, dtype=float)
    current = np.asarray(current, dtype=float)
    if bias.size < 2:
        raise InputError("need at least two bias points for a derivative")
    return np.gradient(current, bias, axis=-1, edge_order=1)


def conductance_map(q_red, q_ox, grid, bias_grid, gate_grid, cfg):
    bias = _check_grid(bias_grid, "bias grid", min_points=3)
    gates = _check_grid(gate_grid, "gate grid")
    current = np.vstack([iv_curve(q_red, q_ox, grid, bias, vg, cfg).current for vg in gates])
    return ConductanceMap(bias, gates, current, differential_conductance(current, bias))
