"""Self-checks run by ``moljunction verify``.

Each check compares two independent computations and reports the largest
deviation seen.  The suites are deterministic (fixed seeds).
"""

import time
import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.integrate import solve_ivp
from scipy.stats import unitary_group

from . import fockoracle
from .constants import ELEMENTARY_CHARGE
from .gaussian import (
    apply_displacement,
    apply_squeezing,
    fock_probability,
    prepare_doktorov_output,
    pure_state_kernel,
    vacuum,
)
from .hafnian import loop_hafnian_enumerate, loop_hafnian_trace
from .molparams import DoktorovParameters
from .sampler import _patterns_up_to
from .transport import RateSet, current_full, current_simple


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_deviation: float
    tolerance: float
    cases: int
    seconds: float
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.max_deviation) and self.max_deviation <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return (
            f"{status} {self.name}: max deviation {self.max_deviation:.3e} "
            f"<= {self.tolerance:.0e} over {self.cases} cases in {self.seconds:.2f} s{extra}"
        )


def coherent_probability(alpha, n):
    """Poisson photon statistics of a coherent state."""
    lam = abs(alpha) ** 2
    return np.exp(-lam) * lam**n / factorial(n)


def squeezed_vacuum_probability(r, n):
    """Closed-form photon statistics of a single-mode squeezed vacuum."""
    if n % 2:
        return 0.0
    k = n // 2
    return factorial(n) / (4.0**k * factorial(k) ** 2) * np.tanh(r) ** n / np.cosh(r)


def check_analytic(max_photons=8, tol=1e-9, odd_tol=1e-12):
    """Single-mode coherent and squeezed-vacuum distributions against their closed forms."""
    start = time.perf_counter()
    worst, worst_odd, cases = 0.0, 0.0, 0
    for alpha in (0.5, 1.0):
        state = apply_displacement(vacuum(1), [alpha])
        for n in range(max_photons + 1):
            worst = max(worst, abs(fock_probability(state, [n]) - coherent_probability(alpha, n)))
            cases += 1
    for r in (0.3, np.log(2.0)):
        state = apply_squeezing(vacuum(1), [r])
        for n in range(max_photons + 1):
            p = fock_probability(state, [n])
            worst = max(worst, abs(p - squeezed_vacuum_probability(r, n)))
            if n % 2:
                worst_odd = max(worst_odd, p)
            cases += 1
    seconds = time.perf_counter() - start
    # fold the odd-photon bound into one deviation figure relative to its own tolerance
    scaled = max(worst, worst_odd * tol / odd_tol)
    return CheckResult(
        "analytic distributions", scaled, tol, cases, seconds,
        f"max abs error {worst:.2e}, max odd squeezed probability {worst_odd:.2e}",
    )


def random_parameters(rng, mode_count, r_max=0.6, alpha_max=1.2):
    """Random Doktorov parameters with ``|r| <= r_max`` and complex ``|alpha| <= alpha_max``."""
    u = unitary_group.rvs(mode_count, random_state=rng) if mode_count > 1 else np.exp(1j * rng.uniform(0, 2 * np.pi, (1, 1)))
    radius = alpha_max * np.sqrt(rng.uniform(0.0, 1.0, mode_count))
    alpha = radius * np.exp(1j * rng.uniform(0, 2 * np.pi, mode_count))
    return DoktorovParameters(
        u_left=u,
        u_right=np.eye(mode_count),
        squeeze=rng.uniform(-r_max, r_max, mode_count),
        alpha=alpha,
        omega_initial=np.full(mode_count, 1000.0),
        omega_final=np.full(mode_count, 1000.0),
    )


def oracle_deviation(params, max_photons=6, perturb_squeeze=False, cutoff=None):
    """Largest ``|p_gauss - p_fock|`` over all patterns with at most ``max_photons`` photons."""
    gparams = params
    if perturb_squeeze:
        gparams = DoktorovParameters(
            params.u_left, params.u_right, -params.squeeze, params.alpha,
            params.omega_initial, params.omega_final,
        )
    state = prepare_doktorov_output(gparams)
    kernel = pure_state_kernel(state)
    with warnings.catch_warnings():
        warnings.simplefilter("error", fockoracle.PrecisionWarning)
        oracle = fockoracle.doktorov_state(params, cutoff=cutoff)
    worst = 0.0
    for pat in _patterns_up_to(params.mode_count, max_photons):
        p_g = fock_probability(state, pat, kernel=kernel)
        worst = max(worst, abs(p_g - oracle.probability(pat)))
    return worst


def check_oracle(count=12, seed=2024, max_photons=6, tol=1e-9, perturb_squeeze=False):
    """Loop-hafnian probabilities against the truncated Fock-space circuit."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(count):
        params = random_parameters(rng, 1 + k % 3)
        worst = max(worst, oracle_deviation(params, max_photons, perturb_squeeze))
    detail = "squeeze sign flipped on the Gaussian side" if perturb_squeeze else ""
    return CheckResult("Fock-space oracle", worst, tol, count, time.perf_counter() - start, detail)


def random_symmetric(rng, size):
    a = rng.normal(size=(size, size))
    return 0.5 * (a + a.T)


def check_hafnian(count=200, seed=7, max_size=8, tol=1e-10):
    """Relative agreement of the enumeration and trace loop-hafnian routes."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    rel = []
    for k in range(count):
        a = random_symmetric(rng, 1 + k % max_size)
        exact = loop_hafnian_enumerate(a)
        fast = loop_hafnian_trace(a)
        rel.append(abs(fast - exact) / max(abs(exact), 1e-300))
    rel = np.array(rel)
    return CheckResult(
        "loop hafnian dual path", float(rel.max()), tol, count, time.perf_counter() - start,
        f"median relative deviation {np.median(rel):.2e}",
    )


def random_rates(rng):
    k = 10.0 ** rng.uniform(5.0, 11.0, 4)
    return RateSet(*k)


def ode_current(rates):
    """Source current after integrating the two-state master equation to ``t = 40/k_total``."""
    k_in = rates.k_red_source + rates.k_red_drain
    k_out = rates.k_ox_source + rates.k_ox_drain
    total = k_in + k_out

    # time in units of 1/total keeps the system well scaled
    def rhs(_t, p):
        return [(-k_in * p[0] + k_out * p[1]) / total, (k_in * p[0] - k_out * p[1]) / total]

    sol = solve_ivp(rhs, (0.0, 40.0), [1.0, 0.0], method="DOP853", rtol=1e-13, atol=1e-15)
    p_ox, p_red = sol.y[:, -1]
    return ELEMENTARY_CHARGE * (p_ox * rates.k_red_source - p_red * rates.k_ox_source)


def current_scale(rates):
    """Gross flux ``e (k_rS k_oD + k_oS k_rD) / k_total``, immune to cancellation in the net current."""
    gross = rates.k_red_source * rates.k_ox_drain + rates.k_ox_source * rates.k_red_drain
    return ELEMENTARY_CHARGE * gross / rates.total


def check_steady_state(count=1000, seed=11, tol=1e-8):
    """Closed-form current against long-time integration of the master equation."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst, reduction_exact = 0.0, True
    for _ in range(count):
        rates = random_rates(rng)
        worst = max(worst, abs(ode_current(rates) - current_full(rates)) / current_scale(rates))
        series = RateSet(rates.k_red_source, 0.0, 0.0, rates.k_ox_drain)
        reduction_exact &= current_full(series) == current_simple(rates.k_red_source, rates.k_ox_drain)
    if not reduction_exact:
        worst = np.inf
    return CheckResult(
        "steady state vs ODE", worst, tol, count, time.perf_counter() - start,
        "series-limit reduction exact" if reduction_exact else "series-limit reduction NOT exact",
    )


def run_verification(perturb_squeeze=False, scale="small"):
    """Run every check and return the list of :class:`CheckResult`."""
    if scale != "small":
        raise ValueError(f"unknown verification scale {scale!r}")
    return [
        check_analytic(),
        check_oracle(perturb_squeeze=perturb_squeeze),
        check_hafnian(),
        check_steady_state(count=200),
    ]
