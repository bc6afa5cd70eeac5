"""Acceptance criteria, each at its stated tolerance, with one PASS/FAIL line apiece."""

import filecmp
import time

import numpy as np
from scipy.signal import find_peaks

from moljunction import io, pipeline, toy
from moljunction.gaussian import prepare_doktorov_output
from moljunction.molparams import DoktorovParameters
from moljunction.sampler import (
    EnergyGrid,
    SamplerConfig,
    bin_energies,
    draw_samples,
    enumerate_distribution,
    exact_q,
    q_estimate,
)
from moljunction.transport import TransportConfig, differential_conductance, iv_curve
from moljunction.verify import check_analytic, check_hafnian, check_oracle, check_steady_state


def test_01_analytic_distributions(report):
    start = time.perf_counter()
    res = check_analytic(max_photons=8, tol=1e-9, odd_tol=1e-12)
    seconds = time.perf_counter() - start
    ok = res.passed and seconds < 1.0
    report(1, "analytic distributions", ok, f"{res.detail}, {seconds:.3f} s (< 1 s)")
    assert ok


def test_02_dual_oracle_equivalence(report):
    start = time.perf_counter()
    res = check_oracle(count=50, seed=20240, max_photons=6, tol=1e-9)
    seconds = time.perf_counter() - start
    ok = res.passed and seconds < 60.0
    report(2, "dual-oracle equivalence", ok,
           f"50 sets, M in 1..3, max |dp| {res.max_deviation:.2e} (<= 1e-9), {seconds:.1f} s (< 60 s)")
    assert ok


def test_03_loop_hafnian_internal_agreement(report):
    res = check_hafnian(count=200, seed=31, max_size=8, tol=1e-10)
    report(3, "loop-hafnian internal agreement", res.passed,
           f"200 real symmetric matrices up to 8x8, max rel {res.max_deviation:.2e} (<= 1e-10)")
    assert res.passed


def test_04_normalization(report, three_mode):
    cfg = SamplerConfig(max_total_photons=8)
    masses = {}
    for direction in ("reduction", "oxidation"):
        params = three_mode.doktorov(direction)
        masses[direction] = enumerate_distribution(prepare_doktorov_output(params), params, cfg).captured_mass
    ok = all(0.999 <= m <= 1.0 + 1e-9 for m in masses.values())
    report(4, "normalization", ok,
           ", ".join(f"{d} captured mass {m:.9f}" for d, m in masses.items()) + " (in [0.999, 1 + 1e-9])")
    assert ok


def test_05_sampling_convergence(report, three_mode):
    start = time.perf_counter()
    params = three_mode.doktorov()
    dist = enumerate_distribution(prepare_doktorov_output(params), params, SamplerConfig())
    grid = EnergyGrid(-0.5, 0.5, 200)
    q_true = exact_q(dist, grid)
    sizes = np.array([10**2, 10**3, 10**4, 10**5])
    rms = []
    for n in sizes:
        errors = []
        for seed in range(100):
            samples = draw_samples(dist, SamplerConfig(seed=seed, sample_count=int(n)))
            q = q_estimate(bin_energies(samples, grid.eps_min, grid.eps_max, grid.bin_count))
            errors.append(np.sum((q - q_true) ** 2))
        rms.append(np.sqrt(np.mean(errors)))
    slope = np.polyfit(np.log(sizes), np.log(rms), 1)[0]
    seconds = time.perf_counter() - start
    ok = abs(slope + 0.5) <= 0.1 and seconds < 300.0
    report(5, "sampling convergence", ok, f"log-log slope {slope:.4f} (-0.5 +/- 0.1), {seconds:.1f} s (< 300 s)")
    assert ok


def test_06_steady_state_equivalence(report):
    res = check_steady_state(count=1000, seed=61, tol=1e-8)
    report(6, "steady-state equivalence", res.passed,
           f"1000 rate sets, max rel {res.max_deviation:.2e} (<= 1e-8), {res.detail}")
    assert res.passed


def _staircase_inputs(two_mode, bins=101, window=0.505, seed=3):
    """Sampled q on bins centred on zero energy, so the 0-0 line opens at zero bias."""
    grid = EnergyGrid(-window, window, bins)
    cfg = SamplerConfig(seed=seed, sample_count=5000)
    q = {}
    for direction, sign in pipeline.ENERGY_SIGN.items():
        params = two_mode.doktorov(direction)
        dist = enumerate_distribution(prepare_doktorov_output(params), params, cfg)
        samples = draw_samples(dist, cfg, stream=pipeline.STREAM[direction])
        q[direction] = q_estimate(bin_energies(sign * samples.energies_ev, grid.eps_min, grid.eps_max, bins))
    return grid, q


def test_07_staircase(report, two_mode):
    grid, q = _staircase_inputs(two_mode)
    assert np.allclose(two_mode.final.frequencies, [500.0, 1200.0])
    bias = np.linspace(-1.0, 1.0, 8001)
    current = iv_curve(q["reduction"], q["oxidation"], grid, bias, 0.0, TransportConfig(temperature=10.0)).current
    pos = bias >= 0
    monotone = bool(np.all(np.diff(current[pos]) >= 0))

    # a step is a dI/dV peak; each must sit at 2*eps of a populated bin (bias-to-energy map V/2)
    g = differential_conductance(current, bias)
    peaks, _ = find_peaks(g, prominence=1e-3 * g.max())
    steps = bias[peaks[bias[peaks] >= 0]]
    levels = np.concatenate([grid.centers[q["reduction"] > 0], -grid.centers[q["oxidation"] > 0]])
    weights = np.concatenate([q["reduction"][q["reduction"] > 0], q["oxidation"][q["oxidation"] > 0]])
    keep = levels >= -1e-12
    levels, weights = levels[keep], weights[keep]
    width = grid.width
    step_error = max(np.min(np.abs(levels - v / 2)) for v in steps) / width
    strong = levels[weights >= 0.01]
    coverage_error = max(np.min(np.abs(steps / 2 - e)) for e in strong) / width
    ok = monotone and step_error <= 1.0 and coverage_error <= 1.0
    report(7, "staircase", ok,
           f"nondecreasing for V_b >= 0: {monotone}; {steps.size} steps, worst offset "
           f"{step_error:.2f} bin; {strong.size} bins with q >= 0.01, worst miss {coverage_error:.2f} bin (<= 1)")
    assert ok


def test_08_gauge_invariance(report, three_mode):
    params = three_mode.doktorov()
    signs = np.diag([-1.0, 1.0, -1.0])
    flipped = DoktorovParameters(
        params.u_left @ signs, signs @ params.u_right, params.squeeze, params.alpha,
        params.omega_initial, params.omega_final,
    )
    cfg = SamplerConfig(seed=8, sample_count=5000)
    d0 = enumerate_distribution(prepare_doktorov_output(params), params, cfg)
    d1 = enumerate_distribution(prepare_doktorov_output(flipped), flipped, cfg)
    same_support = np.array_equal(d0.patterns, d1.patterns)
    max_dp = float(np.max(np.abs(d0.probabilities - d1.probabilities))) if same_support else np.inf
    h0 = bin_energies(draw_samples(d0, cfg), -0.5, 0.5, 200).counts
    h1 = bin_energies(draw_samples(d1, cfg), -0.5, 0.5, 200).counts
    identical = np.array_equal(h0, h1)
    ok = max_dp <= 1e-10
    report(8, "gauge invariance", ok,
           f"max |dp| {max_dp:.2e} (<= 1e-10); same-seed histograms bit-identical: {identical}")
    assert ok


def _run_pipeline(directory):
    config = toy.write_example(directory)
    cfg = pipeline.RunConfig.load(config)
    pipeline.run_sample(cfg)
    pipeline.run_iv(cfg)
    pipeline.run_map(cfg)
    return cfg.output_dir


def test_09_reproducibility(report, tmp_path):
    first = _run_pipeline(tmp_path / "a")
    second = _run_pipeline(tmp_path / "b")
    names = sorted(p.name for p in first.glob("*.csv"))
    match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
    ok = len(names) >= 5 and not mismatch and not errors
    report(9, "end-to-end reproducibility", ok, f"{len(match)}/{len(names)} CSVs byte-identical")
    assert ok


def test_10_performance(report, tmp_path):
    start = time.perf_counter()
    out = _run_pipeline(tmp_path / "perf")
    seconds = time.perf_counter() - start
    cfg = io.read_json(tmp_path / "perf" / "config.json")
    _, rows = io.read_csv(out / "map.csv")
    shape_ok = (
        cfg["sampler"]["sample_count"] == 5000
        and cfg["bias_grid"]["points"] == 201
        and cfg["gate_grid"]["points"] == 4
        and len(rows) == 201 * 4
    )
    ok = shape_ok and seconds < 10.0
    report(10, "performance", ok, f"3 modes, 5000 samples, 201 x 4 bias/gate points in {seconds:.2f} s (< 10 s)")
    assert ok
