"""Config-driven pipeline: molecule file -> histograms -> I-V curves and dI/dV maps.

Electron energies on the transport axis are ``+E`` for reduction samples
and ``-E`` for oxidation samples, ``E`` being the vibrational energy
deposited in the final state.  Both directions therefore share one
:class:`~moljunction.sampler.EnergyGrid`.
"""

import copy
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .errors import InputError
from .gaussian import prepare_doktorov_output
from .sampler import (
    EnergyGrid,
    SamplerConfig,
    bin_energies,
    draw_samples,
    enumerate_distribution,
    q_estimate,
)
from .transport import TransportConfig, conductance_map, iv_curve

log = logging.getLogger(__name__)

ENERGY_SIGN = {"reduction": 1.0, "oxidation": -1.0}
STREAM = {"reduction": 0, "oxidation": 1}

DEFAULTS = {
    "direction": "both",
    "sampler": {"seed": 0, "sample_count": 5000, "max_total_photons": 8, "min_captured_mass": 0.999},
    "histogram": {"eps_min_eV": -0.5, "eps_max_eV": 0.5, "bins": 201},
    "transport": {
        "gamma_source_eV": 1e-6,
        "gamma_drain_eV": 1e-6,
        "temperature_K": 10.0,
        "bias_fraction": 0.5,
        "gate_lever": 1.0,
        "gate_offset_mV": 0.0,
    },
    "bias_grid": {"start_mV": -1000.0, "stop_mV": 1000.0, "points": 201},
    "gate_grid": {"start_mV": 0.0, "stop_mV": 0.0, "points": 1},
    "iv_gate_mV": 0.0,
    "output_dir": "out",
}


def _merge(base, override, where=""):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base and key != "molecule":
            raise InputError(f"unknown config key '{where}{key}'")
        if isinstance(base.get(key), dict):
            if not isinstance(value, dict):
                raise InputError(f"config key '{where}{key}' must be an object")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def grid_points(axis, name):
    try:
        start, stop, points = float(axis["start_mV"]), float(axis["stop_mV"]), int(axis["points"])
    except (KeyError, TypeError, ValueError):
        raise InputError(f"config key '{name}' needs numeric start_mV, stop_mV, points") from None
    if points < 1:
        raise InputError(f"config key '{name}.points' must be at least 1")
    if points > 1 and not stop > start:
        raise InputError(f"config key '{name}' must be increasing (stop_mV > start_mV)")
    return np.linspace(start, stop, points)


@dataclass
class RunConfig:
    molecule_path: Path
    direction: str
    sampler: SamplerConfig
    grid: EnergyGrid
    transport: TransportConfig
    bias_mV: np.ndarray
    gate_mV: np.ndarray
    iv_gate_mV: float
    output_dir: Path
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def digest(self):
        """Hash of the result-relevant config plus the bytes of the molecule file.

        File locations are left out, so moving a run does not change its hash.
        """
        try:
            molecule = hashlib.sha256(self.molecule_path.read_bytes()).hexdigest()
        except OSError:
            molecule = None
        settings = {k: v for k, v in self.raw.items() if k not in ("molecule", "output_dir")}
        return io.config_hash({"config": settings, "molecule_sha256": molecule})

    @property
    def directions(self):
        return list(ENERGY_SIGN) if self.direction == "both" else [self.direction]

    @classmethod
    def from_dict(cls, doc, base_dir=Path(".")):
        if not isinstance(doc, dict):
            raise InputError("config must be a JSON object")
        if "molecule" not in doc:
            raise InputError("missing key 'molecule'")
        raw = _merge(DEFAULTS, doc)
        if raw["direction"] not in ("reduction", "oxidation", "both"):
            raise InputError("config key 'direction' must be reduction, oxidation or both")
        s, h, t = raw["sampler"], raw["histogram"], raw["transport"]
        try:
            sampler = SamplerConfig(
                seed=int(s["seed"]),
                sample_count=int(s["sample_count"]),
                max_total_photons=int(s["max_total_photons"]),
                min_captured_mass=float(s["min_captured_mass"]),
            )
            grid = EnergyGrid(float(h["eps_min_eV"]), float(h["eps_max_eV"]), int(h["bins"]))
            transport = TransportConfig(
                gamma_source=float(t["gamma_source_eV"]),
                gamma_drain=float(t["gamma_drain_eV"]),
                temperature=float(t["temperature_K"]),
                bias_fraction=float(t["bias_fraction"]),
                gate_lever=float(t["gate_lever"]),
                gate_offset_mV=float(t["gate_offset_mV"]),
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"invalid config value: {exc}") from exc
        base_dir = Path(base_dir)
        return cls(
            molecule_path=base_dir / raw["molecule"],
            direction=raw["direction"],
            sampler=sampler,
            grid=grid,
            transport=transport,
            bias_mV=grid_points(raw["bias_grid"], "bias_grid"),
            gate_mV=grid_points(raw["gate_grid"], "gate_grid"),
            iv_gate_mV=float(raw["iv_gate_mV"]),
            output_dir=base_dir / raw["output_dir"],
            raw=raw,
        )

    @classmethod
    def load(cls, path, overrides=None):
        path = Path(path)
        doc = io.read_json(path)
        if overrides:
            doc = _apply_overrides(doc, overrides)
        return cls.from_dict(doc, base_dir=path.parent)


def _apply_overrides(doc, overrides):
    doc = copy.deepcopy(doc)
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = doc
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value
    return doc


def params_document(molecule_path):
    """Direct-parameters JSON for both directions plus Duschinsky diagnostics."""
    doc = io.read_json(molecule_path)
    if not isinstance(doc, dict) or "atoms" not in doc:
        raise InputError(f"{molecule_path}: not a molecule file (missing key 'atoms')")
    mol = io.molecule_from_dict(doc)
    out, diagnostics = {}, {}
    for direction in ENERGY_SIGN:
        params = mol.doktorov(direction)
        out[direction] = io.params_to_dict(params)
        u_d = mol.duschinsky(direction).u_d
        diagnostics[direction] = {
            "duschinsky_condition": float(np.linalg.cond(u_d)),
            "duschinsky_orthogonality_error": float(np.max(np.abs(u_d.T @ u_d - np.eye(u_d.shape[0])))),
            "max_abs_squeeze": float(np.max(np.abs(params.squeeze))),
            "max_abs_alpha": float(np.max(np.abs(params.alpha))),
        }
    return out, diagnostics


@dataclass
class DirectionResult:
    direction: str
    histogram: object
    distribution: object
    samples: object


def sample_direction(params, cfg, direction):
    state = prepare_doktorov_output(params)
    dist = enumerate_distribution(state, params, cfg.sampler)
    samples = draw_samples(dist, cfg.sampler, stream=STREAM[direction])
    sign = ENERGY_SIGN[direction]
    hist = bin_energies(sign * samples.energies_ev, cfg.grid.eps_min, cfg.grid.eps_max, cfg.grid.bin_count)
    log.info(
        "%s: %d patterns, captured mass %.12f, %d/%d samples out of range",
        direction, len(dist), dist.captured_mass, hist.out_of_range, hist.total_samples,
    )
    return DirectionResult(direction, hist, dist, samples)


def _load_params_for(cfg, directions):
    params = io.load_parameters(cfg.molecule_path)
    missing = [d for d in directions if d not in params]
    if missing:
        raise InputError(f"{cfg.molecule_path} has no parameters for the {missing[0]} process")
    return params


def run_sample(cfg):
    """Sample every configured direction and write ``samples_*.csv`` and ``histogram_*.json``."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    params = _load_params_for(cfg, cfg.directions)
    results = {}
    for direction in cfg.directions:
        res = sample_direction(params[direction], cfg, direction)
        results[direction] = res
        _write_samples(cfg, res)
        io.write_json(
            cfg.output_dir / f"histogram_{direction}.json",
            io.histogram_to_dict(
                res.histogram,
                direction=direction,
                sign=ENERGY_SIGN[direction],
                captured_mass=res.distribution.captured_mass,
                frozen_mass_bound=res.distribution.frozen_mass_bound,
                digest=cfg.digest,
                seed=cfg.sampler.seed,
            ),
        )
    return results


def _write_samples(cfg, res):
    samples = res.samples
    rows = (
        (";".join(str(int(x)) for x in pat), e_cm, e_ev)
        for pat, e_cm, e_ev in zip(samples.patterns, samples.energies, samples.energies_ev)
    )
    io.write_csv(
        cfg.output_dir / f"samples_{res.direction}.csv",
        ["pattern", "energy_cm1", "energy_ev"], rows, cfg.digest, cfg.sampler.seed,
    )


def histograms(cfg, directions=("reduction", "oxidation")):
    """q vectors per direction, read from ``output_dir`` when they match this config."""
    available = set(cfg.directions)
    missing = [d for d in directions if d not in available]
    if missing:
        raise InputError(
            f"the {missing[0]} process is required but config direction is '{cfg.direction}'"
        )
    out, todo = {}, []
    for direction in directions:
        path = cfg.output_dir / f"histogram_{direction}.json"
        if path.exists():
            doc = io.read_json(path)
            if doc.get("config_sha256") == cfg.digest:
                out[direction] = q_estimate(io.histogram_from_dict(doc))
                continue
        todo.append(direction)
    if todo:
        params = _load_params_for(cfg, todo)
        for direction in todo:
            out[direction] = q_estimate(sample_direction(params[direction], cfg, direction).histogram)
    return out


def run_iv(cfg):
    """Write ``iv.csv`` and ``rates.csv`` at gate voltage ``iv_gate_mV``."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    q = histograms(cfg)
    curve = iv_curve(q["reduction"], q["oxidation"], cfg.grid, cfg.bias_mV * 1e-3, cfg.iv_gate_mV * 1e-3, cfg.transport)
    io.write_csv(
        cfg.output_dir / "iv.csv", ["v_bias_mV", "current_A"],
        zip(cfg.bias_mV, curve.current), cfg.digest, cfg.sampler.seed,
    )
    r = curve.rates
    io.write_csv(
        cfg.output_dir / "rates.csv",
        ["v_bias_mV", "k_red_S", "k_ox_S", "k_red_D", "k_ox_D"],
        zip(cfg.bias_mV, r.k_red_source, r.k_ox_source, r.k_red_drain, r.k_ox_drain),
        cfg.digest, cfg.sampler.seed,
    )
    return curve


def run_map(cfg):
    """Write ``map.csv`` in long format (gate-major)."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    q = histograms(cfg)
    cmap = conductance_map(q["reduction"], q["oxidation"], cfg.grid, cfg.bias_mV * 1e-3, cfg.gate_mV * 1e-3, cfg.transport)
    rows = (
        (vg, vb, cmap.didv[g, b])
        for g, vg in enumerate(cfg.gate_mV)
        for b, vb in enumerate(cfg.bias_mV)
    )
    io.write_csv(
        cfg.output_dir / "map.csv", ["v_gate_mV", "v_bias_mV", "dIdV_S"],
        rows, cfg.digest, cfg.sampler.seed,
    )
    return cmap
