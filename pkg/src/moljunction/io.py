"""Readers and writers for molecule, parameter, histogram and CSV files."""

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .molparams import DoktorovParameters, Molecule, StateVibrations
from .sampler import EnergyGrid, EnergyHistogram

DIRECTIONS = ("reduction", "oxidation")
PARAM_KEYS = ("U_L", "U_R", "squeeze", "alpha", "omega_initial_cm1", "omega_final_cm1")


def fmt(x):
    """Full double precision, so that reruns diff cleanly."""
    return format(float(x), ".17g")


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc


def _require(doc, key, where):
    if not isinstance(doc, dict):
        raise InputError(f"{where or 'document'} must be a JSON object")
    if key not in doc:
        raise InputError(f"missing key '{_join(where, key)}'")
    return doc[key]


def _join(where, key):
    return f"{where}.{key}" if where else key


def _vector(doc, key, where=""):
    value = _require(doc, key, where)
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"key '{_join(where, key)}' must be a list of numbers") from None
    if arr.ndim != 1:
        raise InputError(f"key '{_join(where, key)}' must be a flat list of numbers")
    return arr


def _matrix(doc, key, where=""):
    value = _require(doc, key, where)
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"key '{_join(where, key)}' must be a list of equal-length number lists") from None
    if arr.ndim != 2:
        raise InputError(f"key '{_join(where, key)}' must be a list of equal-length number lists")
    return arr


def _wrap(key, fn):
    try:
        return fn()
    except InputError as exc:
        raise InputError(f"'{key}': {exc}") from exc


def molecule_from_dict(doc):
    """Build a :class:`Molecule`.  ``modes`` lists one mass-weighted vector per normal mode."""
    atoms = _require(doc, "atoms", "")
    if not isinstance(atoms, int) or isinstance(atoms, bool) or atoms < 1:
        raise InputError("key 'atoms' must be a positive integer")
    masses = _vector(doc, "masses_amu")
    if masses.size != atoms:
        raise InputError(f"key 'masses_amu' has {masses.size} entries, expected {atoms}")
    geoms = {}
    for key in ("geometry_initial_angstrom", "geometry_final_angstrom"):
        geoms[key] = _vector(doc, key)
        if geoms[key].size != 3 * atoms:
            raise InputError(f"key '{key}' has {geoms[key].size} entries, expected {3 * atoms}")
    states = {}
    for key in ("initial", "final"):
        block = _require(doc, key, "")
        freqs = _vector(block, "frequencies_cm1", key)
        modes = _matrix(block, "modes", key)
        if modes.shape[1] != 3 * atoms:
            raise InputError(f"key '{key}.modes' vectors must have {3 * atoms} entries")
        states[key] = _wrap(key, lambda f=freqs, mo=modes: StateVibrations(f, mo.T))
    if states["initial"].mode_count != states["final"].mode_count:
        raise InputError("keys 'initial' and 'final' list different numbers of modes")
    if np.any(masses <= 0):
        raise InputError("key 'masses_amu' must hold positive masses")
    return Molecule(
        masses=masses,
        geometry_initial=geoms["geometry_initial_angstrom"],
        geometry_final=geoms["geometry_final_angstrom"],
        initial=states["initial"],
        final=states["final"],
    )


def params_from_dict(doc, where=""):
    for key in PARAM_KEYS:
        _require(doc, key, where)
    return _wrap(where or "parameters", lambda: DoktorovParameters(
        u_left=_matrix(doc, "U_L", where),
        u_right=_matrix(doc, "U_R", where),
        squeeze=_vector(doc, "squeeze", where),
        alpha=_vector(doc, "alpha", where),
        omega_initial=_vector(doc, "omega_initial_cm1", where),
        omega_final=_vector(doc, "omega_final_cm1", where),
    ))


def params_to_dict(params):
    return {
        "U_L": np.asarray(params.u_left, dtype=float).tolist(),
        "U_R": np.asarray(params.u_right, dtype=float).tolist(),
        "squeeze": params.squeeze.tolist(),
        "alpha": np.real(params.alpha).astype(float).tolist(),
        "omega_initial_cm1": params.omega_initial.tolist(),
        "omega_final_cm1": params.omega_final.tolist(),
    }


def load_parameters(path):
    """Doktorov parameters per direction from a molecule or a direct-parameters file.

    A direct file either holds ``reduction``/``oxidation`` sections or, at top
    level, a single reduction-direction parameter set.
    """
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    if "atoms" in doc:
        mol = molecule_from_dict(doc)
        return {d: mol.doktorov(d) for d in DIRECTIONS}
    if any(d in doc for d in DIRECTIONS):
        return {d: params_from_dict(doc[d], d) for d in DIRECTIONS if d in doc}
    if "U_L" in doc:
        return {"reduction": params_from_dict(doc)}
    raise InputError(
        f"{path}: neither a molecule file (key 'atoms') nor a parameters file (key 'U_L')"
    )


def write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def config_hash(doc):
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def header_line(digest, seed):
    return f"# moljunction config_sha256={digest} seed={seed}\n"


def write_csv(path, columns, rows, digest, seed):
    """Write ``rows`` (iterables of numbers or strings) under a provenance comment."""
    with open(path, "w", newline="") as fh:
        fh.write(header_line(digest, seed))
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def read_csv(path):
    """Return ``(columns, rows)`` of a file written by :func:`write_csv`, comments skipped."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    columns = lines[0].split(",")
    return columns, [ln.split(",") for ln in lines[1:]]


def histogram_to_dict(hist, *, direction, sign, captured_mass, frozen_mass_bound, digest, seed):
    return {
        "direction": direction,
        "energy_sign": sign,
        "eps_min_eV": fmt(hist.grid.eps_min),
        "eps_max_eV": fmt(hist.grid.eps_max),
        "bins": hist.grid.bin_count,
        "counts": hist.counts.tolist(),
        "total_samples": hist.total_samples,
        "out_of_range": hist.out_of_range,
        "q": [fmt(v) for v in (hist.counts / max(hist.total_samples, 1))],
        "captured_mass": fmt(captured_mass),
        "frozen_mass_bound": fmt(frozen_mass_bound),
        "config_sha256": digest,
        "seed": seed,
    }


def histogram_from_dict(doc):
    grid = EnergyGrid(float(doc["eps_min_eV"]), float(doc["eps_max_eV"]), int(doc["bins"]))
    hist = EnergyHistogram(
        grid,
        np.asarray(doc["counts"], dtype=np.int64),
        int(doc["total_samples"]),
        int(doc["out_of_range"]),
    )
    return hist


def molecule_to_dict(mol):
    """Inverse of :func:`molecule_from_dict`."""
    return {
        "atoms": int(mol.masses.size),
        "masses_amu": mol.masses.tolist(),
        "geometry_initial_angstrom": mol.geometry_initial.tolist(),
        "geometry_final_angstrom": mol.geometry_final.tolist(),
        "initial": {
            "frequencies_cm1": mol.initial.frequencies.tolist(),
            "modes": mol.initial.mode_matrix.T.tolist(),
        },
        "final": {
            "frequencies_cm1": mol.final.frequencies.tolist(),
            "modes": mol.final.mode_matrix.T.tolist(),
        },
    }
