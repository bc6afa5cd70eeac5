import json

import numpy as np
import pytest

from moljunction import io, pipeline, toy
from moljunction.cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY, main
from moljunction.errors import InputError


def _small_config(tmp_path, molecule=None, **extra):
    """Toy config with a coarse grid so the CLI tests stay fast."""
    mol = molecule if molecule is not None else toy.toy_three_mode()
    io.write_json(tmp_path / "molecule.json", io.molecule_to_dict(mol))
    cfg = toy.example_config("molecule.json")
    cfg["sampler"]["sample_count"] = 2000
    cfg["bias_grid"]["points"] = 41
    cfg.update(extra)
    io.write_json(tmp_path / "config.json", cfg)
    return tmp_path / "config.json"


class TestMoleculeFiles:
    def test_round_trip(self, three_mode):
        back = io.molecule_from_dict(io.molecule_to_dict(three_mode))
        np.testing.assert_array_equal(back.final.mode_matrix, three_mode.final.mode_matrix)
        np.testing.assert_array_equal(back.geometry_final, three_mode.geometry_final)

    def test_missing_key_named(self, three_mode):
        doc = io.molecule_to_dict(three_mode)
        del doc["final"]["frequencies_cm1"]
        with pytest.raises(InputError, match="final.frequencies_cm1"):
            io.molecule_from_dict(doc)

    def test_wrong_vector_length_named(self, three_mode):
        doc = io.molecule_to_dict(three_mode)
        doc["geometry_final_angstrom"] = [0.0, 0.0]
        with pytest.raises(InputError, match="geometry_final_angstrom"):
            io.molecule_from_dict(doc)

    def test_malformed_json_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"atoms": 1,\n "masses_amu": [12.0,,]}')
        with pytest.raises(InputError, match=r"bad.json:2:"):
            io.read_json(path)

    def test_params_round_trip_is_exact(self, three_mode):
        params = three_mode.doktorov()
        back = io.params_from_dict(json.loads(json.dumps(io.params_to_dict(params))))
        np.testing.assert_array_equal(back.u_left, params.u_left)
        np.testing.assert_array_equal(back.alpha, params.alpha)

    def test_non_molecule_file_rejected(self, tmp_path):
        io.write_json(tmp_path / "x.json", {"hello": 1})
        with pytest.raises(InputError, match="neither"):
            io.load_parameters(tmp_path / "x.json")


class TestConfig:
    def test_unknown_key_rejected(self, tmp_path):
        path = _small_config(tmp_path)
        doc = io.read_json(path)
        doc["sampler"]["seeed"] = 1
        with pytest.raises(InputError, match="sampler.seeed"):
            pipeline.RunConfig.from_dict(doc, tmp_path)

    def test_decreasing_grid_rejected(self, tmp_path):
        doc = io.read_json(_small_config(tmp_path))
        doc["bias_grid"] = {"start_mV": 10.0, "stop_mV": 0.0, "points": 3}
        with pytest.raises(InputError, match="bias_grid"):
            pipeline.RunConfig.from_dict(doc, tmp_path)

    def test_overrides(self, tmp_path):
        cfg = pipeline.RunConfig.load(_small_config(tmp_path), {"sampler.seed": 7, "histogram.bins": 9})
        assert cfg.sampler.seed == 7
        assert cfg.grid.bin_count == 9

    def test_digest_ignores_output_location(self, tmp_path):
        path = _small_config(tmp_path)
        a = pipeline.RunConfig.load(path)
        b = pipeline.RunConfig.load(path, {"output_dir": str(tmp_path / "elsewhere")})
        c = pipeline.RunConfig.load(path, {"sampler.seed": 1})
        assert a.digest == b.digest != c.digest


class TestCommands:
    def test_params_identity_molecule(self, tmp_path, capsys):
        io.write_json(tmp_path / "id.json", io.molecule_to_dict(toy.identity_molecule(3)))
        assert main(["params", str(tmp_path / "id.json")]) == EXIT_OK
        doc = io.read_json(tmp_path / "id.params.json")
        assert set(doc) == {"reduction", "oxidation"}
        assert np.allclose(doc["reduction"]["squeeze"], 0.0, atol=1e-14)
        assert "duschinsky_condition" in capsys.readouterr().out

    def test_malformed_molecule_exit_code(self, tmp_path, capsys):
        doc = io.molecule_to_dict(toy.toy_two_mode())
        del doc["masses_amu"]
        io.write_json(tmp_path / "m.json", doc)
        assert main(["params", str(tmp_path / "m.json")]) == EXIT_INPUT
        assert "masses_amu" in capsys.readouterr().err

    def test_sample_outputs(self, tmp_path):
        assert main(["sample", str(_small_config(tmp_path)), "--seed", "42"]) == EXIT_OK
        hist = io.read_json(tmp_path / "out" / "histogram_reduction.json")
        assert hist["captured_mass"] and "out_of_range" in hist and len(hist["q"]) == hist["bins"]
        first = (tmp_path / "out" / "samples_reduction.csv").read_text().splitlines()[0]
        assert first.startswith("# moljunction config_sha256=") and first.endswith("seed=42")

    def test_captured_mass_failure_exit_code(self, tmp_path, capsys):
        path = _small_config(tmp_path)
        doc = io.read_json(path)
        doc["sampler"]["max_total_photons"] = 1
        io.write_json(path, doc)
        assert main(["sample", str(path)]) == EXIT_NUMERICAL
        assert "raise max_total_photons" in capsys.readouterr().err

    def test_iv_and_map_outputs(self, tmp_path):
        path = _small_config(tmp_path)
        assert main(["iv", str(path)]) == EXIT_OK
        assert main(["map", str(path), "--out", str(tmp_path / "m")]) == EXIT_OK
        columns, rows = io.read_csv(tmp_path / "out" / "iv.csv")
        assert columns == ["v_bias_mV", "current_A"] and len(rows) == 41
        columns, _ = io.read_csv(tmp_path / "out" / "rates.csv")
        assert columns == ["v_bias_mV", "k_red_S", "k_ox_S", "k_red_D", "k_ox_D"]
        columns, rows = io.read_csv(tmp_path / "m" / "map.csv")
        assert columns == ["v_gate_mV", "v_bias_mV", "dIdV_S"] and len(rows) == 4 * 41

    def test_full_precision_numbers(self, tmp_path):
        path = _small_config(tmp_path)
        main(["iv", str(path)])
        _, rows = io.read_csv(tmp_path / "out" / "iv.csv")
        nonzero = [r[1] for r in rows if float(r[1]) != 0.0]
        assert float(nonzero[0]) == float(format(float(nonzero[0]), ".17g"))
        assert any(len(v.replace("-", "").split("e")[0]) > 12 for v in nonzero)

    def test_missing_direction_named(self, tmp_path, capsys):
        params = io.params_to_dict(toy.toy_three_mode().doktorov())
        io.write_json(tmp_path / "red_only.json", params)
        cfg = toy.example_config("red_only.json")
        io.write_json(tmp_path / "config.json", cfg)
        assert main(["iv", str(tmp_path / "config.json")]) == EXIT_INPUT
        assert "oxidation process" in capsys.readouterr().err

    def test_params_file_reproduces_histograms(self, tmp_path):
        path = _small_config(tmp_path)
        main(["sample", str(path)])
        main(["params", str(tmp_path / "molecule.json"), "-o", str(tmp_path / "p.json")])
        doc = io.read_json(path)
        doc["molecule"] = "p.json"
        doc["output_dir"] = "out_params"
        io.write_json(path, doc)
        main(["sample", str(path)])
        for d in ("reduction", "oxidation"):
            a = io.read_json(tmp_path / "out" / f"histogram_{d}.json")
            b = io.read_json(tmp_path / "out_params" / f"histogram_{d}.json")
            assert a["counts"] == b["counts"]

    def test_iv_reuses_matching_histograms(self, tmp_path, monkeypatch):
        path = _small_config(tmp_path)
        main(["sample", str(path)])
        monkeypatch.setattr(pipeline, "sample_direction", lambda *a: pytest.fail("resampled"))
        assert main(["iv", str(path)]) == EXIT_OK

    def test_verify_passes(self, capsys):
        assert main(["verify"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("PASS") == 4 and "loop hafnian dual path" in out

    def test_verify_detects_perturbed_squeeze(self, capsys):
        assert main(["verify", "--perturb-squeeze"]) == EXIT_VERIFY
        assert "FAIL Fock-space oracle" in capsys.readouterr().out
