"""Command-line interface: exit codes, artifacts, determinism, config."""

import json
from pathlib import Path

import numpy as np
import pytest

from ncpt.cli import (SuiteConfig, derived_seed, main, run_suite,
                      shipped_state)


def payload_files(directory):
    """All deterministic artifacts: everything except the metadata file."""
    return sorted(p for p in Path(directory).iterdir()
                  if p.name != "metadata.json")


def test_config_round_trip():
    cfg = SuiteConfig(model_path="m.json", seed=7, trials=33,
                      tol={"markovian": 1e-8}, grid_eps=(0.5, 0.25))
    back = SuiteConfig.from_json(cfg.to_json())
    assert back == cfg
    assert back.tolerance("markovian", 1e-9) == 1e-8
    assert back.tolerance("unknown", 1e-9) == 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(model_path="m.json", trials=0)
    with pytest.raises(ValueError):
        SuiteConfig(model_path="m.json", tol={"markovian": -1.0})
    with pytest.raises(ValueError):
        SuiteConfig(model_path="m.json", grid_delta=(1.0, 0.0))


def test_derived_seeds_are_stable_and_distinct():
    a = derived_seed(0, "markovian")
    assert a == derived_seed(0, "markovian")
    assert a != derived_seed(0, "reality")
    assert a != derived_seed(1, "markovian")
    assert 0 <= a < 2 ** 63


def test_shipped_state_names(z4):
    _, model, _, _, gen = z4
    trace = shipped_state(model, gen, "trace")
    assert np.allclose(trace.density.coeffs, model.unit_coeffs, atol=1e-12)
    with pytest.raises(ValueError):
        shipped_state(model, gen, "nope")


def test_model_info_exit_code(data_paths, capsys):
    assert main(["model-info", str(data_paths["z4"])]) == 0
    out = capsys.readouterr().out
    assert "dimension: 4" in out
    assert "conditionally negative definite: yes" in out


def test_potential_artifacts(data_paths, tmp_path):
    code = main(["potential", str(data_paths["z4"]), "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads((tmp_path / "potential.json").read_text())
    assert payload["is_potential"] is True
    assert payload["potential_coefficients_real"] == pytest.approx(
        [1.0, 1 / 3, 1 / 5, 1 / 3], abs=1e-12)
    assert payload["energy_content"] == pytest.approx(28 / 15, abs=1e-12)
    assert (tmp_path / "potential.csv").exists()


def test_suite_passes_and_writes_artifacts(data_paths, tmp_path):
    code = main(["suite", str(data_paths["z4"]), "--trials", "25",
                 "--out", str(tmp_path)])
    assert code == 0
    for name in ("summary.csv", "metadata.json", "spectrum.png",
                 "approx_convergence.png", "deny_monotonicity.png",
                 "interpolation.csv", "markovian.json",
                 "gamma_cross_validation.json"):
        assert (tmp_path / name).exists(), name
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0] == "property,samples,max_violation,pass"
    assert all(line.endswith(",True") for line in summary[1:])
    per_property = json.loads((tmp_path / "markovian.json").read_text())
    assert per_property["pass"] is True
    assert "csv_rows" not in per_property["details"]


def test_suite_fails_on_negative_control(data_paths, tmp_path, capsys):
    code = main(["suite", str(data_paths["negative"]), "--trials", "25",
                 "--out", str(tmp_path)])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL markovian" in out


def test_suite_is_deterministic(data_paths, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert main(["suite", str(data_paths["z4"]), "--trials", "10",
                     "--out", str(out)]) == 0
    files1, files2 = payload_files(out1), payload_files(out2)
    assert [p.name for p in files1] == [p.name for p in files2]
    for p1, p2 in zip(files1, files2):
        assert p1.read_bytes() == p2.read_bytes(), p1.name


def test_suite_config_file_and_overrides(data_paths, tmp_path):
    cfg = SuiteConfig(model_path=str(data_paths["z4"]), trials=10,
                      out_dir=str(tmp_path / "from_config"))
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(cfg.to_json())
    assert main(["suite", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "from_config" / "summary.csv").exists()


def test_input_errors_exit_two(data_paths, tmp_path):
    assert main(["suite", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["suite", str(bad)]) == 2
    assert main(["suite", str(data_paths["z4"]), "--trials", "0"]) == 2
    assert main(["suite"]) == 2
    assert main(["gamma", str(data_paths["negative"]),
                 "--out", str(tmp_path / "g")]) == 2


def test_deny_and_gamma_and_mult_norm_commands(data_paths, tmp_path):
    assert main(["deny", str(data_paths["z4"]),
                 "--out", str(tmp_path / "deny")]) == 0
    assert (tmp_path / "deny" / "deny_summary.csv").exists()
    assert (tmp_path / "deny" / "deny_monotonicity.png").exists()
    assert main(["gamma", str(data_paths["z4"]), "--trials", "20",
                 "--out", str(tmp_path / "gamma")]) == 0
    assert main(["mult-norm", str(data_paths["z4"]), "--trials", "10",
                 "--out", str(tmp_path / "mult")]) == 0
    csv_text = (tmp_path / "mult" / "multiplier_norms.csv").read_text()
    assert csv_text.startswith("g,left_norm,apriori_bound,margin")


def test_run_suite_returns_reports(data_paths, tmp_path):
    cfg = SuiteConfig(model_path=str(data_paths["z4"]), trials=10,
                      out_dir=str(tmp_path))
    code, reports = run_suite(cfg)
    assert code == 0
    names = {rep.property for rep in reports}
    assert {"markovian", "reality", "potential_positivity",
            "gamma_cross_validation", "multiplier_bound"} <= names
