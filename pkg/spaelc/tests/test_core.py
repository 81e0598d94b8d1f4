"""
Tests for the Experiment facade: config resolution and emitted files.
"""

import csv
import json
from pathlib import Path

import pytest


@pytest.fixture
def hamming_alist(tmp_path, ext_hamming):
    from spaelc.codes import save_alist

    return str(save_alist(ext_hamming, tmp_path / "ham8.alist"))


def test_experiment_imports():
    from spaelc import Experiment

    assert Experiment is not None


def test_generate_config_defaults():
    from spaelc import Experiment

    config = Experiment().generate_config()
    assert config["decoder"] == "spa"
    assert config["code"] == {"source": "qr", "p": 23, "extend": True, "initial": "generator"}
    assert config["params"]["I2"] == 600
    assert config["min_frame_errors"] == 100
    assert config["sampler"] == {"slots": 10, "burn_in": 60, "steps": 20}
    assert config["generators"] is None
    assert config["p_values"] is None


def test_overrides_take_precedence():
    from spaelc import Experiment

    settings = {"decoder": "spa-elc", "params": {"p": 2, "I3": 4}, "ebn0_db": [1, 2]}
    overrides = {"params": {"p": 5, "I2": None}, "seed": 7}
    config = Experiment(settings, overrides).generate_config()
    assert config["decoder"] == "spa_elc"
    assert config["params"]["p"] == 5
    assert config["params"]["I3"] == 4
    assert config["params"]["I2"] == 600
    assert config["ebn0_db"] == [1.0, 2.0]
    assert config["seed"] == 7


def test_spa_pd_defaults_to_psl2_generators():
    from spaelc import Experiment

    config = Experiment({"decoder": "SPA-PD"}).generate_config()
    assert config["decoder"] == "spa_pd"
    assert config["generators"] == {"source": "psl2"}


def test_invalid_configs():
    from spaelc import Experiment
    from spaelc.errors import ConfigError

    bad = [
        {"colour": "blue"},
        {"decoder": "bp"},
        {"params": {"I4": 1}},
        {"params": {"alpha0": 1.5}},
        {"transmit_mode": "ones"},
        {"p_values": [1, 2]},
        {"decoder": "spa_elc", "p_values": [1, 1]},
        {"params": {"init_scope": "none"}},
        {"workers": 0},
    ]
    for settings in bad:
        with pytest.raises(ConfigError):
            Experiment(settings).generate_config()
    with pytest.raises(ConfigError):
        Experiment(["not", "a", "dict"])


def test_load_code_sources(hamming_alist, tmp_path):
    from spaelc.codes import save_code_json
    from spaelc.core import load_code
    from spaelc.errors import ConfigError

    assert load_code({"source": "qr", "p": 7, "extend": False}).name == "QR7"
    assert load_code({"source": "qr", "p": 23}).name == "Golay24"
    from_alist = load_code({"source": "alist", "path": hamming_alist})
    assert from_alist.n == 8
    json_path = save_code_json(from_alist, tmp_path / "ham8.json")
    assert load_code({"source": "json", "path": str(json_path)}).H == from_alist.H
    with pytest.raises(ConfigError):
        load_code({"source": "magic"})


def test_load_generators(golay, tmp_path):
    from spaelc.autgroup import psl2_generators
    from spaelc.core import load_generators
    from spaelc.errors import ConfigError

    code_cfg = {"source": "qr", "p": 23, "extend": True}
    assert load_generators(None, code_cfg, golay) is None
    assert len(load_generators({"source": "psl2"}, code_cfg, golay).gens) == 3
    path = psl2_generators(23).save(tmp_path / "gens.json")
    assert load_generators({"source": "file", "path": str(path)}, code_cfg, golay).n == 24
    with pytest.raises(ConfigError):
        load_generators({"source": "psl2"}, {"source": "alist", "path": "x"}, golay)


def test_run_writes_results(hamming_alist, tmp_path):
    from spaelc import Experiment
    from spaelc.generators.tables import CSV_COLUMNS

    settings = {
        "code": {"source": "alist", "path": hamming_alist},
        "params": {"I2": 20},
        "ebn0_db": [1.0, 3.0],
        "min_frame_errors": 5,
        "max_frames": 500,
    }
    out = Experiment(settings, output_dir=str(tmp_path / "run")).run()
    assert out == tmp_path / "run"
    for name in ("results.csv", "results.json", "config.json", "fer.dat", "messages.dat", "checkmsg.dat"):
        assert (out / name).exists()
    with open(out / "results.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [float(r["ebn0_db"]) for r in rows] == [1.0, 3.0]
    assert rows[0]["code"] == "ham8"
    results = json.loads((out / "results.json").read_text())
    assert len(results["points"]) == 2
    assert "budget_exceeded" in results["points"][0]
    emitted = json.loads((out / "config.json").read_text())
    assert emitted["build"].startswith("spaelc ")

    # the emitted config reproduces the run byte for byte
    again = Experiment(emitted, output_dir=str(tmp_path / "again")).run()
    assert (again / "results.csv").read_text() == (out / "results.csv").read_text()
    assert (again / "fer.dat").read_text() == (out / "fer.dat").read_text()


def test_sweep_run_reports_best_p(hamming_alist, tmp_path):
    from spaelc import Experiment

    settings = {
        "code": {"source": "alist", "path": hamming_alist},
        "decoder": "spa_elc",
        "params": {"I2": 10},
        "ebn0_db": [2.0],
        "p_values": [0, 1],
        "min_frame_errors": 1000,
        "max_frames": 64,
    }
    out = Path(Experiment(settings, output_dir=str(tmp_path / "sweep")).run())
    results = json.loads((out / "results.json").read_text())
    assert results["best_p"] in (0, 1)
    assert (out / "fer_p0.dat").exists() and (out / "fer_p1.dat").exists()
    lines = (out / "results.csv").read_text().splitlines()
    assert len(lines) == 3


def test_output_dir_defaults_to_runs_folder():
    import os

    from spaelc import Experiment
    from spaelc.util import SPAELC_RUNS_FOLDER

    assert Experiment()._get_output_dir("trial") == os.path.join(SPAELC_RUNS_FOLDER, "trial")
    assert Experiment()._get_output_dir() == os.path.join(SPAELC_RUNS_FOLDER, "default_run")
    assert Experiment(output_dir="/tmp/x")._get_output_dir("trial") == "/tmp/x"


if __name__ == "__main__":
    pytest.main([__file__])
