"""
Core spaelc module.

This module implements the Experiment class, which turns a (possibly
partial) run description into one explicit, fully resolved configuration
and runs the Monte Carlo simulation it describes.
"""

import copy
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .autgroup import GeneratorSet, psl2_generators
from .codes import CodeSpec, eqr_code, load_alist, load_code_json, qr_code
from .decode import DECODER_KINDS, INIT_SCOPES, DecodeParams
from .errors import ConfigError
from .sim import SimConfig, SweepReport, TRANSMIT_MODES, run_curve, sweep_p

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, Any] = {
    "code": {"source": "qr", "p": 23, "extend": True, "initial": "generator"},
    "generators": None,
    "decoder": "spa",
    "params": {
        "I1": 1,
        "I2": 600,
        "I3": 1,
        "alpha0": 1.0,
        "p": 0,
        "syndrome_stop": True,
        "init_scope": "all",
    },
    "ebn0_db": [],
    "p_values": None,
    "min_frame_errors": 100,
    "max_frames": 100_000,
    "batch_size": 64,
    "workers": 1,
    "transmit_mode": "zero",
    "seed": 0,
    "sampler": {"slots": 10, "burn_in": 60, "steps": 20},
}


def normalize_decoder_name(name: str) -> str:
    """Accept CLI spellings such as ``spa-pd`` for ``spa_pd``."""
    kind = name.strip().lower().replace("-", "_")
    if kind not in DECODER_KINDS:
        raise ConfigError(f"Unknown decoder {name!r}; expected one of {', '.join(DECODER_KINDS)}")
    return kind


def _merge(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; values of ``update`` win, None leaves base alone."""
    out = copy.deepcopy(base)
    for key, value in update.items():
        if value is None and key in out:
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_code(code_cfg: dict[str, Any]) -> CodeSpec:
    """Build or load the code a resolved config names."""
    source = code_cfg.get("source")
    if source == "qr":
        p = int(code_cfg["p"])
        if code_cfg.get("extend", True):
            return eqr_code(p, initial=code_cfg.get("initial", "generator"))
        return qr_code(p)
    if source == "alist":
        return load_alist(code_cfg["path"])
    if source == "json":
        return load_code_json(code_cfg["path"])
    raise ConfigError(f"Unknown code source {source!r}; expected qr, alist or json")


def load_generators(gen_cfg: dict[str, Any] | None, code_cfg: dict[str, Any], code: CodeSpec) -> GeneratorSet | None:
    if gen_cfg is None:
        return None
    source = gen_cfg.get("source")
    if source == "psl2":
        if code_cfg.get("source") != "qr" or not code_cfg.get("extend", True):
            raise ConfigError("psl2 generators need an extended QR code (code.source = qr)")
        gens = psl2_generators(int(code_cfg["p"]))
        gens.verify(code)
        return gens
    if source == "file":
        return GeneratorSet.load(gen_cfg["path"], code)
    raise ConfigError(f"Unknown generator source {source!r}; expected psl2 or file")


@dataclass
class Experiment:
    """A Monte Carlo FER experiment on one code and one decoder.

    ``settings`` is a (partial) config document, typically read from JSON;
    ``overrides`` (e.g. from command-line flags) take precedence over it.
    """

    settings: dict[str, Any] = field(default_factory=dict)
    overrides: dict[str, Any] = field(default_factory=dict)
    output_dir: str | None = None

    def __post_init__(self):
        if not isinstance(self.settings, dict):
            raise ConfigError(f"Unsupported settings type: {type(self.settings)}")

    def _get_output_dir(self, run_name: str | None = None) -> str:
        """Get the output directory for the run.

        Args:
            run_name: Optional name for the run. If provided and no output_dir
                     is set, will use SPAELC_RUNS_FOLDER/run_name

        Returns:
            Path to the output directory
        """
        if self.output_dir:
            return self.output_dir
        from .util import SPAELC_RUNS_FOLDER

        return os.path.join(SPAELC_RUNS_FOLDER, run_name or "default_run")

    def generate_config(self) -> dict[str, Any]:
        """Generate explicit configuration from inputs and defaults.

        Everything downstream (simulation, emitted artifacts) uses only this.

        Raises:
            ConfigError: if a value is missing, unknown or out of range.
        """
        config = _merge(_merge(DEFAULTS, self.settings), self.overrides)
        config.pop("build", None)  # stamp of a previously emitted config
        config["decoder"] = normalize_decoder_name(config["decoder"])
        if config["decoder"] == "spa_pd" and config["generators"] is None:
            config["generators"] = {"source": "psl2"}
        config["ebn0_db"] = [float(e) for e in config["ebn0_db"]]
        if config["p_values"] is not None:
            config["p_values"] = [int(p) for p in config["p_values"]]
        self._validate(config)
        return config

    def _validate(self, config: dict[str, Any]) -> None:
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
        unknown_params = set(config["params"]) - set(DEFAULTS["params"])
        if unknown_params:
            raise ConfigError(f"Unknown decoder params: {sorted(unknown_params)}")
        if config["transmit_mode"] not in TRANSMIT_MODES:
            raise ConfigError(f"transmit_mode must be one of {TRANSMIT_MODES}")
        if config["params"]["init_scope"] not in INIT_SCOPES:
            raise ConfigError(f"init_scope must be one of {INIT_SCOPES}")
        if config["min_frame_errors"] < 1:
            raise ConfigError("min_frame_errors must be >= 1")
        if config["workers"] < 1:
            raise ConfigError("workers must be >= 1")
        p_values = config["p_values"]
        if p_values is not None:
            if config["decoder"] not in ("spa_elc", "spa_elc_undamped"):
                raise ConfigError("p_values needs decoder spa_elc or spa_elc_undamped")
            if len(set(p_values)) != len(p_values):
                raise ConfigError(f"duplicate p values in {p_values}")
        try:
            DecodeParams(**config["params"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid decoder params: {e}") from e

    def build_sim_config(self, config: dict[str, Any]) -> SimConfig:
        """Materialize the code, generators and parameters a config names."""
        code = load_code(config["code"])
        generators = load_generators(config["generators"], config["code"], code)
        sampler = config["sampler"]
        return SimConfig(
            code=code,
            decoder=config["decoder"],
            params=DecodeParams(**config["params"]),
            ebn0_db=tuple(config["ebn0_db"]),
            min_frame_errors=config["min_frame_errors"],
            max_frames=config["max_frames"],
            master_seed=config["seed"],
            batch_size=config["batch_size"],
            workers=config["workers"],
            transmit_mode=config["transmit_mode"],
            generators=generators,
            sampler_slots=sampler["slots"],
            sampler_burn_in=sampler["burn_in"],
            sampler_steps=sampler["steps"],
        )

    def run(self, *, run_name: str | None = None, progress: bool = False) -> Path:
        """Simulate and write results, gnuplot data and the resolved config.

        Args:
            run_name: Name for the run (used for the directory if output_dir
                      is not set)
            progress: Show progress bars on stderr

        Returns:
            Path to the output directory
        """
        from .generators.tables import ResultsGenerator

        config = self.generate_config()
        sim_config = self.build_sim_config(config)
        if config["p_values"] is not None:
            outcome: list | SweepReport = sweep_p(sim_config, config["p_values"], progress=progress)
        else:
            outcome = run_curve(sim_config, progress=progress)

        output_path = Path(self._get_output_dir(run_name))
        files = ResultsGenerator().generate_run(config, sim_config.code, outcome)
        ResultsGenerator.write(output_path, files)
        logger.info("results written to %s", output_path)
        return output_path
