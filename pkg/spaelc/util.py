"""
Utility functions for spaelc: data folders, atomic output, build info.
"""

import json
import os
import subprocess
import tempfile
from pathlib import Path
from typing import Any

from config2py import get_app_config_folder, process_path

SPAELC_LOCAL_DATA_FOLDER = os.environ.get(
    "SPAELC_LOCAL_DATA_FOLDER", get_app_config_folder("spaelc")
)
SPAELC_LOCAL_DATA_FOLDER = process_path(SPAELC_LOCAL_DATA_FOLDER, ensure_dir_exists=True)
SPAELC_RUNS_FOLDER = os.environ.get(
    "SPAELC_RUNS_FOLDER", os.path.join(SPAELC_LOCAL_DATA_FOLDER, "runs")
)
SPAELC_RUNS_FOLDER = process_path(SPAELC_RUNS_FOLDER, ensure_dir_exists=True)

# Re-check structural invariants after every ELC / message update (slow).
DEBUG_CHECKS = os.environ.get("SPAELC_DEBUG_CHECKS", "") not in ("", "0")


def get_run_directory(run_name: str) -> str:
    """Get a directory path for a named run within SPAELC_RUNS_FOLDER.

    Args:
        run_name: Name of the run

    Returns:
        Full path to the run directory
    """
    return os.path.join(SPAELC_RUNS_FOLDER, run_name)


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write `text` to `path` through a temp file in the same directory and rename.

    Readers never observe a half-written file.

    Args:
        path: Destination file
        text: Content to write

    Returns:
        The destination as a Path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_json(path: str | Path, obj: Any) -> Path:
    """Atomically write `obj` as indented, key-sorted JSON."""
    return atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def git_hash(default: str = "unknown") -> str:
    """Short git hash of the source checkout, or `default` outside a repo."""
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return default
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else default


def build_info() -> str:
    """Version string plus git hash, as printed by ``spaelc --version``."""
    from . import __version__

    return f"spaelc {__version__} (git {git_hash()})"
