"""
Results generator: CSV, JSON and gnuplot data files for simulation runs.
"""

import csv
import io
from pathlib import Path
from typing import Any

from ..codes import CodeSpec
from ..sim import FerPoint, SweepReport
from ..util import atomic_write_json, atomic_write_text, build_info

CSV_COLUMNS = (
    "code",
    "decoder",
    "p",
    "I1",
    "I2",
    "I3",
    "alpha0",
    "ebn0_db",
    "frames",
    "frame_errors",
    "undetected",
    "fer",
    "avg_spa_messages",
    "avg_checkmsg_only",
    "avg_iterations",
    "avg_elc_ops",
    "seed",
)


class ResultsGenerator:
    """Turns resolved configs and FER points into the files of a run.

    Every output is plain text built only from the config and the points
    (no timings), so re-running a config reproduces the files byte for byte.
    """

    def rows(
        self, config: dict[str, Any], code: CodeSpec, points: list[FerPoint], p: int | None = None
    ) -> list[dict[str, Any]]:
        params = config["params"]
        return [
            {
                "code": code.name,
                "decoder": config["decoder"],
                "p": params["p"] if p is None else p,
                "I1": params["I1"],
                "I2": params["I2"],
                "I3": params["I3"],
                "alpha0": params["alpha0"],
                "ebn0_db": pt.ebn0_db,
                "frames": pt.frames,
                "frame_errors": pt.frame_errors,
                "undetected": pt.undetected,
                "fer": pt.fer,
                "avg_spa_messages": pt.avg_spa_messages,
                "avg_checkmsg_only": pt.avg_checkmsg_only,
                "avg_iterations": pt.avg_iterations,
                "avg_elc_ops": pt.avg_elc_ops,
                "seed": config["seed"],
            }
            for pt in points
        ]

    def csv_text(self, rows: list[dict[str, Any]]) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def gnuplot_text(self, points: list[FerPoint], column: str, title: str) -> str:
        """Two-column data: Eb/N0 and one per-point quantity."""
        lines = [f"# {title}", f"# ebn0_db {column}"]
        lines += [f"{pt.ebn0_db!r} {getattr(pt, column)!r}" for pt in points]
        return "\n".join(lines) + "\n"

    def _curve_files(self, points: list[FerPoint], suffix: str, label: str) -> dict[str, str]:
        return {
            f"fer{suffix}.dat": self.gnuplot_text(points, "fer", f"FER, {label}"),
            f"messages{suffix}.dat": self.gnuplot_text(
                points, "avg_spa_messages", f"average SPA messages (both directions), {label}"
            ),
            f"checkmsg{suffix}.dat": self.gnuplot_text(
                points, "avg_checkmsg_only", f"average check messages, {label}"
            ),
        }

    def generate_run(
        self, config: dict[str, Any], code: CodeSpec, outcome: list[FerPoint] | SweepReport
    ) -> dict[str, Any]:
        """Return ``{file name: content}`` for everything a run emits.

        Text content is written as is, dicts as JSON.
        """
        label = f"{code.name} {config['decoder']}"
        files: dict[str, Any] = {}
        if isinstance(outcome, SweepReport):
            rows = []
            for p in outcome.p_values:
                rows += self.rows(config, code, outcome.points[p], p=p)
                files.update(self._curve_files(outcome.points[p], f"_p{p}", f"{label} p={p}"))
            extra = {"best_p": outcome.best_p}
            budget = [pt.budget_exceeded for pts in outcome.points.values() for pt in pts]
        else:
            rows = self.rows(config, code, outcome)
            files.update(self._curve_files(outcome, "", label))
            extra = {}
            budget = [pt.budget_exceeded for pt in outcome]
        json_rows = [{**row, "budget_exceeded": e} for row, e in zip(rows, budget)]
        files["results.csv"] = self.csv_text(rows)
        files["results.json"] = {"points": json_rows, **extra}
        files["config.json"] = resolved_config_document(config)
        return files

    @staticmethod
    def write(output_dir: str | Path, files: dict[str, Any]) -> list[Path]:
        """Write each file atomically; dict values are written as JSON."""
        output_dir = Path(output_dir)
        written = []
        for name, content in files.items():
            if isinstance(content, str):
                written.append(atomic_write_text(output_dir / name, content))
            else:
                written.append(atomic_write_json(output_dir / name, content))
        return written


def resolved_config_document(config: dict[str, Any]) -> dict[str, Any]:
    """The config as written next to results, stamped with the build."""
    return {**config, "build": build_info()}
