"""
Command-line interface for spaelc.

Subcommands::

    spaelc codes build --qr 23 --extend --out golay.alist
    spaelc codes info golay.alist --distance
    spaelc codes export-json golay.alist --out golay.json
    spaelc optimize --in eqr48.alist --budget 1000000 --seed 1
    spaelc orbit --in golay.alist --cap 100
    spaelc simulate --config run.json --decoder spa-elc --ebn0 3,4,5
    spaelc sweep --config run.json --p-values 1,2,4,8

Exit codes: 0 success, 2 usage or config error, 3 bad input data,
4 budget exceeded or orbit overflow.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from .codes import (
    CodeSpec,
    eqr_code,
    load_alist,
    qr_code,
    reduce_weight,
    save_alist,
    save_code_json,
)
from .core import Experiment
from .errors import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, OrbitOverflow, SpaelcError
from .gf2 import MAX_ENUMERATION_DIM, four_cycles
from .tanner import TannerGraph, labeled_orbit_size, orbit_report, s_orbit
from .util import atomic_write_json, build_info, get_run_directory

logger = logging.getLogger("spaelc")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _output_dir(args, default_name: str) -> Path:
    return Path(args.out_dir or get_run_directory(args.run_name or default_name))


def _write_config(path: str | Path, command: str, fields: dict[str, Any]) -> Path:
    """Record the resolved arguments of a subcommand next to its outputs."""
    return atomic_write_json(path, {"command": command, **fields, "build": build_info()})


def _sidecar_config(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(f"{out.name}.config.json")


def _code_info(code: CodeSpec, *, distance: bool, workers: int) -> dict[str, Any]:
    info = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "weight": code.H.weight,
        "four_cycles": four_cycles(code.H),
        "d": code.d,
    }
    if distance:
        if code.k > MAX_ENUMERATION_DIM:
            logger.warning("k=%d too large for brute-force distance", code.k)
        else:
            info["d"] = code.with_verified_distance(workers=workers).d
    return info


def _print_info(info: dict[str, Any]) -> None:
    for key, value in info.items():
        print(f"{key}: {value}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_codes_build(args) -> int:
    if args.extend:
        code = eqr_code(args.qr, initial=args.initial)
    else:
        code = qr_code(args.qr)
    save_alist(code, args.out)
    _write_config(
        _sidecar_config(args.out), "codes build",
        {"qr": args.qr, "extend": args.extend, "initial": args.initial,
         "out": str(args.out), "distance": args.distance},
    )
    print(f"Wrote {code.name} [{code.n}, {code.k}] to {args.out}")
    _print_info(_code_info(code, distance=args.distance, workers=args.threads))
    return EXIT_OK


def cmd_codes_info(args) -> int:
    code = load_alist(args.path)
    out = _output_dir(args, "codes-info")
    _write_config(out / "config.json", "codes info", {"path": str(args.path), "distance": args.distance})
    info = _code_info(code, distance=args.distance, workers=args.threads)
    atomic_write_json(out / "info.json", info)
    _print_info(info)
    return EXIT_OK


def cmd_codes_export_json(args) -> int:
    code = load_alist(args.path)
    save_code_json(code, args.out)
    _write_config(
        _sidecar_config(args.out), "codes export-json", {"path": str(args.path), "out": str(args.out)}
    )
    print(f"Wrote {args.out}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    code = load_alist(args.input)
    reduced, report = reduce_weight(
        code,
        restrict_standard_form=args.ip,
        budget=args.budget,
        rng=args.seed,
        progress=not args.quiet,
    )
    out = _output_dir(args, "optimize")
    stem = Path(args.input).stem + ("-reduced-ip" if args.ip else "-reduced")
    save_alist(reduced, out / f"{stem}.alist")
    atomic_write_json(out / "report.json", report.to_json())
    _write_config(
        out / "config.json", "optimize",
        {"in": str(args.input), "ip": args.ip, "budget": args.budget, "seed": args.seed},
    )
    print(
        f"weight {report.initial_weight} -> {report.final_weight}, "
        f"4-cycles {report.initial_cycles} -> {report.final_cycles} "
        f"({report.moves} moves, {report.restarts} restarts)"
    )
    print(f"Results in {out}")
    return EXIT_OK


def cmd_orbit(args) -> int:
    code = load_alist(args.input)
    tg = TannerGraph.from_matrix(code.H)
    out = _output_dir(args, "orbit")
    _write_config(
        out / "config.json", "orbit",
        {"in": str(args.input), "labeled": args.labeled, "cap": args.cap},
    )
    exit_code = EXIT_OK
    if args.labeled:
        try:
            size, overflow = labeled_orbit_size(tg, args.cap), False
        except OrbitOverflow as e:
            size, overflow = e.partial, True
        report = {"labeled_orbit_size": size, "overflow": overflow, "cap": args.cap}
        print(f"labeled orbit size: {size}{' (overflow)' if overflow else ''}")
    else:
        try:
            structures, overflow = s_orbit(tg, args.cap, progress=not args.quiet), False
        except OrbitOverflow as e:
            structures, overflow = e.partial, True
        report = {
            "structures": orbit_report(structures),
            "count": len(structures),
            "overflow": overflow,
            "cap": args.cap,
        }
        weights = sorted(s.weight for s in structures)
        print(f"s-orbit: {len(structures)} structures{' (overflow)' if overflow else ''}, weights {weights}")
    atomic_write_json(out / "orbit.json", report)
    if report["overflow"]:
        exit_code = EXIT_BUDGET
    return exit_code


def _experiment_overrides(args) -> dict[str, Any]:
    params = {
        "I1": args.I1, "I2": args.I2, "I3": args.I3,
        "alpha0": args.alpha0, "p": args.p,
    }
    if args.no_syndrome_stop:
        params["syndrome_stop"] = False
    overrides: dict[str, Any] = {
        "decoder": args.decoder,
        "ebn0_db": args.ebn0,
        "seed": args.seed,
        "min_frame_errors": args.min_errors,
        "max_frames": args.max_frames,
        "transmit_mode": args.transmit,
        "params": params,
        "workers": args.threads,
    }
    if args.qr is not None:
        overrides["code"] = {"source": "qr", "p": args.qr, "extend": True}
    elif args.code is not None:
        source = "json" if str(args.code).endswith(".json") else "alist"
        overrides["code"] = {"source": source, "path": str(args.code)}
    if getattr(args, "p_values", None) is not None:
        overrides["p_values"] = args.p_values
    return overrides


def _load_settings(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def cmd_simulate(args) -> int:
    settings = _load_settings(args.config)
    experiment = Experiment(settings, _experiment_overrides(args), output_dir=args.out_dir)
    out = experiment.run(run_name=args.run_name or "simulate", progress=not args.quiet)
    print(f"Results in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    settings = _load_settings(args.config)
    overrides = _experiment_overrides(args)
    if overrides.get("decoder") is None and settings.get("decoder") is None:
        overrides["decoder"] = "spa_elc"
    experiment = Experiment(settings, overrides, output_dir=args.out_dir)
    out = experiment.run(run_name=args.run_name or "sweep", progress=not args.quiet)
    with open(out / "results.json", encoding="utf-8") as f:
        print(f"best p: {json.load(f).get('best_p')}")
    print(f"Results in {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_sim_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config; flags override its values")
    p.add_argument("--decoder", help="spa, spa-pd, spa-elc or spa-elc-undamped")
    code = p.add_mutually_exclusive_group()
    code.add_argument("--qr", type=int, help="use the extended QR code of prime length p")
    code.add_argument("--code", help="alist or CodeSpec JSON file")
    p.add_argument("--ebn0", type=_float_list, help="comma-separated Eb/N0 values in dB")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-errors", type=int, help="frame errors per point (default 100)")
    p.add_argument("--max-frames", type=int)
    p.add_argument("--transmit", choices=["zero", "random"])
    p.add_argument("--I1", type=int)
    p.add_argument("--I2", type=int)
    p.add_argument("--I3", type=int)
    p.add_argument("--alpha0", type=float)
    p.add_argument("--p", type=int, help="ELC operations per step")
    p.add_argument("--no-syndrome-stop", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spaelc",
        description="Iterative decoding with random edge local complementation.",
    )
    parser.add_argument("--version", action="version", version=build_info())
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker processes")
    common.add_argument("--out-dir", help="output directory (default: runs folder)")
    common.add_argument("--run-name", help="name of the run directory in the runs folder")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    codes = sub.add_parser("codes", help="build and inspect codes")
    codes_sub = codes.add_subparsers(dest="codes_command", required=True)
    build = codes_sub.add_parser("build", parents=[common], help="construct a QR/EQR code")
    build.add_argument("--qr", type=int, required=True, help="prime length p")
    build.add_argument("--extend", action="store_true", help="append the overall parity bit")
    build.add_argument("--initial", choices=["generator", "parity"], default="generator")
    build.add_argument("--out", required=True, help="alist output path")
    build.add_argument("--distance", action="store_true", help="brute-force the minimum distance")
    build.set_defaults(func=cmd_codes_build)

    info = codes_sub.add_parser("info", parents=[common], help="describe an alist code")
    info.add_argument("path")
    info.add_argument("--distance", action="store_true", help="brute-force the minimum distance")
    info.set_defaults(func=cmd_codes_info)

    export = codes_sub.add_parser("export-json", parents=[common], help="alist to CodeSpec JSON")
    export.add_argument("path")
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_codes_export_json)

    opt = sub.add_parser("optimize", parents=[common], help="reduce weight and 4-cycles of H")
    opt.add_argument("--in", dest="input", required=True)
    opt.add_argument("--ip", action="store_true", help="restrict to standard form (ELC moves)")
    opt.add_argument("--budget", type=int, default=100_000, help="candidate moves")
    opt.add_argument("--seed", type=int, default=0)
    opt.set_defaults(func=cmd_optimize)

    orb = sub.add_parser("orbit", parents=[common], help="explore the ELC orbit")
    orb.add_argument("--in", dest="input", required=True)
    orb.add_argument("--labeled", action="store_true", help="count labeled graphs instead")
    orb.add_argument("--cap", type=int, default=1000)
    orb.set_defaults(func=cmd_orbit)

    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo FER curve")
    _add_sim_arguments(sim)
    sim.set_defaults(func=cmd_simulate)

    sweep = sub.add_parser("sweep", parents=[common], help="FER curves over ELCs per step")
    _add_sim_arguments(sweep)
    sweep.add_argument("--p-values", type=_int_list, required=True)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def _configure_logging(args) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("spaelc")
    root.handlers[:] = [handler]
    root.setLevel(level)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    if args.threads is None and args.command in ("codes", "optimize", "orbit"):
        args.threads = 1
    try:
        return args.func(args)
    except SpaelcError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return SpaelcError.exit_code


if __name__ == "__main__":
    sys.exit(main())
