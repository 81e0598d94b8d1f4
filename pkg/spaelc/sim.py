"""
Monte Carlo frame error rate harness.

Frames are simulated in fixed-size batches in frame-index order, and the
stopping rule (enough frame errors, or the frame budget) is checked only
between batches. Every frame draws its randomness from a generator keyed
by (master seed, frame index, stream), so the set of simulated frames and
every per-frame outcome are independent of the worker count.
"""

import logging
import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, astuple, dataclass, field, replace
from typing import Any, Sequence

import numpy as np
from tqdm import tqdm

from .autgroup import GeneratorSet, ProductReplacementSampler
from .channel import frame_rng, random_codeword, sigma_from_ebn0, transmit
from .codes import CodeSpec
from .decode import DECODER_KINDS, DecodeParams, decode
from .tanner import TannerGraph

logger = logging.getLogger(__name__)

# per-frame random streams
_NOISE, _DECODER, _SAMPLER, _WORD = 0, 1, 2, 3
# stream used once per run to burn in the automorphism sampler
_SAMPLER_INIT = 4

TRANSMIT_MODES = ("zero", "random")
ELC_KINDS = ("spa_elc", "spa_elc_undamped")


@dataclass(frozen=True)
class SimConfig:
    code: CodeSpec
    decoder: str
    params: DecodeParams
    ebn0_db: tuple[float, ...] = ()
    min_frame_errors: int = 100
    max_frames: int = 100_000
    master_seed: int = 0
    batch_size: int = 64
    workers: int = 1
    transmit_mode: str = "zero"
    generators: GeneratorSet | None = field(default=None, repr=False)
    sampler_slots: int = 10
    sampler_burn_in: int = 60
    sampler_steps: int = 20

    def __post_init__(self):
        if self.decoder not in DECODER_KINDS:
            raise ValueError(f"Unknown decoder {self.decoder!r}; expected one of {DECODER_KINDS}")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_frames < 1 or self.batch_size < 1:
            raise ValueError("max_frames and batch_size must be >= 1")
        if self.transmit_mode not in TRANSMIT_MODES:
            raise ValueError(f"transmit_mode must be one of {TRANSMIT_MODES}")
        if self.decoder == "spa_pd" and self.generators is None:
            raise ValueError("spa_pd needs automorphism generators")


@dataclass(frozen=True)
class FrameTally:
    """Sums over frames; combine with ``+`` in any order."""

    frames: int = 0
    frame_errors: int = 0
    undetected: int = 0
    spa_messages: int = 0
    checkmsg_only: int = 0
    iterations: int = 0
    elc_ops: int = 0

    def __add__(self, other: "FrameTally") -> "FrameTally":
        return FrameTally(*(a + b for a, b in zip(astuple(self), astuple(other))))


@dataclass(frozen=True)
class FerPoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    undetected: int
    fer: float
    avg_spa_messages: float
    avg_checkmsg_only: float
    avg_iterations: float
    avg_elc_ops: float
    budget_exceeded: bool
    wallclock: float = field(default=0.0, compare=False)

    @classmethod
    def from_tally(cls, ebn0_db: float, tally: FrameTally, min_frame_errors: int, wallclock: float = 0.0):
        f = max(tally.frames, 1)
        return cls(
            ebn0_db=ebn0_db,
            frames=tally.frames,
            frame_errors=tally.frame_errors,
            undetected=tally.undetected,
            fer=tally.frame_errors / f,
            avg_spa_messages=tally.spa_messages / f,
            avg_checkmsg_only=tally.checkmsg_only / f,
            avg_iterations=tally.iterations / f,
            avg_elc_ops=tally.elc_ops / f,
            budget_exceeded=tally.frame_errors < min_frame_errors,
            wallclock=wallclock,
        )

    @property
    def detected(self) -> int:
        return self.frame_errors - self.undetected

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out.pop("wallclock")
        return out


class _FrameContext:
    """Per-process state for simulating frames at one Eb/N0."""

    def __init__(self, config: SimConfig, ebn0_db: float):
        self.config = config
        self.sigma = sigma_from_ebn0(ebn0_db, config.code.rate)
        self.tg = TannerGraph.from_matrix(config.code.H, standardize=config.decoder in ELC_KINDS)
        self.G = config.code.generator()
        self.sampler = None
        if config.decoder == "spa_pd":
            self.sampler = ProductReplacementSampler(
                config.generators,
                frame_rng(config.master_seed, 0, _SAMPLER_INIT),
                slots=config.sampler_slots,
                burn_in=config.sampler_burn_in,
                steps=config.sampler_steps,
            )

    def run_frame(self, index: int) -> FrameTally:
        cfg = self.config
        n = cfg.code.n
        if cfg.transmit_mode == "zero":
            c = np.zeros(n, dtype=np.uint8)
        else:
            c = random_codeword(self.G, frame_rng(cfg.master_seed, index, _WORD))
        y = transmit(c, self.sigma, frame_rng(cfg.master_seed, index, _NOISE))
        sampler = None
        if self.sampler is not None:
            sampler = self.sampler.spawn(frame_rng(cfg.master_seed, index, _SAMPLER))
        result = decode(
            cfg.decoder, y, self.tg, cfg.params, self.sigma,
            rng=frame_rng(cfg.master_seed, index, _DECODER),
            sampler=sampler,
        )
        wrong = not np.array_equal(result.codeword, c)
        return FrameTally(
            frames=1,
            frame_errors=int(wrong or not result.converged),
            undetected=int(wrong and result.converged),
            spa_messages=result.spa_messages,
            checkmsg_only=result.checkmsg_only,
            iterations=result.iterations_used,
            elc_ops=result.elc_ops,
        )

    def run_batch(self, start: int, stop: int) -> FrameTally:
        tally = FrameTally()
        for index in range(start, stop):
            tally = tally + self.run_frame(index)
        return tally


_WORKER_CONTEXT: _FrameContext | None = None


def _init_worker(config: SimConfig, ebn0_db: float) -> None:
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = _FrameContext(config, ebn0_db)


def _worker_batch(bounds: tuple[int, int]) -> FrameTally:
    return _WORKER_CONTEXT.run_batch(*bounds)


def _batches(config: SimConfig):
    start = 0
    while start < config.max_frames:
        stop = min(start + config.batch_size, config.max_frames)
        yield start, stop
        start = stop


def _done(config: SimConfig, tally: FrameTally) -> bool:
    return tally.frame_errors >= config.min_frame_errors or tally.frames >= config.max_frames


def run_point(config: SimConfig, ebn0_db: float, *, progress: bool = False) -> FerPoint:
    """Simulate frames at one Eb/N0 until the stopping rule holds."""
    t0 = time.perf_counter()
    tally = FrameTally()
    bar = tqdm(total=config.max_frames, desc=f"{ebn0_db:g} dB", unit="frame", disable=not progress)
    if config.workers <= 1:
        ctx = _FrameContext(config, ebn0_db)
        for start, stop in _batches(config):
            batch = ctx.run_batch(start, stop)
            tally = tally + batch
            bar.update(batch.frames)
            if _done(config, tally):
                break
    else:
        with ProcessPoolExecutor(
            max_workers=config.workers, initializer=_init_worker, initargs=(config, ebn0_db)
        ) as pool:
            batches = _batches(config)
            pending = _submit_window(pool, batches, config.workers)
            while pending:
                batch = pending.popleft().result()
                tally = tally + batch
                bar.update(batch.frames)
                if _done(config, tally):
                    for fut in pending:
                        fut.cancel()
                    break
                nxt = next(batches, None)
                if nxt is not None:
                    pending.append(pool.submit(_worker_batch, nxt))
    bar.close()
    point = FerPoint.from_tally(ebn0_db, tally, config.min_frame_errors, time.perf_counter() - t0)
    logger.info(
        "%s %s @ %g dB: %d/%d frame errors (fer %.3g), %.1f messages/frame",
        config.code.name, config.decoder, ebn0_db, point.frame_errors, point.frames,
        point.fer, point.avg_spa_messages,
    )
    if point.budget_exceeded:
        logger.warning("max_frames=%d reached with %d frame errors", config.max_frames, point.frame_errors)
    return point


def _submit_window(pool, batches, count: int) -> deque:
    pending = deque()
    for _ in range(count):
        nxt = next(batches, None)
        if nxt is None:
            break
        pending.append(pool.submit(_worker_batch, nxt))
    return pending


def run_curve(config: SimConfig, *, progress: bool = False) -> list[FerPoint]:
    return [run_point(config, e, progress=progress) for e in config.ebn0_db]


@dataclass(frozen=True)
class SweepReport:
    p_values: tuple[int, ...]
    points: dict[int, list[FerPoint]]
    best_p: int | None

    def to_json(self) -> dict[str, Any]:
        return {
            "p_values": list(self.p_values),
            "best_p": self.best_p,
            "points": {str(p): [pt.to_json() for pt in pts] for p, pts in self.points.items()},
        }


def sweep_p(config: SimConfig, p_values: Sequence[int], *, progress: bool = False) -> SweepReport:
    """Run the curve once per number of ELCs per step; pick the best p.

    The best p has the lowest mean FER over the curve, ties broken by the
    mean number of SPA messages.
    """
    if config.decoder not in ELC_KINDS:
        raise ValueError(f"sweep_p needs an SPA-ELC decoder, got {config.decoder!r}")
    p_values = tuple(int(p) for p in p_values)
    if len(set(p_values)) != len(p_values):
        raise ValueError(f"duplicate p values in {list(p_values)}")
    if any(p < 0 for p in p_values):
        raise ValueError("p values must be >= 0")
    points = {}
    for p in p_values:
        cfg = replace(config, params=replace(config.params, p=p))
        points[p] = run_curve(cfg, progress=progress)

    def score(p):
        pts = points[p]
        if not pts:
            return (math.inf, math.inf)
        return (
            sum(pt.fer for pt in pts) / len(pts),
            sum(pt.avg_spa_messages for pt in pts) / len(pts),
        )

    best = min(p_values, key=score) if p_values and config.ebn0_db else None
    return SweepReport(p_values=p_values, points=points, best_p=best)


def compare_transmit_modes(config: SimConfig, ebn0_db: float) -> tuple[FerPoint, FerPoint, float]:
    """FER with all-zero and with random codewords, and the two-proportion z score."""
    zero = run_point(replace(config, transmit_mode="zero"), ebn0_db)
    rand = run_point(replace(config, transmit_mode="random", master_seed=config.master_seed + 1), ebn0_db)
    pooled = (zero.frame_errors + rand.frame_errors) / (zero.frames + rand.frames)
    se = math.sqrt(pooled * (1 - pooled) * (1 / zero.frames + 1 / rand.frames))
    z = 0.0 if se == 0 else (zero.fer - rand.fer) / se
    return zero, rand, z
