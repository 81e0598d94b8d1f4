"""
Sum-product decoding on a Tanner graph, with two diversity variants:

- ``spa``: plain flooding SPA.
- ``spa_pd``: SPA with damped restarts after random automorphisms of the
  code are applied to the channel vector.
- ``spa_elc``: SPA interleaved with random ELC operations on the graph;
  only edges created by an ELC are (re)initialized, with damped APPs.

Messages are kept in dense (m, n) arrays next to a boolean incidence mask;
entries off the mask are held at zero.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .autgroup import Permutation, ProductReplacementSampler
from .channel import hard_decision, llr
from .gf2 import BinMatrix
from .tanner import ElcRecord, TannerGraph
from .util import DEBUG_CHECKS

logger = logging.getLogger(__name__)

CLAMP = 25.0
_TANH_LIMIT = float(np.tanh(CLAMP / 2))

DECODER_KINDS = ("spa", "spa_pd", "spa_elc", "spa_elc_undamped")
INIT_SCOPES = ("all", "complement")


@dataclass(frozen=True)
class DecodeParams:
    """Iteration structure and damping of the diversity decoders.

    At most ``T = I1 * I2 * I3`` flooding iterations are run: ``I3`` damped
    restarts of ``I2`` steps of ``I1`` floodings each. ``p`` is the number of
    ELC operations per step (SPA-ELC only).
    """

    I1: int = 1
    I2: int = 1
    I3: int = 1
    alpha0: float = 1.0
    p: int = 0
    syndrome_stop: bool = True
    init_scope: str = "all"

    def __post_init__(self):
        for name in ("I1", "I2", "I3", "p"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 < self.alpha0 <= 1:
            raise ValueError(f"alpha0 must be in (0, 1], got {self.alpha0}")
        if self.init_scope not in INIT_SCOPES:
            raise ValueError(f"init_scope must be one of {INIT_SCOPES}")

    @property
    def T(self) -> int:
        return self.I1 * self.I2 * self.I3

    @classmethod
    def for_spa(cls, T: int, **kwargs) -> "DecodeParams":
        return cls(I1=1, I2=T, I3=1, alpha0=1.0, **kwargs)

    @classmethod
    def undamped(cls, p: int, I1: int, T: int, **kwargs) -> "DecodeParams":
        """SPA-ELC(p, I1, T): alpha0 = 1, I3 = 1, I2 = T / I1."""
        if I1 <= 0 or T % I1:
            raise ValueError(f"T={T} must be a positive multiple of I1={I1}")
        return cls(I1=I1, I2=T // I1, I3=1, alpha0=1.0, p=p, **kwargs)


@dataclass
class DecoderState:
    L: np.ndarray
    mask: np.ndarray
    b2c: np.ndarray
    c2b: np.ndarray
    app: np.ndarray
    spa_messages: int = 0
    checkmsg_only: int = 0
    flood_iterations: int = 0
    elc_ops: int = 0

    @classmethod
    def for_graph(cls, tg: TannerGraph, L: np.ndarray) -> "DecoderState":
        mask = tg.mask()
        zeros = np.zeros(mask.shape)
        L = np.array(L, dtype=np.float64)
        return cls(L=L, mask=mask, b2c=zeros, c2b=zeros.copy(), app=L.copy())

    def check_sync(self, tg: TannerGraph) -> None:
        assert np.array_equal(self.mask, tg.mask()), "message storage out of sync with the graph"
        assert not self.b2c[~self.mask].any() and not self.c2b[~self.mask].any()
        assert np.abs(self.b2c).max(initial=0) <= CLAMP and np.abs(self.c2b).max(initial=0) <= CLAMP


@dataclass
class DecodeResult:
    codeword: np.ndarray
    converged: bool
    iterations_used: int
    spa_messages: int
    checkmsg_only: int
    elc_ops: int
    final_h: BinMatrix
    app: np.ndarray = field(repr=False)

    @property
    def output(self) -> np.ndarray | None:
        """The decoded word, or None on failure."""
        return self.codeword if self.converged else None


def damping_schedule(alpha0: float, I3: int, t: int) -> float:
    """Linear ramp from alpha0 at t = 0 to 1 at t = I3 - 1."""
    if I3 <= 1:
        return alpha0
    return alpha0 + t * (1.0 - alpha0) / (I3 - 1)


def init_messages(state: DecoderState, tg: TannerGraph) -> None:
    """Bit-to-check messages take the channel LLR; check-to-bit are zero."""
    state.mask = tg.mask()
    state.b2c = np.where(state.mask, state.L[np.newaxis, :], 0.0)
    state.c2b = np.zeros(state.mask.shape)


def flood_iteration(state: DecoderState, tg: TannerGraph | None = None) -> None:
    """All checks update (tanh rule), then all bits; refreshes the APPs."""
    mask = state.mask
    t = np.where(mask, np.tanh(state.b2c / 2.0), 1.0)
    prefix = np.ones_like(t)
    prefix[:, 1:] = np.cumprod(t[:, :-1], axis=1)
    suffix = np.ones_like(t)
    suffix[:, :-1] = np.cumprod(t[:, ::-1], axis=1)[:, ::-1][:, 1:]
    prod = np.clip(prefix * suffix, -_TANH_LIMIT, _TANH_LIMIT)
    state.c2b = np.where(mask, 2.0 * np.arctanh(prod), 0.0)

    total = state.L + state.c2b.sum(axis=0)
    state.b2c = np.where(mask, np.clip(total[np.newaxis, :] - state.c2b, -CLAMP, CLAMP), 0.0)
    state.app = total

    edges = int(np.count_nonzero(mask))
    state.spa_messages += 2 * edges
    state.checkmsg_only += edges
    state.flood_iterations += 1
    if DEBUG_CHECKS and tg is not None:
        state.check_sync(tg)


def syndrome_is_zero(mask: np.ndarray, c: np.ndarray) -> bool:
    return not np.any(np.count_nonzero(mask & c.astype(bool), axis=1) & 1)


def _result(state: DecoderState, c: np.ndarray, converged: bool, tg: TannerGraph) -> DecodeResult:
    return DecodeResult(
        codeword=c,
        converged=converged,
        iterations_used=state.flood_iterations,
        spa_messages=state.spa_messages,
        checkmsg_only=state.checkmsg_only,
        elc_ops=state.elc_ops,
        final_h=tg.to_matrix(),
        app=state.app.copy(),
    )


def _unpermuted_result(state, c, converged, tg, theta: Permutation) -> DecodeResult:
    back = theta.inverse()
    result = _result(state, back.apply(c), converged, tg)
    result.app = back.apply(result.app)
    return result


def spa(
    y: np.ndarray, tg: TannerGraph, T: int, sigma: float, *, syndrome_stop: bool = True
) -> DecodeResult:
    """Flooding SPA for at most T iterations, no initial syndrome check."""
    state = DecoderState.for_graph(tg, llr(y, sigma))
    init_messages(state, tg)
    c = hard_decision(state.app)
    for _ in range(T):
        flood_iteration(state, tg)
        c = hard_decision(state.app)
        if syndrome_stop and syndrome_is_zero(state.mask, c):
            return _result(state, c, True, tg)
    converged = T > 0 and syndrome_is_zero(state.mask, c)
    return _result(state, c, converged, tg)


def spa_pd(
    y: np.ndarray,
    tg: TannerGraph,
    params: DecodeParams,
    sampler: ProductReplacementSampler,
    sigma: float,
) -> DecodeResult:
    """SPA with permutation diversity and damped restarts.

    The channel vector is permuted instead of the columns of H, so messages
    are re-initialized at every step; the output undoes the accumulated
    permutation.
    """
    n = tg.n
    L0 = llr(y, sigma)
    state = DecoderState.for_graph(tg, L0)
    theta = Permutation.identity(n)
    c, c_theta = hard_decision(L0), theta
    for t3 in range(params.I3):
        alpha = damping_schedule(params.alpha0, params.I3, t3)
        state.L = L0.copy()
        theta = Permutation.identity(n)
        for _ in range(params.I2):
            init_messages(state, tg)
            for _ in range(params.I1):
                flood_iteration(state, tg)
            c, c_theta = hard_decision(state.app), theta
            if params.syndrome_stop and syndrome_is_zero(state.mask, c):
                return _unpermuted_result(state, c, True, tg, theta)
            state.L = (state.app - state.L) * alpha + state.L
            pi = sampler.sample()
            state.L = pi.apply(state.L)
            theta = pi.compose(theta)
    converged = params.T > 0 and syndrome_is_zero(state.mask, c)
    return _unpermuted_result(state, c, converged, tg, c_theta)


def _apply_elc_to_messages(
    state: DecoderState, record: ElcRecord, alpha: float, init_scope: str
) -> None:
    for r, v in record.deleted:
        state.mask[r, v] = False
        state.b2c[r, v] = 0.0
        state.c2b[r, v] = 0.0
    for r, v in record.created:
        state.mask[r, v] = True
        state.c2b[r, v] = 0.0
        if init_scope == "complement" and v == record.old_pivot:
            state.b2c[r, v] = 0.0
        else:
            damped = (state.app[v] - state.L[v]) * alpha + state.L[v]
            state.b2c[r, v] = min(max(damped, -CLAMP), CLAMP)


def spa_elc(
    y: np.ndarray,
    tg: TannerGraph,
    params: DecodeParams,
    sigma: float,
    rng: np.random.Generator | int | None = None,
) -> DecodeResult:
    """SPA interleaved with ``params.p`` random ELCs after every I1 floodings.

    Works on a copy of tg (which must be in standard form); the graph in
    effect when decoding stopped is returned as ``final_h``.
    """
    if not tg.is_standard_form:
        raise ValueError("SPA-ELC needs a Tanner graph in standard form")
    rng = np.random.default_rng(rng)
    tg = tg.copy()
    L0 = llr(y, sigma)
    state = DecoderState.for_graph(tg, L0)
    c = hard_decision(L0)
    for t3 in range(params.I3):
        alpha = damping_schedule(params.alpha0, params.I3, t3)
        state.L = L0.copy()
        init_messages(state, tg)
        for _ in range(params.I2):
            for _ in range(params.I1):
                flood_iteration(state, tg)
            c = hard_decision(state.app)
            if params.syndrome_stop and syndrome_is_zero(state.mask, c):
                return _result(state, c, True, tg)
            for _ in range(params.p):
                edges = tg.eligible_edges()
                if not edges:
                    break
                j, v = edges[rng.integers(len(edges))]
                record = tg.elc_inplace(j, v)
                _apply_elc_to_messages(state, record, alpha, params.init_scope)
                state.elc_ops += 1
                if DEBUG_CHECKS:
                    state.check_sync(tg)
    converged = params.T > 0 and syndrome_is_zero(state.mask, c)
    return _result(state, c, converged, tg)


def decode(
    kind: str,
    y: np.ndarray,
    tg: TannerGraph,
    params: DecodeParams,
    sigma: float,
    *,
    rng: np.random.Generator | int | None = None,
    sampler: ProductReplacementSampler | None = None,
) -> DecodeResult:
    """Run the decoder named by ``kind`` (one of DECODER_KINDS)."""
    if kind == "spa":
        return spa(y, tg, params.T, sigma, syndrome_stop=params.syndrome_stop)
    if kind == "spa_pd":
        if sampler is None:
            raise ValueError("spa_pd needs an automorphism sampler")
        return spa_pd(y, tg, params, sampler, sigma)
    if kind == "spa_elc":
        return spa_elc(y, tg, params, sigma, rng)
    if kind == "spa_elc_undamped":
        undamped = DecodeParams.undamped(
            params.p, params.I1, params.T,
            syndrome_stop=params.syndrome_stop, init_scope=params.init_scope,
        )
        return spa_elc(y, tg, undamped, sigma, rng)
    raise ValueError(f"Unknown decoder kind: {kind!r}; expected one of {DECODER_KINDS}")
