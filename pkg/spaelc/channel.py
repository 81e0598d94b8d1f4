"""
BPSK over AWGN: Eb/N0 bookkeeping, transmission, channel LLRs, encoding.

Bits map to symbols as 0 -> +1 and 1 -> -1, so a positive LLR favors 0.
"""

from dataclasses import dataclass

import numpy as np

from .gf2 import BinMatrix


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy symbols at the given Eb/N0."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return float(1.0 / np.sqrt(2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float

    @property
    def sigma(self) -> float:
        return sigma_from_ebn0(self.ebn0_db, self.rate)


def frame_rng(master_seed: int, frame_index: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for one frame, independent of scheduling."""
    seq = np.random.SeedSequence([int(master_seed), int(frame_index), int(stream)])
    return np.random.Generator(np.random.Philox(seq))


def modulate(c: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def transmit(c: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Received samples ``(1 - 2c) + noise`` with noise ~ N(0, sigma^2)."""
    x = modulate(c)
    return x + sigma * rng.standard_normal(x.shape)


def llr(y: np.ndarray, sigma: float) -> np.ndarray:
    """Channel LLRs ``(2 / sigma^2) y``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return (2.0 / sigma**2) * np.asarray(y, dtype=np.float64)


def hard_decision(app: np.ndarray) -> np.ndarray:
    """Negative values decide 1; zero and positive decide 0."""
    return (np.asarray(app) < 0).astype(np.uint8)


def encode(G: BinMatrix, u: np.ndarray) -> np.ndarray:
    """Codeword ``u G`` over GF(2)."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (G.n_rows,):
        raise ValueError(f"expected {G.n_rows} information bits, got shape {u.shape}")
    return ((u @ G.to_array().astype(np.int64)) % 2).astype(np.uint8)


def random_codeword(G: BinMatrix, rng: np.random.Generator) -> np.ndarray:
    return encode(G, rng.integers(0, 2, size=G.n_rows))
