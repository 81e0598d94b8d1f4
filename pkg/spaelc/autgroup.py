"""
Permutations of code coordinates, PSL(2, p) generators for extended QR
codes, and a product-replacement sampler of random group elements.

A permutation moves the symbol at position ``i`` to position
``images[i]``. ``compose(a, b)`` applies ``b`` first, then ``a``.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .codes import CodeSpec, is_qr_prime, smallest_primitive_root
from .errors import NotAnAutomorphism, NotQrPrime
from .util import atomic_write_json

logger = logging.getLogger(__name__)


class Permutation:
    """Bijection on {0, ..., n-1}, stored as a read-only images array."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int] | np.ndarray):
        arr = np.array(images, dtype=np.intp)
        if arr.ndim != 1:
            raise ValueError("images must be one-dimensional")
        n = arr.size
        if n and not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValueError("images is not a permutation of 0..n-1")
        arr.setflags(write=False)
        self.images = arr

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "Permutation":
        out = cls.__new__(cls)
        arr.setflags(write=False)
        out.images = arr
        return out

    @property
    def n(self) -> int:
        return self.images.size

    def __call__(self, i: int) -> int:
        return int(self.images[i])

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Permute the entries of v: ``out[images[i]] = v[i]``."""
        v = np.asarray(v)
        out = np.empty_like(v)
        out[..., self.images] = v
        return out

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other."""
        return Permutation._trusted(self.images[other.images])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.n)
        return Permutation._trusted(inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.n)))

    def order(self) -> int:
        seen = np.zeros(self.n, dtype=bool)
        result = 1
        for start in range(self.n):
            if seen[start]:
                continue
            length, i = 0, start
            while not seen[i]:
                seen[i] = True
                i = self.images[i]
                length += 1
            result = np.lcm(result, length)
        return int(result)

    def to_list(self) -> list[int]:
        return self.images.tolist()

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return bool(np.array_equal(self.images, other.images))

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"Permutation({self.to_list()})"


def preserves_code(perm: Permutation, code: CodeSpec) -> bool:
    """True iff perm maps every generator row of code to a codeword."""
    G = code.generator().to_array()
    H = code.H.to_array()
    moved = perm.apply(G)
    return not np.any((moved.astype(np.int64) @ H.T.astype(np.int64)) % 2)


@dataclass(frozen=True)
class GeneratorSet:
    n: int
    gens: tuple[Permutation, ...]
    source: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for g in self.gens:
            if g.n != self.n:
                raise ValueError(f"generator on {g.n} points in a set on {self.n}")

    def verify(self, code: CodeSpec) -> None:
        """Raise NotAnAutomorphism unless every generator preserves code."""
        if code.n != self.n:
            raise NotAnAutomorphism(f"generators act on {self.n} points, code has n={code.n}")
        for idx, g in enumerate(self.gens):
            if not preserves_code(g, code):
                raise NotAnAutomorphism(f"generator {idx} does not preserve {code.name}")

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "gens": [g.to_list() for g in self.gens]}

    def save(self, path: str | Path) -> Path:
        return atomic_write_json(path, self.to_json())

    @classmethod
    def load(cls, path: str | Path, code: CodeSpec | None = None) -> "GeneratorSet":
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
        gens = cls(
            n=obj["n"],
            gens=tuple(Permutation(g) for g in obj["gens"]),
            source={"kind": "file", "path": str(path)},
        )
        if code is not None:
            gens.verify(code)
        return gens


def psl2_generators(p: int) -> GeneratorSet:
    """Generators of PSL(2, p) acting on {0..p-1} and infinity (position p).

    S: y -> y+1, V: y -> rho^2 y with rho the smallest primitive root,
    T: y -> -1/y with 0 and infinity exchanged.

    Raises:
        NotQrPrime: if p is not an odd prime with 2 a quadratic residue.
    """
    if not is_qr_prime(p):
        raise NotQrPrime(p)
    inf = p
    rho2 = pow(smallest_primitive_root(p), 2, p)
    S = [(y + 1) % p for y in range(p)] + [inf]
    V = [rho2 * y % p for y in range(p)] + [inf]
    T = [inf] + [(-pow(y, -1, p)) % p for y in range(1, p)] + [0]
    return GeneratorSet(
        n=p + 1,
        gens=(Permutation(S), Permutation(V), Permutation(T)),
        source={"kind": "psl2", "p": p},
    )


class ProductReplacementSampler:
    """Random elements of the group generated by a GeneratorSet.

    Keeps ``slots`` group elements seeded by cycling the generators. A step
    picks two distinct slots i, j and replaces slot i by slot_i * slot_j or
    slot_i * slot_j^-1. Construction runs ``burn_in`` steps; every sample
    runs ``steps`` more and returns a random slot.
    """

    def __init__(
        self,
        generators: GeneratorSet,
        rng: np.random.Generator | int | None = None,
        *,
        slots: int = 10,
        burn_in: int = 60,
        steps: int = 20,
    ):
        if slots < 1:
            raise ValueError("slots must be >= 1")
        self.generators = generators
        self.rng = np.random.default_rng(rng)
        self.steps = steps
        gens = generators.gens or (Permutation.identity(generators.n),)
        self.slots = [gens[i % len(gens)] for i in range(slots)]
        for _ in range(burn_in):
            self._step()

    def _step(self) -> None:
        k = len(self.slots)
        if k < 2:
            return
        i, j = self.rng.choice(k, size=2, replace=False)
        other = self.slots[j]
        if self.rng.integers(2):
            other = other.inverse()
        self.slots[i] = self.slots[i].compose(other)

    def sample(self) -> Permutation:
        for _ in range(self.steps):
            self._step()
        return self.slots[self.rng.integers(len(self.slots))]

    def spawn(self, rng: np.random.Generator | int | None) -> "ProductReplacementSampler":
        """Copy of this (burned-in) sampler driven by a different RNG."""
        clone = object.__new__(ProductReplacementSampler)
        clone.generators = self.generators
        clone.rng = np.random.default_rng(rng)
        clone.steps = self.steps
        clone.slots = list(self.slots)
        return clone
