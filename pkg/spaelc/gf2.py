"""
Binary linear algebra over GF(2).

Rows are stored bit-packed as Python integers (bit ``j`` of a row is column
``j``), so a row operation is a single integer XOR and a row weight is a
single ``int.bit_count``. Matrices are immutable; every operation returns a
new matrix.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import RankDeficient, TooLarge

# Largest dimension min_distance / weight_distribution will enumerate.
MAX_ENUMERATION_DIM = 26


@dataclass(frozen=True)
class BinMatrix:
    """Dense GF(2) matrix with bit-packed rows."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ValueError(f"Expected {self.n_rows} rows, got {len(self.rows)}")
        limit = 1 << self.n_cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"Row {r:#x} does not fit in {self.n_cols} columns")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[int], n_cols: int) -> "BinMatrix":
        rows = tuple(int(r) for r in rows)
        return cls(len(rows), n_cols, rows)

    @classmethod
    def from_array(cls, array) -> "BinMatrix":
        """Build from a 2-D array-like of 0/1 entries."""
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"Expected a 2-D array, got shape {arr.shape}")
        if np.any(arr > 1):
            raise ValueError("Entries must be 0 or 1")
        n_rows, n_cols = arr.shape
        packed = np.packbits(arr, axis=1, bitorder="little")
        rows = tuple(int.from_bytes(packed[i].tobytes(), "little") for i in range(n_rows))
        return cls(n_rows, n_cols, rows)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BinMatrix":
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def identity(cls, n: int) -> "BinMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    # -- access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def weight(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError(f"Index {index} out of range for shape {self.shape}")
        return (self.rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        """Return a (n_rows, n_cols) uint8 array."""
        nbytes = (self.n_cols + 7) // 8
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            bits = np.unpackbits(
                np.frombuffer(r.to_bytes(nbytes, "little"), dtype=np.uint8),
                bitorder="little",
            )
            out[i] = bits[: self.n_cols]
        return out

    def columns(self) -> tuple[int, ...]:
        """Columns as bit-packed integers (bit ``i`` is row ``i``)."""
        cols = [0] * self.n_cols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return tuple(cols)

    def transpose(self) -> "BinMatrix":
        return BinMatrix(self.n_cols, self.n_rows, self.columns())

    def hstack(self, other: "BinMatrix") -> "BinMatrix":
        if other.n_rows != self.n_rows:
            raise ValueError("hstack needs equal row counts")
        shift = self.n_cols
        rows = tuple(a | (b << shift) for a, b in zip(self.rows, other.rows))
        return BinMatrix(self.n_rows, self.n_cols + other.n_cols, rows)

    def vstack(self, other: "BinMatrix") -> "BinMatrix":
        if other.n_cols != self.n_cols:
            raise ValueError("vstack needs equal column counts")
        return BinMatrix(self.n_rows + other.n_rows, self.n_cols, self.rows + other.rows)

    def matmul(self, other: "BinMatrix") -> "BinMatrix":
        """Matrix product over GF(2)."""
        if self.n_cols != other.n_rows:
            raise ValueError(f"Shapes {self.shape} and {other.shape} do not align")
        out = []
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.rows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BinMatrix(self.n_rows, other.n_cols, tuple(out))

    def select_columns(self, cols: Sequence[int]) -> "BinMatrix":
        """Sub-matrix made of the given columns, in the given order."""
        rows = []
        for r in self.rows:
            acc = 0
            for t, c in enumerate(cols):
                acc |= ((r >> c) & 1) << t
            rows.append(acc)
        return BinMatrix(self.n_rows, len(cols), tuple(rows))

    def nonzero_rows(self) -> "BinMatrix":
        rows = tuple(r for r in self.rows if r)
        return BinMatrix(len(rows), self.n_cols, rows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    # -- hex rows (JSON export) ---------------------------------------------

    def row_hex(self) -> list[str]:
        width = (self.n_cols + 3) // 4
        return [format(r, f"0{width}x") for r in self.rows]

    @classmethod
    def from_row_hex(cls, hex_rows: Sequence[str], n_cols: int) -> "BinMatrix":
        return cls.from_rows((int(h, 16) for h in hex_rows), n_cols)


@dataclass(frozen=True)
class StandardFormInfo:
    """Pivot structure of a standard-form parity-check matrix.

    ``pivot_of_row[j]`` is the column whose only nonzero entry is in row j.
    """

    pivot_of_row: tuple[int, ...]
    info_cols: tuple[int, ...]


def rref(M: BinMatrix) -> tuple[BinMatrix, int, list[int]]:
    """Reduced row echelon form over GF(2).

    Returns:
        (R, rank, pivot_cols) with zero rows of R at the bottom.
    """
    rows = list(M.rows)
    m = M.n_rows
    r = 0
    pivots = []
    for c in range(M.n_cols):
        if r == m:
            break
        bit = 1 << c
        pr = next((i for i in range(r, m) if rows[i] & bit), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pivot_row = rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= pivot_row
        pivots.append(c)
        r += 1
    return BinMatrix(m, M.n_cols, tuple(rows)), r, pivots


def rank(M: BinMatrix) -> int:
    return _xor_basis_rank(M.rows)


def _xor_basis_rank(vectors: Iterable[int]) -> int:
    """Rank of a set of bit-packed vectors (leading-bit XOR basis)."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            lead = v.bit_length() - 1
            if lead not in basis:
                basis[lead] = v
                break
            v ^= basis[lead]
    return len(basis)


def standard_form(H: BinMatrix) -> tuple[BinMatrix, StandardFormInfo]:
    """Bring H to standard form using row operations only.

    Pivots are chosen by a left-to-right column scan, taking the first row
    with a one, so the output is deterministic.

    Raises:
        RankDeficient: if H does not have full row rank.
    """
    R, r, pivots = rref(H)
    if r < H.n_rows:
        raise RankDeficient(r, H.n_rows)
    pivot_set = set(pivots)
    info = tuple(c for c in range(H.n_cols) if c not in pivot_set)
    return R, StandardFormInfo(tuple(pivots), info)


def generator_from_h(H: BinMatrix) -> BinMatrix:
    """Basis of the null space of H, as a k×n generator matrix.

    Raises:
        RankDeficient: if H does not have full row rank.
    """
    R, info = standard_form(H)
    n = H.n_cols
    rows = []
    for f in info.info_cols:
        v = 1 << f
        for j, p in enumerate(info.pivot_of_row):
            if (R.rows[j] >> f) & 1:
                v |= 1 << p
        rows.append(v)
    return BinMatrix(len(rows), n, tuple(rows))


def row_space_equal(A: BinMatrix, B: BinMatrix) -> bool:
    """True iff A and B span the same row space."""
    if A.n_cols != B.n_cols:
        raise ValueError("row_space_equal needs equal column counts")
    RA, ra, _ = rref(A)
    RB, rb, _ = rref(B)
    return ra == rb and RA.rows[:ra] == RB.rows[:rb]


def weight(H: BinMatrix) -> int:
    """Number of ones in H."""
    return H.weight


def four_cycles(H: BinMatrix) -> int:
    """Number of 4-cycles in the Tanner graph of H.

    Counted as the number of 2×2 all-one submatrices, i.e. the sum over
    column pairs of C(overlap, 2). The same count is obtained over row pairs,
    which is what is iterated (there are fewer rows than columns).
    """
    vecs = H.rows if H.n_rows <= H.n_cols else H.columns()
    total = 0
    for a, b in combinations(vecs, 2):
        o = (a & b).bit_count()
        total += o * (o - 1) // 2
    return total


def _gray_walk_min(low_rows: tuple[int, ...], base: int, best: int) -> int:
    """Minimum nonzero weight of ``base ^ span(low_rows)``, Gray-code order."""
    w = base
    if w and w.bit_count() < best:
        best = w.bit_count()
    for i in range(1, 1 << len(low_rows)):
        w ^= low_rows[(i & -i).bit_length() - 1]
        c = w.bit_count()
        if 0 < c < best:
            best = c
    return best


def _walk_chunk(args) -> int:
    low_rows, base, best = args
    return _gray_walk_min(low_rows, base, best)


def _prefix_bases(high_rows: Sequence[int]) -> list[int]:
    bases = []
    for mask in range(1 << len(high_rows)):
        acc = 0
        for t, r in enumerate(high_rows):
            if (mask >> t) & 1:
                acc ^= r
        bases.append(acc)
    return bases


def min_distance(
    G: BinMatrix, *, max_dim: int = MAX_ENUMERATION_DIM, workers: int = 1
) -> int:
    """Minimum Hamming weight over all nonzero codewords spanned by G.

    Codewords are visited in Gray-code order, one row XOR per codeword. With
    ``workers > 1`` the walk is split on the top message bits into
    independent sub-walks; the result does not depend on the split.

    Raises:
        TooLarge: if G has more than ``max_dim`` rows.
        RankDeficient: if G does not have full row rank.
    """
    k = G.n_rows
    if k > max_dim:
        raise TooLarge(f"k={k} exceeds the brute-force budget of {max_dim}")
    if k == 0:
        raise ValueError("min_distance of the zero code is undefined")
    r = rank(G)
    if r < k:
        raise RankDeficient(r, k)
    best = G.n_cols + 1
    if workers <= 1 or k < 8:
        return _gray_walk_min(G.rows, 0, best)
    split = min(k - 4, max(1, (workers - 1).bit_length() + 2))
    low, high = G.rows[: k - split], G.rows[k - split :]
    tasks = [(low, base, best) for base in _prefix_bases(high)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return min(pool.map(_walk_chunk, tasks))


def weight_distribution(G: BinMatrix, *, max_dim: int = MAX_ENUMERATION_DIM) -> list[int]:
    """Weight enumerator of the code spanned by G: ``A[w]`` codewords of weight w."""
    k = G.n_rows
    if k > max_dim:
        raise TooLarge(f"k={k} exceeds the brute-force budget of {max_dim}")
    counts = [0] * (G.n_cols + 1)
    counts[0] = 1
    w = 0
    rows = G.rows
    for i in range(1, 1 << k):
        w ^= rows[(i & -i).bit_length() - 1]
        counts[w.bit_count()] += 1
    return counts
