"""
Tanner graphs of standard-form parity-check matrices, edge local
complementation (ELC), and ELC-orbit exploration.

ELC on the edge (check j, bit v) is carried out as a Gaussian pivot: every
other check containing v absorbs row j, and v becomes the unit column of
check j. The former unit column of j turns into an ordinary bit.
"""

import hashlib
import logging
import os
import pickle
import tempfile
from collections import deque
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Iterator

import numpy as np
from tqdm import tqdm

from .errors import NoSuchEdge, OrbitOverflow, PivotBit, TooLarge
from .gf2 import BinMatrix, _xor_basis_rank, rank, standard_form
from .util import DEBUG_CHECKS

logger = logging.getLogger(__name__)

# Largest n for which count_information_sets enumerates column subsets.
MAX_INFO_SET_N = 32


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class ElcRecord:
    """What one in-place ELC changed; enough to undo it."""

    check: int
    bit: int
    old_pivot: int
    touched: tuple[tuple[int, int], ...]  # (row index, previous row value)
    created: tuple[tuple[int, int], ...]  # (check, bit) incidences added
    deleted: tuple[tuple[int, int], ...]  # (check, bit) incidences removed


class TannerGraph:
    """Check/bit incidence of H, with the check to unit-bit pairing.

    ``rows[j]`` is the bit-packed row j of H. ``pairing[j]`` is the unit
    (pivot) column of check j, or ``pairing is None`` when the graph was
    built from a matrix that is not in standard form; such graphs can be
    decoded on but not ELC'd.
    """

    def __init__(self, n: int, rows: list[int], pairing: list[int] | None):
        self.n = n
        self.rows = list(rows)
        self.pairing = None if pairing is None else list(pairing)
        if self.pairing is not None and len(self.pairing) != len(self.rows):
            raise ValueError("pairing must name one unit column per check")

    @classmethod
    def from_matrix(cls, H: BinMatrix, *, standardize: bool = True) -> "TannerGraph":
        """Graph of H.

        An H already in standard form is kept as is. Otherwise, with
        ``standardize`` the graph of ``standard_form(H)`` is returned, and
        without it the graph of H itself, with no pairing.
        """
        pairing = _unit_columns(H)
        if pairing is None and standardize:
            R, info = standard_form(H)
            return cls(H.n_cols, list(R.rows), list(info.pivot_of_row))
        return cls(H.n_cols, list(H.rows), pairing)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def weight(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    @property
    def four_cycles(self) -> int:
        total = 0
        for a, b in combinations(self.rows, 2):
            o = (a & b).bit_count()
            total += o * (o - 1) // 2
        return total

    @property
    def is_standard_form(self) -> bool:
        return self.pairing is not None

    def to_matrix(self) -> BinMatrix:
        return BinMatrix(self.m, self.n, tuple(self.rows))

    def mask(self) -> np.ndarray:
        """(m, n) boolean incidence array."""
        return self.to_matrix().to_array().astype(bool)

    def copy(self) -> "TannerGraph":
        return TannerGraph(self.n, self.rows, self.pairing)

    def has_edge(self, j: int, v: int) -> bool:
        return bool((self.rows[j] >> v) & 1)

    def eligible_edges(self) -> list[tuple[int, int]]:
        """Incidences on which ELC may act: all except check/own-pivot pairs."""
        if self.pairing is None:
            return []
        return [
            (j, v)
            for j, row in enumerate(self.rows)
            for v in _bits(row)
            if v != self.pairing[j]
        ]

    def elc(self, j: int, v: int) -> "TannerGraph":
        """ELC on (j, v), returning a new graph."""
        out = self.copy()
        out.elc_inplace(j, v)
        return out

    def elc_inplace(self, j: int, v: int) -> ElcRecord:
        """ELC on (j, v) in place.

        Raises:
            NoSuchEdge: if bit v is not in check j.
            PivotBit: if v is the unit column of check j.
        """
        if self.pairing is None:
            raise ValueError("ELC needs a graph in standard form")
        if not self.has_edge(j, v):
            raise NoSuchEdge(f"check {j} does not contain bit {v}")
        old_pivot = self.pairing[j]
        if v == old_pivot:
            raise PivotBit(f"bit {v} is the unit column of check {j}")
        row_j = self.rows[j]
        bit_v = 1 << v
        touched, created, deleted = [], [], []
        for i, old in enumerate(self.rows):
            if i == j or not old & bit_v:
                continue
            touched.append((i, old))
            created.extend((i, c) for c in _bits(row_j & ~old))
            deleted.extend((i, c) for c in _bits(row_j & old))
            self.rows[i] = old ^ row_j
        self.pairing[j] = v
        if DEBUG_CHECKS:
            self.check_standard_form()
        return ElcRecord(j, v, old_pivot, tuple(touched), tuple(created), tuple(deleted))

    def undo(self, record: ElcRecord) -> None:
        for i, old in record.touched:
            self.rows[i] = old
        self.pairing[record.check] = record.old_pivot

    def check_standard_form(self) -> None:
        """Assert every check's unit column belongs to that check alone."""
        assert self.pairing is not None, "graph has no pairing"
        for j, p in enumerate(self.pairing):
            holders = [i for i, r in enumerate(self.rows) if (r >> p) & 1]
            assert holders == [j], f"column {p} is not a unit column of check {j}"

    def labeled_key(self) -> bytes:
        """Check-order independent key: sorted rows as bytes."""
        nbytes = (self.n + 7) // 8
        return b"".join(r.to_bytes(nbytes, "little") for r in sorted(self.rows))

    def _state(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(self.rows), tuple(self.pairing)

    @classmethod
    def _from_state(cls, n: int, state) -> "TannerGraph":
        rows, pairing = state
        return cls(n, list(rows), list(pairing))

    def __eq__(self, other):
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows and self.pairing == other.pairing

    def __repr__(self):
        return f"TannerGraph(n={self.n}, m={self.m}, weight={self.weight})"


def _unit_columns(H: BinMatrix) -> list[int] | None:
    """For each row, its smallest unit column; None if some row has none."""
    cols = H.columns()
    pairing = []
    for j in range(H.n_rows):
        unit = 1 << j
        c = next((c for c, col in enumerate(cols) if col == unit), None)
        if c is None:
            return None
        pairing.append(c)
    return pairing


# ---------------------------------------------------------------------------
# Information sets and the labeled orbit


def count_information_sets(H: BinMatrix) -> int:
    """Number of rank(H)-subsets of columns on which H has full rank.

    Raises:
        TooLarge: if n > 32.
    """
    n = H.n_cols
    if n > MAX_INFO_SET_N:
        raise TooLarge(f"n={n} exceeds the information-set enumeration limit")
    r = rank(H)
    cols = H.columns()
    return sum(1 for S in combinations(cols, r) if _xor_basis_rank(S) == r)


class _SpillingQueue:
    """FIFO that keeps at most ``threshold`` pending items in memory.

    Overflowing items go to pickled chunk files in a temp directory.
    """

    def __init__(self, threshold: int = 100_000):
        self.threshold = threshold
        self._head: deque = deque()
        self._tail: list = []
        self._chunks: deque[str] = deque()
        self._tmpdir: tempfile.TemporaryDirectory | None = None
        self._size = 0
        self._spilled = 0

    def __len__(self):
        return self._size

    def append(self, item) -> None:
        self._tail.append(item)
        self._size += 1
        if len(self._tail) >= self.threshold:
            if self._tmpdir is None:
                self._tmpdir = tempfile.TemporaryDirectory(prefix="spaelc-bfs-")
            path = os.path.join(self._tmpdir.name, f"chunk{self._spilled}")
            self._spilled += 1
            with open(path, "wb") as f:
                pickle.dump(self._tail, f)
            self._chunks.append(path)
            self._tail = []

    def popleft(self):
        if not self._head:
            if self._chunks:
                path = self._chunks.popleft()
                with open(path, "rb") as f:
                    self._head = deque(pickle.load(f))
                os.unlink(path)
            else:
                self._head = deque(self._tail)
                self._tail = []
        self._size -= 1
        return self._head.popleft()

    def close(self) -> None:
        if self._tmpdir is not None:
            self._tmpdir.cleanup()
            self._tmpdir = None


def labeled_orbit_size(
    tg: TannerGraph, cap: int = 1_000_000, *, spill_threshold: int = 100_000
) -> int:
    """Number of distinct graphs reachable from tg by ELC sequences.

    Graphs are identified by their row sets (check order ignored).

    Raises:
        OrbitOverflow: when more than ``cap`` graphs are found; ``partial``
            is the count at that point.
    """
    start = tg.copy()
    seen = {start.labeled_key()}
    if len(seen) > cap:
        raise OrbitOverflow(cap, partial=len(seen))
    queue = _SpillingQueue(spill_threshold)
    queue.append(start._state())
    try:
        while queue:
            g = TannerGraph._from_state(tg.n, queue.popleft())
            for j, v in g.eligible_edges():
                record = g.elc_inplace(j, v)
                key = g.labeled_key()
                if key not in seen:
                    if len(seen) >= cap:
                        raise OrbitOverflow(cap, partial=len(seen))
                    seen.add(key)
                    queue.append(g._state())
                g.undo(record)
    finally:
        queue.close()
    return len(seen)


# ---------------------------------------------------------------------------
# Canonical form


@dataclass(frozen=True)
class StructureId:
    """Isomorphism class of a check/bit incidence (checks and bits kept apart)."""

    canonical: bytes
    weight: int
    four_cycles: int
    multiplicity: int = field(default=0, compare=False)

    @property
    def canonical_hash(self) -> str:
        return hashlib.sha256(self.canonical).hexdigest()

    def to_json(self) -> dict[str, Any]:
        return {
            "canonical_hash": self.canonical_hash,
            "weight": self.weight,
            "four_cycles": self.four_cycles,
            "multiplicity": self.multiplicity,
        }


class _Canonizer:
    """Individualization-refinement canonical labeling of a bipartite incidence.

    Vertices 0..m-1 are checks, m..m+n-1 are bits. The search keeps the leaf
    with the smallest (trace sequence, encoding) key. Two leaves with equal
    encodings give an automorphism, used to skip equivalent children.
    """

    def __init__(self, rows: list[int], n: int):
        self.rows = rows
        self.m = len(rows)
        self.n = n
        self.cols = [0] * n
        for j, r in enumerate(rows):
            for c in _bits(r):
                self.cols[c] |= 1 << j
        self.best_key = None
        self.best_order = None
        self.first_enc = None
        self.first_order = None
        self.automorphisms: list[list[int]] = []

    # -- refinement ---------------------------------------------------------

    def _signatures(self, cells):
        m = self.m
        check_masks, bit_masks = [], []
        for cell in cells:
            mask = 0
            if cell[0] < m:
                for j in cell:
                    mask |= 1 << j
                check_masks.append(mask)
            else:
                for b in cell:
                    mask |= 1 << (b - m)
                bit_masks.append(mask)
        sig = {}
        for cell in cells:
            if cell[0] < m:
                for j in cell:
                    r = self.rows[j]
                    sig[j] = tuple((r & bm).bit_count() for bm in bit_masks)
            else:
                for b in cell:
                    c = self.cols[b - m]
                    sig[b] = tuple((c & cm).bit_count() for cm in check_masks)
        return sig

    def refine(self, cells: list[list[int]]) -> tuple[list[list[int]], tuple]:
        while True:
            sig = self._signatures(cells)
            new_cells = []
            for cell in cells:
                if len(cell) == 1:
                    new_cells.append(cell)
                    continue
                groups: dict[tuple, list[int]] = {}
                for x in cell:
                    groups.setdefault(sig[x], []).append(x)
                for s in sorted(groups):
                    new_cells.append(groups[s])
            if len(new_cells) == len(cells):
                trace = tuple((len(c), sig[c[0]]) for c in new_cells)
                return new_cells, trace
            cells = new_cells

    # -- leaves -------------------------------------------------------------

    def encode(self, cells: list[list[int]]) -> tuple[bytes, list[int]]:
        m, n = self.m, self.n
        order = [c[0] for c in cells]
        bit_pos = {b - m: i for i, b in enumerate(order[m:])}
        nbytes = (n + 7) // 8
        parts = [m.to_bytes(4, "big"), n.to_bytes(4, "big")]
        for j in order[:m]:
            r = 0
            for c in _bits(self.rows[j]):
                r |= 1 << (n - 1 - bit_pos[c])
            parts.append(r.to_bytes(nbytes, "big"))
        return b"".join(parts), order

    def _record_automorphism(self, order_a: list[int], order_b: list[int]) -> None:
        gamma = [0] * (self.m + self.n)
        for a, b in zip(order_a, order_b):
            gamma[a] = b
        if any(g != i for i, g in enumerate(gamma)):
            self.automorphisms.append(gamma)

    # -- search -------------------------------------------------------------

    def _orbit_reps(self, cell: list[int], fixed: list[int]) -> Iterator[int]:
        """Cell members, skipping any in the orbit of an earlier one.

        Uses the automorphisms found so far that fix ``fixed`` pointwise;
        the list can grow while children are explored.
        """
        explored: list[int] = []
        for w in cell:
            parent = {x: x for x in cell}

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for gamma in self.automorphisms:
                if all(gamma[f] == f for f in fixed):
                    for x in cell:
                        rx, ry = find(x), find(gamma[x])
                        if rx != ry:
                            parent[rx] = ry
            if any(find(w) == find(e) for e in explored):
                continue
            explored.append(w)
            yield w

    def search(self, cells: list[list[int]], traces: tuple, fixed: list[int]) -> None:
        if self.best_key is not None:
            prefix = self.best_key[0][: len(traces)]
            if traces > prefix:
                return
        target = next((c for c in cells if len(c) > 1), None)
        if target is None:
            enc, order = self.encode(cells)
            key = (traces, enc)
            if self.first_enc is None:
                self.first_enc, self.first_order = key, order
            elif key == self.first_enc:
                self._record_automorphism(order, self.first_order)
            if self.best_key is None or key < self.best_key:
                self.best_key, self.best_order = key, order
            elif key == self.best_key:
                self._record_automorphism(order, self.best_order)
            return
        t = cells.index(target)
        for w in self._orbit_reps(target, fixed):
            rest = [x for x in target if x != w]
            child = cells[:t] + [[w], rest] + cells[t + 1 :]
            child, trace = self.refine(child)
            self.search(child, traces + (trace,), fixed + [w])

    def run(self) -> bytes:
        cells = [list(range(self.m)), list(range(self.m, self.m + self.n))]
        cells = [c for c in cells if c]
        cells, trace = self.refine(cells)
        self.search(cells, (trace,), [])
        return self.best_key[1]


def canonical_form(tg: TannerGraph) -> StructureId:
    """Canonical encoding of tg's incidence up to check and bit relabeling."""
    canon = _Canonizer(list(tg.rows), tg.n).run()
    return StructureId(canonical=canon, weight=tg.weight, four_cycles=tg.four_cycles)


# ---------------------------------------------------------------------------
# s-orbit


class _StructureTable:
    """Structures keyed by canonical hash, verified on the full bytes."""

    def __init__(self):
        self._by_hash: dict[str, list[int]] = {}
        self.entries: list[list] = []  # [StructureId, representative state, multiplicity]

    def __len__(self):
        return len(self.entries)

    def find(self, sid: StructureId) -> int | None:
        for idx in self._by_hash.get(sid.canonical_hash, ()):
            if self.entries[idx][0].canonical == sid.canonical:
                return idx
        return None

    def add(self, sid: StructureId, state) -> int:
        idx = len(self.entries)
        self.entries.append([sid, state, 0])
        self._by_hash.setdefault(sid.canonical_hash, []).append(idx)
        return idx

    def structures(self) -> list[StructureId]:
        return [replace(sid, multiplicity=mult) for sid, _, mult in self.entries]


def s_orbit(tg: TannerGraph, cap: int = 1000, *, progress: bool = False) -> list[StructureId]:
    """Structurally distinct graphs in the ELC-orbit of tg.

    Breadth-first over structures: from each structure's representative,
    ELC on every eligible edge, canonicalize, keep what is new.
    ``multiplicity`` counts the explored ELC edges landing on a structure.

    Raises:
        OrbitOverflow: when more than ``cap`` structures are found;
            ``partial`` is the list found so far.
    """
    table = _StructureTable()
    start = tg.copy()
    table.add(canonical_form(start), start._state())
    queue = deque([0])
    bar = tqdm(desc="s-orbit", unit="structure", disable=not progress)
    while queue:
        g = TannerGraph._from_state(tg.n, table.entries[queue.popleft()][1])
        for j, v in g.eligible_edges():
            record = g.elc_inplace(j, v)
            sid = canonical_form(g)
            idx = table.find(sid)
            if idx is None:
                if len(table) >= cap:
                    g.undo(record)
                    raise OrbitOverflow(cap, partial=table.structures())
                idx = table.add(sid, g._state())
                queue.append(idx)
                logger.debug("structure %d: weight %d, 4-cycles %d", idx, sid.weight, sid.four_cycles)
            table.entries[idx][2] += 1
            g.undo(record)
        bar.update(1)
    bar.close()
    return table.structures()


def orbit_report(structures: list[StructureId]) -> list[dict[str, Any]]:
    """JSON-ready s-orbit report, lightest structures first."""
    ordered = sorted(structures, key=lambda s: (s.weight, s.four_cycles, s.canonical))
    return [s.to_json() for s in ordered]
