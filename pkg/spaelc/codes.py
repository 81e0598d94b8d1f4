"""
Code constructions, alist/JSON I/O and parity-check matrix reduction.

The extended quadratic residue (EQR) family is built from first principles:
the generator polynomial of the cyclic QR code is the product of
``(x - alpha^r)`` over the quadratic residues ``r`` mod p, computed in
GF(2^m) with m the multiplicative order of 2 mod p.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
from tqdm import tqdm

from .errors import InconsistentDegrees, NotQrPrime, ParseError, RankDeficient
from .gf2 import BinMatrix, generator_from_h, min_distance, rank
from .tanner import TannerGraph
from .util import atomic_write_json, atomic_write_text

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Number theory


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def is_qr_prime(p: int) -> bool:
    """True iff p is an odd prime and 2 is a quadratic residue mod p."""
    return p > 2 and is_prime(p) and pow(2, (p - 1) // 2, p) == 1


def multiplicative_order(a: int, p: int) -> int:
    x, t = a % p, 1
    while x != 1:
        x = x * a % p
        t += 1
    return t


def smallest_primitive_root(p: int) -> int:
    for g in range(2, p):
        if multiplicative_order(g, p) == p - 1:
            return g
    raise ValueError(f"No primitive root mod {p}")


def quadratic_residues(p: int) -> list[int]:
    return sorted({r * r % p for r in range(1, p)})


# ---------------------------------------------------------------------------
# GF(2)[x] and GF(2^m), polynomials as bit-packed ints (bit i = coeff of x^i)


def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _pdivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= db:
        s = a.bit_length() - 1 - db
        q |= 1 << s
        a ^= b << s
    return q, a


def _pmod(a: int, b: int) -> int:
    return _pdivmod(a, b)[1]


def _pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, _pmod(a, b)
    return a


def _is_irreducible(f: int) -> bool:
    """Ben-Or test: gcd(f, x^(2^i) - x) = 1 for all i <= deg(f)/2."""
    m = f.bit_length() - 1
    h = 0b10  # x
    for _ in range(m // 2):
        h = _pmod(_clmul(h, h), f)
        if _pgcd(f, h ^ 0b10) != 1:
            return False
    return True


def find_irreducible(m: int) -> int:
    """Smallest irreducible polynomial of degree m over GF(2)."""
    for tail in range(1, 1 << m, 2):
        f = (1 << m) | tail
        if _is_irreducible(f):
            return f
    raise ValueError(f"No irreducible polynomial of degree {m}")


class GF2m:
    """GF(2^m) with a fixed irreducible modulus; table-free arithmetic."""

    def __init__(self, m: int, modulus: int | None = None):
        self.m = m
        self.modulus = modulus if modulus is not None else find_irreducible(m)
        self.order = (1 << m) - 1

    def mul(self, a: int, b: int) -> int:
        return _pmod(_clmul(a, b), self.modulus)

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def root_of_unity(self, p: int) -> int:
        """An element of multiplicative order p (p prime, p | 2^m - 1)."""
        if self.order % p:
            raise ValueError(f"{p} does not divide 2^{self.m} - 1")
        for beta in range(2, 1 << self.m):
            alpha = self.pow(beta, self.order // p)
            if alpha != 1:
                return alpha
        raise ValueError(f"No element of order {p} in GF(2^{self.m})")


# ---------------------------------------------------------------------------
# CodeSpec


@dataclass(frozen=True)
class CodeSpec:
    """A binary linear code given by a parity-check matrix.

    ``G`` is an optional structured generator matrix (e.g. cyclic shifts of
    the generator polynomial); when absent one is derived from H.
    """

    name: str
    n: int
    k: int
    H: BinMatrix
    d: int | None = None
    d_verified: bool = False
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)
    G: BinMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.H.n_cols != self.n:
            raise ValueError(f"H has {self.H.n_cols} columns, expected n={self.n}")
        r = rank(self.H)
        if r != self.n - self.k:
            raise ValueError(f"rank(H)={r} does not match n-k={self.n - self.k}")

    @property
    def rate(self) -> float:
        return self.k / self.n

    def generator(self) -> BinMatrix:
        if self.G is not None:
            return self.G
        return generator_from_h(_full_rank_rows(self.H))

    def with_verified_distance(self, workers: int = 1) -> "CodeSpec":
        d = min_distance(self.generator(), workers=workers)
        return replace(self, d=d, d_verified=True)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "d_verified": self.d_verified,
            "H": self.H.row_hex(),
            "G": self.G.row_hex() if self.G is not None else None,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "CodeSpec":
        H = BinMatrix.from_row_hex(obj["H"], obj["n"])
        G = obj.get("G")
        return cls(
            name=obj["name"],
            n=obj["n"],
            k=obj["k"],
            H=H,
            d=obj.get("d"),
            d_verified=bool(obj.get("d_verified", False)),
            provenance=obj.get("provenance", {}),
            G=BinMatrix.from_row_hex(G, obj["n"]) if G is not None else None,
        )


def _full_rank_rows(H: BinMatrix) -> BinMatrix:
    """Drop dependent rows of H (keeps the first independent ones)."""
    kept, basis = [], {}
    for row in H.rows:
        v = row
        while v:
            lead = v.bit_length() - 1
            if lead not in basis:
                basis[lead] = v
                kept.append(row)
                break
            v ^= basis[lead]
    return BinMatrix(len(kept), H.n_cols, tuple(kept))


def save_code_json(code: CodeSpec, path: str | Path) -> Path:
    return atomic_write_json(path, code.to_json())


def load_code_json(path: str | Path) -> CodeSpec:
    with open(path, encoding="utf-8") as f:
        obj = json.load(f)
    code = CodeSpec.from_json(obj)
    return replace(code, provenance={"kind": "loaded", "path": str(path)})


# ---------------------------------------------------------------------------
# Constructions


def qr_code(p: int) -> CodeSpec:
    """Cyclic quadratic residue code of prime length p and dimension (p+1)/2.

    Raises:
        NotQrPrime: if p is not an odd prime with 2 a quadratic residue mod p.
    """
    if not is_qr_prime(p):
        raise NotQrPrime(p)
    m = multiplicative_order(2, p)
    field_ = GF2m(m)
    alpha = field_.root_of_unity(p)

    # g(x) = prod_{r in Q} (x + alpha^r), coefficients in GF(2^m), low degree first
    coeffs = [1]
    for r in quadratic_residues(p):
        root = field_.pow(alpha, r)
        shifted = [0] + coeffs
        for i, c in enumerate(coeffs):
            shifted[i] ^= field_.mul(root, c)
        coeffs = shifted
    if any(c not in (0, 1) for c in coeffs):
        raise RuntimeError(f"Generator polynomial for p={p} is not binary")
    g = sum(c << i for i, c in enumerate(coeffs))

    h, remainder = _pdivmod((1 << p) | 1, g)
    if remainder:
        raise RuntimeError(f"g(x) does not divide x^{p} - 1")
    k = p - (g.bit_length() - 1)
    h_rev = int(format(h, f"0{k + 1}b")[::-1], 2)
    H = BinMatrix(p - k, p, tuple(h_rev << i for i in range(p - k)))
    G = BinMatrix(k, p, tuple(g << i for i in range(k)))
    logger.debug("QR%d: m=%d, modulus=%#x, g=%#x", p, m, field_.modulus, g)
    return CodeSpec(
        name=f"QR{p}",
        n=p,
        k=k,
        H=H,
        provenance={"kind": "constructed", "family": "qr", "p": p, "g": format(g, "x")},
        G=G,
    )


def extend(code: CodeSpec) -> CodeSpec:
    """Append an overall parity coordinate; every codeword becomes even."""
    n = code.n
    all_ones = (1 << (n + 1)) - 1
    H = BinMatrix(code.H.n_rows + 1, n + 1, code.H.rows + (all_ones,))
    G = code.generator()
    G_ext = BinMatrix(
        G.n_rows, n + 1, tuple(r | ((r.bit_count() & 1) << n) for r in G.rows)
    )
    d = None if code.d is None else code.d + (code.d & 1)
    return CodeSpec(
        name=f"{code.name}-ext",
        n=n + 1,
        k=code.k,
        H=H,
        d=d,
        d_verified=code.d_verified,
        provenance={"kind": "extended", "from": code.name, **_origin(code)},
        G=G_ext,
    )


def _origin(code: CodeSpec) -> dict[str, Any]:
    return {k: v for k, v in code.provenance.items() if k in ("family", "p")}


_EQR_NAMES = {23: "Golay24", 47: "EQR48", 103: "EQR104"}


def eqr_code(p: int, initial: str = "generator") -> CodeSpec:
    """Extended QR code of length p+1.

    With ``initial="generator"`` and a self-dual result, the parity-check
    matrix is the extended cyclic generator matrix (rows x^i g(x) plus
    parity); otherwise it is the extended cyclic parity-check matrix.
    """
    if initial not in ("generator", "parity"):
        raise ValueError(f"Unknown initial matrix choice: {initial!r}")
    code = extend(qr_code(p))
    name = _EQR_NAMES.get(p, f"EQR{p + 1}")
    G = code.generator()
    self_dual = 2 * code.k == code.n and G.matmul(G.transpose()).is_zero()
    if initial == "generator" and self_dual:
        code = replace(code, H=G)
    used = "generator" if (initial == "generator" and self_dual) else "parity"
    return replace(
        code,
        name=name,
        provenance={**code.provenance, "initial": used, "self_dual": self_dual},
    )


def hamming_code(r: int) -> CodeSpec:
    """[2^r - 1, 2^r - 1 - r, 3] Hamming code, columns = all nonzero r-bit vectors."""
    n = (1 << r) - 1
    cols = list(range(1, n + 1))
    rows = tuple(sum(((c >> i) & 1) << j for j, c in enumerate(cols)) for i in range(r))
    return CodeSpec(
        name=f"Hamming{n}",
        n=n,
        k=n - r,
        H=BinMatrix(r, n, rows),
        d=3,
        d_verified=True,
        provenance={"kind": "constructed", "family": "hamming", "r": r},
    )


def extended_hamming() -> CodeSpec:
    """The [8, 4, 4] extended Hamming code."""
    return replace(extend(hamming_code(3)), name="ExtHamming8")


def random_code(n: int, k: int, rng: np.random.Generator) -> CodeSpec:
    """Random [n, k] code with a dense full-rank parity-check matrix."""
    m = n - k
    while True:
        H = BinMatrix.from_array(rng.integers(0, 2, size=(m, n)))
        if rank(H) == m:
            return CodeSpec(
                name=f"random{n}_{k}",
                n=n,
                k=k,
                H=H,
                provenance={"kind": "constructed", "family": "random"},
            )


# ---------------------------------------------------------------------------
# alist


def format_alist(H: BinMatrix) -> str:
    """MacKay alist text for H (index lists 1-based, zero padded)."""
    m, n = H.shape
    cols = H.columns()
    col_lists = [[i + 1 for i in range(m) if (c >> i) & 1] for c in cols]
    row_lists = [[j + 1 for j in range(n) if (r >> j) & 1] for r in H.rows]
    max_col = max((len(c) for c in col_lists), default=0)
    max_row = max((len(r) for r in row_lists), default=0)

    def padded(lst, width):
        return " ".join(str(x) for x in lst + [0] * (width - len(lst)))

    lines = [
        f"{n} {m}",
        f"{max_col} {max_row}",
        " ".join(str(len(c)) for c in col_lists),
        " ".join(str(len(r)) for r in row_lists),
    ]
    lines += [padded(c, max_col) for c in col_lists]
    lines += [padded(r, max_row) for r in row_lists]
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> BinMatrix:
    """Parse MacKay alist text into a BinMatrix.

    Raises:
        ParseError: malformed or truncated input (with line number).
        InconsistentDegrees: degree lists and index lists disagree.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        try:
            lines.append((lineno, [int(t) for t in tokens]))
        except ValueError:
            raise ParseError(f"non-integer token in {raw.strip()!r}", lineno)
    last_line = len(text.splitlines())
    pos = 0

    def take(count: int | None, what: str) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}", last_line + 1)
        lineno, values = lines[pos]
        pos += 1
        if count is not None and len(values) != count:
            raise ParseError(f"expected {count} values for {what}, got {len(values)}", lineno)
        return lineno, values

    lineno, (n, m) = take(2, "'n m'")
    if n <= 0 or m <= 0:
        raise ParseError(f"invalid dimensions n={n}, m={m}", lineno)
    _, (max_col, max_row) = take(2, "maximum degrees")
    _, col_deg = take(n, "column degrees")
    _, row_deg = take(m, "row degrees")

    from_cols = [0] * m
    for j in range(n):
        lineno, entries = take(None, f"column {j + 1} list")
        idx = [e for e in entries if e != 0]
        if len(idx) != col_deg[j] or len(set(idx)) != len(idx):
            raise InconsistentDegrees(f"line {lineno}: column {j + 1} degree mismatch")
        for i in idx:
            if not 1 <= i <= m:
                raise InconsistentDegrees(f"line {lineno}: row index {i} outside 1..{m}")
            from_cols[i - 1] |= 1 << j

    from_rows = [0] * m
    for i in range(m):
        lineno, entries = take(None, f"row {i + 1} list")
        idx = [e for e in entries if e != 0]
        if len(idx) != row_deg[i] or len(set(idx)) != len(idx):
            raise InconsistentDegrees(f"line {lineno}: row {i + 1} degree mismatch")
        for j in idx:
            if not 1 <= j <= n:
                raise InconsistentDegrees(f"line {lineno}: column index {j} outside 1..{n}")
            from_rows[i] |= 1 << (j - 1)

    if from_rows != from_cols:
        raise InconsistentDegrees("row lists and column lists describe different matrices")
    if max(col_deg, default=0) != max_col or max(row_deg, default=0) != max_row:
        raise InconsistentDegrees("maximum degrees do not match the degree lists")
    return BinMatrix(m, n, tuple(from_rows))


def load_alist(path: str | Path, name: str | None = None) -> CodeSpec:
    path = Path(path)
    H = parse_alist(path.read_text(encoding="utf-8"))
    return CodeSpec(
        name=name or path.stem,
        n=H.n_cols,
        k=H.n_cols - rank(H),
        H=H,
        provenance={"kind": "loaded", "path": str(path)},
    )


def save_alist(code: CodeSpec, path: str | Path) -> Path:
    return atomic_write_text(path, format_alist(code.H))


# ---------------------------------------------------------------------------
# Weight / 4-cycle reduction


@dataclass(frozen=True)
class ReductionReport:
    initial_weight: int
    initial_cycles: int
    final_weight: int
    final_cycles: int
    moves: int
    restarts: int
    restricted_to_standard_form: bool

    def to_json(self) -> dict[str, Any]:
        return dict(self.__dict__)


def _score(rows) -> tuple[int, int]:
    w = sum(r.bit_count() for r in rows)
    c = 0
    for a in range(len(rows)):
        ra = rows[a]
        for b in range(a + 1, len(rows)):
            o = (ra & rows[b]).bit_count()
            c += o * (o - 1) // 2
    return w, c


def _cycle_delta(rows: list[int], i: int, new: int) -> int:
    old = rows[i]
    delta = 0
    for a, ra in enumerate(rows):
        if a == i:
            continue
        o_new = (new & ra).bit_count()
        o_old = (old & ra).bit_count()
        delta += o_new * (o_new - 1) // 2 - o_old * (o_old - 1) // 2
    return delta


def _descend_rows(rows: list[int], budget: int) -> tuple[list[int], int]:
    """Greedy row-addition descent on (weight, 4-cycles), lexicographic."""
    rows = list(rows)
    m = len(rows)
    used = 0
    improved = True
    while improved and used < budget:
        improved = False
        for i in range(m):
            ri = rows[i]
            wi = ri.bit_count()
            for j in range(m):
                if j == i:
                    continue
                if used >= budget:
                    return rows, used
                used += 1
                cand = ri ^ rows[j]
                dw = cand.bit_count() - wi
                if dw > 0 or (dw == 0 and _cycle_delta(rows, i, cand) >= 0):
                    continue
                rows[i] = ri = cand
                wi = ri.bit_count()
                improved = True
    return rows, used


def _random_information_set_basis(rows: list[int], n: int, rng) -> list[int]:
    """Re-basis the row space by elimination over a random column order."""
    rows = list(rows)
    m = len(rows)
    r = 0
    for c in rng.permutation(n):
        if r == m:
            break
        bit = 1 << int(c)
        pr = next((i for i in range(r, m) if rows[i] & bit), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        r += 1
    return rows


def _kick(rows: list[int], rng, count: int) -> list[int]:
    rows = list(rows)
    m = len(rows)
    for _ in range(count):
        i, j = rng.choice(m, size=2, replace=False)
        rows[i] ^= rows[j]
    return rows


def _greedy_basis(pool: set[int], m: int) -> list[int] | None:
    """Minimum-weight basis of span(pool) of size m, or None (matroid greedy)."""
    basis: dict[int, int] = {}
    chosen = []
    for v in sorted(pool, key=lambda x: (x.bit_count(), x)):
        w = v
        while w:
            lead = w.bit_length() - 1
            if lead not in basis:
                basis[lead] = w
                chosen.append(v)
                break
            w ^= basis[lead]
        if len(chosen) == m:
            return chosen
    return None


_POOL_CAP = 20000


def _trim_pool(pool: set[int]) -> set[int]:
    if len(pool) <= _POOL_CAP:
        return pool
    return set(sorted(pool, key=lambda x: (x.bit_count(), x))[:_POOL_CAP])


def reduce_weight(
    code: CodeSpec,
    *,
    restrict_standard_form: bool = False,
    budget: int = 100_000,
    rng: np.random.Generator | int | None = None,
    progress: bool = False,
) -> tuple[CodeSpec, ReductionReport]:
    """Search for a lighter parity-check matrix of the same code.

    The objective is lexicographic: weight first, then 4-cycles. ``budget``
    bounds the number of candidate moves evaluated. In unrestricted mode the
    moves are row additions; with ``restrict_standard_form`` they are ELC
    operations, so every visited matrix stays in standard form.

    Raises:
        RankDeficient: if H does not have full row rank.
    """
    H = code.H
    r = rank(H)
    if r < H.n_rows:
        raise RankDeficient(r, H.n_rows)
    rng = np.random.default_rng(rng)
    if restrict_standard_form:
        # measured from the standard form the search starts at
        H = TannerGraph.from_matrix(H).to_matrix()
    init_w, init_c = _score(H.rows)

    if restrict_standard_form:
        rows, moves, restarts = _reduce_with_elc(H, budget, rng, progress)
    else:
        rows, moves, restarts = _reduce_with_row_additions(H, budget, rng, progress)

    final_w, final_c = _score(rows)
    reduced_H = BinMatrix(H.n_rows, H.n_cols, tuple(rows))
    suffix = "reduced-ip" if restrict_standard_form else "reduced"
    reduced = replace(
        code,
        name=f"{code.name}-{suffix}",
        H=reduced_H,
        provenance={"kind": "reduced", "from": code.name, **_origin(code)},
    )
    report = ReductionReport(
        initial_weight=init_w,
        initial_cycles=init_c,
        final_weight=final_w,
        final_cycles=final_c,
        moves=moves,
        restarts=restarts,
        restricted_to_standard_form=restrict_standard_form,
    )
    logger.info(
        "%s: weight %d -> %d, 4-cycles %d -> %d (%d moves, %d restarts)",
        code.name, init_w, final_w, init_c, final_c, moves, restarts,
    )
    return reduced, report


def _reduce_with_row_additions(H: BinMatrix, budget: int, rng, progress: bool):
    m, n = H.shape
    best = list(H.rows)
    if m < 2 or budget <= 0:
        return best, 0, 0
    best, moves = _descend_rows(best, budget)
    best_score = _score(best)
    pool = set(best) | set(H.rows)
    restarts = 0
    bar = tqdm(total=budget, initial=moves, disable=not progress, desc="reduce")
    while moves < budget:
        restarts += 1
        phase = restarts % 3
        if phase == 0:
            start = _greedy_basis(pool, m) or _kick(best, rng, max(2, m // 4))
        elif phase == 1:
            start = _random_information_set_basis(best, n, rng)
            pool.update(start)
        else:
            start = _kick(best, rng, max(2, m // 4))
        rows, used = _descend_rows(start, budget - moves)
        moves += used
        bar.update(used)
        pool.update(rows)
        pool = _trim_pool(pool)
        score = _score(rows)
        if score < best_score:
            best, best_score = rows, score
            logger.debug("restart %d: weight %d, 4-cycles %d", restarts, *score)
    bar.close()
    return best, moves, restarts


def _reduce_with_elc(H: BinMatrix, budget: int, rng, progress: bool):
    tg = TannerGraph.from_matrix(H)
    best = list(tg.rows)
    best_score = _score(best)
    if budget <= 0:
        return best, 0, 0
    moves = 0
    restarts = 0
    bar = tqdm(total=budget, disable=not progress, desc="reduce-ip")
    while moves < budget:
        used = _descend_elc(tg, budget - moves)
        moves += used
        bar.update(used)
        score = _score(tg.rows)
        if score < best_score:
            best, best_score = list(tg.rows), score
        if moves >= budget or used == 0:
            break
        restarts += 1
        for _ in range(max(1, tg.m // 4)):
            edges = tg.eligible_edges()
            if not edges:
                break
            j, v = edges[rng.integers(len(edges))]
            tg.elc_inplace(j, v)
    bar.close()
    return best, moves, restarts


def _descend_elc(tg, budget: int) -> int:
    """First-improvement descent over ELC moves, in place on tg."""
    used = 0
    current = _score(tg.rows)
    improved = True
    while improved and used < budget:
        improved = False
        for j, v in tg.eligible_edges():
            if used >= budget:
                break
            used += 1
            record = tg.elc_inplace(j, v)
            score = _score(tg.rows)
            if score < current:
                current = score
                improved = True
                break
            tg.undo(record)
    return used
