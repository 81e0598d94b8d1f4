"""
Tests for ELC on Tanner graphs, orbit exploration and canonical forms.

ELC is checked against a networkx rendition of edge local complementation
on the bipartite graph between unit (pivot) bits and the other bits.
"""

import networkx as nx
import numpy as np
import pytest


def _random_graph(n, k, rng):
    """Standard-form graph of a random [n, k] code with distinct columns."""
    from spaelc.codes import random_code
    from spaelc.tanner import TannerGraph

    while True:
        code = random_code(n, k, rng)
        cols = code.H.columns()
        if len(set(cols)) == n and 0 not in cols:
            return code, TannerGraph.from_matrix(code.H)


def _pivot_graph(tg):
    """Bipartite graph on bit indices: pivot bit of each check -- its other bits."""
    B = nx.Graph()
    B.add_nodes_from(range(tg.n))
    for j, row in enumerate(tg.rows):
        p = tg.pairing[j]
        for b in range(tg.n):
            if (row >> b) & 1 and b != p:
                B.add_edge(p, b)
    return B


def _reference_elc(tg, j, v):
    """Rows after ELC on (j, v), computed by complementing edges in networkx."""
    B = _pivot_graph(tg)
    u = tg.pairing[j]
    left = set(B[u]) - {v}
    right = set(B[v]) - {u}
    for a in left:
        for b in right:
            if B.has_edge(a, b):
                B.remove_edge(a, b)
            else:
                B.add_edge(a, b)
    B = nx.relabel_nodes(B, {u: v, v: u})
    pairing = list(tg.pairing)
    pairing[j] = v
    rows = []
    for q in pairing:
        row = 1 << q
        for b in B[q]:
            row |= 1 << b
        rows.append(row)
    return rows, pairing


def _relabel(tg, row_order, bit_perm):
    from spaelc.tanner import TannerGraph

    rows = []
    for r in row_order:
        row = 0
        for b in range(tg.n):
            if (tg.rows[r] >> b) & 1:
                row |= 1 << int(bit_perm[b])
        rows.append(row)
    return TannerGraph(tg.n, rows, None)


def test_from_matrix_standardizes(golay):
    from spaelc.gf2 import row_space_equal
    from spaelc.tanner import TannerGraph

    tg = TannerGraph.from_matrix(golay.H)
    assert tg.is_standard_form
    tg.check_standard_form()
    assert row_space_equal(tg.to_matrix(), golay.H)
    assert TannerGraph.from_matrix(golay.H, standardize=False).to_matrix() == golay.H


def test_non_standard_matrix_without_standardizing():
    from spaelc.gf2 import BinMatrix
    from spaelc.tanner import TannerGraph

    H = BinMatrix.from_rows([0b111, 0b110], 3)
    raw = TannerGraph.from_matrix(H, standardize=False)
    assert not raw.is_standard_form
    assert raw.to_matrix() == H
    assert raw.eligible_edges() == []
    assert TannerGraph.from_matrix(H).pairing == [0, 1]


def _random_cases(rng, count, n=12, k=6, per_graph=25):
    """``count`` random (graph, check, bit) ELC cases over fresh random graphs."""
    cases = []
    while len(cases) < count:
        _, tg = _random_graph(n, k, rng)
        edges = tg.eligible_edges()
        picks = rng.choice(len(edges), size=min(per_graph, len(edges)), replace=False)
        cases += [(tg, *edges[i]) for i in picks]
    return cases[:count]


def test_elc_matches_reference(rng):
    for tg, j, v in _random_cases(rng, 1000):
        out = tg.elc(j, v)
        rows, pairing = _reference_elc(tg, j, v)
        assert out.rows == rows
        assert out.pairing == pairing


def test_elc_is_an_involution_and_keeps_the_code(rng):
    from spaelc.gf2 import row_space_equal

    for tg, j, v in _random_cases(rng, 1000):
        old_pivot = tg.pairing[j]
        once = tg.elc(j, v)
        once.check_standard_form()
        assert row_space_equal(once.to_matrix(), tg.to_matrix())
        assert once.elc(j, old_pivot) == tg


def test_elc_involution_on_extended_hamming(ext_hamming):
    from spaelc.tanner import TannerGraph

    tg = TannerGraph.from_matrix(ext_hamming.H)
    for j, v in tg.eligible_edges():
        old_pivot = tg.pairing[j]
        assert tg.elc(j, v).elc(j, old_pivot) == tg


def test_random_elc_walk_keeps_the_golay_code(golay, rng):
    from spaelc.gf2 import row_space_equal
    from spaelc.tanner import TannerGraph

    tg = TannerGraph.from_matrix(golay.H)
    for _ in range(50):
        edges = tg.eligible_edges()
        tg = tg.elc(*edges[rng.integers(len(edges))])
        assert tg.is_standard_form
    tg.check_standard_form()
    assert row_space_equal(tg.to_matrix(), golay.H)


def test_undo_restores_graph(rng):
    _, tg = _random_graph(10, 5, rng)
    before = tg.copy()
    for j, v in tg.eligible_edges():
        record = tg.elc_inplace(j, v)
        assert record.check == j and record.bit == v
        tg.undo(record)
        assert tg == before


def test_elc_record_lists_changed_incidences(rng):
    _, tg = _random_graph(10, 5, rng)
    j, v = tg.eligible_edges()[0]
    before = tg.mask()
    record = tg.elc_inplace(j, v)
    after = tg.mask()
    created = {(int(r), int(c)) for r, c in zip(*np.nonzero(after & ~before))}
    deleted = {(int(r), int(c)) for r, c in zip(*np.nonzero(before & ~after))}
    assert set(record.created) == created
    assert set(record.deleted) == deleted


def test_elc_rejects_bad_edges(ext_hamming):
    from spaelc.errors import NoSuchEdge, PivotBit
    from spaelc.tanner import TannerGraph

    tg = TannerGraph.from_matrix(ext_hamming.H)
    with pytest.raises(PivotBit):
        tg.elc(0, tg.pairing[0])
    missing = next(b for b in range(tg.n) if not tg.has_edge(0, b))
    with pytest.raises(NoSuchEdge):
        tg.elc(0, missing)
    raw = TannerGraph(tg.n, tg.rows, None)
    with pytest.raises(ValueError):
        raw.elc(0, tg.pairing[0])


def test_graph_metrics_match_matrix_functions(golay):
    from spaelc.gf2 import four_cycles
    from spaelc.tanner import TannerGraph

    tg = TannerGraph.from_matrix(golay.H)
    H = tg.to_matrix()
    assert tg.weight == H.weight
    assert tg.four_cycles == four_cycles(H)
    assert tg.mask().sum() == tg.weight


# ---------------------------------------------------------------------------
# orbits


def test_labeled_orbit_of_extended_hamming(ext_hamming):
    from spaelc.tanner import TannerGraph, count_information_sets, labeled_orbit_size

    tg = TannerGraph.from_matrix(ext_hamming.H)
    # 70 four-subsets minus the 14 supports of weight-4 codewords
    assert count_information_sets(ext_hamming.H) == 56
    assert labeled_orbit_size(tg) == 56


def test_labeled_orbit_counts_information_sets(rng):
    from spaelc.tanner import count_information_sets, labeled_orbit_size

    for _ in range(5):
        code, tg = _random_graph(10, 5, rng)
        assert labeled_orbit_size(tg) == count_information_sets(code.H)


def test_labeled_orbit_spills_to_disk(rng):
    from spaelc.tanner import count_information_sets, labeled_orbit_size

    code, tg = _random_graph(10, 5, rng)
    assert labeled_orbit_size(tg, spill_threshold=3) == count_information_sets(code.H)


def test_labeled_orbit_cap(ext_hamming):
    from spaelc.errors import OrbitOverflow
    from spaelc.tanner import TannerGraph, labeled_orbit_size

    with pytest.raises(OrbitOverflow) as excinfo:
        labeled_orbit_size(TannerGraph.from_matrix(ext_hamming.H), cap=10)
    assert excinfo.value.partial == 10
    assert excinfo.value.exit_code == 4


def test_information_set_enumeration_limit():
    from spaelc.errors import TooLarge
    from spaelc.gf2 import BinMatrix
    from spaelc.tanner import count_information_sets

    with pytest.raises(TooLarge):
        count_information_sets(BinMatrix.from_rows([1, 2], 33))


# ---------------------------------------------------------------------------
# canonical form and s-orbit


def test_canonical_form_ignores_labels(rng):
    from spaelc.tanner import canonical_form

    for n, k in ((8, 4), (12, 6), (14, 7)):
        _, tg = _random_graph(n, k, rng)
        sid = canonical_form(tg)
        for _ in range(3):
            other = _relabel(tg, rng.permutation(tg.m), rng.permutation(tg.n))
            assert canonical_form(other) == sid


def test_canonical_form_separates_structures():
    from spaelc.tanner import TannerGraph, canonical_form

    apart = TannerGraph(4, [0b0011, 0b1100], None)
    overlapping = TannerGraph(4, [0b0011, 0b0110], None)
    a, b = canonical_form(apart), canonical_form(overlapping)
    assert a.weight == b.weight == 4
    assert a != b
    assert a.canonical_hash != b.canonical_hash


def test_canonical_form_keeps_checks_and_bits_apart():
    from spaelc.tanner import TannerGraph, canonical_form

    # one check on three bits vs three checks on one bit
    star_check = TannerGraph(3, [0b111, 0, 0], None)
    star_bit = TannerGraph(3, [0b001, 0b001, 0b001], None)
    assert canonical_form(star_check) != canonical_form(star_bit)


def test_s_orbit_of_extended_hamming(ext_hamming):
    from spaelc.tanner import TannerGraph, orbit_report, s_orbit

    tg = TannerGraph.from_matrix(ext_hamming.H)
    structures = s_orbit(tg)
    assert len(structures) == 1
    assert structures[0].weight == 16
    assert structures[0].multiplicity == len(tg.eligible_edges()) == 12
    report = orbit_report(structures)
    assert report[0]["weight"] == 16
    assert len(report[0]["canonical_hash"]) == 64


def test_s_orbit_cap_returns_partial(rng):
    from spaelc.errors import OrbitOverflow
    from spaelc.tanner import s_orbit

    _, tg = _random_graph(12, 6, rng)
    try:
        full = s_orbit(tg)
    except OrbitOverflow:
        pytest.skip("orbit larger than the default cap")
    if len(full) < 2:
        pytest.skip("single-structure orbit")
    with pytest.raises(OrbitOverflow) as excinfo:
        s_orbit(tg, cap=1)
    assert len(excinfo.value.partial) == 1


def test_s_orbit_structures_are_distinct(rng):
    from spaelc.tanner import s_orbit

    _, tg = _random_graph(10, 5, rng)
    structures = s_orbit(tg)
    assert len({s.canonical for s in structures}) == len(structures)
    # every representative is expanded once, on each of its non-pivot incidences
    assert sum(s.multiplicity for s in structures) == sum(s.weight - tg.m for s in structures)


@pytest.mark.slow
def test_golay_s_orbit(golay):
    from spaelc.tanner import TannerGraph, s_orbit

    structures = s_orbit(TannerGraph.from_matrix(golay.H))
    weights = sorted(s.weight for s in structures)
    assert len(structures) == 2
    assert weights[0] == 96
    assert 96 < weights[1] <= 104


@pytest.mark.slow
def test_golay_canonical_form_ignores_labels(golay, rng):
    from spaelc.tanner import TannerGraph, canonical_form

    tg = TannerGraph.from_matrix(golay.H)
    other = _relabel(tg, rng.permutation(tg.m), rng.permutation(tg.n))
    assert canonical_form(other) == canonical_form(tg)


if __name__ == "__main__":
    pytest.main([__file__])
