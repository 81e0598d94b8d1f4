"""
Tests for GF(2) matrices, elimination and codeword enumeration.
"""

import numpy as np
import pytest


HAMMING7_H = [
    [1, 0, 1, 0, 1, 0, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
]


def test_array_conversion_preserves_entries():
    from spaelc.gf2 import BinMatrix

    arr = np.array(HAMMING7_H, dtype=np.uint8)
    M = BinMatrix.from_array(arr)
    assert M.shape == (3, 7)
    assert M[0, 0] == 1 and M[0, 1] == 0 and M[2, 6] == 1
    assert M.weight == 12
    np.testing.assert_array_equal(M.to_array(), arr)


def test_invalid_rows_are_rejected():
    from spaelc.gf2 import BinMatrix

    with pytest.raises(ValueError):
        BinMatrix(1, 3, (0b1000,))
    with pytest.raises(ValueError):
        BinMatrix.from_array([[0, 2]])


def test_transpose_and_matmul():
    from spaelc.gf2 import BinMatrix

    H = BinMatrix.from_array(HAMMING7_H)
    assert H.transpose().transpose() == H
    I = BinMatrix.identity(7)
    assert H.matmul(I) == H
    HHt = H.matmul(H.transpose()).to_array()
    expected = (np.array(HAMMING7_H) @ np.array(HAMMING7_H).T) % 2
    np.testing.assert_array_equal(HHt, expected)


def test_rank_and_rref():
    from spaelc.gf2 import BinMatrix, rank, rref

    H = BinMatrix.from_array(HAMMING7_H)
    assert rank(H) == 3
    dependent = H.vstack(BinMatrix(1, 7, (H.rows[0] ^ H.rows[1],)))
    assert rank(dependent) == 3
    R, r, pivots = rref(dependent)
    assert r == 3
    assert pivots == [0, 1, 3]
    assert R.rows[3] == 0


def test_standard_form_has_unit_columns():
    from spaelc.gf2 import BinMatrix, row_space_equal, standard_form

    H = BinMatrix.from_array(HAMMING7_H)
    R, info = standard_form(H)
    assert row_space_equal(H, R)
    cols = R.columns()
    for j, p in enumerate(info.pivot_of_row):
        assert cols[p] == 1 << j
    assert sorted(info.pivot_of_row + info.info_cols) == list(range(7))


def test_rref_is_idempotent(rng):
    from spaelc.gf2 import BinMatrix, rref

    for _ in range(50):
        M = BinMatrix.from_array(rng.integers(0, 2, size=(8, 14)))
        R, r, pivots = rref(M)
        again, r2, pivots2 = rref(R)
        assert again == R
        assert (r2, pivots2) == (r, pivots)


def test_standard_form_small_example():
    from spaelc.gf2 import BinMatrix, standard_form

    R, info = standard_form(BinMatrix.from_array([[1, 1, 0], [0, 1, 1]]))
    np.testing.assert_array_equal(R.to_array(), [[1, 0, 1], [0, 1, 1]])
    assert info.pivot_of_row == (0, 1)
    assert info.info_cols == (2,)


def test_standard_form_on_random_full_rank_matrices(rng):
    from spaelc.gf2 import BinMatrix, rank, row_space_equal, standard_form

    checked = 0
    while checked < 100:
        H = BinMatrix.from_array(rng.integers(0, 2, size=(12, 24)))
        if rank(H) < 12:
            continue
        R, info = standard_form(H)
        assert row_space_equal(R, H)
        arr = R.to_array()
        for j, p in enumerate(info.pivot_of_row):
            expected = np.zeros(12, dtype=np.uint8)
            expected[j] = 1
            np.testing.assert_array_equal(arr[:, p], expected)
        assert sorted(info.pivot_of_row + info.info_cols) == list(range(24))
        checked += 1


def _naive_four_cycles(arr):
    """Closed walks r1 - c1 - r2 - c2 with r1 < r2 and c1 < c2."""
    m, n = arr.shape
    count = 0
    for r1 in range(m):
        for r2 in range(r1 + 1, m):
            for c1 in range(n):
                for c2 in range(c1 + 1, n):
                    if arr[r1, c1] and arr[r1, c2] and arr[r2, c1] and arr[r2, c2]:
                        count += 1
    return count


def test_four_cycles_matches_enumeration(rng):
    from spaelc.gf2 import BinMatrix, four_cycles

    for shape in [(8, 16), (16, 8), (5, 11), (8, 8)]:
        for density in (0.3, 0.6):
            arr = (rng.random(shape) < density).astype(np.uint8)
            assert four_cycles(BinMatrix.from_array(arr)) == _naive_four_cycles(arr)


def test_standard_form_needs_full_rank():
    from spaelc.errors import RankDeficient
    from spaelc.gf2 import BinMatrix, standard_form

    H = BinMatrix.from_rows([0b011, 0b011], 3)
    with pytest.raises(RankDeficient) as excinfo:
        standard_form(H)
    assert excinfo.value.rank == 1


def test_generator_is_orthogonal_to_h():
    from spaelc.gf2 import BinMatrix, generator_from_h, rank

    H = BinMatrix.from_array(HAMMING7_H)
    G = generator_from_h(H)
    assert G.shape == (4, 7)
    assert rank(G) == 4
    assert G.matmul(H.transpose()).is_zero()


def test_four_cycles_counts_all_one_submatrices():
    from spaelc.gf2 import BinMatrix, four_cycles

    assert four_cycles(BinMatrix.from_array(np.ones((2, 3), dtype=np.uint8))) == 3
    assert four_cycles(BinMatrix.from_array(np.ones((3, 3), dtype=np.uint8))) == 9
    assert four_cycles(BinMatrix.identity(5)) == 0
    # more rows than columns goes through the column pairs
    assert four_cycles(BinMatrix.from_array(np.ones((4, 2), dtype=np.uint8))) == 6


def test_hamming_distance_and_weights():
    from spaelc.gf2 import BinMatrix, generator_from_h, min_distance, weight_distribution

    G = generator_from_h(BinMatrix.from_array(HAMMING7_H))
    assert min_distance(G) == 3
    assert weight_distribution(G) == [1, 0, 0, 7, 7, 0, 0, 1]


def test_min_distance_budget():
    from spaelc.errors import TooLarge
    from spaelc.gf2 import BinMatrix, min_distance

    with pytest.raises(TooLarge):
        min_distance(BinMatrix.identity(5), max_dim=4)


def test_min_distance_does_not_depend_on_workers(golay):
    from spaelc.gf2 import min_distance

    G = golay.generator()
    assert min_distance(G) == 8
    assert min_distance(G, workers=2) == 8


def test_row_hex_round_trip():
    from spaelc.gf2 import BinMatrix

    H = BinMatrix.from_array(HAMMING7_H)
    assert BinMatrix.from_row_hex(H.row_hex(), 7) == H


if __name__ == "__main__":
    pytest.main([__file__])
