import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faamp.measurement import (DegenerateColumnError, MatrixKind,
                               column_norms, demodulator_complex,
                               demodulator_stack, load_matrix,
                               make_accumulator, make_rademacher,
                               make_random_demodulator, save_matrix)


class TestRademacher:
    def test_paper_scale(self):
        m = make_rademacher(512, 205, np.random.default_rng(0))
        assert m.shape == (205, 512)
        np.testing.assert_allclose(np.abs(m.entries), 1 / np.sqrt(205))
        np.testing.assert_allclose(column_norms(m), 1.0, atol=1e-12)

    def test_one_by_one(self):
        m = make_rademacher(1, 1, np.random.default_rng(3))
        assert m.entries.shape == (1, 1)
        assert abs(m.entries[0, 0]) == 1.0

    def test_sign_balance(self):
        m = make_rademacher(512, 205, np.random.default_rng(17))
        n = m.entries.size
        frac_pos = np.count_nonzero(m.entries > 0) / n
        assert abs(frac_pos - 0.5) < 3 * np.sqrt(0.25 / n)

    def test_rejects_bad_shapes(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            make_rademacher(4, 5, rng)
        with pytest.raises(ValueError):
            make_rademacher(4, 0, rng)

    def test_seed_determinism(self):
        a = make_rademacher(32, 16, np.random.default_rng(5)).entries
        b = make_rademacher(32, 16, np.random.default_rng(5)).entries
        np.testing.assert_array_equal(a, b)


class TestAccumulator:
    def test_integer_case_w4(self):
        np.testing.assert_array_equal(make_accumulator(4, 2),
                                      [[1, 1, 0, 0], [0, 0, 1, 1]])

    def test_fractional_case_w3(self):
        np.testing.assert_allclose(make_accumulator(3, 2),
                                   [[1, 0.5, 0], [0, 0.5, 1]], atol=1e-15)

    def test_integer_case_w6(self):
        H = make_accumulator(6, 3)
        for r, cols in enumerate([(0, 1), (2, 3), (4, 5)]):
            row = np.zeros(6)
            row[list(cols)] = 1.0
            np.testing.assert_array_equal(H[r], row)

    @given(W=st.integers(1, 60), data=st.data())
    @settings(max_examples=80)
    def test_column_and_row_sums(self, W, data):
        Rp = data.draw(st.integers(1, W))
        H = make_accumulator(W, Rp)
        np.testing.assert_allclose(H.sum(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(H.sum(axis=1), W / Rp, atol=1e-12)
        assert np.all(H >= 0) and np.all(H <= 1 + 1e-15)

    def test_divisible_case_is_block_01(self):
        H = make_accumulator(12, 4)
        assert set(np.unique(H)) == {0.0, 1.0}
        for r in range(4):
            assert list(np.flatnonzero(H[r])) == [3 * r, 3 * r + 1, 3 * r + 2]

    def test_row_nonzeros_consecutive(self):
        H = make_accumulator(10, 3)
        for row in H:
            nz = np.flatnonzero(row)
            assert np.all(np.diff(nz) == 1)


class TestRandomDemodulator:
    def test_paper_scale_shape_and_norms(self):
        m = make_random_demodulator(512, 102, np.random.default_rng(0))
        assert m.shape == (204, 512)
        np.testing.assert_allclose(column_norms(m), 1.0, atol=1e-10)

    def test_dft_column_zero_is_signs(self):
        signs = np.array([1, -1, 1, -1])
        psi_c = demodulator_complex(4, 4, signs)
        # H is the identity at R' = W, and DFT column 0 is all ones
        np.testing.assert_allclose(psi_c[:, 0], signs.astype(complex), atol=1e-12)

    def test_degenerate_column_detected(self):
        # W=2 with equal signs: row of HDF is [2, 0], column 1 collapses
        signs = np.ones(2, dtype=int)
        psi = demodulator_stack(demodulator_complex(2, 1, signs))
        np.testing.assert_allclose(psi[:, 0], [2.0, 0.0], atol=1e-12)
        assert np.linalg.norm(psi[:, 1]) < 1e-12
        found = False
        for seed in range(64):
            rng = np.random.default_rng(seed)
            if np.all(rng.integers(0, 2, size=2) * 2 - 1 == 1):
                with pytest.raises(DegenerateColumnError):
                    make_random_demodulator(2, 1, np.random.default_rng(seed))
                found = True
                break
        assert found

    @pytest.mark.parametrize("W,Rp", [(8, 4), (16, 5), (64, 32), (60, 17)])
    def test_column_norms_various_sizes(self, W, Rp):
        m = make_random_demodulator(W, Rp, np.random.default_rng(W + Rp))
        np.testing.assert_allclose(column_norms(m), 1.0, atol=1e-10)

    @pytest.mark.parametrize("W,Rp", [(16, 8), (64, 32), (33, 11)])
    def test_stacking_matches_complex_product(self, W, Rp):
        m = make_random_demodulator(W, Rp, np.random.default_rng(2 * W + Rp))
        signs = m.meta["signs"]
        scale = m.meta["column_scale"]
        rng = np.random.default_rng(1)
        b = rng.choice([-1.0, 0.0, 1.0], size=W)
        psi_c = demodulator_complex(W, Rp, signs)
        y = psi_c @ (b / scale)
        np.testing.assert_allclose(m.entries @ b,
                                   np.concatenate([y.real, y.imag]), atol=1e-9)

    def test_seed_determinism(self):
        a = make_random_demodulator(32, 8, np.random.default_rng(9)).entries
        b = make_random_demodulator(32, 8, np.random.default_rng(9)).entries
        np.testing.assert_array_equal(a, b)

    def test_rejects_bad_rprime(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            make_random_demodulator(8, 0, rng)
        with pytest.raises(ValueError):
            make_random_demodulator(8, 9, rng)


class TestColumnNorms:
    def test_zero_matrix(self):
        from faamp.measurement import MeasurementMatrix
        m = MeasurementMatrix(entries=np.zeros((3, 4)), kind=MatrixKind.EXTERNAL)
        np.testing.assert_array_equal(column_norms(m), np.zeros(4))


class TestDump:
    def test_roundtrip(self, tmp_path):
        m = make_rademacher(16, 8, np.random.default_rng(4))
        m.meta["seed"] = 4
        path = tmp_path / "m.csv"
        save_matrix(m, path)
        back = load_matrix(path)
        np.testing.assert_allclose(back.entries, m.entries, atol=0)
        assert back.kind == MatrixKind.RADEMACHER
        assert back.meta["seed"] == 4

    def test_roundtrip_demodulator(self, tmp_path):
        m = make_random_demodulator(16, 4, np.random.default_rng(4))
        path = tmp_path / "m.csv"
        save_matrix(m, path)
        back = load_matrix(path)
        np.testing.assert_allclose(back.entries, m.entries, atol=0)
        assert back.meta["Rprime"] == 4
