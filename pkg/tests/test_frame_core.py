import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from phasestab import (
    ConvergenceError,
    DimensionMismatchError,
    Frame,
    SubsetMask,
    ValidationError,
    analysis_map,
    analysis_map_sq,
    dist_d,
    dist_d1,
    dump_frame_csv,
    frame_bounds,
    frame_from_json_dict,
    frame_to_json_dict,
    gram,
    load_frame,
    matrix_rank,
    mercedes_benz_frame,
    null_vector,
    standard_basis_frame,
    subset_lower_bound,
    subset_spectrum,
    sym_eig,
)

RNG = np.random.default_rng(7)


def random_vectors(n, count, seed):
    return np.random.default_rng(seed).standard_normal((count, n))


class TestFrame:
    def test_shape_and_accessors(self):
        fr = mercedes_benz_frame()
        assert fr.dim == 2 and fr.count == 3
        assert fr.matrix.shape == (2, 3)
        np.testing.assert_allclose(fr.column(0), fr.matrix[:, 0])
        np.testing.assert_allclose(
            fr.columns_for(SubsetMask.from_indices([0, 2], 3)), fr.matrix[:, [0, 2]]
        )
        assert fr.rank() == 2

    def test_matrix_is_read_only(self):
        fr = mercedes_benz_frame()
        with pytest.raises((ValueError, RuntimeError)):
            fr.matrix[0, 0] = 1.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            Frame(np.array([[1.0, np.nan], [0.0, 1.0]]))
        with pytest.raises(ValidationError):
            Frame(np.zeros(3))  # not 2-D
        with pytest.raises(ValidationError):
            Frame(np.zeros((0, 3)))

    def test_rank_deficient_matrix_still_constructs(self):
        fr = Frame(np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]))
        assert fr.rank() == 1

    def test_mercedes_benz_is_tight(self):
        A, B = frame_bounds(mercedes_benz_frame())
        assert A == pytest.approx(1.5, abs=1e-12)
        assert B == pytest.approx(1.5, abs=1e-12)

    def test_standard_basis_bounds(self):
        A, B = frame_bounds(standard_basis_frame(4))
        assert A == pytest.approx(1.0, abs=1e-15)
        assert B == pytest.approx(1.0, abs=1e-15)


class TestSubsetMask:
    def test_roundtrip_indices(self):
        mask = SubsetMask.from_indices([0, 3, 5], 7)
        assert mask.indices() == [0, 3, 5]
        assert mask.size() == 3
        assert mask.complement().indices() == [1, 2, 4, 6]
        assert mask.contains(3) and not mask.contains(1)

    def test_full_and_empty(self):
        assert SubsetMask.full(4).size() == 4
        assert SubsetMask.empty(4).size() == 0
        assert SubsetMask.full(4).complement().size() == 0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            SubsetMask.from_indices([3], 3)


class TestSymEig:
    def test_matches_closed_form_2x2(self):
        for _ in range(50):
            M = RNG.standard_normal((2, 2))
            M = M + M.T
            vals, vecs = sym_eig(M)
            expect = oracles.eig_2x2(M)
            np.testing.assert_allclose(vals, expect, atol=1e-12)
            np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, M, atol=1e-12)

    def test_descending_order(self):
        M = RNG.standard_normal((6, 6))
        M = M @ M.T
        vals, _ = sym_eig(M)
        assert np.all(np.diff(vals) <= 0)

    def test_rejects_asymmetric(self):
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(ValidationError):
            sym_eig(M)


class TestSubsetSpectrum:
    def test_against_svd(self):
        fr = Frame(RNG.standard_normal((3, 7)))
        for bits in range(1 << 7):
            mask = SubsetMask(bits, 7)
            summ = subset_spectrum(fr, mask)
            expect = oracles.subset_sigma_n(fr.matrix, mask.indices()) ** 2
            assert summ.lower == pytest.approx(expect, abs=1e-10)
            # sqrt amplifies eigenvalue roundoff near zero: abs tol sqrt(1e-14)
            assert summ.sigma_min == pytest.approx(math.sqrt(expect), abs=1e-7)
            assert subset_lower_bound(fr, mask) == pytest.approx(expect, abs=1e-10)

    def test_empty_subset_is_zero(self):
        fr = mercedes_benz_frame()
        assert subset_lower_bound(fr, SubsetMask.empty(3)) == 0.0


class TestMaps:
    def test_nonnegative_and_even(self):
        fr = Frame(RNG.standard_normal((3, 5)))
        for x in random_vectors(3, 20, 1):
            a = analysis_map(fr, x)
            assert np.all(a >= 0)
            np.testing.assert_allclose(a, analysis_map(fr, -x), atol=0)
            np.testing.assert_allclose(analysis_map_sq(fr, x), a**2, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            analysis_map(mercedes_benz_frame(), np.ones(3))


class TestDistances:
    def test_d1_factorization(self):
        # ||xx^T - yy^T||_1 == ||x - y|| * ||x + y||, nuclear-norm oracle
        for seed in range(30):
            x, y = random_vectors(4, 2, seed + 100)
            assert dist_d1(x, y) == pytest.approx(
                oracles.dist_d1_nuclear(x, y), rel=1e-9
            )
            assert dist_d1(x, y) == pytest.approx(
                np.linalg.norm(x - y) * np.linalg.norm(x + y), rel=1e-9
            )

    def test_d_sign_invariance(self):
        for seed in range(30):
            x, y = random_vectors(5, 2, seed + 200)
            assert dist_d(x, y) == pytest.approx(oracles.dist_d_naive(x, y), abs=1e-12)
            assert dist_d(x, -y) == pytest.approx(dist_d(x, y), abs=1e-12)
            assert dist_d(x, x) == 0.0

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=60, deadline=None)
    def test_d_is_pseudometric_on_pairs(self, seed):
        x, y, z = random_vectors(3, 3, seed)
        dxz = dist_d(x, z)
        assert dxz <= dist_d(x, y) + dist_d(y, z) + 1e-12
        assert dist_d(x, y) == pytest.approx(dist_d(y, x), abs=1e-12)


class TestNullVectorAndRank:
    def test_null_vector_annihilates(self):
        M = RNG.standard_normal((3, 4))  # wide: nontrivial right kernel
        v = null_vector(M)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(M @ v) < 1e-10
        assert matrix_rank(M) == 3


class TestIO:
    def test_json_roundtrip(self, tmp_path):
        fr = mercedes_benz_frame()
        path = tmp_path / "f.json"
        path.write_text(json.dumps(frame_to_json_dict(fr)))
        back = load_frame(path)
        np.testing.assert_array_equal(back.matrix, fr.matrix)

    def test_csv_roundtrip(self, tmp_path):
        fr = Frame(RNG.standard_normal((3, 5)))
        path = tmp_path / "f.csv"
        path.write_text(dump_frame_csv(fr))
        back = load_frame(path)
        np.testing.assert_allclose(back.matrix, fr.matrix, rtol=0, atol=0)

    def test_ragged_csv_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ValidationError, match="ragged"):
            load_frame(path)

    def test_non_numeric_csv_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ValidationError, match=":2:"):
            load_frame(path)

    def test_bad_json_dict(self):
        with pytest.raises(ValidationError):
            frame_from_json_dict({"cols": []})
