import numpy as np
import pytest

from nlaccel.linalg import (
    SyntheticSpec,
    condition_number,
    geometric_spectrum,
    make_conditioned_matrix,
    solve_square,
    svd,
    weighted_norms,
)


class TestSolveSquare:
    def test_identity(self):
        rep = solve_square(np.eye(3), [1.0, 2.0, 3.0])
        assert np.array_equal(rep.solution, [1.0, 2.0, 3.0])
        assert rep.effective_rank == 3
        assert not rep.used_pseudoinverse

    def test_rank_deficient_diagonal_min_norm(self):
        rep = solve_square(np.diag([1.0, 0.0]), [2.0, 0.0])
        assert rep.used_pseudoinverse
        assert rep.effective_rank == 1
        assert np.allclose(rep.solution, [2.0, 0.0])

    def test_prescribed_condition_residual(self):
        spec = SyntheticSpec(5, 5, geometric_spectrum(5, 1e6), seed=3)
        M = make_conditioned_matrix(spec)
        b = np.random.default_rng(4).standard_normal(5)
        rep = solve_square(M, b)
        assert rep.residual_norm <= 1e-8 * np.linalg.norm(b)

    def test_nonsingular_residual_bound(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            M = rng.standard_normal((6, 6))
            b = rng.standard_normal(6)
            rep = solve_square(M, b)
            scale = np.linalg.norm(M) * np.linalg.norm(rep.solution) + np.linalg.norm(b)
            assert rep.residual_norm <= 1e-10 * scale

    def test_min_norm_among_alternatives(self):
        # Rank-2 map on R^4: any null-space shift must not be shorter.
        rng = np.random.default_rng(1)
        B = rng.standard_normal((4, 2))
        M = B @ B.T  # rank 2, symmetric
        b = M @ rng.standard_normal(4)
        rep = solve_square(M, b)
        _, _, V = np.linalg.svd(M)
        null = V[2:]
        for _ in range(20):
            shift = null.T @ rng.standard_normal(2)
            alt = rep.solution + shift
            assert np.linalg.norm(rep.solution) <= np.linalg.norm(alt) + 1e-10

    def test_zero_matrix(self):
        rep = solve_square(np.zeros((3, 3)), np.ones(3))
        assert np.array_equal(rep.solution, np.zeros(3))
        assert rep.effective_rank == 0
        assert rep.condition == np.inf

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            solve_square([[np.nan, 0.0], [0.0, 1.0]], [1.0, 1.0])
        with pytest.raises(ValueError):
            solve_square(np.eye(2), [np.inf, 0.0])


class TestSvd:
    def test_diagonal(self):
        _, s, _ = svd(np.diag([3.0, 1.0]))
        assert np.allclose(s, [3.0, 1.0])

    def test_rank_one(self):
        u = np.array([1.0, 2.0])
        v = np.array([3.0, 4.0, 0.0])
        _, s, _ = svd(np.outer(u, v))
        assert np.allclose(s[0], np.linalg.norm(u) * np.linalg.norm(v))
        assert abs(s[1]) <= 1e-12 * s[0]

    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(2)
        M = rng.standard_normal((6, 4))
        U, s, V = svd(M)
        assert np.abs(U @ np.diag(s) @ V.T - M).max() <= 1e-12 * np.abs(M).max()
        assert np.abs(U.T @ U - np.eye(4)).max() <= 1e-12
        assert np.abs(V.T @ V - np.eye(4)).max() <= 1e-12
        assert np.all(np.diff(s) <= 0.0)
        assert np.all(s >= 0.0)


class TestConditionNumber:
    def test_identity(self):
        assert condition_number(np.eye(4)) == 1.0

    def test_diagonal(self):
        assert np.isclose(condition_number(np.diag([10.0, 0.1])), 100.0)

    def test_prescribed(self):
        spec = SyntheticSpec(8, 6, geometric_spectrum(6, 1e4), seed=0)
        A = make_conditioned_matrix(spec)
        assert np.isclose(condition_number(A), 1e4, rtol=1e-6)

    def test_rank_deficient_sentinel(self):
        assert condition_number(np.diag([1.0, 0.0])) == np.inf


class TestMakeConditionedMatrix:
    def test_orthogonal_when_flat_spectrum(self):
        spec = SyntheticSpec(3, 3, np.ones(3), seed=5)
        A = make_conditioned_matrix(spec)
        assert np.abs(A.T @ A - np.eye(3)).max() <= 1e-10

    def test_deterministic(self):
        spec = SyntheticSpec(7, 4, geometric_spectrum(4, 100.0), seed=9)
        assert np.array_equal(make_conditioned_matrix(spec),
                              make_conditioned_matrix(spec))

    def test_spectrum_recovered(self):
        rng = np.random.default_rng(10)
        for trial in range(20):
            m = int(rng.integers(3, 12))
            n = int(rng.integers(3, 12))
            values = np.sort(rng.uniform(0.5, 50.0, size=min(m, n)))[::-1]
            A = make_conditioned_matrix(SyntheticSpec(m, n, values, seed=trial))
            s = np.linalg.svd(A, compute_uv=False)
            assert np.allclose(s, values, rtol=1e-10)

    def test_geometric_kappa(self):
        spec = SyntheticSpec(10, 10, geometric_spectrum(10, 1e3), seed=1)
        A = make_conditioned_matrix(spec)
        assert np.isclose(condition_number(A), 1e3, rtol=1e-8)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(3, 3, np.array([1.0, 2.0, 0.5]), seed=0)  # not sorted
        with pytest.raises(ValueError):
            SyntheticSpec(3, 3, np.array([1.0, 0.5]), seed=0)  # wrong count
        with pytest.raises(ValueError):
            SyntheticSpec(3, 3, np.array([1.0, 0.5, 0.0]), seed=0)  # zero value


class TestWeightedNorms:
    def test_identity_collapses(self):
        z = np.array([3.0, 4.0])
        assert weighted_norms(z, np.eye(2)) == pytest.approx((5.0, 5.0, 5.0))

    def test_scalar_diag(self):
        assert weighted_norms([1.0], [[4.0]]) == pytest.approx((1.0, 2.0, 0.5))

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(3)
        B = rng.standard_normal((5, 5))
        A = B @ B.T + 0.5 * np.eye(5)
        for _ in range(100):
            z = rng.standard_normal(5)
            plain, a_norm, inv_norm = weighted_norms(z, A)
            assert a_norm * inv_norm >= plain**2 * (1.0 - 1e-12)

    def test_rejects_asymmetric_and_indefinite(self):
        with pytest.raises(ValueError):
            weighted_norms([1.0, 1.0], [[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError):
            weighted_norms([1.0, 1.0], [[1.0, 0.0], [0.0, -1.0]])
