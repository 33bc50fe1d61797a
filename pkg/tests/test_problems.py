import numpy as np
import pytest

from helpers import fd_gradient
from nlaccel.problems import (
    ConvergenceError,
    LeastSquaresProblem,
    LogisticProblem,
    OptimumUnavailableError,
    RidgeProblem,
    grad_at_origin,
    numerical_optimum,
)


def _random_ls(seed=0, m=10, n=5):
    rng = np.random.default_rng(seed)
    return LeastSquaresProblem(rng.standard_normal((m, n)), rng.standard_normal(m))


class TestLeastSquares:
    def test_zero_residual(self):
        p = LeastSquaresProblem(np.vstack([np.eye(2), np.zeros((1, 2))]), np.zeros(3))
        v, g = p.value_grad(np.zeros(2))
        assert v == 0.0
        assert np.array_equal(g, np.zeros(2))

    def test_constant_target(self):
        A = np.vstack([np.eye(2), np.zeros((1, 2))])
        p = LeastSquaresProblem(A, np.array([1.0, 1.0, 0.0]))
        v, g = p.value_grad(np.zeros(2))
        assert v == 1.0
        assert np.array_equal(g, [-1.0, -1.0])

    def test_elementwise_summation_oracle(self):
        A = np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        y = np.array([1.0, 1.0, 1.0])
        x = np.array([0.5, 0.5])
        p = LeastSquaresProblem(A, y)
        # independent oracle: loop over residual squares and A^T A x - A^T y
        value_ref = 0.0
        for i in range(3):
            r_i = sum(A[i, j] * x[j] for j in range(2)) - y[i]
            value_ref += 0.5 * r_i * r_i
        grad_ref = np.zeros(2)
        for j in range(2):
            for i in range(3):
                r_i = sum(A[i, jj] * x[jj] for jj in range(2)) - y[i]
                grad_ref[j] += A[i, j] * r_i
        v, g = p.value_grad(x)
        assert v == pytest.approx(value_ref, abs=1e-14)
        assert np.allclose(g, grad_ref, atol=1e-14)
        # frozen values from the oracle above
        assert v == pytest.approx(0.125)
        assert np.allclose(g, [0.0, -0.5])

    def test_dimension_mismatch(self):
        p = _random_ls()
        with pytest.raises(ValueError):
            p.value(np.zeros(4))
        with pytest.raises(ValueError):
            p.grad(np.zeros(6))

    def test_rank_deficient_optimum_unavailable(self):
        A = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
        p = LeastSquaresProblem(A, np.ones(3))
        assert p.value(np.zeros(2)) == pytest.approx(1.5)
        with pytest.raises(OptimumUnavailableError):
            p.x_star
        with pytest.raises(OptimumUnavailableError):
            p.f_star

    def test_requires_overdetermined(self):
        with pytest.raises(ValueError):
            LeastSquaresProblem(np.eye(3), np.zeros(3))

    def test_optimum_certified(self):
        p = _random_ls(seed=1)
        x0 = np.ones(p.n)
        assert np.linalg.norm(p.grad(p.x_star)) <= 1e-8 * (1.0 + np.linalg.norm(p.grad(x0)))


class TestRidge:
    def test_pure_penalty(self):
        p = RidgeProblem(np.zeros((3, 2)), np.zeros(3), mu=1.0)
        x = np.array([2.0, -1.0])
        v, g = p.value_grad(x)
        assert v == pytest.approx(0.5 * 5.0)
        assert np.array_equal(g, x)

    def test_first_order_optimality(self):
        rng = np.random.default_rng(2)
        p = RidgeProblem(rng.standard_normal((8, 4)), rng.standard_normal(8), mu=0.25)
        assert np.linalg.norm(p.grad(p.x_star)) <= 1e-10

    def test_finite_difference(self):
        rng = np.random.default_rng(3)
        p = RidgeProblem(rng.standard_normal((10, 5)), rng.standard_normal(10), mu=0.2)
        x = rng.standard_normal(5)
        g_ref = fd_gradient(p.value, x)
        g = p.grad(x)
        assert np.linalg.norm(g - g_ref) <= 1e-6 * np.linalg.norm(g_ref)

    def test_default_mu(self):
        p = RidgeProblem(np.ones((4, 2)), np.zeros(4))
        assert p.mu == pytest.approx(0.5)


class TestLogistic:
    def test_no_samples_pure_ridge(self):
        p = LogisticProblem(np.zeros((1, 0)), np.zeros(0), tau=1.0)
        v, g = p.value_grad(np.array([3.0]))
        assert v == pytest.approx(4.5)
        assert np.allclose(g, [3.0])
        assert np.array_equal(p.x_star, [0.0])

    def test_zero_feature_sample(self):
        p = LogisticProblem(np.array([[0.0]]), np.array([1.0]), tau=0.0)
        for x in ([0.0], [5.0], [-2.0]):
            v, g = p.value_grad(np.array(x))
            assert v == pytest.approx(np.log(2.0))
            assert np.allclose(g, [0.0])

    def test_finite_difference(self):
        rng = np.random.default_rng(4)
        A = rng.standard_normal((5, 20))
        y = rng.choice([-1.0, 1.0], size=20)
        p = LogisticProblem(A, y, solve_optimum=False)
        x = rng.standard_normal(5)
        g_ref = fd_gradient(p.value, x)
        g = p.grad(x)
        assert np.linalg.norm(g - g_ref) <= 1e-5 * np.linalg.norm(g_ref)

    def test_label_validation(self):
        with pytest.raises(ValueError):
            LogisticProblem(np.ones((2, 3)), np.array([1.0, -1.0, 2.0]))

    def test_default_tau(self):
        A = np.ones((2, 4))
        p = LogisticProblem(A, np.array([1.0, -1.0, 1.0, -1.0]), solve_optimum=False)
        assert p.tau == pytest.approx(1.0 / 8.0)

    def test_extreme_margins_stable(self):
        A = np.array([[1.0, -1.0]]) * 500.0
        p = LogisticProblem(A, np.array([1.0, -1.0]), tau=0.1, solve_optimum=False)
        v, g = p.value_grad(np.array([10.0]))
        assert np.isfinite(v)
        assert np.all(np.isfinite(g))


class TestNumericalOptimum:
    def test_simple_quadratic(self):
        p = LeastSquaresProblem(np.vstack([np.eye(2), np.zeros((1, 2))]), np.zeros(3))
        x, f = numerical_optimum(p, tol=1e-12, x0=[1.0, 1.0])
        assert np.linalg.norm(x) <= 1e-10
        assert f <= 1e-20

    def test_matches_ridge_closed_form(self):
        rng = np.random.default_rng(5)
        p = RidgeProblem(rng.standard_normal((10, 5)), rng.standard_normal(10), mu=0.2)
        tol = 1e-10
        x, _ = numerical_optimum(p, tol)
        assert np.linalg.norm(x - p.x_star) <= 10.0 * tol

    def test_separable_logistic(self):
        A = np.array([[1.0, 2.0, -1.0, -2.0], [0.5, 1.0, -0.5, -1.0]])
        y = np.array([1.0, 1.0, -1.0, -1.0])
        p = LogisticProblem(A, y, tau=0.1, solve_optimum=False)
        tol = 1e-9
        x, _ = numerical_optimum(p, tol)
        assert np.linalg.norm(p.grad(x)) <= tol

    def test_budget_exhaustion(self):
        rng = np.random.default_rng(6)
        p = RidgeProblem(rng.standard_normal((10, 5)), rng.standard_normal(10), mu=1e-6)
        with pytest.raises(ConvergenceError) as err:
            numerical_optimum(p, tol=1e-300, max_iter=50)
        assert err.value.best_x.shape == (5,)

    def test_requires_strong_convexity(self):
        A = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
        p = LeastSquaresProblem(A, np.ones(3))  # rank-deficient: mu unknown
        with pytest.raises(ValueError):
            numerical_optimum(p, tol=1e-8)


class TestSharedInvariants:
    @pytest.fixture(params=["ls", "ridge", "logistic"])
    def problem(self, request):
        rng = np.random.default_rng(hash(request.param) % 2**32)
        if request.param == "ls":
            return LeastSquaresProblem(rng.standard_normal((12, 6)),
                                       rng.standard_normal(12))
        if request.param == "ridge":
            return RidgeProblem(rng.standard_normal((9, 6)),
                                rng.standard_normal(9), mu=0.3)
        A = rng.standard_normal((6, 15))
        y = rng.choice([-1.0, 1.0], size=15)
        return LogisticProblem(A, y, solve_optimum=False)

    def test_gradients_match_finite_differences(self, problem):
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = rng.standard_normal(problem.n)
            g = problem.grad(x)
            g_ref = fd_gradient(problem.value, x)
            assert np.linalg.norm(g - g_ref) <= 1e-5 * (1.0 + np.linalg.norm(g_ref))

    def test_lipschitz_constant_valid(self, problem):
        rng = np.random.default_rng(8)
        for _ in range(100):
            u = rng.standard_normal(problem.n)
            v = rng.standard_normal(problem.n)
            lhs = np.linalg.norm(problem.grad(u) - problem.grad(v))
            assert lhs <= problem.lipschitz * np.linalg.norm(u - v) * (1.0 + 1e-12)

    def test_grad_at_origin_bit_identical(self, problem):
        assert np.array_equal(grad_at_origin(problem),
                              problem.grad(np.zeros(problem.n)))

    def test_oracles_deterministic(self, problem):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(problem.n)
        assert problem.value(x) == problem.value(x.copy())
        assert np.array_equal(problem.grad(x), problem.grad(x.copy()))


class TestQuadraticGapIdentity:
    def test_ls_and_ridge(self):
        rng = np.random.default_rng(10)
        for make in (
            lambda: LeastSquaresProblem(rng.standard_normal((10, 4)),
                                        rng.standard_normal(10)),
            lambda: RidgeProblem(rng.standard_normal((7, 4)),
                                 rng.standard_normal(7), mu=0.5),
        ):
            p = make()
            H = p.A.T @ p.A
            if hasattr(p, "mu"):
                H = H + p.mu * np.eye(p.n)
            for _ in range(20):
                x = rng.standard_normal(p.n)
                gap = p.value(x) - p.f_star
                d = x - p.x_star
                quad = 0.5 * d @ (H @ d)
                assert gap == pytest.approx(quad, rel=1e-10, abs=1e-12)
