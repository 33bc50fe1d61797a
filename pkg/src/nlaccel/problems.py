"""Benchmark objectives: least squares, ridge, and l2-regularized logistic loss.

Each problem exposes deterministic value/gradient oracles, a valid
gradient Lipschitz constant, a strong-convexity modulus, and a reference
optimum (closed form where one exists, high-precision numerical solve
otherwise).  Instances are immutable after construction; the gradient at
the origin is cached eagerly because several extrapolators shift their
residuals by it.
"""

from __future__ import annotations

import numpy as np

from .base import as_matrix, as_vector, require_finite


class OptimumUnavailableError(RuntimeError):
    """Raised when the reference optimum cannot be certified."""


class ConvergenceError(RuntimeError):
    """Numerical optimum solver ran out of budget.

    Carries the best iterate seen and its gradient norm.
    """

    def __init__(self, message: str, best_x: np.ndarray, grad_norm: float):
        super().__init__(message)
        self.best_x = best_x
        self.grad_norm = grad_norm


class Problem:
    """Base class: a smooth objective with oracles and reference optimum."""

    def __init__(self, n: int, lipschitz: float, strong_convexity: float | None):
        if n < 1:
            raise ValueError("dimension must be positive")
        if lipschitz <= 0.0:
            raise ValueError("Lipschitz constant must be positive")
        self.n = int(n)
        self.lipschitz = float(lipschitz)
        self.strong_convexity = strong_convexity
        self._x_star: np.ndarray | None = None
        self._f_star: float | None = None
        # Populated once, eagerly: several methods shift residuals by grad f(0).
        self.grad_at_zero = self.grad(np.zeros(self.n))

    def value(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def value_grad(self, x) -> tuple[float, np.ndarray]:
        return self.value(x), self.grad(x)

    @property
    def x_star(self) -> np.ndarray:
        if self._x_star is None:
            raise OptimumUnavailableError(
                f"{type(self).__name__} has no certified optimum"
            )
        return self._x_star

    @property
    def f_star(self) -> float:
        if self._f_star is None:
            raise OptimumUnavailableError(
                f"{type(self).__name__} has no certified optimum"
            )
        return self._f_star

    @property
    def has_optimum(self) -> bool:
        return self._x_star is not None

    def gap(self, x) -> float:
        """``f(x) - f_star``."""
        return self.value(x) - self.f_star

    def _check_point(self, x) -> np.ndarray:
        return as_vector(x, size=self.n, name="x")


def grad_at_origin(problem: Problem) -> np.ndarray:
    """Cached gradient of the objective at the zero vector."""
    return problem.grad_at_zero


class LeastSquaresProblem(Problem):
    """``f(x) = 1/2 ||Ax - y||^2`` for an overdetermined full-rank A.

    The closed-form optimum solves the normal equations; when A is
    numerically rank-deficient the value/gradient oracles still work but
    accessing the optimum raises :class:`OptimumUnavailableError`.
    """

    def __init__(self, A, y):
        A = as_matrix(A, "A")
        m, n = A.shape
        if m <= n:
            raise ValueError(f"A must be strictly overdetermined, got {m}x{n}")
        y = as_vector(y, size=m, name="y")
        require_finite(A, "A")
        require_finite(y, "y")
        self.A = A
        self.y = y

        s = np.linalg.svd(A, compute_uv=False)
        self._full_rank = s[-1] > 1e-12 * s[0]
        super().__init__(n, lipschitz=float(s[0] ** 2),
                         strong_convexity=float(s[-1] ** 2) if self._full_rank else None)
        if self._full_rank:
            self._x_star = np.linalg.lstsq(A, y, rcond=None)[0]
            self._f_star = self.value(self._x_star)

    def value(self, x) -> float:
        x = self._check_point(x)
        r = self.A @ x - self.y
        return 0.5 * float(r @ r)

    def grad(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self.A.T @ (self.A @ x - self.y)

    def value_grad(self, x) -> tuple[float, np.ndarray]:
        x = self._check_point(x)
        r = self.A @ x - self.y
        return 0.5 * float(r @ r), self.A.T @ r


class RidgeProblem(Problem):
    """``f(x) = 1/2 ||Ax - y||^2 + (mu/2) ||x||^2`` with default ``mu = 1/n``.

    Strongly convex for any A, so the closed-form optimum always exists.
    """

    def __init__(self, A, y, mu: float | None = None):
        A = as_matrix(A, "A")
        m, n = A.shape
        y = as_vector(y, size=m, name="y")
        require_finite(A, "A")
        require_finite(y, "y")
        if mu is None:
            mu = 1.0 / n
        if mu <= 0.0:
            raise ValueError("mu must be positive")
        self.A = A
        self.y = y
        self.mu = float(mu)

        s = np.linalg.svd(A, compute_uv=False)
        s_max = s[0] if s.size else 0.0
        s_min = s[-1] if s.size else 0.0
        super().__init__(n, lipschitz=float(s_max**2 + mu),
                         strong_convexity=float(s_min**2 + mu))
        self._x_star = np.linalg.solve(A.T @ A + mu * np.eye(n), A.T @ y)
        self._f_star = self.value(self._x_star)

    def value(self, x) -> float:
        x = self._check_point(x)
        r = self.A @ x - self.y
        return 0.5 * float(r @ r) + 0.5 * self.mu * float(x @ x)

    def grad(self, x) -> np.ndarray:
        x = self._check_point(x)
        return self.A.T @ (self.A @ x - self.y) + self.mu * x

    def value_grad(self, x) -> tuple[float, np.ndarray]:
        x = self._check_point(x)
        r = self.A @ x - self.y
        value = 0.5 * float(r @ r) + 0.5 * self.mu * float(x @ x)
        return value, self.A.T @ r + self.mu * x


def _sigmoid(t: np.ndarray) -> np.ndarray:
    # Piecewise form avoids overflow in exp for large |t|.
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _softplus(t: np.ndarray) -> np.ndarray:
    # log(1 + exp(t)), overflow-safe: exp(-|t|) <= 1 always.
    return np.log1p(np.exp(-np.abs(t))) + np.maximum(t, 0.0)


class LogisticProblem(Problem):
    """l2-regularized logistic loss over samples stored as columns of A.

    ``f(x) = sum_i log(1 + exp(-y_i <a_i, x>)) + (tau/2) ||x||^2`` with
    labels ``y_i in {-1, +1}`` and default ``tau = 1/(2m)``.  There is no
    closed-form optimum; a high-precision accelerated solve certifies one
    at construction unless ``solve_optimum=False``.
    """

    def __init__(self, A, y, tau: float | None = None, solve_optimum: bool = True,
                 optimum_tol: float = 1e-12):
        A = as_matrix(A, "A")
        n, m = A.shape
        y = as_vector(y, size=m, name="y")
        require_finite(A, "A")
        if not np.all((y == 1.0) | (y == -1.0)):
            raise ValueError("labels must all be -1 or +1")
        if tau is None:
            if m == 0:
                raise ValueError("tau must be given explicitly when there are no samples")
            tau = 1.0 / (2.0 * m)
        if tau < 0.0:
            raise ValueError("tau must be nonnegative")
        self.A = A
        self.labels = y
        self.tau = float(tau)

        s_max = np.linalg.svd(A, compute_uv=False)[0] if m > 0 else 0.0
        lipschitz = float(0.25 * s_max**2 + tau)
        if lipschitz == 0.0:
            lipschitz = 1.0  # gradient is identically zero; any bound is valid
        super().__init__(n, lipschitz=lipschitz,
                         strong_convexity=float(tau) if tau > 0.0 else None)
        if m == 0:
            self._x_star = np.zeros(n)
            self._f_star = self.value(self._x_star)
        elif solve_optimum and tau > 0.0:
            self._x_star, self._f_star = numerical_optimum(self, optimum_tol)

    def _margins(self, x: np.ndarray) -> np.ndarray:
        return self.labels * (self.A.T @ x)

    def value(self, x) -> float:
        x = self._check_point(x)
        t = self._margins(x)
        return float(np.sum(_softplus(-t))) + 0.5 * self.tau * float(x @ x)

    def grad(self, x) -> np.ndarray:
        x = self._check_point(x)
        t = self._margins(x)
        return self.A @ (-self.labels * _sigmoid(-t)) + self.tau * x

    def value_grad(self, x) -> tuple[float, np.ndarray]:
        x = self._check_point(x)
        t = self._margins(x)
        value = float(np.sum(_softplus(-t))) + 0.5 * self.tau * float(x @ x)
        grad = self.A @ (-self.labels * _sigmoid(-t)) + self.tau * x
        return value, grad


def numerical_optimum(problem: Problem, tol: float, x0=None,
                      max_iter: int = 500_000) -> tuple[np.ndarray, float]:
    """Minimize a strongly convex problem to gradient norm <= ``tol``.

    Uses Nesterov's accelerated method with the strongly-convex momentum
    coefficient, which needs ``O(sqrt(L/mu) log(1/tol))`` iterations.
    Raises :class:`ConvergenceError` (carrying the best iterate) if the
    budget runs out first.
    """
    mu = problem.strong_convexity
    if mu is None or mu <= 0.0:
        raise ValueError("numerical_optimum requires a strongly convex problem")
    L = problem.lipschitz
    q = np.sqrt(mu / L)
    beta = (1.0 - q) / (1.0 + q)

    x = np.zeros(problem.n) if x0 is None else as_vector(x0, size=problem.n, name="x0")
    y = x.copy()
    best_x = x
    best_norm = np.inf
    for _ in range(max_iter):
        g = problem.grad(y)
        g_norm = float(np.linalg.norm(g))
        if g_norm < best_norm:
            best_norm, best_x = g_norm, y
        if g_norm <= tol:
            return y, problem.value(y)
        x_next = y - g / L
        y = x_next + beta * (x_next - x)
        x = x_next
    raise ConvergenceError(
        f"gradient norm {best_norm:.3e} > tol {tol:.3e} after {max_iter} iterations",
        best_x, best_norm,
    )
