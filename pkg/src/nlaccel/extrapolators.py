"""Iterate-window extrapolation methods.

Given a window of optimizer iterates ``x_0 .. x_{K+1}`` and the stepsizes
that produced them, each method picks coefficients ``c`` and returns the
combined point ``X c`` with ``X = [x_0 ... x_K]``:

* RNA   -- minimize the norm of the combined residual subject to
           ``sum(c) = 1``, ridge-regularized in ``c``.
* DNA   -- minimize a linearized model of the objective value itself,
           unconstrained.
* DNA-1 -- same objective constrained to ``sum(c) = 1``.
* DNA-2 -- unconstrained with a proximity penalty ``||Xc - y||^2`` toward
           a reference point ``y``.
* DNA-3 -- unconstrained with a coefficient penalty ``||c - e||^2``.

Anderson mixing for generic fixed-point maps lives here too since it
shares the constrained normal-equation solve.

All solves go through :func:`nlaccel.linalg.solve_square`, which falls
back to a truncated-SVD minimum-norm solution on singular systems, so an
ill-conditioned window degrades the result instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin, as_matrix, as_vector, require_finite
from .linalg import SolveReport, solve_square

#: Normalizations with |sum(z)| below this times ||z|| are degenerate.
DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class IterateWindow:
    """``K+2`` iterates stacked as columns plus the ``K+1`` stepsizes between them."""

    iterates: np.ndarray   # n x (K+2), columns x_0 .. x_{K+1}
    stepsizes: np.ndarray  # K+1 positive reals

    def __post_init__(self):
        pts = as_matrix(self.iterates, "iterates")
        steps = as_vector(self.stepsizes, name="stepsizes")
        if pts.shape[1] < 2:
            raise ValueError("window needs at least two iterates")
        if steps.shape[0] != pts.shape[1] - 1:
            raise ValueError(
                f"expected {pts.shape[1] - 1} stepsizes, got {steps.shape[0]}"
            )
        if np.any(steps <= 0.0):
            raise ValueError("stepsizes must be positive")
        require_finite(pts, "iterates")
        require_finite(steps, "stepsizes")
        object.__setattr__(self, "iterates", pts)
        object.__setattr__(self, "stepsizes", steps)

    @classmethod
    def from_points(cls, points, stepsizes) -> "IterateWindow":
        """Build from a sequence of iterate vectors."""
        return cls(np.column_stack([np.asarray(p, dtype=float) for p in points]),
                   np.asarray(stepsizes, dtype=float))

    @property
    def n(self) -> int:
        return self.iterates.shape[0]

    @property
    def depth(self) -> int:
        """K: the number of combination coefficients minus one."""
        return self.iterates.shape[1] - 2

    @property
    def newest(self) -> np.ndarray:
        """The most recent iterate ``x_{K+1}`` (not reachable by ``Xc``)."""
        return self.iterates[:, -1]


@dataclass(frozen=True)
class ResidualMatrices:
    """The matrices every extrapolator works from.

    ``iterates`` is ``X = [x_0 ... x_K]``; ``residuals`` holds the scaled
    differences ``(x_i - x_{i+1}) / alpha_i`` (the gradients, when the
    window came from gradient descent); ``shifted_residuals`` subtracts
    the gradient at the origin from every column.
    """

    iterates: np.ndarray           # X, n x (K+1)
    residuals: np.ndarray          # n x (K+1)
    shifted_residuals: np.ndarray  # n x (K+1)
    grad_at_zero: np.ndarray       # n


def build_residuals(window: IterateWindow, grad_at_zero) -> ResidualMatrices:
    """Assemble ``X``, the residual matrix, and its origin-shifted variant."""
    g0 = as_vector(grad_at_zero, size=window.n, name="grad_at_zero")
    pts = window.iterates
    residuals = (pts[:, :-1] - pts[:, 1:]) / window.stepsizes[None, :]
    return ResidualMatrices(
        iterates=pts[:, :-1],
        residuals=residuals,
        shifted_residuals=residuals - g0[:, None],
        grad_at_zero=g0,
    )


@dataclass(frozen=True)
class ExtrapolationResult:
    """Coefficients, the combined point, and solver diagnostics."""

    coefficients: np.ndarray
    point: np.ndarray | None
    report: SolveReport
    method: str
    fallback: bool = False


def extrapolate_point(X, c) -> np.ndarray:
    """The linear combination ``X c``."""
    X = as_matrix(X, "X")
    c = as_vector(c, size=X.shape[1], name="c")
    return X @ c


def _last_indicator(size: int) -> np.ndarray:
    e = np.zeros(size)
    e[-1] = 1.0
    return e


def _normalize(z: np.ndarray) -> tuple[np.ndarray, bool]:
    """``c = z / sum(z)``, or the last-column indicator when the
    normalizer vanishes (flagged), so callers can always keep running."""
    total = float(z.sum())
    z_norm = float(np.linalg.norm(z))
    if z_norm == 0.0 or abs(total) < DEGENERATE_TOL * z_norm:
        return _last_indicator(z.shape[0]), True
    return z / total, False


def rna_coefficients(residuals, lam: float = 1e-8,
                     iterates=None) -> ExtrapolationResult:
    """Sum-one coefficients minimizing ``||Rc||^2 + lam ||c||^2``.

    Solves ``(R^T R + lam I) z = 1`` and normalizes ``c = z / sum(z)``.
    The combined point is computed when the matching iterate matrix is
    supplied; otherwise ``point`` is None.
    """
    R = as_matrix(residuals, "residuals")
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    k = R.shape[1]
    G = R.T @ R + lam * np.eye(k)
    report = solve_square(G, np.ones(k))
    c, fallback = _normalize(report.solution)
    point = None if iterates is None else as_matrix(iterates, "iterates") @ c
    return ExtrapolationResult(c, point, report, "rna", fallback)


class Extrapolator(ParamsMixin):
    """Base class: a parameterized window-to-point extrapolation method."""

    method = "base"
    #: Methods built on origin-shifted residuals need grad f(0).
    needs_grad_at_zero = False

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        raise NotImplementedError

    def extrapolate(self, window: IterateWindow,
                    grad_at_zero=None) -> ExtrapolationResult:
        if grad_at_zero is None:
            if self.needs_grad_at_zero:
                raise ValueError(f"{self.method} requires grad_at_zero")
            grad_at_zero = np.zeros(window.n)
        rm = build_residuals(window, grad_at_zero)
        return self.coefficients(rm)


class RNA(Extrapolator):
    """Regularized nonlinear acceleration (residual-norm objective)."""

    method = "rna"

    def __init__(self, lam: float = 1e-8):
        self.lam = lam

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        return rna_coefficients(rm.residuals, self.lam, iterates=rm.iterates)


def dna_coefficients(rm: ResidualMatrices) -> ExtrapolationResult:
    """Unconstrained direct acceleration: solve ``X^T R z = -X^T grad_f(0)``
    with ``R`` the origin-shifted residuals."""
    X = rm.iterates
    M = X.T @ rm.shifted_residuals
    b = -(X.T @ rm.grad_at_zero)
    report = solve_square(M, b)
    c = report.solution
    return ExtrapolationResult(c, X @ c, report, "dna")


def dna1_coefficients(rm: ResidualMatrices) -> ExtrapolationResult:
    """Sum-one direct acceleration: solve ``X^T R~ z = 1``, ``c = z / sum(z)``."""
    X = rm.iterates
    M = X.T @ rm.residuals
    report = solve_square(M, np.ones(M.shape[0]))
    c, fallback = _normalize(report.solution)
    return ExtrapolationResult(c, X @ c, report, "dna1", fallback)


def dna2_coefficients(rm: ResidualMatrices, lam: float = 1e-8, reference=None,
                      eps: float = 1e-14,
                      symmetrize: bool = False) -> ExtrapolationResult:
    """Direct acceleration penalized toward a reference point ``y``.

    Solves ``(X^T R + lam X^T X + eps I) z = lam X^T y - X^T grad_f(0)``.
    ``reference=None`` (or ``"last-iterate"``) uses the newest combinable
    iterate ``x_K``; ``eps`` adds the tiny ridge that keeps the system
    solvable near convergence; ``symmetrize`` replaces ``X^T R`` by its
    symmetric part.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    X = rm.iterates
    if reference is None or (isinstance(reference, str) and reference == "last-iterate"):
        y = X[:, -1]
    elif isinstance(reference, str):
        raise ValueError(f"unknown reference {reference!r}")
    else:
        y = as_vector(reference, size=X.shape[0], name="reference")
    M = X.T @ rm.shifted_residuals
    if symmetrize:
        M = 0.5 * (M + M.T)
    k = X.shape[1]
    M = M + lam * (X.T @ X) + eps * np.eye(k)
    b = lam * (X.T @ y) - X.T @ rm.grad_at_zero
    report = solve_square(M, b)
    c = report.solution
    return ExtrapolationResult(c, X @ c, report, "dna2")


def dna3_coefficients(rm: ResidualMatrices, lam: float = 1e-8,
                      reference="last-iterate-indicator") -> ExtrapolationResult:
    """Direct acceleration penalized toward reference coefficients ``e``.

    Solves ``(X^T R + lam I) z = lam e - X^T grad_f(0)``.  ``reference``
    may be a vector or one of ``"last-iterate-indicator"`` (default),
    ``"zero"``, ``"uniform"``.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    X = rm.iterates
    k = X.shape[1]
    if isinstance(reference, str):
        if reference == "last-iterate-indicator":
            e = _last_indicator(k)
        elif reference == "zero":
            e = np.zeros(k)
        elif reference == "uniform":
            e = np.full(k, 1.0 / k)
        else:
            raise ValueError(f"unknown reference {reference!r}")
    else:
        e = as_vector(reference, size=k, name="reference")
    M = X.T @ rm.shifted_residuals + lam * np.eye(k)
    b = lam * e - X.T @ rm.grad_at_zero
    report = solve_square(M, b)
    c = report.solution
    return ExtrapolationResult(c, X @ c, report, "dna3")


class DNA(Extrapolator):
    method = "dna"
    needs_grad_at_zero = True

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        return dna_coefficients(rm)


class DNA1(Extrapolator):
    method = "dna1"

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        return dna1_coefficients(rm)


class DNA2(Extrapolator):
    method = "dna2"
    needs_grad_at_zero = True

    def __init__(self, lam: float = 1e-8, reference=None, eps: float = 1e-14,
                 symmetrize: bool = False):
        self.lam = lam
        self.reference = reference
        self.eps = eps
        self.symmetrize = symmetrize

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        return dna2_coefficients(rm, self.lam, self.reference, self.eps,
                                 self.symmetrize)


class DNA3(Extrapolator):
    method = "dna3"
    needs_grad_at_zero = True

    def __init__(self, lam: float = 1e-8, reference="last-iterate-indicator"):
        self.lam = lam
        self.reference = reference

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        return dna3_coefficients(rm, self.lam, self.reference)


class LastIterate(Extrapolator):
    """Degenerate method that always falls back to the last combinable
    iterate.  Useful as a no-op baseline: schemes treat a flagged result
    as "continue from the newest point"."""

    method = "last-iterate"

    def coefficients(self, rm: ResidualMatrices) -> ExtrapolationResult:
        k = rm.iterates.shape[1]
        c = _last_indicator(k)
        report = SolveReport(c.copy(), 0.0, k, 1.0, False)
        return ExtrapolationResult(c, rm.iterates @ c, report, self.method,
                                   fallback=True)


_METHODS = {
    "rna": RNA,
    "dna": DNA,
    "dna1": DNA1,
    "dna2": DNA2,
    "dna3": DNA3,
    "last-iterate": LastIterate,
}


def make_extrapolator(method: str, lam: float = 1e-8, **kwargs) -> Extrapolator:
    """Instantiate an extrapolator by name, passing ``lam`` where it applies."""
    try:
        cls = _METHODS[method]
    except KeyError:
        raise ValueError(
            f"unknown method {method!r}; choose from {sorted(_METHODS)}"
        ) from None
    if "lam" in cls._param_names():
        kwargs = {"lam": lam, **kwargs}
    return cls(**kwargs)


def anderson_step(map_values, residuals, depth: int) -> tuple[np.ndarray, ExtrapolationResult]:
    """One Anderson mixing update from fixed-point map history.

    ``map_values[i]`` is ``Phi(x_i)`` and ``residuals[i] = Phi(x_i) - x_i``
    for the iterates seen so far.  Uses the most recent
    ``min(depth, k) + 1`` entries, finds sum-one coefficients minimizing
    the combined residual via the normal equations ``(F^T F) z = 1``, and
    returns ``x_{k+1} = sum_i c_i Phi(x_i)`` over the window.  A
    degenerate solve falls back to the plain fixed-point step.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if len(map_values) != len(residuals) or not map_values:
        raise ValueError("map_values and residuals must be equal-length and nonempty")
    k = len(map_values) - 1
    m_k = min(depth, k)
    F = np.column_stack([np.asarray(r, dtype=float) for r in residuals[k - m_k:]])
    P = np.column_stack([np.asarray(p, dtype=float) for p in map_values[k - m_k:]])
    G = F.T @ F
    ones = np.ones(m_k + 1)
    report = solve_square(G, ones)
    if report.used_pseudoinverse and report.effective_rank > 0:
        # Singular Gram matrix: if the numerical null space of F contains a
        # direction with nonzero coefficient sum, the constrained optimum is
        # that direction rescaled (combined residual ~ 0); the pseudo-inverse
        # solution is orthogonal to the null space and would miss it.
        _, s, Vt = np.linalg.svd(G)
        null_basis = Vt[report.effective_rank:].T
        w = null_basis.T @ ones
        w_norm = float(np.linalg.norm(w))
        if w_norm > 1e-10 * np.sqrt(m_k + 1.0):
            c = null_basis @ (w / (w @ w))
            nxt = P @ c
            return nxt, ExtrapolationResult(c, nxt, report, "anderson", False)
    c, fallback = _normalize(report.solution)
    if fallback:
        # Plain fixed-point step Phi(x_k).
        nxt = P[:, -1].copy()
    else:
        nxt = P @ c
    return nxt, ExtrapolationResult(c, nxt, report, "anderson", fallback)


def anderson_run(phi, x0, steps: int, depth: int):
    """Drive a fixed-point map ``Phi`` with Anderson mixing.

    Starts with the plain step ``x_1 = Phi(x_0)`` and then applies
    :func:`anderson_step` for each subsequent update.  Returns
    ``(iterates, residual_norms, fallbacks)`` where ``iterates`` holds
    ``x_0 .. x_steps`` and ``residual_norms[i] = ||Phi(x_i) - x_i||``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = np.asarray(x0, dtype=float)
    xs = [x]
    phis = [np.asarray(phi(x), dtype=float)]
    residuals = [phis[0] - x]
    fallbacks = []
    for k in range(steps):
        if k == 0:
            nxt = phis[0].copy()
            fallbacks.append(False)
        else:
            nxt, result = anderson_step(phis, residuals, depth)
            fallbacks.append(result.fallback)
        xs.append(nxt)
        phis.append(np.asarray(phi(nxt), dtype=float))
        residuals.append(phis[-1] - nxt)
    norms = [float(np.linalg.norm(r)) for r in residuals]
    return xs, norms, fallbacks
