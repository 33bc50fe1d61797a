"""Executable quadratic-case theory for the extrapolation methods.

For ``f(x) = 1/2 x^T A x`` with SPD ``A`` and a window ``X`` of descent
iterates, the objective value reached by each method has a closed form:

* unconstrained direct acceleration lands exactly at the minimum,
* the sum-one variant reaches ``1 / (2 1^T (X^T A X)^{-1} 1)``,
* the residual-norm method reaches
  ``1^T G2^{-1} (X^T A X) G2^{-1} 1 / (2 (1^T G2^{-1} 1)^2)`` with
  ``G2 = X^T A^2 X``.

Their ratio equals ``||z||^2_{A^{-1}} ||y||^2 / ||z||^4`` for the probe
vectors ``z = ((A X)^+)^T 1`` and ``y = ((A^{1/2} X)^+)^T 1``, sits in
``[1, kappa(A)]``, and is dominated by the per-vector Kantorovich ratio
``||z||^2_{A^{-1}} ||z||^2_A / ||z||^4``.  This module evaluates every
side of those identities so they can be checked numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import as_matrix, as_vector, require_finite
from .linalg import weighted_norms

#: Relative truncation for pseudo-inverses, consistent with the solver.
PINV_RCOND = 1e-12
#: Floor applied to eigenvalues before taking matrix square roots.
EIG_FLOOR = 1e-14


def _check_spd(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square")
    require_finite(A, name)
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > 1e-12 * scale:
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(A)[0] <= 0.0:
        raise ValueError(f"{name} must be positive definite")
    return A


def spd_sqrt(A) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A^{1/2}, A^{-1/2})`` via eigendecomposition.

    Eigenvalues are floored at ``EIG_FLOOR`` to guard against roundoff
    turning a tiny positive eigenvalue negative.
    """
    A = _check_spd(A)
    w, Q = np.linalg.eigh(0.5 * (A + A.T))
    w = np.maximum(w, EIG_FLOOR)
    root = np.sqrt(w)
    return Q @ (root[:, None] * Q.T), Q @ ((1.0 / root)[:, None] * Q.T)


@dataclass(frozen=True)
class QuadraticCase:
    """An SPD Hessian with a full-column-rank window of iterates."""

    hessian: np.ndarray            # A, n x n
    iterates: np.ndarray           # X, n x (K+1)

    def __post_init__(self):
        A = _check_spd(self.hessian, "hessian")
        X = as_matrix(self.iterates, "iterates")
        require_finite(X, "iterates")
        if X.shape[0] != A.shape[0]:
            raise ValueError("iterates and hessian dimensions disagree")
        s = np.linalg.svd(X, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise ValueError("iterate window must have full column rank")
        object.__setattr__(self, "hessian", A)
        object.__setattr__(self, "iterates", X)

    def probe_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """``z = ((A X)^+)^T 1`` and ``y = ((A^{1/2} X)^+)^T 1``."""
        A, X = self.hessian, self.iterates
        ones = np.ones(X.shape[1])
        root, _ = spd_sqrt(A)
        z = np.linalg.pinv(A @ X, rcond=PINV_RCOND).T @ ones
        y = np.linalg.pinv(root @ X, rcond=PINV_RCOND).T @ ones
        return z, y


@dataclass(frozen=True)
class ClosedFormValues:
    f_dna: float
    f_dna1: float
    f_rna: float


def closed_form_values(case: QuadraticCase) -> ClosedFormValues:
    """Objective values at the extrapolated points, in closed form."""
    A, X = case.hessian, case.iterates
    AX = A @ X
    G1 = X.T @ AX        # X^T A X
    G2 = AX.T @ AX       # X^T A^2 X, symmetric by construction
    ones = np.ones(X.shape[1])
    try:
        w1 = np.linalg.solve(G1, ones)
        w2 = np.linalg.solve(G2, ones)
    except np.linalg.LinAlgError as err:
        raise ValueError(f"singular Gram matrix in closed forms: {err}") from None
    f_dna1 = 1.0 / (2.0 * float(ones @ w1))
    f_rna = float(w2 @ (G1 @ w2)) / (2.0 * float(ones @ w2) ** 2)
    return ClosedFormValues(0.0, f_dna1, f_rna)


def kantorovich_ratio(z, A) -> float:
    """``||z||^2_{A^{-1}} ||z||^2_A / ||z||^4`` -- lies in ``[1, kappa(A)]``."""
    plain, a_norm, inv_norm = weighted_norms(z, A)
    if plain == 0.0:
        raise ValueError("z must be nonzero")
    return (inv_norm ** 2) * (a_norm ** 2) / plain ** 4


@dataclass(frozen=True)
class RatioBounds:
    """Both routes to the value ratio, with its per-window bound chain."""

    ratio_closed_form: float   # f_rna / f_dna1 from the closed forms
    ratio_identity: float      # ||z||^2_{A^{-1}} ||y||^2 / ||z||^4
    upper_bound: float         # Kantorovich ratio at z
    kappa: float               # condition number of the Hessian
    values: ClosedFormValues = field(repr=False)


def ratio_and_bounds(case: QuadraticCase) -> RatioBounds:
    """Evaluate the value ratio two ways plus its bound chain."""
    values = closed_form_values(case)
    if values.f_dna1 <= 0.0:
        raise ValueError("sum-one closed-form value must be positive")
    A = case.hessian
    z, y = case.probe_vectors()
    plain, _, inv_norm = weighted_norms(z, A)
    if plain == 0.0:
        raise ValueError("degenerate probe vector z = 0")
    ratio_identity = (inv_norm ** 2) * float(y @ y) / plain ** 4
    eigs = np.linalg.eigvalsh(A)
    return RatioBounds(
        ratio_closed_form=values.f_rna / values.f_dna1,
        ratio_identity=ratio_identity,
        upper_bound=kantorovich_ratio(z, A),
        kappa=float(eigs[-1] / eigs[0]),
        values=values,
    )


@dataclass(frozen=True)
class PinvIdentityReport:
    matrix_deviation: float    # max-entry gap, scaled
    bilinear_deviation: float  # |y^T A^{-1/2} z - z^T z|, scaled
    passed: bool


def pinv_identity_check(case: QuadraticCase, matrix_tol: float = 1e-8,
                        bilinear_tol: float = 1e-10) -> PinvIdentityReport:
    """Check ``(A^{1/2}X)^+ A^{-1/2} ((AX)^+)^T = (X^T A^2 X)^{-1}`` and
    ``y^T A^{-1/2} z = z^T z`` on this window."""
    A, X = case.hessian, case.iterates
    root, inv_root = spd_sqrt(A)
    AX = A @ X
    lhs = np.linalg.pinv(root @ X, rcond=PINV_RCOND) @ inv_root @ np.linalg.pinv(AX, rcond=PINV_RCOND).T
    rhs = np.linalg.inv(AX.T @ AX)
    scale = max(1.0, float(np.abs(rhs).max()))
    matrix_dev = float(np.abs(lhs - rhs).max()) / scale

    z, y = case.probe_vectors()
    zz = float(z @ z)
    bilinear_dev = abs(float(y @ (inv_root @ z)) - zz) / max(1.0, zz)
    return PinvIdentityReport(
        matrix_dev, bilinear_dev,
        passed=(matrix_dev <= matrix_tol and bilinear_dev <= bilinear_tol),
    )


def rate_bound(hessian, x0, k: int, x_star=None) -> float:
    """Worst-case bound on ``||Xc - x*||_H^2`` for the unconstrained direct
    method after a window of ``k`` descent iterates.

    With ``xi = (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu))`` the bound is
    ``L kappa (2 xi^k / (1 + xi^{2k})) ||x0 - x*||^2``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    A = _check_spd(hessian, "hessian")
    x0 = as_vector(x0, size=A.shape[0], name="x0")
    eigs = np.linalg.eigvalsh(A)
    mu, L = float(eigs[0]), float(eigs[-1])
    if mu <= 0.0:
        raise ValueError("hessian must be positive definite")
    displacement = x0 if x_star is None else x0 - as_vector(x_star, size=A.shape[0])
    xi = (np.sqrt(L) - np.sqrt(mu)) / (np.sqrt(L) + np.sqrt(mu))
    rate = 2.0 * xi**k / (1.0 + xi ** (2 * k))
    return float(L * (L / mu) * rate * (displacement @ displacement))


def gd_quadratic_iterates(A, b, x0, steps: int, alpha: float | None = None) -> np.ndarray:
    """Descent iterates for ``f = 1/2 x^T A x + b^T x``, stacked as columns.

    Exact-arithmetic residual identities hold for these windows, which is
    what makes them usable as theory probes.  ``alpha=None`` uses ``1/L``.
    """
    A = _check_spd(A)
    x = as_vector(x0, size=A.shape[0], name="x0").copy()
    b = as_vector(b, size=A.shape[0], name="b")
    if alpha is None:
        alpha = 1.0 / float(np.linalg.eigvalsh(A)[-1])
    cols = [x.copy()]
    for _ in range(steps):
        x = x - alpha * (A @ x + b)
        cols.append(x.copy())
    return np.column_stack(cols)


def random_spd(rng: np.random.Generator, n: int, kappa: float) -> np.ndarray:
    """SPD matrix with log-spaced eigenvalues spanning condition ``kappa``."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    if n == 1 or kappa == 1.0:
        eigs = np.ones(n)
    else:
        eigs = np.logspace(0.0, -np.log10(kappa), n)
    return Q @ (eigs[:, None] * Q.T)


@dataclass(frozen=True)
class TheoryCase:
    """A corpus entry: the Hessian, the window (with its stepsize), and
    the theory view of its combinable columns."""

    hessian: np.ndarray
    window_iterates: np.ndarray  # n x (K+2), includes x_{K+1}
    stepsize: float
    case: QuadraticCase
    x0: np.ndarray


def build_theory_case(rng: np.random.Generator, n: int, kappa: float,
                      columns: int, max_gram_cond: float) -> TheoryCase | None:
    """Draw one descent window on a random quadratic; None if the Gram
    matrices are too ill-conditioned to certify identities in float64."""
    A = random_spd(rng, n, kappa)
    x0 = rng.standard_normal(n)
    alpha = 1.0 / float(np.linalg.eigvalsh(A)[-1])
    pts = gd_quadratic_iterates(A, np.zeros(n), x0, columns, alpha)
    X = pts[:, :columns]
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        return None
    AX = A @ X
    g1_cond = np.linalg.cond(X.T @ AX)
    g2_cond = np.linalg.cond(AX.T @ AX)
    if max(g1_cond, g2_cond) > max_gram_cond:
        return None
    return TheoryCase(A, pts, alpha, QuadraticCase(A, X), x0)


def theory_corpus(count: int, seed: int = 0,
                  kappas=(10.0, 100.0, 1000.0),
                  dims=(5, 8, 11, 14),
                  window_columns=(2, 3, 4),
                  max_gram_cond: float = 1e10) -> list[TheoryCase]:
    """Deterministic corpus of descent windows on random quadratics."""
    rng = np.random.default_rng(seed)
    cases: list[TheoryCase] = []
    attempts = 0
    while len(cases) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("corpus generation failed to find enough cases")
        n = int(rng.choice(dims))
        kappa = float(rng.choice(kappas))
        cols = int(rng.choice(window_columns))
        case = build_theory_case(rng, n, kappa, cols, max_gram_cond)
        if case is not None:
            cases.append(case)
    return cases
