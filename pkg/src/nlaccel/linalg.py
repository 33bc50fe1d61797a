"""Dense linear-algebra kernels shared by all extrapolators.

The extrapolation coefficient systems are tiny (window size + 1) but can
be arbitrarily ill-conditioned, so the central primitive is a solver that
degrades gracefully to a truncated-SVD minimum-norm solution instead of
failing on singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import as_matrix, as_vector, require_finite

#: Relative singular-value cutoff below which a system is treated as
#: rank-deficient.  Sized for float64 on systems of order <= ~20.
DEFAULT_RANK_TOL = 1e-12


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a robust linear solve.

    Attributes
    ----------
    solution : ndarray
        The computed solution (minimum-norm least squares when the matrix
        is rank-deficient).
    residual_norm : float
        ``||M z - b||``.
    effective_rank : int
        Number of singular values above the relative cutoff.
    condition : float
        Ratio of extreme singular values (``inf`` when singular).
    used_pseudoinverse : bool
        True when the truncated-SVD fallback produced the solution.
    """

    solution: np.ndarray
    residual_norm: float
    effective_rank: int
    condition: float
    used_pseudoinverse: bool


def solve_square(M, b, rank_tol: float = DEFAULT_RANK_TOL) -> SolveReport:
    """Solve the square system ``M z = b``, never failing on singularity.

    Well-conditioned systems (smallest singular value above
    ``rank_tol * largest``) go through a pivoted LU factorization and
    return the unique solution.  Otherwise the minimum-norm least-squares
    solution is computed by truncating the SVD at the same cutoff and
    ``used_pseudoinverse`` is flagged.
    """
    M = as_matrix(M, "M")
    k = M.shape[0]
    if M.shape[0] != M.shape[1] or k < 1:
        raise ValueError(f"M must be square and nonempty, got shape {M.shape}")
    b = as_vector(b, size=k, name="b")
    require_finite(M, "M")
    require_finite(b, "b")

    U, s, Vt = np.linalg.svd(M)
    s_max = s[0]
    if s_max > 0.0 and s[-1] > rank_tol * s_max:
        z = np.linalg.solve(M, b)
        rank = k
        used_pinv = False
    else:
        cutoff = rank_tol * s_max
        keep = s > cutoff
        rank = int(np.count_nonzero(keep))
        inv_s = np.zeros_like(s)
        inv_s[keep] = 1.0 / s[keep]
        z = Vt.T @ (inv_s * (U.T @ b))
        used_pinv = True

    condition = s_max / s[-1] if s[-1] > 0.0 else np.inf
    residual = float(np.linalg.norm(M @ z - b))
    return SolveReport(z, residual, rank, condition, used_pinv)


def svd(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U diag(s) V^T`` with nonincreasing ``s >= 0``."""
    M = as_matrix(M, "M")
    require_finite(M, "M")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return U, s, Vt.T


def condition_number(M) -> float:
    """Ratio of extreme singular values; ``inf`` when column-rank deficient."""
    M = as_matrix(M, "M")
    require_finite(M, "M")
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a random matrix with a prescribed singular spectrum."""

    rows: int
    cols: int
    singular_values: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        s = as_vector(self.singular_values, name="singular_values")
        if s.shape[0] != min(self.rows, self.cols):
            raise ValueError(
                f"need {min(self.rows, self.cols)} singular values, got {s.shape[0]}"
            )
        if np.any(s <= 0.0):
            raise ValueError("singular values must be strictly positive")
        if np.any(np.diff(s) > 0.0):
            raise ValueError("singular values must be nonincreasing")
        object.__setattr__(self, "singular_values", s)


def geometric_spectrum(size: int, kappa: float) -> np.ndarray:
    """Log-spaced singular values from 1 down to ``1/kappa``."""
    if size < 1:
        raise ValueError("size must be positive")
    if kappa < 1.0:
        raise ValueError("kappa must be >= 1")
    if size == 1 or kappa == 1.0:
        return np.ones(size)
    return np.logspace(0.0, -np.log10(kappa), size)


def make_conditioned_matrix(spec: SyntheticSpec) -> np.ndarray:
    """Build ``A = U diag(s) V^T`` with orthonormal seeded random factors.

    ``U`` and ``V`` come from QR factorizations of Gaussian matrices drawn
    from ``default_rng(spec.seed)``, so the output is deterministic and
    its singular values equal ``spec.singular_values`` up to roundoff.
    """
    rng = np.random.default_rng(spec.seed)
    r = min(spec.rows, spec.cols)
    U, _ = np.linalg.qr(rng.standard_normal((spec.rows, r)))
    V, _ = np.linalg.qr(rng.standard_normal((spec.cols, r)))
    return U @ (spec.singular_values[:, None] * V.T)


def weighted_norms(z, A) -> tuple[float, float, float]:
    """Return ``(||z||, ||z||_A, ||z||_{A^{-1}})`` for symmetric positive definite A.

    ``||z||_M = sqrt(z^T M z)``.  The inverse-weighted norm is computed via a
    linear solve, never an explicit inverse.
    """
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    z = as_vector(z, size=A.shape[0], name="z")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > 1e-12 * scale:
        raise ValueError("A must be symmetric")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise ValueError("A must be positive definite") from None

    plain = float(np.linalg.norm(z))
    a_norm = float(np.sqrt(max(z @ (A @ z), 0.0)))
    inv_norm = float(np.sqrt(max(z @ np.linalg.solve(A, z), 0.0)))
    return plain, a_norm, inv_norm
