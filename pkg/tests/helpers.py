"""Independent oracles shared across the test modules.

These deliberately avoid the library's own code paths: finite differences
for gradients, element-wise summation for matrix products, explicit
inverses for coefficient closed forms, QR projections for subspace
minima.
"""

import numpy as np


def fd_gradient(value_fn, x, h=None):
    """Central finite-difference gradient with the step tied to ||x||."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * (1.0 + np.linalg.norm(x))
    g = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        g[i] = (value_fn(x + step) - value_fn(x - step)) / (2.0 * h)
    return g


def naive_matvec(M, v):
    """Row-by-row summation, no BLAS."""
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.zeros(M.shape[0])
    for i in range(M.shape[0]):
        acc = 0.0
        for j in range(M.shape[1]):
            acc += M[i, j] * v[j]
        out[i] = acc
    return out


def random_spd(rng, n, kappa):
    """SPD matrix with log-spaced eigenvalues spanning condition kappa."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.logspace(0.0, -np.log10(kappa), n) if kappa > 1.0 else np.ones(n)
    return Q @ (eigs[:, None] * Q.T)


def quadratic_gd_points(A, b, x0, steps, alpha=None):
    """Descent iterates on f = 1/2 x^T A x + b^T x, as a list of vectors."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    if alpha is None:
        alpha = 1.0 / np.linalg.eigvalsh(A)[-1]
    pts = [x.copy()]
    for _ in range(steps):
        x = x - alpha * (A @ x + b)
        pts.append(x.copy())
    return pts, alpha


def quad_value(A, b, x):
    return 0.5 * float(x @ (A @ x)) + float(b @ x)


def subspace_minimum(A, b, X):
    """min f over span(columns of X) via an orthonormal basis (QR route)."""
    Q, _ = np.linalg.qr(np.asarray(X, dtype=float))
    H = Q.T @ A @ Q
    u = np.linalg.solve(H, -(Q.T @ b))
    return quad_value(A, b, Q @ u)
