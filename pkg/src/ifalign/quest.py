"""Attitude determination from accumulated vector pairs.

Each pair (alpha, beta) that should satisfy ``C_b^n(0) @ alpha == beta``
contributes a positive-semidefinite 4x4 increment ``B^T B`` with
``B = qplus([0, beta]) - qminus([0, alpha])``.  The quaternion minimizing
``q^T K q`` over unit quaternions is the eigenvector of the accumulated K
belonging to its smallest eigenvalue; it encodes the nav-to-body matrix via
:func:`ifalign.attitude.quat_to_dcm`.
"""

import numpy as np

from .attitude import quat_canonical
from .errors import DegenerateSpectrum

GAP_TOL = 1e-9
_JACOBI_TOL = 1e-14
_MAX_SWEEPS = 60


def pair_operator(alpha, beta):
    """The 4x4 residual operator ``qplus([0, beta]) - qminus([0, alpha])``."""
    d = beta - alpha
    s = beta + alpha
    return np.array(
        [
            [0.0, -d[0], -d[1], -d[2]],
            [d[0], 0.0, -s[2], s[1]],
            [d[1], s[2], 0.0, -s[0]],
            [d[2], -s[1], s[0], 0.0],
        ]
    )


def accumulate(K, alpha, beta):
    """Add one vector pair to the 4x4 accumulator; returns the new matrix."""
    b = pair_operator(alpha, beta)
    return K + b.T @ b


def jacobi_eigh4(K, tol=_JACOBI_TOL):
    """Eigen-decomposition of a symmetric 4x4 matrix by cyclic Jacobi sweeps.

    Returns eigenvalues ascending and the matching eigenvector columns.
    Sweeps run until every off-diagonal entry is below ``tol`` relative to
    the largest diagonal magnitude.
    """
    a = np.array(K, dtype=float)
    v = np.eye(4)
    scale = max(1.0, float(np.max(np.abs(a))))
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(3):
            for q in range(p + 1, 4):
                off = max(off, abs(a[p, q]))
        if off <= tol * scale:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def optimal_quaternion(K, gap_tol=GAP_TOL):
    """Quaternion minimizing ``q^T K q`` subject to unit norm.

    Returns ``(q, lambda_min)`` with canonical sign.

    Raises
    ------
    DegenerateSpectrum
        If the two smallest eigenvalues differ by no more than
        ``gap_tol * trace(K)`` -- the attitude is unobservable from the
        accumulated pairs.  The exception carries a deterministic candidate
        (lexicographically smallest canonical eigenvector among the tied
        eigenvalues) so callers can still log a reproducible value.
    """
    w, v = jacobi_eigh4(K)
    lam = float(w[0])
    trace = float(np.trace(K))
    if w[1] - w[0] <= gap_tol * trace:
        tied = [
            quat_canonical(v[:, i])
            for i in range(4)
            if w[i] - w[0] <= gap_tol * trace
        ]
        tied.sort(key=lambda q: tuple(q))
        raise DegenerateSpectrum(
            "smallest eigenvalues coincide: attitude unobservable "
            f"(gap {w[1] - w[0]:.3e} vs trace {trace:.3e})",
            q=tied[0],
            lambda_min=lam,
        )
    q = quat_canonical(v[:, 0])
    return q / np.linalg.norm(q), lam
