"""Fixed-size linear algebra on R^3.

Vectors and covectors share one representation: a float array of shape
``(3,)``. The ambient metric is the Euclidean one, so raising or lowering
an index does nothing to the components.
"""

from __future__ import annotations

import numpy as np

SKEW_TOL = 1e-12
SYM_TOL = 1e-12


def vec3(values) -> np.ndarray:
    """Validate ``values`` and return it as a finite float vector of length 3."""
    v = np.asarray(values, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite component in {v!r}")
    return v


def mat3(values) -> np.ndarray:
    """Validate ``values`` and return it as a finite 3x3 float matrix."""
    A = np.asarray(values, dtype=float)
    if A.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("non-finite entry in matrix")
    return A


def cross(a, b) -> np.ndarray:
    """Right-handed cross product ``a x b``."""
    a1, a2, a3 = a
    b1, b2, b3 = b
    return np.array([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])


def dot(a, b) -> float:
    return float(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def matvec(A, v) -> np.ndarray:
    return np.asarray(A, dtype=float) @ np.asarray(v, dtype=float)


def _max_norm(A) -> float:
    return float(np.max(np.abs(A)))


def is_skew(A, tol: float = SKEW_TOL) -> bool:
    """``A^T == -A`` up to ``tol`` relative to the max-norm of ``A``."""
    A = np.asarray(A, dtype=float)
    return _max_norm(A + A.T) <= tol * _max_norm(A)


def is_symmetric(A, tol: float = SYM_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    return _max_norm(A - A.T) <= tol * _max_norm(A)


def rank3(A, tol: float = 1e-10) -> int:
    """Numerical rank of a 3x3 matrix.

    Counts singular values larger than ``tol`` times the largest one, so the
    result does not change when ``A`` is rescaled. The zero matrix has rank 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))
