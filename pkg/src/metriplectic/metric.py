"""The dissipative metric built from the differential of the Hamiltonian.

``g = dH dH^T - |dH|^2 I`` annihilates ``dH`` and is negative semidefinite,
and acting on any covector it equals a double cross product with ``dH``.
Both routes are kept so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg3 import cross, dot, rank3


class MetricInconsistency(ArithmeticError):
    """Raised when a computed metric violates its rank or eigen structure."""


@dataclass(frozen=True)
class DissipativeMetric:
    """Value of ``g`` at a point, together with the ``dH`` that produced it."""

    matrix: np.ndarray
    dH: np.ndarray

    def __matmul__(self, v):
        return self.matrix @ v


def build_g(dH) -> DissipativeMetric:
    """``g^ij = H^i H^j - delta^ij |dH|^2``; zero exactly when ``dH = 0``."""
    dH = np.asarray(dH, dtype=float)
    G = np.outer(dH, dH)
    G[np.diag_indices(3)] -= dot(dH, dH)
    return DissipativeMetric(G, dH.copy())


def g_apply(g: DissipativeMetric, dS) -> np.ndarray:
    return g.matrix @ np.asarray(dS, dtype=float)


def double_cross(dH, dS) -> np.ndarray:
    """``dH x (dH x dS)``; independent route to ``g dS``."""
    return cross(dH, cross(dH, dS))


def sigma(dS, dH) -> np.ndarray:
    """The one-form ``dS x dH``; it vanishes exactly at rest states."""
    return cross(dS, dH)


def dissipation_rate(dS, dH) -> float:
    """``dS . g dS``, evaluated as ``-|dS x dH|^2``."""
    s = sigma(dS, dH)
    return -dot(s, s)


def rank_check(dH, tol: float = 1e-10) -> int:
    """Rank of ``g(dH)``, verified against the expected structure.

    The rank must be 0 for ``dH = 0`` and 2 otherwise. The three vectors
    ``(0, H3, -H2)``, ``(H3, 0, -H1)``, ``(H2, -H1, 0)`` span the image and
    each must satisfy ``g v = -|dH|^2 v``; any discrepancy raises
    :class:`MetricInconsistency`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dH = np.asarray(dH, dtype=float)
    g = build_g(dH).matrix
    r = rank3(g, tol)
    if not np.any(dH):
        if r != 0:
            raise MetricInconsistency(f"g is nonzero although dH = 0 (rank {r})")
        return r
    if r != 2:
        raise MetricInconsistency(f"rank of g is {r}, expected 2 for dH = {dH}")
    h1, h2, h3 = dH
    nn = dot(dH, dH)
    for v in (np.array([0.0, h3, -h2]), np.array([h3, 0.0, -h1]), np.array([h2, -h1, 0.0])):
        err = np.linalg.norm(g @ v + nn * v)
        if err > 1e-12 * nn * max(np.linalg.norm(v), np.linalg.norm(dH)):
            raise MetricInconsistency(f"g v != -|dH|^2 v for v = {v} (error {err:.3g})")
    return r
