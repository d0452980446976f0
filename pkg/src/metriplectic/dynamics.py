"""The metriplectic vector field ``xi = P dH + g dS`` and pointwise diagnostics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import PoissonField, ScalarField, verify_casimir
from .linalg3 import cross, dot, rank3, vec3
from .metric import build_g, dissipation_rate, sigma

REGULAR_TOL = 1e-10


class NonCasimirWarning(UserWarning):
    """Entropy function is not a Casimir of the Poisson tensor."""


@dataclass(frozen=True, eq=False)
class MetriplecticSystem:
    """A Poisson tensor with an energy ``H`` and an entropy-like Casimir ``S``.

    The Casimir property of ``S`` is checked on construction and recorded in
    ``casimir_verified``. A failing check is not an error: the system still
    builds, but a :class:`NonCasimirWarning` is issued and monitors that rely
    on ``dS . xi <= 0`` should be switched off.
    """

    P: PoissonField
    H: ScalarField
    S: ScalarField
    name: str = "custom"
    casimir_verified: bool = field(default=None)

    def __post_init__(self):
        if self.casimir_verified is None:
            ok = verify_casimir(self.P, self.S).passed
            object.__setattr__(self, "casimir_verified", ok)
            if not ok:
                warnings.warn(
                    f"system {self.name!r}: S is not a Casimir of P; "
                    "dissipation of S is not guaranteed",
                    NonCasimirWarning,
                    stacklevel=3,
                )

    # Scalar fast path used by the integrators. Expands g dS as
    # (dH.dS) dH - |dH|^2 dS instead of forming g.
    def rhs(self, x: float, y: float, z: float) -> tuple[float, float, float]:
        h1, h2, h3 = self.H.grad_xyz(x, y, z)
        s1, s2, s3 = self.S.grad_xyz(x, y, z)
        a, b, c = self.P.entries_xyz(x, y, z)
        hs = h1 * s1 + h2 * s2 + h3 * s3
        hh = h1 * h1 + h2 * h2 + h3 * h3
        return (
            a * h2 + b * h3 + hs * h1 - hh * s1,
            -a * h1 + c * h3 + hs * h2 - hh * s2,
            -b * h1 - c * h2 + hs * h3 - hh * s3,
        )

    def __call__(self, x) -> np.ndarray:
        return xi_field(self, x)

    def hamiltonian_part(self, x) -> np.ndarray:
        return self.P.apply(x, self.H.grad(x))

    def dissipative_part(self, x) -> np.ndarray:
        return build_g(self.H.grad(x)).matrix @ self.S.grad(x)

    def jacobian(self, x) -> np.ndarray:
        """Exact Jacobian ``d xi_i / d x_k`` from polynomial derivatives."""
        x = np.asarray(x, dtype=float)
        dH, dS = self.H.grad(x), self.S.grad(x)
        A, B = self.H.hessian(x), self.S.hessian(x)
        hs, hh = dot(dH, dS), dot(dH, dH)
        J = np.einsum("ijk,j->ik", self.P.derivative(x), dH)
        J += self.P(x) @ A
        J += np.outer(dH, A @ dS + B @ dH) + hs * A
        J -= 2.0 * np.outer(dS, A @ dH) + hh * B
        return J


def xi_field(sys: MetriplecticSystem, x) -> np.ndarray:
    """``P(x) dH(x) + g(dH(x)) dS(x)`` with ``g`` from :func:`build_g`."""
    x = vec3(x)
    dH = sys.H.grad(x)
    return sys.P(x) @ dH + build_g(dH).matrix @ sys.S.grad(x)


@dataclass(frozen=True)
class DiagnosticSample:
    x: np.ndarray
    H_val: float
    S_val: float
    dH: np.ndarray
    dS: np.ndarray
    sigma: np.ndarray
    xi: np.ndarray
    xi_P: np.ndarray
    xi_g: np.ndarray
    dissipation: float
    ortho_residual: float
    P_rank: int
    regular: bool

    @property
    def sigma2(self) -> float:
        return -self.dissipation

    def orthogonal(self, tol: float = 1e-12) -> bool:
        scale = 1.0 + np.linalg.norm(self.xi_P) * np.linalg.norm(self.xi_g)
        return abs(self.ortho_residual) <= tol * scale


def is_regular(Px: np.ndarray, x, tol: float = REGULAR_TOL) -> bool:
    return float(np.max(np.abs(Px))) > tol * (1.0 + float(np.linalg.norm(x)))


def diagnose(sys: MetriplecticSystem, x, tol: float = REGULAR_TOL) -> DiagnosticSample:
    """Evaluate the field and every monitored quantity at ``x``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = vec3(x)
    dH, dS = sys.H.grad(x), sys.S.grad(x)
    Px = sys.P(x)
    xi_P = Px @ dH
    xi_g = build_g(dH).matrix @ dS
    return DiagnosticSample(
        x=x,
        H_val=sys.H(x),
        S_val=sys.S(x),
        dH=dH,
        dS=dS,
        sigma=sigma(dS, dH),
        xi=xi_P + xi_g,
        xi_P=xi_P,
        xi_g=xi_g,
        dissipation=dissipation_rate(dS, dH),
        ortho_residual=dot(xi_P, xi_g),
        P_rank=rank3(Px) if np.any(Px) else 0,
        regular=is_regular(Px, x, tol),
    )


def rest_state(sample: DiagnosticSample, tol: float = 1e-10) -> bool:
    """True when dissipation is switched off: ``dS`` parallel to ``dH`` or either vanishes."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = 1.0 + dot(sample.dS, sample.dS) * dot(sample.dH, sample.dH)
    return sample.sigma2 <= tol * scale


def closed_form_rigid_body(a: float, b: float, c: float, m) -> np.ndarray:
    """Componentwise equations of motion of the relaxing rigid body."""
    x, y, z = m
    return np.array([
        (b - c) * y * z + b * y * (a - b) * x * y + c * z * (a - c) * x * z,
        (c - a) * x * z + c * z * (b - c) * y * z + a * x * (b - a) * x * y,
        (a - b) * x * y + a * x * (c - a) * x * z + b * y * (c - b) * y * z,
    ])


def rigid_body_cross_form(dH, dS) -> np.ndarray:
    """``dH x dS + dH x (dH x dS)``."""
    w = cross(dH, dS)
    return w + cross(dH, w)


def closed_form_oscillator(s_prime: Callable[[float], float], m) -> np.ndarray:
    """Perturbed oscillator field for ``S = S(z)``; ``s_prime`` is ``dS/dz``."""
    x, y, z = m
    sp = s_prime(z)
    return np.array([y + x * z * sp, -x + y * z * sp, -(x * x + y * y) * sp])
