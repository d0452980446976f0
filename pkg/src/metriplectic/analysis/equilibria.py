"""Locate equilibria on an energy level and classify them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dynamics import MetriplecticSystem, is_regular, xi_field
from ..linalg3 import vec3
from ..metric import sigma

EIG_EPS = 1e-9
KINDS = ("critical_H", "dS_zero", "nonregular", "tangency")
STABILITIES = ("stable", "unstable", "center/undetermined")


@dataclass(frozen=True)
class EquilibriumReport:
    point: np.ndarray
    residual: float
    kind: str
    regular: bool
    stability: str
    eigenvalues: np.ndarray  # full 3x3 Jacobian spectrum
    tangential_eigenvalues: np.ndarray
    sigma_norm: float = 0.0


@dataclass
class EquilibriumSearch:
    equilibria: list[EquilibriumReport]
    nonconvergent: list[np.ndarray] = field(default_factory=list)
    level: float | None = None

    def __iter__(self):
        return iter(self.equilibria)

    def __len__(self):
        return len(self.equilibria)


def _level_bracket(H, direction, level, r_max=1e6):
    """Smallest t > 0 with H(t * direction) = level, if one is bracketed."""
    f = lambda t: H(t * direction) - level  # noqa: E731
    lo, f_lo = 0.0, f(0.0)
    if f_lo == 0.0:
        return None
    t = 1e-3
    while t < r_max:
        f_t = f(t)
        if np.sign(f_t) != np.sign(f_lo):
            for _ in range(200):
                mid = 0.5 * (lo + t)
                f_mid = f(mid)
                if np.sign(f_mid) == np.sign(f_lo):
                    lo, f_lo = mid, f_mid
                else:
                    t = mid
            return 0.5 * (lo + t)
        lo, f_lo = t, f_t
        t *= 1.5
    return None


def default_seeds(sys: MetriplecticSystem, level: float, n_random: int = 50, seed: int = 7) -> np.ndarray:
    """Axis points on the level set (up to six) followed by seeded random points."""
    axis_pts = []
    for i in range(3):
        for s in (1.0, -1.0):
            d = np.zeros(3)
            d[i] = s
            t = _level_bracket(sys.H, d, level)
            if t is not None:
                axis_pts.append(t * d)
    radius = max((np.linalg.norm(p) for p in axis_pts), default=2.0)
    rng = np.random.default_rng(seed)
    rand = rng.uniform(-radius, radius, size=(n_random, 3))
    return np.vstack([np.array(axis_pts).reshape(-1, 3), rand])


def _newton(sys, x, level, tol, max_iter, free=None):
    """Damped Gauss-Newton on ``[xi(x); H(x) - level] = 0``.

    Least squares handles singular Jacobians at continua of equilibria.
    ``free`` masks the coordinates allowed to move. Returns the converged
    point or ``None``.
    """
    free = np.ones(3, dtype=bool) if free is None else free

    def F(p):
        r = np.empty(4)
        r[:3] = sys.rhs(*p)
        r[3] = sys.H.value_xyz(*p) - level
        return r

    scale = 1.0 + abs(level)
    r = F(x)
    for _ in range(max_iter):
        if np.linalg.norm(r[:3]) <= tol and abs(r[3]) <= tol * scale:
            return x
        J = np.vstack([sys.jacobian(x), sys.H.grad(x)])
        step = np.zeros(3)
        step[free] = np.linalg.lstsq(J[:, free], -r, rcond=None)[0]
        norm_r = np.linalg.norm(r)
        lam = 1.0
        while lam > 1e-6:
            trial = x + lam * step
            r_trial = F(trial)
            if np.all(np.isfinite(r_trial)) and np.linalg.norm(r_trial) < norm_r:
                break
            lam *= 0.5
        else:
            return None
        x, r = trial, r_trial
    if np.linalg.norm(r[:3]) <= tol and abs(r[3]) <= tol * scale:
        return x
    return None


def _snap(sys, x, level, tol):
    """Zero out components at rounding level when the point stays a root."""
    tiny = np.abs(x) <= 10 * tol * (1.0 + np.linalg.norm(x))
    if not tiny.any() or tiny.all():
        return x
    y = np.where(tiny, 0.0, x)
    y = _newton(sys, y, level, tol, 5, free=~tiny)
    return x if y is None else y


def _polish(sys, x, level, tol, max_sweeps=8):
    """Greedy last-ulp search for a float point with smaller residual.

    Newton leaves rounding-level residuals that an unstable equilibrium
    amplifies under integration; a neighbouring float is often an exact root.
    Only moves that keep the energy within ``tol`` are accepted.
    """
    def cost(p):
        return float(np.linalg.norm(sys.rhs(*p)))

    best, best_c = x.copy(), cost(x)
    scale = tol * (1.0 + abs(level))
    for _ in range(max_sweeps):
        if best_c == 0.0:
            break
        improved = False
        for i in range(3):
            if best[i] == 0.0:
                continue
            ulp = np.spacing(best[i])
            for k in range(12):
                for sign in (1.0, -1.0):
                    trial = best.copy()
                    trial[i] += sign * ulp * 2.0**k
                    c = cost(trial)
                    if c < best_c and abs(sys.H.value_xyz(*trial) - level) <= scale:
                        best, best_c, improved = trial, c, True
        if not improved:
            break
    return best


def tangent_basis(normal) -> np.ndarray:
    """3x2 matrix whose columns are an orthonormal basis of ``normal``'s complement."""
    _, _, vt = np.linalg.svd(np.asarray(normal, dtype=float).reshape(1, 3))
    return vt[1:].T


def classify_stability(eigs, eps: float = EIG_EPS) -> str:
    """Near-zero real parts mean a continuum or a center and win over the sign test."""
    re = np.real(eigs)
    if np.any(np.abs(re) <= eps):
        return "center/undetermined"
    if np.all(re < -eps):
        return "stable"
    return "unstable"


def classify(sys: MetriplecticSystem, x, tol: float = 1e-8) -> EquilibriumReport:
    """Kind and stability of an equilibrium ``x``.

    Stability uses the Jacobian of the field restricted to the tangent plane
    of the energy level through ``x``; the normal direction is neutral
    because H is conserved. At critical points of H the full spectrum is used.
    """
    x = vec3(x)
    dH, dS = sys.H.grad(x), sys.S.grad(x)
    scale = 1.0 + np.linalg.norm(x)
    s = float(np.linalg.norm(sigma(dS, dH)))
    regular = is_regular(sys.P(x), x)
    if np.linalg.norm(dH) < tol * scale:
        kind = "critical_H"
    elif np.linalg.norm(dS) < tol * scale:
        kind = "dS_zero"
    elif not regular:
        kind = "nonregular"
    else:
        kind = "tangency"
    J = sys.jacobian(x)
    full = np.linalg.eigvals(J)
    if kind == "critical_H":
        tangential = full
    else:
        B = tangent_basis(dH)
        tangential = np.linalg.eigvals(B.T @ J @ B)
    return EquilibriumReport(
        point=x,
        residual=float(np.linalg.norm(xi_field(sys, x))),
        kind=kind,
        regular=regular,
        stability=classify_stability(tangential),
        eigenvalues=_sorted(full),
        tangential_eigenvalues=_sorted(tangential),
        sigma_norm=s,
    )


def _sorted(eigs):
    eigs = np.asarray(eigs, dtype=complex)
    return eigs[np.lexsort((eigs.imag, eigs.real))]


def find_equilibria(
    sys: MetriplecticSystem,
    seeds=None,
    level: float | None = None,
    newton_tol: float = 1e-11,
    max_iter: int = 100,
) -> EquilibriumSearch:
    """Newton search for zeros of the field on the level set ``H = level``.

    With ``level=None`` each seed keeps its own energy. Converged roots
    closer than ``10 * newton_tol`` are merged (the first one found is kept);
    seeds that do not converge are listed in ``nonconvergent``.
    """
    if newton_tol <= 0:
        raise ValueError("newton_tol must be positive")
    if seeds is None:
        if level is None:
            raise ValueError("either seeds or level is required")
        seeds = default_seeds(sys, level)
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 3)
    if len(seeds) == 0:
        raise ValueError("no seeds")
    roots: list[np.ndarray] = []
    failed = []
    for x0 in seeds:
        lvl = sys.H(x0) if level is None else level
        x = _newton(sys, x0.copy(), lvl, newton_tol, max_iter)
        if x is None:
            failed.append(x0)
            continue
        x = _polish(sys, _snap(sys, x, lvl, newton_tol), lvl, newton_tol)
        if all(np.linalg.norm(x - r) > 10 * newton_tol for r in roots):
            roots.append(x)
    return EquilibriumSearch([classify(sys, r) for r in roots], failed, level)
