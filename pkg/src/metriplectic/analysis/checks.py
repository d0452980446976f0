"""Sample-based and trajectory-based checks of the structural results."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dynamics import MetriplecticSystem, diagnose
from ..fields import default_samples, verify_casimir
from ..linalg3 import dot, rank3
from ..metric import build_g, double_cross
from ..systems import builtin
from .integrate import IntegratorConfig, integrate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    detail: str = ""


def _rel(err: float, scale: float) -> float:
    return err / scale if scale > 0 else err


def structural_checks(sys: MetriplecticSystem, samples=None, n: int = 1000, seed: int = 42) -> list[CheckResult]:
    """Pointwise identities that every metriplectic system of this form satisfies.

    Casimir residual, ``g dH = 0``, rank of ``g`` in {0, 2}, orthogonality
    of the two parts of the field, ``dS . g dS = -|sigma|^2`` and
    ``g dS = dH x (dH x dS)``. Residuals are reported scale-relative.
    """
    pts = default_samples(n, seed) if samples is None else np.asarray(samples, dtype=float)
    casimir = verify_casimir(sys.P, sys.S, pts)
    null = ortho = diss = cross_form = 0.0
    bad_rank = []
    for x in pts:
        dH, dS = sys.H.grad(x), sys.S.grad(x)
        g = build_g(dH).matrix
        nH, nS = np.linalg.norm(dH), np.linalg.norm(dS)
        null = max(null, _rel(np.linalg.norm(g @ dH), np.linalg.norm(g) * nH))
        r = rank3(g)
        if r != (2 if nH > 1e-10 else 0):
            bad_rank.append(r)
        gdS = g @ dS
        d = diagnose(sys, x)
        scale = 1.0 + np.linalg.norm(d.xi_P) * np.linalg.norm(d.xi_g)
        ortho = max(ortho, abs(d.ortho_residual) / scale)
        diss = max(diss, _rel(abs(dot(dS, gdS) - d.dissipation), (nS * nH) ** 2))
        cross_form = max(cross_form, _rel(np.linalg.norm(gdS - double_cross(dH, dS)), nH * nH * nS))
    return [
        CheckResult("casimir", casimir.passed, casimir.max_residual,
                    "" if casimir.passed else f"{int((~casimir.passed_each).sum())} samples fail"),
        CheckResult("g_null_dH", null <= 1e-13, null),
        CheckResult("rank_g", not bad_rank, float(len(bad_rank)),
                    f"unexpected ranks {sorted(set(bad_rank))}" if bad_rank else ""),
        CheckResult("orthogonality", ortho <= 1e-12, ortho),
        CheckResult("dissipation_identity", diss <= 1e-12, diss),
        CheckResult("cross_product_form", cross_form <= 1e-12, cross_form),
    ]


@dataclass
class EquivalenceReport:
    checked: int
    skipped_nonregular: int
    counterexamples: list[tuple[np.ndarray, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def check_regular_equivalence(sys: MetriplecticSystem, samples, tol: float = 1e-10) -> EquivalenceReport:
    """At regular points the Hamiltonian part vanishes exactly when the full field does.

    Each counterexample is ``(x, |xi_P|, |xi|)``; non-regular samples are
    skipped because the equivalence does not hold there.
    """
    report = EquivalenceReport(0, 0)
    for x in np.asarray(samples, dtype=float).reshape(-1, 3):
        d = diagnose(sys, x)
        if not d.regular:
            report.skipped_nonregular += 1
            continue
        report.checked += 1
        nP, nX = float(np.linalg.norm(d.xi_P)), float(np.linalg.norm(d.xi))
        if (nP < tol) != (nX < tol):
            report.counterexamples.append((d.x, nP, nX))
    return report


@dataclass
class LeafCheck:
    ok: bool
    max_dS: float
    first_violation_time: float | None
    record: object = field(repr=False, default=None)

    def __bool__(self):
        return self.ok


def check_invariant_leaf(sys: MetriplecticSystem, x0, cfg: IntegratorConfig, tol: float = 1e-10) -> LeafCheck:
    """A trajectory starting where ``dS = 0`` keeps ``dS = 0``.

    Returns a falsy :class:`LeafCheck` carrying the first time at which
    ``|dS| > 10 * tol``.
    """
    x0 = np.asarray(x0, dtype=float)
    if np.linalg.norm(sys.S.grad(x0)) > tol:
        raise ValueError("x0 must satisfy |dS(x0)| <= tol")
    rec = integrate(sys, x0, cfg)
    norms = np.array([np.linalg.norm(sys.S.grad(s)) for s in rec.states])
    bad = np.flatnonzero(norms > 10 * tol)
    first = float(rec.times[bad[0]]) if bad.size else None
    return LeafCheck(first is None, float(norms.max()), first, rec)


@dataclass
class DegenerateReport:
    example: int
    expect_invariant: bool
    max_abs_y: float
    final_state: np.ndarray
    passed: bool
    record: object = field(repr=False, default=None)


def check_degenerate_invariance(example: int, x0, cfg: IntegratorConfig, tol: float = 1e-9) -> DegenerateReport:
    """Whether the intersection of the plane y = 0 with an energy level is invariant.

    For example 1 the intersection is invariant and ``|y(t)|`` must stay
    below ``tol``. For example 2 it is invariant only at ``z = 0``; off that
    line ``|y(t)|`` must exceed ``tol`` at some time.
    """
    if example not in (1, 2):
        raise ValueError("example must be 1 or 2")
    x0 = np.asarray(x0, dtype=float)
    if x0[1] != 0.0:
        raise ValueError("x0 must lie on the plane y = 0")
    sys = builtin(f"degenerate_ex{example}").build()
    rec = integrate(sys, x0, cfg)
    max_y = float(np.max(np.abs(rec.states[:, 1])))
    expect = example == 1 or x0[2] == 0.0
    passed = max_y <= tol if expect else max_y > tol
    return DegenerateReport(example, expect, max_y, rec.summary.final_state, passed, rec)
