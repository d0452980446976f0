"""Trajectory integration with energy and entropy monitoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45

from ..dynamics import DiagnosticSample, MetriplecticSystem, diagnose, rest_state
from ..linalg3 import vec3

METHODS = ("rk4_fixed", "rk45_adaptive")


class IntegrationError(RuntimeError):
    """Integration aborted: non-finite state or adaptive step underflow.

    ``record`` holds the trajectory up to the failure.
    """

    def __init__(self, message: str, record: "TrajectoryRecord | None" = None):
        super().__init__(message)
        self.record = record


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4_fixed"
    h: float = 1e-3
    t_end: float = 10.0
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    monitor_every: int = 10
    # early stop once at rest with |xi| <= rest_tol * (1 + |x|) for rest_window samples
    rest_tol: float = 1e-10
    rest_window: int = 100
    stop_at_rest: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        for name in ("h", "t_end", "abs_tol", "rel_tol", "rest_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.monitor_every) != self.monitor_every or self.monitor_every < 1:
            raise ValueError("monitor_every must be a positive integer")
        if int(self.rest_window) != self.rest_window or self.rest_window < 1:
            raise ValueError("rest_window must be a positive integer")


@dataclass
class TrajectorySummary:
    H_drift_max: float
    S_monotone_violations: int | None  # None when S is not a verified Casimir
    final_state: np.ndarray
    terminated_at_rest: bool
    steps: int = 0


@dataclass
class TrajectoryRecord:
    """Every accepted step's state, plus diagnostics at monitored steps.

    ``sample_index[k]`` is the position in ``times``/``states`` of
    ``diagnostics[k]``.
    """

    times: np.ndarray
    states: np.ndarray
    diagnostics: list[DiagnosticSample]
    sample_index: np.ndarray
    summary: TrajectorySummary
    H_values: np.ndarray = field(repr=False, default=None)
    S_values: np.ndarray = field(repr=False, default=None)

    @property
    def sample_times(self) -> np.ndarray:
        return self.times[self.sample_index]


def rk4_step(f, x, y, z, h):
    """One classical Runge-Kutta step for the autonomous field ``f(x, y, z)``."""
    k1 = f(x, y, z)
    hh = 0.5 * h
    k2 = f(x + hh * k1[0], y + hh * k1[1], z + hh * k1[2])
    k3 = f(x + hh * k2[0], y + hh * k2[1], z + hh * k2[2])
    k4 = f(x + h * k3[0], y + h * k3[1], z + h * k3[2])
    w = h / 6.0
    return (
        x + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )


def _rk4_stepper(sys, x0, cfg):
    n = max(1, math.ceil(cfg.t_end / cfg.h - 1e-9))
    state = tuple(float(c) for c in x0)
    for k in range(1, n + 1):
        t = min(k * cfg.h, cfg.t_end)
        h = t - (k - 1) * cfg.h if k == n else cfg.h
        state = rk4_step(sys.rhs, *state, h)
        yield t, state, k == n


def _rk45_stepper(sys, x0, cfg):
    def fun(t, u):
        return np.array(sys.rhs(u[0], u[1], u[2]))

    solver = RK45(fun, 0.0, np.array(x0, dtype=float), cfg.t_end,
                  first_step=min(cfg.h, cfg.t_end), rtol=cfg.rel_tol, atol=cfg.abs_tol)
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"adaptive step failed at t={solver.t:.6g}: {message}")
        yield solver.t, tuple(solver.y), solver.status == "finished"


def integrate(sys: MetriplecticSystem, x0, cfg: IntegratorConfig = IntegratorConfig()) -> TrajectoryRecord:
    """Integrate ``x' = P dH + g dS`` from ``x0`` and monitor H and S.

    H drift is tracked at every step. An increase of S by more than
    ``1e-12 * (1 + |S(x0)|)`` between consecutive steps counts as a
    monotonicity violation; this count is only kept when ``S`` is a verified
    Casimir, since otherwise S need not decrease. Integration stops early
    once ``rest_window`` consecutive monitored samples are rest states with
    a vanishing field, i.e. the trajectory sits at an equilibrium.
    """
    x0 = vec3(x0)
    H, S = sys.H.value_xyz, sys.S.value_xyz
    H0, S0 = H(*x0), S(*x0)
    slack = 1e-12 * (1.0 + abs(S0))
    track_monotone = sys.casimir_verified

    times, states = [0.0], [tuple(x0)]
    H_vals, S_vals = [H0], [S0]
    diagnostics = [diagnose(sys, x0)]
    sample_index = [0]
    drift, violations = 0.0, 0
    at_rest_run = 1 if _resting(diagnostics[0], cfg) else 0
    terminated = False
    S_prev = S0

    stepper = _rk4_stepper(sys, x0, cfg) if cfg.method == "rk4_fixed" else _rk45_stepper(sys, x0, cfg)

    def record():
        return TrajectoryRecord(
            times=np.array(times),
            states=np.array(states),
            diagnostics=diagnostics,
            sample_index=np.array(sample_index, dtype=int),
            summary=TrajectorySummary(
                H_drift_max=drift,
                S_monotone_violations=violations if track_monotone else None,
                final_state=np.array(states[-1]),
                terminated_at_rest=terminated,
                steps=len(times) - 1,
            ),
            H_values=np.array(H_vals),
            S_values=np.array(S_vals),
        )

    try:
        for k, (t, state, last) in enumerate(stepper, start=1):
            if not all(math.isfinite(c) for c in state):
                raise IntegrationError(f"non-finite state {state} at t={t:.6g}")
            times.append(t)
            states.append(state)
            Hv, Sv = H(*state), S(*state)
            H_vals.append(Hv)
            S_vals.append(Sv)
            drift = max(drift, abs(Hv - H0))
            if Sv - S_prev > slack:
                violations += 1
            S_prev = Sv
            if k % cfg.monitor_every == 0 or last:
                sample = diagnose(sys, state)
                diagnostics.append(sample)
                sample_index.append(len(times) - 1)
                at_rest_run = at_rest_run + 1 if _resting(sample, cfg) else 0
                if cfg.stop_at_rest and at_rest_run >= cfg.rest_window:
                    terminated = True
                    break
    except IntegrationError as exc:
        exc.record = record()
        raise
    return record()


def _resting(sample: DiagnosticSample, cfg: IntegratorConfig) -> bool:
    small = np.linalg.norm(sample.xi) <= cfg.rest_tol * (1.0 + np.linalg.norm(sample.x))
    return small and rest_state(sample, cfg.rest_tol)
