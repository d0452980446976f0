"""Run configuration files.

The format is flat ``key = value`` text with dotted section keys; ``#``
starts a comment. Example::

    system.builtin = rigid_body
    system.a = 1
    system.b = 2
    system.c = 3
    x0 = 1, 1, 1
    integrator.method = rk4_fixed
    integrator.h = 1e-3
    integrator.t_end = 200
    output.path = rigid_body.csv
    output.format = csv

An inline system replaces ``system.builtin`` with polynomial strings
``system.H``, ``system.S`` and the upper-triangle Poisson entries
``system.P12``, ``system.P13``, ``system.P23`` (missing entries are zero).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .analysis.integrate import IntegratorConfig
from .dynamics import MetriplecticSystem
from .fields import MAX_DEGREE, PoissonField, PolynomialSyntaxError, ScalarField, parse_polynomial
from .systems import builtin


class ConfigError(ValueError):
    """The config file is unreadable or malformed."""


class SystemConstructionError(ValueError):
    """The config parsed but the system it describes cannot be built."""


_INLINE_KEYS = ("H", "S", "P12", "P13", "P23")
_SYSTEM_META = ("builtin", "name", "max_degree")
_INTEGRATOR_KEYS = {
    "method": str, "h": float, "t_end": float, "abs_tol": float, "rel_tol": float,
    "monitor_every": int, "rest_tol": float, "rest_window": int, "stop_at_rest": "bool",
}
_CHECK_KEYS = {"casimir": "bool", "ortho": "bool", "monotone": "bool",
               "h_drift_tol": float, "ortho_tol": float}
_OUTPUT_KEYS = {"path": str, "format": str, "every": int}
_TOP_KEYS = {"x0", "seed"}


@dataclass(frozen=True)
class SystemConfig:
    builtin: str | None = None
    params: dict[str, str] = field(default_factory=dict)
    inline: dict[str, dict] = field(default_factory=dict)
    name: str | None = None
    max_degree: int = MAX_DEGREE


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: str = "csv"
    every: int = 1


@dataclass(frozen=True)
class ChecksConfig:
    casimir: bool = True
    ortho: bool = True
    monotone: bool = True
    h_drift_tol: float = 1e-8
    ortho_tol: float = 1e-12


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig
    x0: tuple[float, float, float] | None
    integrator: IntegratorConfig
    output: OutputConfig
    checks: ChecksConfig
    seed: int = 42
    raw: dict[str, str] = field(default_factory=dict)


def parse_key_values(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _convert(key: str, value: str, kind):
    try:
        if kind == "bool":
            lowered = value.lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(value)
        return kind(value)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {value!r} as {getattr(kind, '__name__', kind)}") from None


def _section(entries, prefix, schema):
    out = {}
    for key, value in entries.items():
        if key.startswith(prefix + "."):
            name = key[len(prefix) + 1:]
            if name not in schema:
                raise ConfigError(f"unknown key {key!r}")
            out[name] = _convert(key, value, schema[name])
    return out


def parse_config(text: str) -> RunConfig:
    entries = parse_key_values(text)
    known_sections = ("system.", "integrator.", "output.", "checks.")
    for key in entries:
        if key not in _TOP_KEYS and not key.startswith(known_sections):
            raise ConfigError(f"unknown key {key!r}")

    sys_entries = {k[len("system."):]: v for k, v in entries.items() if k.startswith("system.")}
    inline = {}
    for key in _INLINE_KEYS:
        if key in sys_entries:
            try:
                inline[key] = parse_polynomial(sys_entries[key])
            except PolynomialSyntaxError as exc:
                raise ConfigError(f"system.{key}: {exc}") from None
    name = sys_entries.get("builtin")
    if (name is None) == (not inline):
        raise ConfigError("give exactly one of system.builtin or an inline system (system.H, system.S, ...)")
    if inline and not {"H", "S"} <= inline.keys():
        raise ConfigError("an inline system needs both system.H and system.S")
    params = {k: v for k, v in sys_entries.items() if k not in _SYSTEM_META and k not in _INLINE_KEYS}
    if inline and params:
        raise ConfigError(f"unknown system keys {sorted(params)}")
    max_degree = _convert("system.max_degree", sys_entries.get("max_degree", str(MAX_DEGREE)), int)
    system = SystemConfig(name, params, inline, sys_entries.get("name"), max_degree)

    x0 = None
    if "x0" in entries:
        parts = [p for p in entries["x0"].replace(",", " ").split()]
        if len(parts) != 3:
            raise ConfigError("x0 needs three components")
        x0 = tuple(_convert("x0", p, float) for p in parts)

    try:
        integrator = IntegratorConfig(**_section(entries, "integrator", _INTEGRATOR_KEYS))
        output = OutputConfig(**_section(entries, "output", _OUTPUT_KEYS))
        checks = ChecksConfig(**_section(entries, "checks", _CHECK_KEYS))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if output.format not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {output.format!r}")
    if output.every < 1:
        raise ConfigError("output.every must be positive")
    seed = _convert("seed", entries.get("seed", "42"), int)
    return RunConfig(system, x0, integrator, output, checks, seed, entries)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def build_system(cfg: SystemConfig) -> MetriplecticSystem:
    """Construct the configured system; failures raise :class:`SystemConstructionError`."""
    try:
        if cfg.builtin is not None:
            spec = builtin(cfg.builtin, cfg.params)
            if spec.P.degree > cfg.max_degree or max(spec.H.degree, spec.S.degree) > cfg.max_degree:
                raise ValueError(f"degree exceeds system.max_degree = {cfg.max_degree}")
            return MetriplecticSystem(spec.P, spec.H, spec.S, name=cfg.name or spec.name)
        fields = {k: ScalarField(cfg.inline.get(k, {}), max_degree=cfg.max_degree) for k in _INLINE_KEYS}
        P = PoissonField(fields["P12"], fields["P13"], fields["P23"])
        return MetriplecticSystem(P, fields["H"], fields["S"], name=cfg.name or "inline")
    except (KeyError, ValueError) as exc:
        raise SystemConstructionError(str(exc).strip("'\"")) from None
