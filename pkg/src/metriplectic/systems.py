"""Registry of the built-in example systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .dynamics import MetriplecticSystem
from .fields import PoissonField, ScalarField


class UnknownSystemError(KeyError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    name: str
    P: PoissonField
    H: ScalarField
    S: ScalarField
    parameters: dict[str, float] = field(default_factory=dict)
    provenance: str = ""

    def build(self) -> MetriplecticSystem:
        return MetriplecticSystem(self.P, self.H, self.S, name=self.name)


_ZERO = ScalarField()
_HALF_NORM2 = ScalarField({(2, 0, 0): 0.5, (0, 2, 0): 0.5, (0, 0, 2): 0.5})
_HALF_Z2 = ScalarField({(0, 0, 2): 0.5})
# P12 = y, zero elsewhere: vanishes on the plane y = 0.
_DEGENERATE_P = PoissonField(ScalarField({(0, 1, 0): 1.0}), _ZERO, _ZERO)


def _real(params: Mapping[str, object], key: str, default: float) -> float:
    value = params.get(key, default)
    if isinstance(value, bool):
        raise ValueError(f"parameter {key!r} must be real, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValueError(f"parameter {key!r} must be real, got {value!r}") from None


def _reject_unknown(name: str, params: Mapping[str, object], allowed) -> None:
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"{name}: unknown parameter(s) {sorted(extra)}")


def _rigid_body(params):
    _reject_unknown("rigid_body", params, {"a", "b", "c"})
    a, b, c = (_real(params, k, d) for k, d in (("a", 1.0), ("b", 2.0), ("c", 3.0)))
    P = PoissonField(
        ScalarField({(0, 0, 1): 1.0}),
        ScalarField({(0, 1, 0): -1.0}),
        ScalarField({(1, 0, 0): 1.0}),
    )
    H = ScalarField({(2, 0, 0): a / 2, (0, 2, 0): b / 2, (0, 0, 2): c / 2})
    return SystemSpec("rigid_body", P, H, _HALF_NORM2, {"a": a, "b": b, "c": c},
                      "relaxing rigid body")


def _oscillator(params):
    # S(z) = sum_k s<k> z^k; the default is z^2 / 2.
    coeffs = {}
    for key in params:
        if not (key.startswith("s") and key[1:].isdigit()):
            raise ValueError(f"oscillator: unknown parameter {key!r} (expected s0, s1, ...)")
        coeffs[int(key[1:])] = _real(params, key, 0.0)
    if not coeffs:
        coeffs = {2: 0.5}
    P = PoissonField(ScalarField.constant(1.0), _ZERO, _ZERO)
    S = ScalarField({(0, 0, k): c for k, c in coeffs.items()})
    return SystemSpec("oscillator", P, _HALF_NORM2, S,
                      {f"s{k}": c for k, c in sorted(coeffs.items())},
                      "dissipative oscillator")


def _degenerate_ex1(params):
    _reject_unknown("degenerate_ex1", params, ())
    return SystemSpec("degenerate_ex1", _DEGENERATE_P, _HALF_NORM2, _HALF_Z2, {},
                      "degenerate Poisson tensor, invariant intersection")


def _degenerate_ex2(params):
    _reject_unknown("degenerate_ex2", params, ())
    # (x^2 + (y - 1)^2 + z^2) / 2
    H = ScalarField({(2, 0, 0): 0.5, (0, 2, 0): 0.5, (0, 1, 0): -1.0,
                     (0, 0, 0): 0.5, (0, 0, 2): 0.5})
    return SystemSpec("degenerate_ex2", _DEGENERATE_P, H, _HALF_Z2, {},
                      "degenerate Poisson tensor, non-invariant intersection")


_REGISTRY = {
    "rigid_body": (_rigid_body, "Euler top with H = (ax^2+by^2+cz^2)/2, S = |m|^2/2; relaxes to a pole"),
    "oscillator": (_oscillator, "harmonic oscillator lifted to R^3 with S = S(z); default S = z^2/2"),
    "degenerate_ex1": (_degenerate_ex1, "P vanishing on y = 0, H = |m|^2/2, S = z^2/2"),
    "degenerate_ex2": (_degenerate_ex2, "P vanishing on y = 0, H = (x^2+(y-1)^2+z^2)/2, S = z^2/2"),
}


def builtin(name: str, params: Mapping[str, object] | None = None) -> SystemSpec:
    """Construct a built-in system.

    ``rigid_body`` takes ``a, b, c`` (defaults 1, 2, 3; any reals allowed).
    ``oscillator`` takes polynomial coefficients ``s0, s1, ...`` of S(z);
    coefficients not given are zero, and with none given S = z^2/2.
    """
    try:
        factory, _ = _REGISTRY[name]
    except KeyError:
        raise UnknownSystemError(f"unknown system {name!r}; choose from {sorted(_REGISTRY)}") from None
    return factory(dict(params or {}))


def list_builtins() -> list[tuple[str, str, str]]:
    """``(name, description, provenance)`` for every built-in, in fixed order."""
    return [(name, desc, factory({}).provenance) for name, (factory, desc) in _REGISTRY.items()]
