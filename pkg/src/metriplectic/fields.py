"""Polynomial scalar fields and skew-symmetric matrix fields on R^3.

A :class:`ScalarField` stores a sparse map from exponent triples to
coefficients. Derivatives are taken term by term, so gradients and Hessians
are exact; evaluation goes through a small Python function generated once
per field, which keeps the integrator's inner loop cheap.

Polynomials can be written as text in the form ``term (+|- term)*`` where a
term is ``coeff [x^i][y^j][z^k]``, e.g. ``"0.5x^2 + 1y^2 + 1.5z^2"``. The
coefficient may be omitted (``"z"``), a bare variable has exponent 1, and
``*`` between factors is tolerated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .linalg3 import vec3

MAX_DEGREE = 6

Exponents = tuple[int, int, int]

_VARS = "xyz"


class PolynomialSyntaxError(ValueError):
    """Raised when a polynomial string does not match the term grammar."""


class DegreeError(ValueError):
    """Raised when a polynomial exceeds the configured maximum degree."""


# ---------------------------------------------------------------------------
# parsing

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<coeff>" + _NUMBER + r")?"
    r"(?P<vars>(?:\s*\*?\s*[xyz](?:\s*\^\s*\d+)?)*)\s*"
)
_FACTOR_RE = re.compile(r"([xyz])(?:\s*\^\s*(\d+))?")


def parse_polynomial(text: str) -> dict[Exponents, float]:
    """Parse ``text`` into an exponent -> coefficient map.

    Like terms are merged and zero coefficients dropped. An empty string
    parses to the zero polynomial.
    """
    if not isinstance(text, str):
        raise PolynomialSyntaxError(f"expected a string, got {type(text).__name__}")
    terms: dict[Exponents, float] = {}
    pos, end = 0, len(text.rstrip())
    first = True
    while pos < end:
        m = _TERM_RE.match(text, pos)
        sign, coeff, factors = m.group("sign"), m.group("coeff"), m.group("vars")
        if m.end() == pos or (coeff is None and not factors.strip()):
            raise PolynomialSyntaxError(f"cannot parse term at column {pos}: {text!r}")
        if sign is None and not first:
            raise PolynomialSyntaxError(f"missing '+' or '-' before column {pos}: {text!r}")
        exps = [0, 0, 0]
        for var, power in _FACTOR_RE.findall(factors):
            exps[_VARS.index(var)] += int(power) if power else 1
        c = float(coeff) if coeff is not None else 1.0
        if sign == "-":
            c = -c
        key = (exps[0], exps[1], exps[2])
        terms[key] = terms.get(key, 0.0) + c
        pos = m.end()
        first = False
    return {k: c for k, c in terms.items() if c != 0.0}


def format_polynomial(terms: Mapping[Exponents, float]) -> str:
    """Inverse of :func:`parse_polynomial`; coefficients round-trip exactly."""
    if not terms:
        return "0"
    parts = []
    for exps in sorted(terms, key=lambda e: (sum(e), e), reverse=True):
        c = terms[exps]
        factors = "".join(
            v if e == 1 else f"{v}^{e}" for v, e in zip(_VARS, exps) if e
        )
        body = f"{abs(c)!r}{factors}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# code generation


def _monomial_source(c: float, exps: Exponents) -> str:
    factors = [repr(c) if c >= 0 else f"({c!r})"]
    for var, e in zip(_VARS, exps):
        factors.extend([var] * e)
    return "*".join(factors)


def _sum_source(terms: Mapping[Exponents, float]) -> str:
    if not terms:
        return "0.0"
    return " + ".join(_monomial_source(c, e) for e, c in sorted(terms.items()))


def _compile(sources: list[str]) -> Callable[..., object]:
    body = sources[0] if len(sources) == 1 else "(" + ", ".join(sources) + ",)"
    return eval(f"lambda x, y, z: {body}", {"__builtins__": {}})


def _differentiate(terms: Mapping[Exponents, float], axis: int) -> dict[Exponents, float]:
    out: dict[Exponents, float] = {}
    for exps, c in terms.items():
        e = exps[axis]
        if e == 0:
            continue
        lowered = list(exps)
        lowered[axis] = e - 1
        out[(lowered[0], lowered[1], lowered[2])] = c * e
    return out


# ---------------------------------------------------------------------------
# fields


class ScalarField:
    """Polynomial function R^3 -> R with exact derivatives.

    Parameters
    ----------
    terms : mapping of (i, j, k) -> float
        Coefficient of ``x^i y^j z^k``.
    max_degree : int or None
        Upper bound on the total degree; ``None`` disables the check.
    """

    def __init__(
        self,
        terms: Mapping[Exponents, float] | None = None,
        max_degree: int | None = MAX_DEGREE,
    ):
        clean: dict[Exponents, float] = {}
        for exps, c in dict(terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != 3 or min(exps) < 0:
                raise ValueError(f"bad exponent triple {exps!r}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient for {exps!r}")
            clean[exps] = clean.get(exps, 0.0) + c
        self._terms = {e: c for e, c in clean.items() if c != 0.0}
        if max_degree is not None and self.degree > max_degree:
            raise DegreeError(
                f"degree {self.degree} exceeds the maximum of {max_degree}: {self}"
            )
        partials = [_differentiate(self._terms, i) for i in range(3)]
        second = [[_differentiate(partials[i], j) for j in range(3)] for i in range(3)]
        self.value_xyz = _compile([_sum_source(self._terms)])
        self.grad_xyz = _compile([_sum_source(p) for p in partials])
        self._hess_xyz = _compile([_sum_source(second[i][j]) for i in range(3) for j in range(3)])

    @classmethod
    def parse(cls, text: str, max_degree: int | None = MAX_DEGREE) -> "ScalarField":
        return cls(parse_polynomial(text), max_degree=max_degree)

    @classmethod
    def constant(cls, c: float) -> "ScalarField":
        return cls({(0, 0, 0): c})

    @property
    def terms(self) -> dict[Exponents, float]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def variables(self) -> set[str]:
        """Names of the coordinates the field actually depends on."""
        return {v for e in self._terms for v, k in zip(_VARS, e) if k}

    def __call__(self, x) -> float:
        return float(self.value_xyz(*x))

    def grad(self, x) -> np.ndarray:
        """Exact gradient (equivalently the differential, as h is Euclidean)."""
        return np.array(self.grad_xyz(*x), dtype=float)

    def hessian(self, x) -> np.ndarray:
        return np.array(self._hess_xyz(*x), dtype=float).reshape(3, 3)

    def derivative(self, axis: int) -> "ScalarField":
        return ScalarField(_differentiate(self._terms, axis), max_degree=None)

    def __eq__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        return format_polynomial(self._terms)

    def __repr__(self):
        return f"ScalarField({str(self)!r})"


def grad(f: ScalarField, x) -> np.ndarray:
    return f.grad(x)


class PoissonField:
    """Skew-symmetric 3x3 matrix field with polynomial entries.

    Only the upper triangle ``P12, P13, P23`` is stored; the lower triangle
    is its negative, so every evaluation is exactly skew.
    """

    def __init__(self, p12: ScalarField, p13: ScalarField, p23: ScalarField):
        self.p12, self.p13, self.p23 = p12, p13, p23
        self.entries_xyz = _compile(
            [_sum_source(p._terms) for p in (p12, p13, p23)]
        )
        self._grads = (p12.grad_xyz, p13.grad_xyz, p23.grad_xyz)

    @classmethod
    def parse(cls, p12: str, p13: str, p23: str, max_degree: int | None = MAX_DEGREE):
        return cls(*(ScalarField.parse(s, max_degree) for s in (p12, p13, p23)))

    @property
    def degree(self) -> int:
        return max(p.degree for p in (self.p12, self.p13, self.p23))

    def __call__(self, x) -> np.ndarray:
        a, b, c = self.entries_xyz(*x)
        return np.array([[0.0, a, b], [-a, 0.0, c], [-b, -c, 0.0]])

    def apply(self, x, v) -> np.ndarray:
        """``P(x) v`` without materialising the matrix."""
        a, b, c = self.entries_xyz(*x)
        v1, v2, v3 = v
        return np.array([a * v2 + b * v3, -a * v1 + c * v3, -b * v1 - c * v2])

    def derivative(self, x) -> np.ndarray:
        """Array ``D`` with ``D[i, j, k] = dP_ij / dx_k``."""
        g12, g13, g23 = (np.array(g(*x), dtype=float) for g in self._grads)
        D = np.zeros((3, 3, 3))
        D[0, 1], D[1, 0] = g12, -g12
        D[0, 2], D[2, 0] = g13, -g13
        D[1, 2], D[2, 1] = g23, -g23
        return D

    def __repr__(self):
        return f"PoissonField(p12={str(self.p12)!r}, p13={str(self.p13)!r}, p23={str(self.p23)!r})"


def eval_poisson(P: PoissonField, x) -> np.ndarray:
    return P(x)


def default_samples(n: int = 1000, seed: int = 42, box: float = 2.0) -> np.ndarray:
    """``n`` points uniform in ``[-box, box]^3`` from a seeded generator."""
    return np.random.default_rng(seed).uniform(-box, box, size=(n, 3))


@dataclass(frozen=True)
class CasimirReport:
    residuals: np.ndarray
    passed_each: np.ndarray
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.passed_each))

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    def __bool__(self):
        return self.passed


def verify_casimir(
    P: PoissonField,
    S: ScalarField,
    samples: Iterable | None = None,
    tol: float = 1e-12,
) -> CasimirReport:
    """Check ``P(x) dS(x) = 0`` pointwise.

    A sample passes when ``|P dS| <= tol * (1 + |P| |dS|)``. Failure is
    returned as data; nothing is raised for a non-Casimir ``S``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pts = default_samples() if samples is None else np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) == 0:
        raise ValueError("samples must be a non-empty sequence of 3-vectors")
    residuals = np.empty(len(pts))
    passed = np.empty(len(pts), dtype=bool)
    for n, x in enumerate(pts):
        x = vec3(x)
        Px = P(x)
        dS = S.grad(x)
        r = float(np.linalg.norm(Px @ dS))
        residuals[n] = r
        passed[n] = r <= tol * (1.0 + np.linalg.norm(Px) * np.linalg.norm(dS))
    return CasimirReport(residuals, passed, tol)
