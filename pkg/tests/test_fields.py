import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from metriplectic.fields import (
    DegreeError,
    PoissonField,
    PolynomialSyntaxError,
    ScalarField,
    default_samples,
    eval_poisson,
    format_polynomial,
    grad,
    parse_polynomial,
    verify_casimir,
)
from metriplectic.systems import builtin


@pytest.mark.parametrize(
    "text, terms",
    [
        ("0.5x^2 + 1y^2 + 1.5z^2", {(2, 0, 0): 0.5, (0, 2, 0): 1.0, (0, 0, 2): 1.5}),
        ("z", {(0, 0, 1): 1.0}),
        ("-1y", {(0, 1, 0): -1.0}),
        ("2x^2y z^3 - 1e-3", {(2, 1, 3): 2.0, (0, 0, 0): -1e-3}),
        ("3 * x * x", {(2, 0, 0): 3.0}),
        ("1x - 1x", {}),
        ("", {}),
        ("  4.  ", {(0, 0, 0): 4.0}),
    ],
)
def test_parse_polynomial(text, terms):
    assert parse_polynomial(text) == terms


@pytest.mark.parametrize("text", ["1 2", "x +", "q", "2x^", "+ + x", "x y ^"])
def test_parse_rejects(text):
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial(text)


def test_format_round_trip():
    terms = {(2, 1, 0): 0.1, (0, 0, 0): -1 / 3, (0, 0, 5): 7.0}
    assert parse_polynomial(format_polynomial(terms)) == terms


def test_degree_limit():
    ScalarField.parse("x^6")
    with pytest.raises(DegreeError):
        ScalarField.parse("x^4y^3")
    assert ScalarField.parse("x^4y^3", max_degree=None).degree == 7


def test_eval_examples():
    assert ScalarField.parse("0.5x^2 + 0.5y^2 + 0.5z^2")([1, 1, 1]) == 1.5
    assert ScalarField.parse("0.5z^2")([3, 4, 0]) == 0
    assert ScalarField.parse("0.5x^2 + 1y^2 + 1.5z^2")([1, 1, 1]) == 3


def test_grad_examples():
    assert_array_equal(grad(ScalarField.constant(4.2), [1, -2, 3]), [0, 0, 0])
    assert_array_equal(grad(ScalarField.parse("0.5x^2 + 1y^2 + 1.5z^2"), [1, 1, 1]), [1, 2, 3])
    x = np.array([0.3, -1.7, 2.0])
    assert_array_equal(grad(ScalarField.parse("0.5x^2 + 0.5y^2 + 0.5z^2"), x), x)


def _fd_grad(f, x, h=1e-6):
    out = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        out[i] = (f(x + e) - f(x - e)) / (2 * h)
    return out


@pytest.mark.parametrize("name", ["rigid_body", "oscillator", "degenerate_ex1", "degenerate_ex2"])
def test_grad_matches_finite_differences(name):
    spec = builtin(name)
    pts = np.random.default_rng(0).uniform(-2, 2, (100, 3))
    fields = [spec.H, spec.S, spec.P.p12, spec.P.p13, spec.P.p23]
    for f in fields:
        for x in pts:
            exact = f.grad(x)
            fd = _fd_grad(f, x)
            assert np.linalg.norm(exact - fd) <= 1e-6 * max(1.0, np.linalg.norm(exact))


def test_hessian_and_derivative():
    f = ScalarField.parse("1x^2y + 3yz^2 - 2x")
    x = np.array([1.0, 2.0, -1.0])
    # by hand: f_xx = 2y, f_xy = 2x, f_yz = 6z, f_zz = 6y
    expected = np.array([[4, 2, 0], [2, 0, -6], [0, -6, 12]], dtype=float)
    assert_array_equal(f.hessian(x), expected)
    assert f.derivative(0) == ScalarField.parse("2xy - 2")


def test_cubic_grad_finite_difference():
    f = ScalarField.parse("1x^3 - 2xyz + 0.25y^2z^3 + 5")
    for x in default_samples(100, seed=3):
        assert_allclose(f.grad(x), _fd_grad(f, x), rtol=1e-6, atol=1e-6)


def test_eval_poisson_examples():
    rb = builtin("rigid_body")
    assert_array_equal(eval_poisson(rb.P, [1, 2, 3]), [[0, 3, -2], [-3, 0, 1], [2, -1, 0]])
    osc = builtin("oscillator")
    assert_array_equal(osc.P([7, -1, 2]), [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    deg = builtin("degenerate_ex1")
    assert_array_equal(deg.P([5, 0, 2]), np.zeros((3, 3)))


@given(st.tuples(*[st.floats(-5, 5)] * 3))
def test_poisson_exactly_skew(x):
    P = PoissonField.parse("1x^2 - y", "3xz", "0.5y^3 + 2")
    A = P(x)
    assert_array_equal(A + A.T, 0)
    assert_allclose(P.apply(x, [1, 2, 3]), A @ [1, 2, 3], rtol=1e-15, atol=1e-12)


def test_poisson_derivative_finite_difference():
    P = PoissonField.parse("1x^2 - y", "3xz", "0.5y^3 + 2")
    x = np.array([0.4, -1.1, 0.9])
    D = P.derivative(x)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1e-6
        assert_allclose(D[:, :, k], (P(x + e) - P(x - e)) / 2e-6, atol=1e-7)


def test_verify_casimir_rigid_body():
    rb = builtin("rigid_body")
    report = verify_casimir(rb.P, rb.S)
    assert report.passed and report.max_residual <= 1e-15
    assert len(report.residuals) == 1000


def test_verify_casimir_oscillator_any_s_of_z():
    osc = builtin("oscillator")
    assert verify_casimir(osc.P, ScalarField.parse("1z^5 - 2z + 3"))


def test_verify_casimir_fails_for_s_equal_x():
    osc = builtin("oscillator")
    report = verify_casimir(osc.P, ScalarField.parse("x"), [[0.1, 0.2, 0.3]])
    assert not report.passed
    assert report.residuals[0] == pytest.approx(1.0)  # |P (1,0,0)| = |(0,-1,0)|


@pytest.mark.parametrize("name", ["rigid_body", "oscillator", "degenerate_ex1", "degenerate_ex2"])
def test_builtins_are_casimir(name):
    spec = builtin(name)
    assert verify_casimir(spec.P, spec.S).passed


def test_verify_casimir_preconditions():
    rb = builtin("rigid_body")
    with pytest.raises(ValueError):
        verify_casimir(rb.P, rb.S, [], tol=1e-12)
    with pytest.raises(ValueError):
        verify_casimir(rb.P, rb.S, tol=0)


def test_default_samples_reproducible():
    assert_array_equal(default_samples(), default_samples(1000, 42))
    pts = default_samples()
    assert pts.shape == (1000, 3) and np.all(np.abs(pts) <= 2)
