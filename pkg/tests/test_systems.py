"""Tests for the eigenfunction systems, their derivatives and adjoints."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fblab.core.quadrature import QuadratureRule
from fblab.core.ratio import RatioEvaluator
from fblab.core.sobolev import catalog_function
from fblab.core.systems import (
    DerivativeKind,
    Setting,
    SystemSpec,
    TensorSystem,
    divergence_form_residual,
    essential_generator_residual,
    jacobi_operator_derivative,
    jacobi_potential,
    uniform_bound_report,
)
from fblab.utils.exceptions import DimensionMismatchError, DomainError, UnsupportedCombinationError

FOURIER_BESSEL = [Setting.NATURAL, Setting.LEBESGUE, Setting.ESSENTIAL, Setting.ESSENTIAL_PROB, Setting.MODIFIED]
INTERIOR = np.linspace(0.1, 0.85, 16)


def numerical_derivative(spec, n, x, h=1e-6):
    return (spec.basis([n], x + h)[0] - spec.basis([n], x - h)[0]) / (2.0 * h)


@pytest.mark.parametrize("setting", FOURIER_BESSEL)
def test_gram_is_identity(ratio_zero, setting):
    spec = SystemSpec(setting, ratio=ratio_zero)
    rule = QuadratureRule.for_system(spec, 8)
    gram = rule.gram(spec, spec.indices(8))
    assert np.max(np.abs(gram - np.eye(8))) < 1e-8


def test_jacobi_gram_is_identity(jacobi_system):
    rule = QuadratureRule.for_system(jacobi_system, 7)
    gram = rule.gram(jacobi_system, jacobi_system.indices(8))
    assert np.max(np.abs(gram - np.eye(8))) < 1e-8


def test_differentiated_gram(essential_zero):
    indices = list(range(2, 9))
    rule = QuadratureRule.for_system(essential_zero, 8)
    gram = rule.gram(essential_zero, indices, DerivativeKind.NEW)
    expected = np.diag([essential_zero.derivative_norm_sq(n) for n in indices])
    assert np.max(np.abs(gram - expected)) / np.max(expected) < 1e-7


@pytest.mark.parametrize("setting", FOURIER_BESSEL)
@pytest.mark.parametrize("n", [2, 4])
def test_new_derivative_is_d_plus_a(ratio_zero, setting, n):
    spec = SystemSpec(setting, ratio=ratio_zero)
    a, _ = spec.derivative_coefficients(INTERIOR)
    expected = numerical_derivative(spec, n, INTERIOR) + a * spec.basis([n], INTERIOR)[0]
    actual = spec.derivative_basis([n], INTERIOR)[0]
    scale = max(1.0, float(np.max(np.abs(expected))))
    assert np.max(np.abs(actual - expected)) / scale < 1e-6


def test_first_essential_derivative_vanishes(essential_zero):
    assert np.all(essential_zero.derivative_basis([1], INTERIOR)[0] == 0.0)


@pytest.mark.parametrize("setting", [Setting.NATURAL, Setting.LEBESGUE])
def test_old_derivative(ratio_zero, setting):
    spec = SystemSpec(setting, ratio=ratio_zero)
    old = spec.derivative_basis([3], INTERIOR, DerivativeKind.OLD)[0]
    expected = numerical_derivative(spec, 3, INTERIOR)
    if setting is Setting.LEBESGUE:
        expected = expected - (spec.nu + 0.5) / INTERIOR * spec.basis([3], INTERIOR)[0]
    assert old == pytest.approx(expected, rel=1e-6, abs=1e-6)


def test_old_derivative_rejected_on_essential(essential_zero):
    with pytest.raises(UnsupportedCombinationError):
        essential_zero.derivative_basis([2], INTERIOR, DerivativeKind.OLD)


def test_jacobi_derivative_closed_form(jacobi_system):
    for k in range(1, 5):
        closed = jacobi_system.derivative_basis([k], INTERIOR)[0]
        direct = jacobi_operator_derivative(k, jacobi_system.alpha, jacobi_system.beta, INTERIOR)
        assert closed == pytest.approx(direct, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_essential_generator(essential_zero, n):
    residual = essential_generator_residual(essential_zero, n, INTERIOR)
    assert np.max(np.abs(residual)) < 1e-4 * essential_zero.lam(n) ** 2


@pytest.mark.parametrize("fixture", ["ratio_zero", "ratio_half"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_divergence_form(request, fixture, n):
    spec = SystemSpec(Setting.LEBESGUE, ratio=request.getfixturevalue(fixture))
    assert np.max(np.abs(divergence_form_residual(spec, n, INTERIOR))) < 1e-5


def test_commutator_symbol_closed_form(essential_half):
    expected = 2.0 * np.pi**2 / np.sin(np.pi * INTERIOR) ** 2
    assert essential_half.commutator_symbol(INTERIOR) == pytest.approx(expected, rel=1e-8)


def test_commutator_vanishes_for_chebyshev_jacobi():
    spec = SystemSpec(Setting.JACOBI, alpha=-0.5, beta=-0.5)
    assert np.all(spec.commutator_symbol(INTERIOR) == 0.0)


def test_lebesgue_minus_half_matches_jacobi():
    lebesgue = SystemSpec(Setting.LEBESGUE, ratio=RatioEvaluator.build(-0.5, n_max=16))
    a, _ = lebesgue.derivative_coefficients(INTERIOR)
    assert a == pytest.approx(jacobi_potential(-0.5, 0.5, INTERIOR), rel=1e-9)


def test_probabilistic_eigenvalues(ratio_zero):
    spec = SystemSpec(Setting.ESSENTIAL_PROB, ratio=ratio_zero)
    assert spec.eigenvalue(1) == 0.0
    assert spec.eigenvalue(3) == pytest.approx(ratio_zero.lam(3) ** 2 - ratio_zero.lam(1) ** 2)


def test_jacobi_needs_parameters():
    with pytest.raises(DomainError):
        SystemSpec.build(Setting.JACOBI, alpha=0.5)


def test_index_checks(essential_zero, jacobi_system):
    with pytest.raises(DomainError):
        essential_zero.eval_eigenfunction(0, 0.5)
    with pytest.raises(DomainError):
        essential_zero.eval_eigenfunction(2, 1.0)
    assert jacobi_system.first_index == 0


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6),
       st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.05, max_value=0.95))
def test_tensor_eval_is_product(essential_zero, i, j, x, y):
    tensor = TensorSystem([essential_zero, essential_zero])
    expected = essential_zero.eval_eigenfunction(i, x) * essential_zero.eval_eigenfunction(j, y)
    assert tensor.tensor_eval([i, j], [x, y]) == pytest.approx(expected, rel=1e-12)
    assert tensor.eigenvalue([i, j]) == pytest.approx(essential_zero.lam(i) ** 2 + essential_zero.lam(j) ** 2)


def test_tensor_dimension_mismatch(essential_zero):
    tensor = TensorSystem([essential_zero, essential_zero])
    with pytest.raises(DimensionMismatchError):
        tensor.tensor_eval([1, 2, 3], [0.5, 0.5])


def test_tensor_rejects_non_essential(lebesgue_zero):
    with pytest.raises(UnsupportedCombinationError):
        TensorSystem([lebesgue_zero])


def test_uniform_bounds(essential_zero):
    report = uniform_bound_report(essential_zero, 20)
    assert report.within_bound
    assert len(report.sup_eigenfunction) == 20


def test_adjoint_pairing(essential_half):
    f, fprime = catalog_function("bump")

    def g(x):
        return x * f(x)

    def gprime(x):
        return f(x) + x * fprime(x)

    rule = QuadratureRule.interval(0.2, 0.8, 16)
    weights = rule.weights * essential_half.measure(rule.nodes)
    left = np.dot(weights, essential_half.apply_derivative(f, fprime, rule.nodes) * g(rule.nodes))
    right = np.dot(weights, f(rule.nodes) * essential_half.apply_adjoint(g, gprime, rule.nodes))
    assert left == pytest.approx(right, rel=1e-7, abs=1e-12)
