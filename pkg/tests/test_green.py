"""Tests for the Green function of the Lebesgue setting."""
import numpy as np
import pytest

from fblab.core.systems import SystemSpec
from fblab.operators.green import GreenAux, eigen_relation_residual, green_apply, green_eval
from fblab.utils.exceptions import DomainError, UnsupportedCombinationError

POINTS = np.linspace(0.1, 0.9, 9)


@pytest.fixture(scope="module")
def aux(lebesgue_zero):
    return GreenAux(lebesgue_zero)


def test_primitive_endpoints(aux):
    assert aux.F(0.0) == 0.0
    assert aux.F(1.0) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(aux.F(np.linspace(0.0, 1.0, 101))) > 0)


def test_primitive_derivative_is_square(aux):
    h = 1e-6
    quotient = (aux.F(POINTS + h) - aux.F(POINTS - h)) / (2.0 * h)
    assert quotient == pytest.approx(aux.psi1(POINTS) ** 2, rel=1e-7)


def test_kernel_symmetric_and_positive(aux):
    X, Y = np.meshgrid(POINTS, POINTS, indexing="ij")
    values = green_eval(aux, X, Y)
    assert values == pytest.approx(values.T, rel=1e-13)
    assert np.all(values > 0)


def test_kernel_rejects_endpoints(aux):
    with pytest.raises(DomainError):
        aux.kernel(0.0, 0.5)


@pytest.mark.parametrize("n", [2, 3])
def test_eigen_relation(aux, n):
    assert eigen_relation_residual(aux, n, np.array([0.2, 0.5, 0.8])) < 1e-6


def test_apply_closure(aux):
    operator = green_apply(aux, np.ones_like)
    assert operator(np.array([0.3, 0.6])).shape == (2,)


def test_complement_near_one(aux):
    x = np.array([0.6, 0.9, 0.99])
    assert aux.complement(x) == pytest.approx(1.0 - aux.F(x), rel=1e-6)
    tiny = aux.complement(1.0 - 1e-6)
    assert 0 < tiny < 1e-15


def test_square_integral_matches_spectral_sum(aux):
    assert aux.square_integral() == pytest.approx(aux.spectral_square_integral(), rel=1e-3)


def test_square_integral_stable_under_refinement(aux):
    coarse, fine = aux.square_integral(16), aux.square_integral(32)
    assert abs(coarse - fine) < 0.01 * fine


def test_square_integral_at_half():
    aux = GreenAux(SystemSpec.build("lebesgue", nu=0.5, n_max=64))
    expected = (np.pi**2 / 12.0 - 11.0 / 16.0) / np.pi**4
    assert aux.spectral_square_integral() == pytest.approx(expected, rel=1e-6)
    assert aux.square_integral() == pytest.approx(expected, rel=1e-3)


def test_needs_lebesgue(essential_zero):
    with pytest.raises(UnsupportedCombinationError):
        GreenAux(essential_zero)
