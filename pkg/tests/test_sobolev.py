"""Tests for Sobolev norms, the Calderón equivalence and the derivative diagnostics."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fblab.core.quadrature import CoefficientVector, QuadratureRule
from fblab.core.ratio import RatioEvaluator
from fblab.core.sobolev import (
    SobolevElement,
    calderon_equivalence_report,
    catalog_function,
    coefficient_decay_exponent,
    density_check,
    exact_band,
    old_derivative_diagnostic,
    potential_norm,
    sobolev_norm,
    sobolev_norm_l2,
)
from fblab.core.systems import Setting, SystemSpec
from fblab.utils.exceptions import DomainError, UnsupportedCombinationError

COUNT = 8


@pytest.fixture(scope="module")
def rule(essential_zero):
    return QuadratureRule.for_system(essential_zero, COUNT)


@given(st.floats(min_value=0.5, max_value=20.0))
def test_exact_band_is_ordered(lam1):
    low, high = exact_band(lam1)
    assert 0 < low <= 1.0 <= high


def test_exact_band_values():
    assert exact_band(2.5) == pytest.approx((0.4, 1.4))


def test_l2_norm_matches_quadrature(essential_zero, rule):
    element = SobolevElement(CoefficientVector(essential_zero, np.linspace(1.0, 0.1, COUNT)), 2.0)
    assert sobolev_norm(rule, element) == pytest.approx(sobolev_norm_l2(element.vector), rel=1e-8)


def test_potential_norm_at_zero_order(essential_zero, rule):
    vector = CoefficientVector(essential_zero, np.linspace(1.0, 0.1, COUNT))
    element = SobolevElement(vector, 2.0)
    assert potential_norm(rule, element, 0.0) == pytest.approx(vector.l2_norm(), rel=1e-8)
    with pytest.raises(DomainError):
        potential_norm(rule, element, -1.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_calderon_ratios_stay_in_band(essential_zero, p):
    report = calderon_equivalence_report(essential_zero, p, samples=10, seed=5, count=COUNT,
                                         baseline_band=(0.05, 5.0))
    assert report.within_band
    assert 0.05 <= report.min_ratio <= report.max_ratio <= 5.0
    if p == 2.0:
        assert report.exact_band == pytest.approx(exact_band(essential_zero.lam(1)))
    else:
        assert report.exact_band is None


def test_calderon_is_reproducible(essential_zero):
    first = calderon_equivalence_report(essential_zero, 2.0, samples=5, seed=9, count=4)
    second = calderon_equivalence_report(essential_zero, 2.0, samples=5, seed=9, count=4)
    assert (first.min_ratio, first.max_ratio) == (second.min_ratio, second.max_ratio)


def test_calderon_preconditions(essential_zero, lebesgue_zero):
    with pytest.raises(DomainError):
        calderon_equivalence_report(essential_zero, 2.0, count=17)
    with pytest.raises(UnsupportedCombinationError):
        calderon_equivalence_report(lebesgue_zero, 2.0)
    low = SystemSpec(Setting.ESSENTIAL, ratio=RatioEvaluator.build(-0.75, n_max=16))
    with pytest.raises(DomainError):
        calderon_equivalence_report(low, 2.0)


def test_element_preconditions(essential_zero, lebesgue_zero):
    with pytest.raises(DomainError):
        SobolevElement(CoefficientVector(essential_zero, [1.0]), 1.0)
    with pytest.raises(UnsupportedCombinationError):
        SobolevElement(CoefficientVector(lebesgue_zero, [1.0]), 2.0)


def test_step_diagnostic_separates_derivatives():
    report = old_derivative_diagnostic(0.0, 2.0, "smoothed-step")
    divergent = {entry.derivative: entry.divergent for entry in report.entries}
    assert divergent == {"old-natural": False, "new-natural": True, "old-lebesgue": False, "new-lebesgue": True}


def test_bump_diagnostic_is_finite():
    report = old_derivative_diagnostic(0.5, 3.0, "bump")
    assert not any(entry.divergent for entry in report.entries)


def test_unknown_catalog_function():
    with pytest.raises(DomainError):
        catalog_function("sawtooth")


def test_catalog_derivatives():
    x = np.linspace(0.1, 0.9, 17)
    h = 1e-6
    for name in ("smoothed-step", "bump"):
        f, fprime = catalog_function(name)
        assert fprime(x) == pytest.approx((f(x + h) - f(x - h)) / (2.0 * h), rel=1e-5, abs=1e-6)


def test_density(essential_zero):
    f, _ = catalog_function("bump")
    norms = density_check(essential_zero, f, count=32, t_values=(0.1, 0.01, 0.001))
    assert np.all(np.diff(norms) < 0)
    assert norms[-1] < norms[0]


def test_coefficient_decay_exponent(essential_zero):
    n = np.arange(1, 41, dtype=float)
    assert coefficient_decay_exponent(CoefficientVector(essential_zero, n**-3)) == pytest.approx(3.0, rel=1e-9)
    with pytest.raises(DomainError):
        coefficient_decay_exponent(CoefficientVector(essential_zero, np.full(40, 1e-15)))
