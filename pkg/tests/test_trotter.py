"""Tests for the generator gap and the Trotter sandwich."""
import numpy as np
import pytest

from fblab.operators.trotter import (
    differentiated_generator_residual,
    generator_gap,
    generator_gap_sup,
    sandwich_constant,
    series_endpoint_target,
    trotter_sandwich_check,
)
from fblab.utils.exceptions import UnsupportedCombinationError


def test_gap_vanishes_at_half(ratio_half):
    assert np.max(np.abs(generator_gap(ratio_half, np.linspace(0.0, 1.0, 101)))) < 1e-9


def test_series_term_endpoint(ratio_zero):
    assert ratio_zero.r_prime_series(1.0) == pytest.approx(series_endpoint_target(ratio_zero), rel=1e-8)


def test_gap_is_bounded(ratio_zero):
    values = generator_gap(ratio_zero, np.linspace(0.0, 1.0, 257))
    assert np.all(np.isfinite(values))
    assert sandwich_constant(ratio_zero) == pytest.approx(1.05 * generator_gap_sup(ratio_zero))


def test_sandwich_holds(lebesgue_zero):
    report = trotter_sandwich_check(lebesgue_zero, [0.01, 0.05, 0.2], grid=10)
    assert report.passed
    assert report.violations == 0
    assert report.c > 0


def test_sandwich_needs_lebesgue(essential_zero):
    with pytest.raises(UnsupportedCombinationError):
        trotter_sandwich_check(essential_zero, [0.1])


@pytest.mark.parametrize("n", [2, 3])
def test_differentiated_generator(lebesgue_zero, n):
    x = np.linspace(0.1, 0.85, 16)
    assert np.max(np.abs(differentiated_generator_residual(lebesgue_zero, n, x))) < 1e-5
