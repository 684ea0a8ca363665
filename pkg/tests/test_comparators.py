"""Tests for the short-time comparators and the ratio sweep."""
import numpy as np
import pytest

from fblab.operators.comparators import (
    CASES,
    comparator_grid,
    essential_diff_comparator,
    essential_heat_comparator,
    jacobi_comparator,
    ratio_within_cap,
    sharp_bound_ratio,
)
from fblab.schemas import RatioReport
from fblab.utils.exceptions import DomainError

POINTS = comparator_grid(9)
X, Y = np.meshgrid(POINTS, POINTS, indexing="ij")


def make_report(min_ratio, max_ratio, cap=None):
    return RatioReport(kernel="k", comparator="c", parameters={}, t_values=[0.1], grid=4, resolved_points=16,
                       min_ratio=min_ratio, max_ratio=max_ratio, cap=cap, config={})


def test_chebyshev_comparator_is_gaussian():
    values = jacobi_comparator(-0.5, -0.5)(0.1, X, Y)
    assert values == pytest.approx(np.exp(-((X - Y) ** 2) / 0.4) / np.sqrt(0.1), rel=1e-14)


def test_differentiated_comparator_is_smaller():
    heat = essential_heat_comparator(0.0)(0.05, X, Y)
    diff = essential_diff_comparator(0.0)(0.05, X, Y)
    assert np.all(diff <= heat)
    assert np.all(diff > 0)


def test_wider_gaussian_constant_dominates():
    assert np.all(essential_heat_comparator(0.5, constant=8.0)(0.01, X, Y)
                  >= essential_heat_comparator(0.5)(0.01, X, Y))


def test_comparator_grid_bounds():
    grid = comparator_grid(5)
    assert grid[0] == pytest.approx(0.05)
    assert grid[-1] == pytest.approx(0.95)


@pytest.mark.parametrize("case", ["jacobi", "heess", "hsest"])
def test_ratio_sweep_is_positive_and_finite(case):
    report = sharp_bound_ratio(case, [0.01, 0.1], grid=8, nu=0.0, alpha=0.5, beta=-0.25)
    assert report.comparator == case
    assert report.resolved_points > 0
    assert report.min_ratio > 0
    assert np.isfinite(report.max_ratio)
    assert ratio_within_cap(report)


def test_unknown_case():
    with pytest.raises(DomainError):
        sharp_bound_ratio("nope", [0.1])


def test_cases_cover_negative_control():
    assert "heess-8t" in CASES
    assert not CASES["heess-8t"].differentiated


def test_cap_is_enforced():
    assert ratio_within_cap(make_report(0.5, 2.0, cap=5.0))
    assert not ratio_within_cap(make_report(0.5, 2.0, cap=3.0))
    assert not ratio_within_cap(make_report(0.0, 2.0))
    assert make_report(0.5, 2.0).spread == pytest.approx(4.0)
