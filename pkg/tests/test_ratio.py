"""Tests for the ratio functions R_n, S_n and R - R_n."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fblab.core.bessel import compute_zeros
from fblab.core.ratio import RatioEvaluator, pin2_term
from fblab.schemas import Status
from fblab.utils.exceptions import DomainError, PoleProximityError

interior = st.floats(min_value=0.05, max_value=0.85)


def test_closed_form_at_half(ratio_half):
    x = np.linspace(0.05, 0.95, 19)
    expected = 1.0 / x - np.pi / np.tan(np.pi * x)
    assert ratio_half.ratio_r(1, x) == pytest.approx(expected, rel=1e-9)


@given(interior)
def test_direct_and_series_agree(ratio_zero, x):
    direct = ratio_zero.ratio_r(1, x, mode="direct")
    series = ratio_zero.ratio_r(1, x, mode="series")
    assert direct == pytest.approx(series, rel=1e-9, abs=1e-10)


def test_diff_r_vanishes_for_first_index(ratio_zero):
    assert np.all(ratio_zero.diff_r(1, np.array([0.2, 0.7])) == 0.0)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_endpoint_slopes(ratio_zero, n):
    at_zero, at_one = ratio_zero.endpoint_slopes(n)
    target_zero, target_one = ratio_zero.endpoint_slope_targets(n)
    assert at_zero == pytest.approx(target_zero, rel=1e-4)
    assert at_one == pytest.approx(target_one, rel=1e-4)


def test_endpoint_slopes_need_second_index(ratio_zero):
    with pytest.raises(DomainError):
        ratio_zero.endpoint_slopes(1)


@pytest.mark.parametrize("fixture", ["ratio_zero", "ratio_half"])
def test_r_prime_series_at_one(request, fixture):
    ratio = request.getfixturevalue(fixture)
    nu = ratio.nu
    expected = (ratio.lam(1) ** 2 - (nu + 1.0) * (nu + 2.0)) / 3.0
    assert ratio.r_prime_series(1.0) == pytest.approx(expected, rel=1e-8)


@given(st.floats(min_value=0.1, max_value=0.85))
def test_r_prime_matches_difference_quotient(ratio_zero, x):
    h = 1e-5
    quotient = (ratio_zero.ratio_r(1, x + h) - ratio_zero.ratio_r(1, x - h)) / (2.0 * h)
    assert ratio_zero.r_prime(x) == pytest.approx(quotient, rel=1e-6)


def test_modified_gap_range(ratio_zero):
    assert ratio_zero.modified_gap(0.0) == pytest.approx(-1.0, abs=1e-12)
    assert ratio_zero.modified_gap(1.0) == pytest.approx(ratio_zero.nu + 0.5, abs=1e-8)
    values = ratio_zero.modified_gap(np.linspace(0.0, 1.0, 101))
    assert np.all(np.diff(values) > 0)


def test_pole_proximity(ratio_zero):
    pole = ratio_zero.lam(1) / ratio_zero.lam(3)
    with pytest.raises(PoleProximityError) as info:
        ratio_zero.ratio_r(3, pole + 1e-11)
    assert info.value.pole_index == 1


def test_s_function_enclosure(ratio_zero):
    enclosure = ratio_zero.s_function_enclosure(2, 0.5)
    assert enclosure.lower <= enclosure.value <= enclosure.upper
    assert enclosure.status is Status.PASS


def test_index_beyond_resolution(ratio_zero):
    with pytest.raises(DomainError):
        ratio_zero.s_function(ratio_zero.max_index + 1, 0.5)


def test_truncation_floor():
    with pytest.raises(DomainError):
        RatioEvaluator(compute_zeros(0.0, 100), truncation=5)


def test_pin2_term_bounds():
    u = np.linspace(0.0, 1.0, 201)
    values = pin2_term(u)
    assert np.all(values <= 0.0)
    assert np.all(values >= 1.0 - np.pi**2 / 4.0 - 1e-12)
    assert pin2_term(0.0) == pytest.approx(-np.pi**2 / 12.0)


def test_diff_r_sign_structure(ratio_zero):
    x = np.linspace(0.002, 0.998, 1999)
    assert ratio_zero.diff_r_sign_changes(2, x) <= 1
