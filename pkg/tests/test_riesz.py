"""Tests for the Riesz transforms."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fblab.core.quadrature import CoefficientVector, QuadratureRule
from fblab.core.systems import Setting, SystemSpec, TensorSystem
from fblab.operators.riesz import (
    RieszVariant,
    conjugate_exponent,
    lp_bound,
    modified_condition_ratio,
    modified_constant,
    riesz_adjoint,
    riesz_apply,
    riesz_lp_probe,
    riesz_multipliers,
    riesz_vectorial,
)
from fblab.utils.exceptions import DimensionMismatchError, DomainError, UnsupportedCombinationError

COUNT = 8
coefficients = arrays(np.float64, COUNT, elements=st.floats(min_value=-10.0, max_value=10.0))


@pytest.fixture(scope="module")
def prob_zero(ratio_zero):
    return SystemSpec(Setting.ESSENTIAL_PROB, ratio=ratio_zero)


@pytest.fixture(scope="module")
def rule(essential_zero):
    return QuadratureRule.for_system(essential_zero, COUNT)


def test_conjugate_exponent():
    assert conjugate_exponent(3.0) == pytest.approx(3.0)
    assert conjugate_exponent(1.5) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        conjugate_exponent(1.0)


def test_lp_bounds():
    assert lp_bound(2.0) == pytest.approx(48.0)
    assert modified_constant(0.0) == pytest.approx(0.25)
    assert lp_bound(2.0, RieszVariant.MODIFIED, 0.0) == pytest.approx(48.0 * 1.5)
    with pytest.raises(DomainError):
        modified_constant(-0.5)


def test_multipliers_drop_bottom_index(essential_zero, prob_zero):
    assert riesz_multipliers(essential_zero, RieszVariant.STANDARD, COUNT)[0] == 0.0
    prob = riesz_multipliers(prob_zero, RieszVariant.PROBABILISTIC, COUNT)
    gaps = np.array([prob_zero.derivative_norm_sq(n) for n in range(2, COUNT + 1)])
    assert prob[1:] ** 2 * gaps == pytest.approx(np.ones(COUNT - 1))


@given(coefficients)
def test_standard_transform_is_contraction(essential_zero, c):
    vector = CoefficientVector(essential_zero, c)
    assert riesz_apply(vector).l2_norm() <= vector.l2_norm() + 1e-12


@given(coefficients)
def test_probabilistic_transform_is_isometry_off_constants(prob_zero, c):
    vector = CoefficientVector(prob_zero, c)
    result = riesz_apply(vector, RieszVariant.PROBABILISTIC)
    assert result.l2_norm() == pytest.approx(np.linalg.norm(c[1:]), rel=1e-12, abs=1e-12)


def test_exact_norm_matches_quadrature(essential_zero, rule):
    c = np.linspace(1.0, -1.0, COUNT)
    result = riesz_apply(CoefficientVector(essential_zero, c))
    assert rule.lp_norm(result, 2.0) == pytest.approx(result.l2_norm(), rel=1e-8)


def test_adjoint_pairing(essential_zero, rule):
    c = np.cos(np.arange(COUNT))
    vector = CoefficientVector(essential_zero, c)

    def g(x):
        return np.sin(3.0 * x) * x

    left = rule.inner_product(riesz_apply(vector), g)
    right = float(np.dot(c, riesz_adjoint(essential_zero, rule, g, COUNT).coefficients))
    assert left == pytest.approx(right, rel=1e-10, abs=1e-12)


def test_variant_must_match_setting(essential_zero):
    with pytest.raises(UnsupportedCombinationError):
        riesz_multipliers(essential_zero, RieszVariant.MODIFIED, COUNT)


def test_lp_probe_at_two(essential_zero):
    report = riesz_lp_probe(essential_zero, RieszVariant.STANDARD, 2.0, samples=10, seed=3, count=COUNT)
    assert report.max_ratio <= 1.0 + 1e-8
    assert report.asserted and report.within_bound
    assert report.seed == 3


def test_lp_probe_is_reproducible(essential_zero):
    first = riesz_lp_probe(essential_zero, "standard", 3.0, samples=5, seed=11, count=COUNT)
    second = riesz_lp_probe(essential_zero, "standard", 3.0, samples=5, seed=11, count=COUNT)
    assert first.max_ratio == second.max_ratio
    assert first.within_bound


def test_modified_condition(ratio_zero):
    spec = SystemSpec(Setting.MODIFIED, ratio=ratio_zero)
    ratio = modified_condition_ratio(spec, np.linspace(0.01, 0.99, 99))
    assert 0 < ratio <= modified_constant(0.0)


def test_vectorial_in_one_dimension_matches_scalar(essential_zero):
    c = np.linspace(0.5, 2.0, COUNT)
    points = np.linspace(0.1, 0.9, 7)
    vectorial = riesz_vectorial(TensorSystem([essential_zero]), c)
    scalar = riesz_apply(CoefficientVector(essential_zero, c))
    assert vectorial.components(points[:, None])[0] == pytest.approx(scalar(points), rel=1e-12, abs=1e-12)
    assert vectorial.l2_norm() == pytest.approx(scalar.l2_norm(), rel=1e-12)


def test_vectorial_contraction(essential_zero):
    c = np.arange(1.0, 10.0).reshape(3, 3)
    vectorial = riesz_vectorial(TensorSystem([essential_zero, essential_zero]), c)
    assert vectorial.l2_norm() <= np.linalg.norm(c)
    assert vectorial.magnitude(np.array([[0.3, 0.4], [0.5, 0.6]])).shape == (2,)


def test_vectorial_rank_mismatch(essential_zero):
    with pytest.raises(DimensionMismatchError):
        riesz_vectorial(TensorSystem([essential_zero, essential_zero]), np.ones(4))
