"""Bessel potentials 𝕴_σ and fractional powers on the span of a system."""
from typing import Optional, Union

import numpy as np
from loguru import logger

from fblab.config import KernelConfig
from fblab.core.quadrature import CoefficientVector
from fblab.core.systems import SystemSpec
from fblab.utils.exceptions import DomainError, TruncationError

ArrayLike = Union[float, np.ndarray]


def potential_multipliers(spec: SystemSpec, sigma: float, count: int, probabilistic: bool = False) -> np.ndarray:
    """
    λ_n^{-2σ}, or (λ_n² - λ_1²)^{-σ} with the bottom term dropped.

    Negative σ gives the fractional powers 𝕷^{|σ|}.

    Raises:
        DomainError: For σ = 0.
    """
    if sigma == 0:
        raise DomainError("sigma must be nonzero")
    lam = spec.zeros.zeros[:count]
    if not probabilistic:
        return lam ** (-2.0 * sigma)
    out = np.zeros(count)
    out[1:] = (lam[1:] ** 2 - lam[0] ** 2) ** (-sigma)
    return out


def potential_apply(vector: CoefficientVector, sigma: float, probabilistic: bool = False) -> CoefficientVector:
    """𝕴_σ on the span: c_n ↦ λ_n^{-2σ} c_n."""
    multipliers = potential_multipliers(vector.spec, sigma, len(vector), probabilistic)
    return CoefficientVector(vector.spec, multipliers * vector.coefficients)


def fractional_power(vector: CoefficientVector, power: float) -> CoefficientVector:
    """𝕷^{power} on the span, the inverse of 𝕴_{power}."""
    return potential_apply(vector, -power)


def potential_kernel(spec: SystemSpec, sigma: float, x: ArrayLike, y: ArrayLike, count: Optional[int] = None,
                     probabilistic: bool = False, config: Optional[KernelConfig] = None) -> ArrayLike:
    """
    𝕶_σ(x, y) = Γ(σ)^{-1} ∫₀^∞ 𝕲_t(x, y) t^{σ-1} dt as a truncated series.

    The time integral is taken termwise, ∫₀^∞ e^{-tμ} t^{σ-1} dt = Γ(σ) μ^{-σ}.
    The series keeps ``count`` terms, else the configured truncation, else
    the whole zero table. A warning is logged when the last kept multiplier
    exceeds the configured tolerance.

    Raises:
        DomainError: For σ <= 0, where the time integral diverges.
        TruncationError: If more terms are asked for than the zero table holds.
    """
    if sigma <= 0:
        raise DomainError(f"the kernel route needs sigma > 0, got {sigma}")
    if spec.zeros is None:
        raise DomainError(f"{spec.label()} has no Bessel zeros to build a potential on")
    config = config or KernelConfig()
    available = len(spec.zeros)
    count = count or config.truncation or available
    if count > available:
        raise TruncationError(f"{spec.label()} holds {available} zeros, potential kernel needs {count}",
                              required_truncation=count)
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    indices = spec.indices(count)
    fx = spec.basis(indices, x_arr.ravel())
    fy = spec.basis(indices, y_arr.ravel())
    weights = potential_multipliers(spec, sigma, count, probabilistic)
    if weights[-1] > config.tolerance:
        logger.warning(f"Potential kernel of order {sigma} truncated at {count} terms; last multiplier {weights[-1]:.3e}")
    out = (weights[:, None] * fx * fy).sum(axis=0).reshape(x_arr.shape)
    return out if out.ndim else float(out)


def is_injective_on_span(spec: SystemSpec, sigma: float, count: int, probabilistic: bool = False) -> bool:
    """
    Whether zero output coefficients force zero input coefficients.

    True exactly when every multiplier is finite and nonzero; the
    probabilistic potential annihilates the constant and is injective only
    on its orthogonal complement.
    """
    multipliers = potential_multipliers(spec, sigma, count, probabilistic)
    active = multipliers[1:] if probabilistic else multipliers
    return bool(np.all(np.isfinite(active)) and np.all(active != 0))
