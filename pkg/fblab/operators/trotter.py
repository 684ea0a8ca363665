"""Zero-order gap between 𝕄_ν and the Jacobi generator M_{ν,1/2}, and the Trotter sandwich."""
import math
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger

from fblab.config import KernelConfig
from fblab.core.ratio import RatioEvaluator, pin2_term
from fblab.core.systems import Setting, SystemSpec
from fblab.operators.comparators import comparator_grid
from fblab.operators.kernels import SeriesKernel, gaussian_resolved
from fblab.schemas import SandwichReport
from fblab.utils.exceptions import UnsupportedCombinationError

ArrayLike = Union[float, np.ndarray]

SUP_SLACK = 1.05


def generator_gap(ratio: RatioEvaluator, x: ArrayLike) -> ArrayLike:
    """
    F^ν(x) = (ν+3/2)(ν+1/2) g(x) + 2[g(1-x) + 1/(1+x)² + the positive series of (R^ν)'].

    Here g(u) = 1/u² - π²/(4 sin²(πu/2)); every piece is finite on [0, 1]
    and F^{1/2} vanishes identically.
    """
    nu = ratio.nu
    x_arr = np.asarray(x, dtype=float)
    value = ((nu + 1.5) * (nu + 0.5) * pin2_term(x_arr)
             + 2.0 * (pin2_term(1.0 - x_arr) + 1.0 / (1.0 + x_arr) ** 2 + ratio.r_prime_series(x_arr)))
    return value if np.ndim(value) else float(value)


def series_endpoint_target(ratio: RatioEvaluator) -> float:
    """(λ_1² - (ν+1)(ν+2))/3, the value of the series term of F^ν at x = 1."""
    nu = ratio.nu
    return (ratio.lam(1) ** 2 - (nu + 1.0) * (nu + 2.0)) / 3.0


def generator_gap_sup(ratio: RatioEvaluator, size: int = 2049) -> float:
    """Grid sup of |F^ν| over [0, 1], endpoints included."""
    grid = np.linspace(0.0, 1.0, size)
    return float(np.max(np.abs(generator_gap(ratio, grid))))


def sandwich_constant(ratio: RatioEvaluator) -> float:
    """c_ν = 1.05 sup|F^ν|."""
    return SUP_SLACK * generator_gap_sup(ratio)


def trotter_sandwich_check(
    spec: SystemSpec,
    t_values: Sequence[float],
    grid: int = 32,
    config: Optional[KernelConfig] = None,
    rtol: float = 1e-6,
    atol: float = 1e-8,
) -> SandwichReport:
    """
    Check e^{-ct} H_t ≤ ℍ_t ≤ e^{ct} H_t on grid² for each t.

    ℍ_t is the Lebesgue differentiated kernel and H_t^{ν,1/2} = 𝔾_t^{ν+1,3/2}
    the Jacobi one. Points with Gaussian exponent past ``max_exponent`` are
    counted as unresolved.

    Raises:
        UnsupportedCombinationError: If ``spec`` is not a Lebesgue system.
    """
    if spec.setting is not Setting.LEBESGUE:
        raise UnsupportedCombinationError("the sandwich compares the Lebesgue differentiated kernel")
    config = config or KernelConfig()
    c = sandwich_constant(spec.ratio)
    diff = SeriesKernel(spec, config, differentiated=True)
    jacobi = SeriesKernel(SystemSpec(Setting.JACOBI, alpha=spec.nu + 1.0, beta=1.5), config)

    points = comparator_grid(grid)
    X, Y = np.meshgrid(points, points, indexing="ij")
    violations = unresolved = 0
    for t in t_values:
        mask = gaussian_resolved(t, X, Y, config.max_exponent)
        h = diff.matrix(t, points)[mask]
        g = jacobi.matrix(t, points)[mask]
        lower = math.exp(-c * t) * g * (1.0 - rtol) - atol
        upper = math.exp(c * t) * g * (1.0 + rtol) + atol
        bad = int(np.sum((h < lower) | (h > upper)))
        if bad:
            logger.warning(f"Sandwich nu={spec.nu}, t={t}: {bad} violations")
        violations += bad
        unresolved += int(mask.size - mask.sum())
    return SandwichReport(
        nu=spec.nu,
        c=c,
        t_values=[float(t) for t in t_values],
        grid=grid,
        violations=violations,
        unresolved=unresolved,
        passed=violations == 0,
    )


def differentiated_generator_residual(spec: SystemSpec, n: int, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """
    (𝕄_ν - λ_n²) 𝔻ψ_n relative to max|λ_n² 𝔻ψ_n|, with 𝕄_ν = -d² + (ν+3/2)(ν+1/2)/x² + 2(R^ν)'.

    The second derivative is a central difference of 𝔻ψ_n.
    """
    if spec.setting is not Setting.LEBESGUE:
        raise UnsupportedCombinationError("𝕄_ν acts on the Lebesgue differentiated system")
    x = np.asarray(x, dtype=float)
    nu = spec.nu
    u = spec.derivative_basis([n], x)[0]
    second = (spec.derivative_basis([n], x + h)[0] - 2.0 * u + spec.derivative_basis([n], x - h)[0]) / h**2
    lam2 = spec.lam(n) ** 2
    applied = -second + ((nu + 1.5) * (nu + 0.5) / x**2 + 2.0 * spec.ratio.r_prime(x)) * u
    return (applied - lam2 * u) / max(1.0, float(np.max(np.abs(lam2 * u))))
