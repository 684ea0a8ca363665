"""Two-sided short-time comparators and the kernel/comparator ratio sweep."""
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from loguru import logger

from fblab.config import KernelConfig, RatioConfig
from fblab.core.systems import Setting, SystemSpec
from fblab.operators.kernels import SeriesKernel, gaussian_resolved
from fblab.schemas import RatioReport
from fblab.utils.exceptions import DomainError
from fblab.utils.helpers import parallel_map

Comparator = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


def _gaussian(t: float, x: np.ndarray, y: np.ndarray, constant: float = 4.0) -> np.ndarray:
    return np.exp(-((x - y) ** 2) / (constant * t)) / np.sqrt(t)


def _min_one(u: np.ndarray) -> np.ndarray:
    return np.minimum(1.0, u)


def jacobi_comparator(alpha: float, beta: float) -> Comparator:
    """[1 ∧ xy/t]^{α+1/2} [1 ∧ (1-x)(1-y)/t]^{β+1/2} t^{-1/2} e^{-(x-y)²/4t}."""

    def evaluate(t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (_min_one(x * y / t) ** (alpha + 0.5) * _min_one((1 - x) * (1 - y) / t) ** (beta + 0.5)
                * _gaussian(t, x, y))

    return evaluate


def lebesgue_diff_comparator(nu: float) -> Comparator:
    """Comparator of ℍ_t^ν: the Jacobi one with (α, β) = (ν+1, 3/2)."""
    return jacobi_comparator(nu + 1.0, 1.5)


def essential_heat_comparator(nu: float, constant: float = 4.0) -> Comparator:
    """(t ∨ xy)^{-ν-1/2} [t ∨ (1-x)(1-y)]^{-1} t^{-1/2} e^{-(x-y)²/(constant t)}."""

    def evaluate(t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (np.maximum(t, x * y) ** (-nu - 0.5) / np.maximum(t, (1 - x) * (1 - y))
                * _gaussian(t, x, y, constant))

    return evaluate


def essential_diff_comparator(nu: float) -> Comparator:
    """[1 ∧ xy/t][1 ∧ (1-x)(1-y)/t] times the essential heat comparator."""
    heat = essential_heat_comparator(nu)

    def evaluate(t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return _min_one(x * y / t) * _min_one((1 - x) * (1 - y) / t) * heat(t, x, y)

    return evaluate


@dataclass(frozen=True)
class ComparatorCase:
    """A kernel paired with its comparator."""

    name: str
    setting: Setting
    differentiated: bool
    comparator: Callable[[SystemSpec], Comparator]
    description: str


CASES: Dict[str, ComparatorCase] = {
    "jacobi": ComparatorCase(
        "jacobi", Setting.JACOBI, False,
        lambda spec: jacobi_comparator(spec.alpha, spec.beta),
        "Jacobi heat kernel vs sharp short-time bound",
    ),
    "hsest": ComparatorCase(
        "hsest", Setting.LEBESGUE, True,
        lambda spec: lebesgue_diff_comparator(spec.nu),
        "Lebesgue differentiated kernel vs Jacobi (nu+1, 3/2) bound",
    ),
    "heess": ComparatorCase(
        "heess", Setting.ESSENTIAL, False,
        lambda spec: essential_heat_comparator(spec.nu),
        "essential heat kernel vs sharp short-time bound",
    ),
    "heess-prob": ComparatorCase(
        "heess-prob", Setting.ESSENTIAL_PROB, False,
        lambda spec: essential_heat_comparator(spec.nu),
        "probabilistic essential heat kernel vs sharp short-time bound",
    ),
    "hseest": ComparatorCase(
        "hseest", Setting.ESSENTIAL, True,
        lambda spec: essential_diff_comparator(spec.nu),
        "essential differentiated kernel vs sharp short-time bound",
    ),
    "heess-8t": ComparatorCase(
        "heess-8t", Setting.ESSENTIAL, False,
        lambda spec: essential_heat_comparator(spec.nu, constant=8.0),
        "negative control: Gaussian constant 8 instead of 4",
    ),
}


def comparator_grid(size: int, lower: float = 0.05, upper: float = 0.95) -> np.ndarray:
    return np.linspace(lower, upper, size)


def sharp_bound_ratio(
    case: str,
    t_values: Sequence[float],
    grid: int = 32,
    nu: Optional[float] = None,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    config: Optional[KernelConfig] = None,
    cap: Optional[float] = None,
    ratio_config: Optional[RatioConfig] = None,
) -> RatioReport:
    """
    Extremes of kernel/comparator over grid² × t-values.

    Points whose Gaussian exponent exceeds ``config.max_exponent`` are not
    resolved by the truncated series and are skipped.

    Args:
        case: Key of ``CASES``.
        t_values: Times in [t_min, T].
        grid: Points per axis in [0.05, 0.95].
        nu: Order for Fourier–Bessel cases.
        alpha: Jacobi α.
        beta: Jacobi β.
        config: Kernel policy.
        cap: Allowed max/min spread, recorded in the report.
        ratio_config: Ratio evaluator policy.

    Raises:
        DomainError: Unknown case, or a comparator vanishing on the grid.
    """
    if case not in CASES:
        raise DomainError(f"unknown comparator case {case!r}; choose from {sorted(CASES)}")
    entry = CASES[case]
    config = config or KernelConfig()
    spec = SystemSpec.build(entry.setting, nu=nu, alpha=alpha, beta=beta, config=ratio_config)
    kernel = SeriesKernel(spec, config, differentiated=entry.differentiated)
    comparator = entry.comparator(spec)

    points = comparator_grid(grid)
    X, Y = np.meshgrid(points, points, indexing="ij")

    def sweep(t: float) -> np.ndarray:
        values = kernel.matrix(t, points)
        bound = comparator(t, X, Y)
        if np.any(bound <= 0) or not np.all(np.isfinite(bound)):
            raise DomainError(f"comparator {case} not positive on the grid at t={t}")
        mask = gaussian_resolved(t, X, Y, config.max_exponent)
        return (values / bound)[mask]

    ratios = np.concatenate(parallel_map(sweep, list(t_values)))
    report = RatioReport(
        kernel=repr(kernel),
        comparator=case,
        parameters={"nu": nu} if spec.setting.is_fourier_bessel else {"alpha": alpha, "beta": beta},
        t_values=[float(t) for t in t_values],
        grid=grid,
        resolved_points=int(ratios.size),
        min_ratio=float(np.min(ratios)),
        max_ratio=float(np.max(ratios)),
        cap=cap,
        config={"truncation": float(kernel.truncation), "tolerance": config.tolerance,
                "t_min": config.t_min, "max_exponent": config.max_exponent},
    )
    logger.info(f"{case}: ratio in [{report.min_ratio:.3e}, {report.max_ratio:.3e}] over {report.resolved_points} points")
    return report


def ratio_within_cap(report: RatioReport) -> bool:
    """0 < min <= max < ∞ and, with a cap, max/min <= cap."""
    if not (report.min_ratio > 0 and np.isfinite(report.max_ratio)):
        return False
    return report.cap is None or report.spread <= report.cap
