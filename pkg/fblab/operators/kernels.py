"""Heat kernels of the eigenfunction systems and of their differentiated systems."""
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from loguru import logger

from fblab.config import KernelConfig
from fblab.core.quadrature import QuadratureRule
from fblab.core.systems import Setting, SystemSpec, jacobi_operator_derivative
from fblab.utils.exceptions import DomainError, TruncationError

ArrayLike = Union[float, np.ndarray]

# Growth exponent of sup|e_n| sup|D e_n| beyond 2ν, from the uniform bounds n^{ν+2} and n^{ν+5}.
REMAINDER_POWER = 9.0


class SeriesKernel:
    """
    K_t(x, y) = Σ e^{-t μ_n} u_n(x) u_n(y) / ‖u_n‖².

    With ``differentiated=False`` the u_n are the eigenfunctions and μ_n the
    eigenvalues of the system. With ``differentiated=True`` the u_n are the
    new derivatives D e_n for n past the bottom index, which gives 𝕳_t, ℍ_t,
    the modified and natural analogues, and the Jacobi H_t^{α,β}.
    """

    def __init__(self, spec: SystemSpec, config: Optional[KernelConfig] = None, differentiated: bool = False):
        """
        Initialize the kernel and fix its truncation.

        Raises:
            TruncationError: If the truncation needed at ``t_min`` exceeds the
                indices the system resolves.
        """
        self.spec = spec
        self.config = config or KernelConfig()
        self.differentiated = differentiated
        self._shift = spec.lam(1) ** 2 if spec.setting is Setting.ESSENTIAL_PROB else 0.0
        self.truncation = self.config.truncation or self.required_truncation(self.config.t_min)
        last = spec.first_index + self.truncation - 1
        if spec.max_index is not None and last > spec.max_index:
            raise TruncationError(
                f"{spec.label()} resolves indices up to {spec.max_index}, kernel needs {last}",
                required_truncation=self.truncation,
            )
        start = spec.first_index + (1 if differentiated else 0)
        self.indices = np.arange(start, spec.first_index + self.truncation)
        self._eigenvalues = spec.eigenvalues(self.indices)
        if differentiated:
            self._norms = np.array([spec.derivative_norm_sq(int(n)) for n in self.indices])
        else:
            self._norms = np.ones(len(self.indices))
        logger.debug(f"{self!r}: truncation {self.truncation}")

    def __repr__(self) -> str:
        kind = "differentiated" if self.differentiated else "heat"
        return f"SeriesKernel({self.spec.label()}, {kind})"

    def _raw_eigenvalue(self, n: int) -> float:
        if self.spec.setting is Setting.JACOBI:
            s = self.spec.alpha + self.spec.beta + 1.0
            return math.pi**2 * (n + s / 2.0) ** 2
        return self.spec.lam(n) ** 2 if n <= len(self.spec.zeros) else (math.pi * n) ** 2

    def required_truncation(self, t: float) -> int:
        """
        Smallest N with e^{-t(μ_{N+1})} (N+1)^{2 max(ν,α,0) + 9} below the tolerance.

        Raises:
            DomainError: For t <= 0.
        """
        if t <= 0:
            raise DomainError(f"t must be positive, got {t}")
        spec = self.spec
        param = spec.nu if spec.setting.is_fourier_bessel else spec.alpha
        power = 2.0 * max(param, 0.0) + REMAINDER_POWER
        log_tol = math.log(self.config.tolerance)
        n = 1
        while True:
            index = spec.first_index + n
            bound = -t * (self._raw_eigenvalue(index) - self._shift) + power * math.log(n + 1)
            if bound < log_tol:
                return n
            n += 1

    def _check_time(self, t: float) -> None:
        if t < self.config.t_min:
            raise TruncationError(
                f"t={t} below t_min={self.config.t_min}; series needs "
                f"{self.required_truncation(t)} terms",
                required_truncation=self.required_truncation(t),
            )

    def _functions(self, x: np.ndarray) -> np.ndarray:
        spec = self.spec
        if not self.differentiated:
            return spec.basis(self.indices, x)
        if spec.setting is Setting.JACOBI:
            return np.array([jacobi_operator_derivative(int(k), spec.alpha, spec.beta, x) for k in self.indices])
        return spec.derivative_basis(self.indices, x)

    def _weights(self, t: float) -> np.ndarray:
        return np.exp(-t * self._eigenvalues) / self._norms

    def __call__(self, t: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
        """
        Kernel at paired points (x, y), broadcast together.

        Raises:
            TruncationError: For t < t_min, with the truncation t would need.
        """
        self._check_time(t)
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        fx = self._functions(x_arr.ravel())
        fy = self._functions(y_arr.ravel())
        out = (self._weights(t)[:, None] * fx * fy).sum(axis=0).reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def matrix(self, t: float, x: np.ndarray, y: Optional[np.ndarray] = None) -> np.ndarray:
        """Kernel values on the product grid x × y, shape (len(x), len(y))."""
        self._check_time(t)
        fx = self._functions(np.asarray(x, dtype=float))
        fy = fx if y is None else self._functions(np.asarray(y, dtype=float))
        return fx.T @ (self._weights(t)[:, None] * fy)

    def apply(self, t: float, f: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule) -> Callable[[np.ndarray], np.ndarray]:
        """
        x ↦ ∫ K_t(x, y) f(y) w(y) dy with the quadrature ``rule``.

        The rule's measure must be the one the system is orthogonal in.
        """
        self._check_time(t)
        weighted = self._weights(t) * (self._functions(rule.nodes) @ (rule.weights * rule.values(f)))

        def evaluate(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            return (weighted @ self._functions(x.ravel())).reshape(x.shape)

        return evaluate


def heat_kernel(spec: SystemSpec, config: Optional[KernelConfig] = None) -> SeriesKernel:
    """Heat kernel of the system (𝕲_t, 𝕲_t^M, G_t, the Lebesgue and Jacobi kernels)."""
    return SeriesKernel(spec, config)


def diff_heat_kernel(spec: SystemSpec, config: Optional[KernelConfig] = None) -> SeriesKernel:
    """Heat kernel of the differentiated system."""
    return SeriesKernel(spec, config, differentiated=True)


def apply_semigroup(
    spec: SystemSpec,
    t: float,
    f: Callable[[np.ndarray], np.ndarray],
    config: Optional[KernelConfig] = None,
    rule: Optional[QuadratureRule] = None,
    differentiated: bool = False,
) -> Callable[[np.ndarray], np.ndarray]:
    """
    The semigroup e^{-tL} applied to ``f`` through its integral kernel.

    Args:
        spec: System.
        t: Time, at least ``config.t_min``.
        f: Vectorized function on (0,1).
        config: Kernel policy.
        rule: Quadrature for the system's measure; built when omitted.
        differentiated: Use the differentiated semigroup.
    """
    kernel = SeriesKernel(spec, config, differentiated)
    rule = rule or QuadratureRule.for_system(spec, int(kernel.indices[-1]))
    return kernel.apply(t, f, rule)


def sine_series_kernel(t: float, x: np.ndarray, y: np.ndarray, terms: int) -> np.ndarray:
    """2 Σ e^{-n²π²t} sin(nπx) sin(nπy), the Lebesgue kernel at ν = 1/2."""
    n = np.arange(1, terms + 1)[:, None]
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    return 2.0 * np.sum(np.exp(-((n * np.pi) ** 2) * t) * np.sin(n * np.pi * x) * np.sin(n * np.pi * y), axis=0)


def gaussian_resolved(t: float, x: np.ndarray, y: np.ndarray, max_exponent: float) -> np.ndarray:
    """Mask of points where (x - y)²/(4t) stays within ``max_exponent``."""
    return (np.asarray(x) - np.asarray(y)) ** 2 / (4.0 * t) <= max_exponent


def probabilistic_mass(spec: SystemSpec, t: float, x: Sequence[float], config: Optional[KernelConfig] = None) -> np.ndarray:
    """∫ 𝕲_t^M(x, y) dη(y), which is 1 for the Markovian semigroup."""
    if spec.setting is not Setting.ESSENTIAL_PROB:
        raise DomainError("mass is computed for the essential-prob setting")
    one = apply_semigroup(spec, t, np.ones_like, config)
    return one(np.asarray(x, dtype=float))
