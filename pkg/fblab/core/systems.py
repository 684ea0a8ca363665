"""Eigenfunction systems on (0,1): Fourier–Bessel settings and the Jacobi setting."""
import math
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import special

from fblab.config import RatioConfig
from fblab.core.bessel import bessel_j
from fblab.core.ratio import RatioEvaluator
from fblab.schemas import UniformBoundReport
from fblab.utils.exceptions import DimensionMismatchError, DomainError, UnsupportedCombinationError

ArrayLike = Union[float, np.ndarray]
Closure = Callable[[np.ndarray], np.ndarray]


class Setting(str, Enum):
    """Measure settings; values are the CLI names."""

    NATURAL = "natural"
    LEBESGUE = "lebesgue"
    ESSENTIAL = "essential"
    ESSENTIAL_PROB = "essential-prob"
    MODIFIED = "modified"
    JACOBI = "jacobi"

    @property
    def is_fourier_bessel(self) -> bool:
        return self is not Setting.JACOBI

    @property
    def is_essential(self) -> bool:
        return self in (Setting.ESSENTIAL, Setting.ESSENTIAL_PROB)


class DerivativeKind(str, Enum):
    """New derivatives (d, δ, 𝔻, ď, D) or the classical ones (d/dx, d/dx - (ν+1/2)/x)."""

    NEW = "new"
    OLD = "old"


def analysis_grid(size: int = 4096, depth: int = 6) -> np.ndarray:
    """
    Chebyshev points in (0,1) plus geometric refinement toward both endpoints.

    Args:
        size: Number of Chebyshev points.
        depth: Refinement reaches 10^-depth from each endpoint.
    """
    i = np.arange(size)
    cheb = 0.5 * (1.0 - np.cos(np.pi * (i + 0.5) / size))
    refine = 10.0 ** -np.arange(2, depth + 1, dtype=float)
    grid = np.concatenate([cheb, refine, 1.0 - refine])
    return np.unique(grid)


class MeasureWeight:
    """Density w(x) of a measure on (0,1) with the endpoint exponents of its integrands."""

    def __init__(self, name: str, density: Closure, left_exponent: float = 0.0, right_exponent: float = 0.0):
        """
        Initialize a measure weight.

        Args:
            name: Measure label.
            density: Vectorized x ↦ w(x) >= 0.
            left_exponent: s <= 0 such that products of eigenfunctions times
                w behave like x^s at 0.
            right_exponent: The same at 1 in the variable 1 - x.
        """
        self.name = name
        self._density = density
        self.left_exponent = min(0.0, left_exponent)
        self.right_exponent = min(0.0, right_exponent)

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self._density(np.asarray(x, dtype=float))

    def __repr__(self) -> str:
        return f"MeasureWeight({self.name})"

    @classmethod
    def lebesgue(cls, left_exponent: float = 0.0, right_exponent: float = 0.0) -> "MeasureWeight":
        return cls("dx", np.ones_like, left_exponent, right_exponent)

    @classmethod
    def natural(cls, nu: float) -> "MeasureWeight":
        return cls(f"x^(2*{nu}+1) dx", lambda x: x ** (2.0 * nu + 1.0), 2.0 * nu + 1.0)

    @classmethod
    def modified(cls, nu: float) -> "MeasureWeight":
        return cls(f"x^(2*{nu}+1) (1-x)^2 dx", lambda x: x ** (2.0 * nu + 1.0) * (1.0 - x) ** 2, 2.0 * nu + 1.0)


@lru_cache(maxsize=None)
def jacobi_norm_constant(k: int, alpha: float, beta: float) -> float:
    """
    Normalizing constant c_k of Φ_k^{α,β} in L²((0,1), dx).

    With t = cos πx the square norm is (c²/π) 2^{-α-β-1} ∫ (1-t)^α (1+t)^β P_k(t)² dt;
    the Gauss–Jacobi rule with k + 1 nodes integrates the polynomial part exactly.
    """
    t, w = special.roots_jacobi(k + 1, alpha, beta)
    integral = float(np.sum(w * special.eval_jacobi(k, alpha, beta, t) ** 2))
    return math.sqrt(math.pi * 2.0 ** (alpha + beta + 1.0) / integral)


def jacobi_eigenfunction(k: int, alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    """Φ_k^{α,β}(x) = c_k sin(πx/2)^{α+1/2} cos(πx/2)^{β+1/2} P_k^{α,β}(cos πx)."""
    s = np.sin(np.pi * x / 2.0)
    c = np.cos(np.pi * x / 2.0)
    poly = special.eval_jacobi(k, alpha, beta, np.cos(np.pi * x))
    return jacobi_norm_constant(k, alpha, beta) * s ** (alpha + 0.5) * c ** (beta + 0.5) * poly


def jacobi_eigenfunction_prime(k: int, alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    """Plain x-derivative of Φ_k^{α,β} by the product rule."""
    s = np.sin(np.pi * x / 2.0)
    c = np.cos(np.pi * x / 2.0)
    t = np.cos(np.pi * x)
    value = jacobi_eigenfunction(k, alpha, beta, x)
    log_slope = 0.5 * np.pi * ((alpha + 0.5) * c / s - (beta + 0.5) * s / c)
    if k == 0:
        poly_prime = np.zeros_like(x)
    else:
        poly_prime = 0.5 * (k + alpha + beta + 1.0) * special.eval_jacobi(k - 1, alpha + 1.0, beta + 1.0, t)
    const = jacobi_norm_constant(k, alpha, beta)
    return value * log_slope - const * np.pi * np.sin(np.pi * x) * s ** (alpha + 0.5) * c ** (beta + 0.5) * poly_prime


def jacobi_potential(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    """q(x) = -π(2α+1)/4 cot(πx/2) + π(2β+1)/4 tan(πx/2), so that D = d + q and D* = -d + q."""
    half = np.pi * x / 2.0
    return -np.pi * (2.0 * alpha + 1.0) / 4.0 / np.tan(half) + np.pi * (2.0 * beta + 1.0) / 4.0 * np.tan(half)


class SystemSpec:
    """One eigenfunction system together with its measure, eigenvalues and derivative."""

    def __init__(
        self,
        setting: Union[Setting, str],
        ratio: Optional[RatioEvaluator] = None,
        alpha: Optional[float] = None,
        beta: Optional[float] = None,
    ):
        """
        Initialize a system.

        Args:
            setting: Measure setting.
            ratio: Ratio evaluator (Fourier–Bessel settings).
            alpha: Jacobi parameter α > -1.
            beta: Jacobi parameter β > -1.

        Raises:
            DomainError: If the parameters do not fit the setting.
        """
        self.setting = Setting(setting)
        if self.setting.is_fourier_bessel:
            if ratio is None:
                raise DomainError(f"{self.setting.value} setting needs a ratio evaluator")
            self.ratio = ratio
            self.zeros = ratio.zeros
            self.nu = ratio.nu
            self.alpha = self.beta = None
            lam = ratio.zeros.zeros
            self._norms = math.sqrt(2.0) / np.abs(bessel_j(self.nu + 1.0, lam[: ratio.max_index]))
        else:
            if alpha is None or beta is None or not (alpha > -1 and beta > -1):
                raise DomainError(f"Jacobi parameters must be > -1, got ({alpha}, {beta})")
            self.ratio = self.zeros = self.nu = None
            self.alpha, self.beta = float(alpha), float(beta)

    @classmethod
    def build(
        cls,
        setting: Union[Setting, str],
        nu: Optional[float] = None,
        alpha: Optional[float] = None,
        beta: Optional[float] = None,
        n_max: int = 64,
        config: Optional[RatioConfig] = None,
    ) -> "SystemSpec":
        """Construct a system, computing the zero table when needed."""
        setting = Setting(setting)
        if setting is Setting.JACOBI:
            return cls(setting, alpha=alpha, beta=beta)
        if nu is None:
            raise DomainError(f"{setting.value} setting needs nu")
        return cls(setting, ratio=RatioEvaluator.build(nu, n_max=n_max, config=config))

    def with_setting(self, setting: Union[Setting, str]) -> "SystemSpec":
        """Another Fourier–Bessel setting sharing this system's zeros."""
        if not self.setting.is_fourier_bessel:
            raise UnsupportedCombinationError("Jacobi systems have no sibling settings")
        return SystemSpec(setting, ratio=self.ratio)

    def __repr__(self) -> str:
        return f"SystemSpec({self.setting.value}, {self.parameters})"

    @property
    def parameters(self) -> List[float]:
        """ν, or (α, β) for the Jacobi setting."""
        return [self.nu] if self.setting.is_fourier_bessel else [self.alpha, self.beta]

    @property
    def first_index(self) -> int:
        """1 for Fourier–Bessel systems, 0 for Jacobi."""
        return 1 if self.setting.is_fourier_bessel else 0

    @property
    def max_index(self) -> Optional[int]:
        return self.ratio.max_index if self.setting.is_fourier_bessel else None

    def indices(self, count: int) -> np.ndarray:
        """The first ``count`` indices in this system's convention."""
        return np.arange(self.first_index, self.first_index + count)

    def _check_index(self, n: int) -> None:
        if n < self.first_index:
            raise DomainError(f"index {n} below {self.first_index} for {self.setting.value}")
        if self.max_index is not None and n > self.max_index:
            raise DomainError(f"index {n} above {self.max_index}; build the system with a larger n_max")

    def lam(self, n: int) -> float:
        return self.zeros.zero(n)

    @property
    def measure(self) -> MeasureWeight:
        """Orthogonality measure of the system."""
        s = self.setting
        if s is Setting.JACOBI:
            return MeasureWeight.lebesgue(2.0 * self.alpha + 1.0, 2.0 * self.beta + 1.0)
        if s is Setting.NATURAL:
            return MeasureWeight.natural(self.nu)
        if s is Setting.LEBESGUE:
            return MeasureWeight.lebesgue(2.0 * self.nu + 1.0)
        if s is Setting.MODIFIED:
            return MeasureWeight.modified(self.nu)
        c1, lam1, nu = self._norms[0], self.lam(1), self.nu
        return MeasureWeight(
            "x^(2nu+1) phi_1(x)^2 dx",
            lambda x: c1**2 * x * bessel_j(nu, lam1 * x) ** 2,
            2.0 * nu + 1.0,
        )

    def eigenvalue(self, n: int) -> float:
        """Eigenvalue of the n-th eigenfunction under the setting's Laplacian."""
        self._check_index(n)
        if self.setting is Setting.JACOBI:
            return math.pi**2 * (n + (self.alpha + self.beta + 1.0) / 2.0) ** 2
        value = self.lam(n) ** 2
        if self.setting is Setting.ESSENTIAL_PROB:
            value -= self.lam(1) ** 2
        return value

    def eigenvalues(self, indices: Iterable[int]) -> np.ndarray:
        return np.array([self.eigenvalue(int(n)) for n in indices])

    def derivative_norm_sq(self, n: int) -> float:
        """Squared L² norm of the new derivative of the n-th eigenfunction."""
        self._check_index(n)
        if self.setting is Setting.JACOBI:
            return math.pi**2 * n * (n + self.alpha + self.beta + 1.0)
        return self.lam(n) ** 2 - self.lam(1) ** 2

    def _prefactor(self, x: np.ndarray) -> np.ndarray:
        """g(x) with e_n(x) = g(x) c_n J_ν(λ_n x)."""
        s = self.setting
        if s is Setting.NATURAL:
            return x ** (-self.nu)
        if s is Setting.LEBESGUE:
            return np.sqrt(x)
        if s is Setting.MODIFIED:
            return x ** (-self.nu) / (1.0 - x)
        return 1.0 / (self._norms[0] * bessel_j(self.nu, self.lam(1) * x))

    def eval_eigenfunction(self, n: int, x: ArrayLike) -> ArrayLike:
        """
        Normalized eigenfunction at x ∈ (0,1).

        Raises:
            DomainError: For index 0 in Fourier–Bessel settings or x outside (0,1).
        """
        self._check_index(n)
        x_arr = _interior(x)
        out = self.basis([n], x_arr.ravel())[0].reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def basis(self, indices: Sequence[int], x: np.ndarray) -> np.ndarray:
        """Eigenfunction values, shape (len(indices), len(x))."""
        x = np.asarray(x, dtype=float)
        indices = [int(n) for n in indices]
        for n in indices:
            self._check_index(n)
        if self.setting is Setting.JACOBI:
            return np.array([jacobi_eigenfunction(k, self.alpha, self.beta, x) for k in indices]).reshape(len(indices), -1)
        lam = self.zeros.zeros[np.array(indices) - 1]
        norms = self._norms[np.array(indices) - 1]
        values = norms[:, None] * bessel_j(self.nu, lam[:, None] * x[None, :]) * self._prefactor(x)[None, :]
        if self.setting.is_essential:
            values[np.array(indices) == 1] = 1.0
        return values

    def _companion(self, n: int, x: np.ndarray) -> np.ndarray:
        """R_n(x) e_n(x) = g(x) c_n λ_n J_{ν+1}(λ_n x), free of the poles of R_n."""
        lam = self.lam(n)
        return self._prefactor(x) * self._norms[n - 1] * lam * bessel_j(self.nu + 1.0, lam * x)

    def eval_derivative(self, n: int, x: ArrayLike, kind: Union[DerivativeKind, str] = DerivativeKind.NEW) -> ArrayLike:
        """
        Derivative of the n-th eigenfunction.

        New kind: (R - R_n) e_n for the Fourier–Bessel settings, evaluated as
        R e_n - R_n e_n inside the last interior pole of R_n and as
        (S_1 - S_n) e_n beyond it; -π√(k(k+α+β+1)) Φ_{k-1}^{α+1,β+1} for Jacobi.
        Old kind: d/dx (natural) and d/dx - (ν+1/2)/x (Lebesgue), both equal
        to -R_n e_n on eigenfunctions.

        Raises:
            UnsupportedCombinationError: Old kind outside natural/Lebesgue.
        """
        kind = DerivativeKind(kind)
        self._check_index(n)
        x_arr = _interior(x)
        out = self.derivative_basis([n], x_arr.ravel(), kind)[0].reshape(x_arr.shape)
        return out if out.ndim else float(out)

    def derivative_basis(
        self, indices: Sequence[int], x: np.ndarray, kind: Union[DerivativeKind, str] = DerivativeKind.NEW
    ) -> np.ndarray:
        """Derivative values, shape (len(indices), len(x))."""
        kind = DerivativeKind(kind)
        x = np.asarray(x, dtype=float)
        if kind is DerivativeKind.OLD and self.setting not in (Setting.NATURAL, Setting.LEBESGUE):
            raise UnsupportedCombinationError(f"old derivative is not defined for {self.setting.value}")
        rows = []
        for n in indices:
            n = int(n)
            self._check_index(n)
            if self.setting is Setting.JACOBI:
                if n == 0:
                    rows.append(np.zeros_like(x))
                else:
                    scale = -math.pi * math.sqrt(n * (n + self.alpha + self.beta + 1.0))
                    rows.append(scale * jacobi_eigenfunction(n - 1, self.alpha + 1.0, self.beta + 1.0, x))
            elif kind is DerivativeKind.OLD:
                rows.append(-self._companion(n, x))
            else:
                rows.append(self._new_derivative(n, x))
        return np.array(rows).reshape(len(rows), -1)

    def _new_derivative(self, n: int, x: np.ndarray) -> np.ndarray:
        if n == 1:
            return np.zeros_like(x)
        out = np.empty_like(x)
        near_one = x > self.ratio.last_pole_midpoint(n)
        inner = x[~near_one]
        values = self.basis([n], inner)[0]
        out[~near_one] = self.ratio.ratio_r(1, inner) * values - self._companion(n, inner)
        outer = x[near_one]
        out[near_one] = self.ratio.diff_r(n, outer) * self.basis([n], outer)[0]
        return out

    def derivative_coefficients(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Coefficients (a, b) with new derivative D = d + a and adjoint D* = -d + b.

        Adjoints are taken in the setting's own L² space.
        """
        x = np.asarray(x, dtype=float)
        if self.setting is Setting.JACOBI:
            q = jacobi_potential(self.alpha, self.beta, x)
            return q, q
        r = self.ratio.ratio_r(1, x)
        nu = self.nu
        s = self.setting
        if s.is_essential:
            return np.zeros_like(x), -(2.0 * nu + 1.0) / x + 2.0 * r
        if s is Setting.NATURAL:
            return r, -(2.0 * nu + 1.0) / x + r
        if s is Setting.LEBESGUE:
            a = -(nu + 0.5) / x + r
            return a, a
        gap = self.ratio.modified_gap(x)
        return gap, -(2.0 * nu + 1.0) / x + r + 1.0 / (1.0 - x)

    def apply_derivative(self, f: Closure, fprime: Closure, x: ArrayLike, kind: Union[DerivativeKind, str] = DerivativeKind.NEW) -> np.ndarray:
        """
        Apply the setting's derivative to a smooth closure with known f'.

        Raises:
            UnsupportedCombinationError: Old kind outside natural/Lebesgue.
        """
        kind = DerivativeKind(kind)
        x = _interior(x)
        if kind is DerivativeKind.OLD:
            if self.setting is Setting.NATURAL:
                return fprime(x)
            if self.setting is Setting.LEBESGUE:
                return fprime(x) - (self.nu + 0.5) / x * f(x)
            raise UnsupportedCombinationError(f"old derivative is not defined for {self.setting.value}")
        a, _ = self.derivative_coefficients(x)
        return fprime(x) + a * f(x)

    def apply_adjoint(self, f: Closure, fprime: Closure, x: ArrayLike) -> np.ndarray:
        """Apply the formal adjoint of the new derivative to a smooth closure."""
        x = _interior(x)
        _, b = self.derivative_coefficients(x)
        return -fprime(x) + b * f(x)

    def commutator_symbol(self, x: ArrayLike) -> np.ndarray:
        """
        Multiplier of [D, D*].

        (2ν+1)/x² + 2R' in every Fourier–Bessel setting,
        π²(α+1/2)/(2 sin²(πx/2)) + π²(β+1/2)/(2 cos²(πx/2)) for Jacobi.
        """
        x = _interior(x)
        if self.setting is Setting.JACOBI:
            half = np.pi * x / 2.0
            return (np.pi**2 * (self.alpha + 0.5) / (2.0 * np.sin(half) ** 2)
                    + np.pi**2 * (self.beta + 0.5) / (2.0 * np.cos(half) ** 2))
        return (2.0 * self.nu + 1.0) / x**2 + 2.0 * self.ratio.r_prime(x)

    def label(self) -> str:
        params = ",".join(f"{p:g}" for p in self.parameters)
        return f"{self.setting.value}({params})"


def _interior(x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size and not np.all((x > 0) & (x < 1)):
        raise DomainError("points must lie in (0, 1)")
    return x


def jacobi_operator_derivative(k: int, alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    """D_{α,β} Φ_k evaluated as Φ_k' + q Φ_k rather than from the shifted closed form."""
    x = _interior(x)
    return jacobi_eigenfunction_prime(k, alpha, beta, x) + jacobi_potential(alpha, beta, x) * jacobi_eigenfunction(k, alpha, beta, x)


def essential_generator_residual(spec: SystemSpec, n: int, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """
    (𝕷_ν - λ_n²) ϕ_n with 𝕷_ν = -d² - ((2ν+1)/x - 2R) d + λ_1².

    The second derivative is a central difference of the analytic first
    derivative.
    """
    if not spec.setting.is_essential:
        raise UnsupportedCombinationError("generator residual is defined for the essential setting")
    x = _interior(x)
    first = spec.derivative_basis([n], x)[0]
    second = (spec.derivative_basis([n], x + h)[0] - spec.derivative_basis([n], x - h)[0]) / (2.0 * h)
    drift = (2.0 * spec.nu + 1.0) / x - 2.0 * spec.ratio.ratio_r(1, x)
    value = spec.basis([n], x)[0]
    lam1, lamn = spec.lam(1), spec.lam(n)
    return -second - drift * first + lam1**2 * value - lamn**2 * value


def divergence_form_residual(spec: SystemSpec, n: int, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """
    Relative gap between the divergence form applied to ψ_n and (λ_n² - λ_1²) ψ_n.

    -(1/ψ_1)(ψ_1² (f/ψ_1)')' is 𝕃_ν - λ_1², with (ψ_n/ψ_1)' = d ϕ_n.
    """
    if spec.setting is not Setting.LEBESGUE:
        raise UnsupportedCombinationError("divergence form is stated for the Lebesgue setting")
    x = _interior(x)
    essential = spec.with_setting(Setting.ESSENTIAL)

    def flux(points: np.ndarray) -> np.ndarray:
        return spec.basis([1], points)[0] ** 2 * essential.derivative_basis([n], points)[0]

    divergence = -(flux(x + h) - flux(x - h)) / (2.0 * h) / spec.basis([1], x)[0]
    target = (spec.lam(n) ** 2 - spec.lam(1) ** 2) * spec.basis([n], x)[0]
    return (divergence - target) / max(1.0, float(np.max(np.abs(target))))


class TensorSystem:
    """Tensor product of one-dimensional essential systems on (0,1)^d."""

    def __init__(self, specs: Sequence[SystemSpec]):
        """
        Initialize the tensor system.

        Raises:
            UnsupportedCombinationError: If a factor is not essential-family.
        """
        if not specs:
            raise DimensionMismatchError("at least one factor is required")
        for spec in specs:
            if not spec.setting.is_essential:
                raise UnsupportedCombinationError(f"tensor factors must be essential, got {spec.setting.value}")
        self.specs = list(specs)

    @property
    def dimension(self) -> int:
        return len(self.specs)

    def _check(self, indices: Sequence[int], point: Optional[Sequence[float]] = None) -> None:
        if len(indices) != self.dimension or (point is not None and len(point) != self.dimension):
            raise DimensionMismatchError(f"expected {self.dimension} coordinates")

    def tensor_eval(self, indices: Sequence[int], point: Sequence[float]) -> float:
        """Product of one-dimensional eigenfunction values."""
        self._check(indices, point)
        value = 1.0
        for spec, n, x in zip(self.specs, indices, point):
            value *= spec.eval_eigenfunction(int(n), float(x))
        return value

    def eigenvalue(self, indices: Sequence[int]) -> float:
        """Sum of the coordinates' eigenvalues."""
        self._check(indices)
        return float(sum(spec.eigenvalue(int(n)) for spec, n in zip(self.specs, indices)))


def uniform_bound_report(spec: SystemSpec, n_max: int, grid: Optional[np.ndarray] = None) -> UniformBoundReport:
    """
    Empirical sup-norms of ϕ_n and d ϕ_n for n <= n_max with fitted growth exponents.

    The exponents are least-squares slopes of log sup against log n over
    n >= 2 and are compared with ν + 2 and ν + 5 (plus 0.1).
    """
    if not spec.setting.is_essential:
        raise UnsupportedCombinationError("uniform bounds are reported for the essential system")
    if n_max < 3:
        raise DomainError("n_max must be at least 3 to fit an exponent")
    grid = analysis_grid() if grid is None else grid
    indices = list(range(1, n_max + 1))
    sup_values = np.max(np.abs(spec.basis(indices, grid)), axis=1)
    sup_derivs = np.max(np.abs(spec.derivative_basis(indices, grid)), axis=1)
    log_n = np.log(np.arange(2, n_max + 1))
    exponent = float(np.polyfit(log_n, np.log(sup_values[1:]), 1)[0])
    d_exponent = float(np.polyfit(log_n, np.log(sup_derivs[1:]), 1)[0])
    bound, d_bound = spec.nu + 2.0, spec.nu + 5.0
    within = exponent <= bound + 0.1 and d_exponent <= d_bound + 0.1
    logger.info(f"Uniform bounds nu={spec.nu}: exponents {exponent:.3f}, {d_exponent:.3f}")
    return UniformBoundReport(
        nu=spec.nu,
        n_max=n_max,
        sup_eigenfunction=sup_values.tolist(),
        sup_derivative=sup_derivs.tolist(),
        eigenfunction_exponent=exponent,
        derivative_exponent=d_exponent,
        eigenfunction_bound=bound,
        derivative_bound=d_bound,
        within_bound=within,
    )
