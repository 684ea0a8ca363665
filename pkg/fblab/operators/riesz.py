"""Riesz transforms on the essential and modified systems, scalar and vectorial."""
import itertools
import math
from enum import Enum
from typing import Optional, Union

import numpy as np
from loguru import logger

from fblab.core.quadrature import CoefficientVector, QuadratureRule
from fblab.core.systems import Setting, SystemSpec, TensorSystem
from fblab.schemas import RieszProbeReport
from fblab.utils.exceptions import DimensionMismatchError, DomainError, UnsupportedCombinationError
from fblab.utils.helpers import make_rng

LP_CONSTANT = 48.0


class RieszVariant(str, Enum):
    """𝕽_ν, 𝕽_ν^M and 𝕽̌_ν."""

    STANDARD = "standard"
    PROBABILISTIC = "probabilistic"
    MODIFIED = "modified"


def conjugate_exponent(p: float) -> float:
    """p* = max(p, p/(p-1))."""
    if p <= 1:
        raise DomainError(f"p must exceed 1, got {p}")
    return max(p, p / (p - 1.0))


def modified_constant(nu: float) -> float:
    """K = max(ν+1/2, 1/(ν+1/2))/8 for ν > -1/2."""
    if nu <= -0.5:
        raise DomainError(f"K is defined for nu > -1/2, got {nu}")
    return max(nu + 0.5, 1.0 / (nu + 0.5)) / 8.0


def lp_bound(p: float, variant: Union[RieszVariant, str] = RieszVariant.STANDARD, nu: Optional[float] = None) -> float:
    """48(p*-1), times (1 + √K) for the modified variant."""
    bound = LP_CONSTANT * (conjugate_exponent(p) - 1.0)
    if RieszVariant(variant) is RieszVariant.MODIFIED:
        bound *= 1.0 + math.sqrt(modified_constant(nu))
    return bound


def _check_variant(spec: SystemSpec, variant: RieszVariant) -> None:
    if variant is RieszVariant.MODIFIED:
        if spec.setting is not Setting.MODIFIED:
            raise UnsupportedCombinationError("the modified Riesz transform acts on the modified system")
    elif not spec.setting.is_essential:
        raise UnsupportedCombinationError(f"{variant.value} Riesz transform acts on the essential system")


def riesz_multipliers(spec: SystemSpec, variant: Union[RieszVariant, str], count: int) -> np.ndarray:
    """
    m_n for n = 1..count, with 𝕽 e_n = m_n D e_n.

    λ_n^{-1} (standard, modified) or (λ_n² - λ_1²)^{-1/2} (probabilistic);
    m_1 = 0 since D e_1 = 0 and the projection Π_0 drops it.
    """
    variant = RieszVariant(variant)
    _check_variant(spec, variant)
    out = np.zeros(count)
    lam1 = spec.lam(1)
    for n in range(2, count + 1):
        lam = spec.lam(n)
        out[n - 1] = 1.0 / math.sqrt(lam**2 - lam1**2) if variant is RieszVariant.PROBABILISTIC else 1.0 / lam
    return out


class RieszResult:
    """𝕽f = Σ m_n c_n D e_n, kept in coefficient form over the differentiated system."""

    def __init__(self, vector: CoefficientVector, variant: RieszVariant):
        self.vector = vector
        self.variant = variant
        self.weights = riesz_multipliers(vector.spec, variant, len(vector)) * vector.coefficients

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        spec = self.vector.spec
        basis = spec.derivative_basis(self.vector.indices, x.ravel())
        return (self.weights @ basis).reshape(x.shape)

    def l2_norm(self) -> float:
        """Exact L² norm from ‖D e_n‖² = λ_n² - λ_1²."""
        spec = self.vector.spec
        norms = np.array([spec.derivative_norm_sq(int(n)) for n in self.vector.indices])
        return float(math.sqrt(np.sum(self.weights**2 * norms)))


def riesz_apply(vector: CoefficientVector, variant: Union[RieszVariant, str] = RieszVariant.STANDARD) -> RieszResult:
    """
    Truncated Riesz transform of the span element with coefficients ``vector``.

    Raises:
        UnsupportedCombinationError: If the variant does not match the system.
    """
    return RieszResult(vector, RieszVariant(variant))


def riesz_adjoint(
    spec: SystemSpec,
    rule: QuadratureRule,
    g,
    count: int,
    variant: Union[RieszVariant, str] = RieszVariant.STANDARD,
) -> CoefficientVector:
    """𝕽*g = Σ m_n ⟨g, D e_n⟩ e_n, by quadrature against the system's measure."""
    values = rule.values(g)
    derivs = spec.derivative_basis(spec.indices(count), rule.nodes)
    pairings = derivs @ (rule.weights * values)
    return CoefficientVector(spec, riesz_multipliers(spec, variant, count) * pairings)


def modified_condition_ratio(spec: SystemSpec, x: np.ndarray) -> float:
    """
    max over x of (R^ν - 1/(1-x))² x(1-x)/(2ν+1).

    At most K = max(ν+1/2, 1/(ν+1/2))/8 for ν > -1/2.
    """
    x = np.asarray(x, dtype=float)
    gap = spec.ratio.modified_gap(x)
    return float(np.max(gap**2 * x * (1.0 - x) / (2.0 * spec.nu + 1.0)))


def riesz_lp_probe(
    spec: SystemSpec,
    variant: Union[RieszVariant, str],
    p: float,
    samples: int = 100,
    seed: int = 0,
    count: int = 16,
    rule: Optional[QuadratureRule] = None,
) -> RieszProbeReport:
    """
    Largest ‖𝕽f‖_p/‖f‖_p over random span elements, against 48(p*-1).

    Nothing is asserted for ν < -1/2 or, in the modified setting, ν <= -1/2.
    """
    variant = RieszVariant(variant)
    _check_variant(spec, variant)
    rule = rule or QuadratureRule.for_system(spec, count)
    rng = make_rng(seed)
    basis = spec.basis(spec.indices(count), rule.nodes)
    derivs = spec.derivative_basis(spec.indices(count), rule.nodes)
    multipliers = riesz_multipliers(spec, variant, count)
    worst = 0.0
    for _ in range(samples):
        coeffs = rng.standard_normal(count)
        f = coeffs @ basis
        rf = (multipliers * coeffs) @ derivs
        ratio = rule.lp_norm(rf, p) / rule.lp_norm(f, p)
        worst = max(worst, ratio)
    bound = lp_bound(p)
    modified_bound = lp_bound(p, variant, spec.nu) if variant is RieszVariant.MODIFIED else None
    if variant is RieszVariant.MODIFIED:
        asserted = spec.nu > -0.5
    else:
        asserted = spec.nu >= -0.5
    limit = modified_bound if modified_bound is not None else bound
    within = worst <= limit
    if asserted and not within:
        logger.warning(f"Riesz {variant.value} nu={spec.nu} p={p}: ratio {worst:.3f} exceeds {limit:.3f}")
    return RieszProbeReport(
        setting=spec.setting.value,
        variant=variant.value,
        nu=spec.nu,
        p=p,
        samples=samples,
        seed=seed,
        max_ratio=worst,
        bound=bound,
        modified_bound=modified_bound,
        asserted=asserted,
        within_bound=within,
    )


class VectorialRiesz:
    """(𝕽¹f, …, 𝕽ᵈf) for f in the span of a tensor essential system."""

    def __init__(self, tensor: TensorSystem, coefficients: np.ndarray, variant: Union[RieszVariant, str] = RieszVariant.STANDARD):
        """
        Args:
            tensor: Essential tensor system.
            coefficients: Array of shape (N_1, …, N_d); entry [k_1, …, k_d]
                multiplies φ_{(k_1+1, …, k_d+1)}.
            variant: Standard or probabilistic.

        Raises:
            DimensionMismatchError: If the array rank is not the dimension.
            UnsupportedCombinationError: For the modified variant.
        """
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.ndim != tensor.dimension:
            raise DimensionMismatchError(f"coefficient array has rank {coefficients.ndim}, expected {tensor.dimension}")
        self.variant = RieszVariant(variant)
        if self.variant is RieszVariant.MODIFIED:
            raise UnsupportedCombinationError("the vectorial transform is defined for the essential variants")
        self.tensor = tensor
        self.coefficients = coefficients
        self._multipliers = self._build_multipliers()

    def _build_multipliers(self) -> np.ndarray:
        """(Σ_i μ_{n_i})^{-1/2}, with μ = λ² or λ² - λ_1², zero at the bottom index."""
        shape = self.coefficients.shape
        out = np.zeros(shape)
        for index in itertools.product(*(range(s) for s in shape)):
            total = 0.0
            for spec, k in zip(self.tensor.specs, index):
                lam = spec.lam(k + 1)
                total += lam**2 - spec.lam(1) ** 2 if self.variant is RieszVariant.PROBABILISTIC else lam**2
            if total > 0:
                out[index] = 1.0 / math.sqrt(total)
        return out

    def components(self, points: np.ndarray) -> np.ndarray:
        """Components at points of shape (m, d); returns shape (d, m)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        d = self.tensor.dimension
        if points.shape[1] != d:
            raise DimensionMismatchError(f"points must have {d} coordinates")
        shape = self.coefficients.shape
        values = [spec.basis(range(1, s + 1), points[:, i]) for i, (spec, s) in enumerate(zip(self.tensor.specs, shape))]
        derivs = [spec.derivative_basis(range(1, s + 1), points[:, i]) for i, (spec, s) in enumerate(zip(self.tensor.specs, shape))]
        weighted = self.coefficients * self._multipliers
        out = np.empty((d, points.shape[0]))
        letters = "abcdefgh"[:d]
        for i in range(d):
            factors = [derivs[j] if j == i else values[j] for j in range(d)]
            operands = ",".join(f"{letters[j]}z" for j in range(d))
            out[i] = np.einsum(f"{letters},{operands}->z", weighted, *factors)
        return out

    def magnitude(self, points: np.ndarray) -> np.ndarray:
        """ℓ²-magnitude |(𝕽¹f, …, 𝕽ᵈf)| at the points."""
        return np.sqrt(np.sum(self.components(points) ** 2, axis=0))

    def l2_norm(self) -> float:
        """
        Exact L² norm of the magnitude.

        The terms D_i φ_{n_i} ⊗ ⊗_{j≠i} φ_{n_j} are orthogonal with square norm
        λ_{n_i}² - λ_1², so ‖|𝕽f|‖² = Σ_n c_n² m_n² Σ_i (λ_{n_i}² - λ_1²).
        """
        shape = self.coefficients.shape
        total = 0.0
        for index in itertools.product(*(range(s) for s in shape)):
            gaps = sum(spec.lam(k + 1) ** 2 - spec.lam(1) ** 2 for spec, k in zip(self.tensor.specs, index))
            total += (self.coefficients[index] * self._multipliers[index]) ** 2 * gaps
        return math.sqrt(total)


def riesz_vectorial(tensor: TensorSystem, coefficients: np.ndarray,
                    variant: Union[RieszVariant, str] = RieszVariant.STANDARD) -> VectorialRiesz:
    return VectorialRiesz(tensor, coefficients, variant)
