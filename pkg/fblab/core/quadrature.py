"""Composite Gauss rules on (0,1), inner products and eigenfunction expansions."""
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import special

from fblab.config import QuadratureConfig
from fblab.core.systems import DerivativeKind, MeasureWeight, SystemSpec
from fblab.schemas import CoefficientVectorSchema
from fblab.utils.exceptions import DomainError, QuadratureError, QuadratureValidationError

Integrand = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]

LEFT_LEVELS = 30
RIGHT_FLOOR = 1e-10


def _legendre(order: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    t, w = special.roots_legendre(order)
    return 0.5 * (b - a) * t + 0.5 * (b + a), 0.5 * (b - a) * w


def _left_jacobi(order: int, a: float, s: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, a] and weights absorbing x^s, so Σ w_i g(x_i) ≈ ∫ g dx for g ~ x^s."""
    t, w = special.roots_jacobi(order, 0.0, s)
    x = 0.5 * a * (1.0 + t)
    return x, (0.5 * a) ** (1.0 + s) * w * x ** (-s)


def _right_jacobi(order: int, a: float, s: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [1 - a, 1] with weights absorbing (1 - x)^s."""
    t, w = special.roots_jacobi(order, s, 0.0)
    gap = 0.5 * a * (1.0 - t)
    return 1.0 - gap, (0.5 * a) ** (1.0 + s) * w * gap ** (-s)


class QuadratureRule:
    """Immutable nodes and weights for ∫₀¹ · w(x) dx."""

    def __init__(self, nodes: np.ndarray, weights: np.ndarray, measure: MeasureWeight, panels: int, order: int):
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self.measure = measure
        self.panels = panels
        self.order = order

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"QuadratureRule({self.measure.name}, panels={self.panels}, order={self.order}, nodes={len(self)})"

    @classmethod
    def build(
        cls,
        measure: MeasureWeight,
        panels: int,
        order: int = 16,
        config: Optional[QuadratureConfig] = None,
        validate: bool = True,
    ) -> "QuadratureRule":
        """
        Build a composite rule on geometrically graded panels.

        Uniform panels cover (0,1). The end panels are subdivided with ratio
        ``grading_ratio`` toward 0 and toward 1; the innermost piece at each
        end uses Gauss–Jacobi nodes matching the measure's endpoint exponent.

        Args:
            measure: Target measure.
            panels: Number of uniform panels (>= 4).
            order: Gauss points per panel (>= 8).
            config: Quadrature configuration.
            validate: Compare the mass with a rule using twice the panels.

        Raises:
            DomainError: For panels < 4 or order < 8.
            QuadratureValidationError: If the mass disagrees with the refined rule.
        """
        config = config or QuadratureConfig()
        if panels < 4 or order < 8:
            raise DomainError(f"need panels >= 4 and order >= 8, got {panels}, {order}")
        ratio = config.grading_ratio
        h = 1.0 / panels

        pieces: List[Tuple[np.ndarray, np.ndarray]] = []
        # toward 0
        edges = h * ratio ** np.arange(LEFT_LEVELS + 1)
        pieces.append(_left_jacobi(order, edges[-1], measure.left_exponent))
        for b, a in zip(edges[:-1], edges[1:]):
            pieces.append(_legendre(order, a, b))
        for k in range(1, panels - 1):
            pieces.append(_legendre(order, k * h, (k + 1) * h))
        # toward 1
        levels = max(1, math.ceil(math.log(RIGHT_FLOOR / h) / math.log(ratio)))
        gaps = h * ratio ** np.arange(levels + 1)
        for b, a in zip(gaps[:-1], gaps[1:]):
            pieces.append(_legendre(order, 1.0 - b, 1.0 - a))
        pieces.append(_right_jacobi(order, gaps[-1], measure.right_exponent))

        nodes = np.concatenate([p[0] for p in pieces])
        base = np.concatenate([p[1] for p in pieces])
        keep = (nodes > 0) & (nodes < 1)
        nodes, base = nodes[keep], base[keep]
        idx = np.argsort(nodes)
        nodes, base = nodes[idx], base[idx]
        rule = cls(nodes, base * measure(nodes), measure, panels, order)

        if validate:
            reference = cls.build(measure, 2 * panels, order, config, validate=False).integrate(np.ones_like)
            mass = rule.integrate(np.ones_like)
            error = abs(mass - reference)
            if error > config.validation_tolerance * max(1.0, abs(reference)):
                raise QuadratureValidationError(
                    f"mass {mass!r} differs from refined {reference!r} by {error:.2e}", achieved_error=error
                )
            logger.debug(f"Built {rule!r}; mass error {error:.1e}")
        return rule

    @classmethod
    def interval(cls, a: float, b: float, panels: int = 8, order: int = 16, levels: int = 20,
                 ratio: float = 0.2, floor: float = 1e-10) -> "QuadratureRule":
        """
        Gauss–Legendre rule for ∫_a^b · dx, graded geometrically toward both ends.

        Used for split integrals whose integrands are smooth inside (a, b)
        but lose smoothness at the endpoints. Grading stops once a piece is
        narrower than ``floor`` times the panel width, so nodes stay clear of
        the ends in floating point.
        """
        if not 0 <= a < b <= 1:
            raise DomainError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
        h = (b - a) / panels
        levels = min(levels, int(math.log(floor) / math.log(ratio)))
        pieces = []
        edges = h * ratio ** np.arange(levels + 1)
        for hi, lo in zip(edges[:-1], edges[1:]):
            pieces.append(_legendre(order, a + lo, a + hi))
            pieces.append(_legendre(order, b - hi, b - lo))
        pieces.append(_legendre(order, a, a + edges[-1]))
        pieces.append(_legendre(order, b - edges[-1], b))
        for k in range(1, panels - 1):
            pieces.append(_legendre(order, a + k * h, a + (k + 1) * h))
        nodes = np.concatenate([p[0] for p in pieces])
        weights = np.concatenate([p[1] for p in pieces])
        idx = np.argsort(nodes)
        return cls(nodes[idx], weights[idx], MeasureWeight.lebesgue(), panels, order)

    @classmethod
    def for_system(cls, spec: SystemSpec, n_max: int, config: Optional[QuadratureConfig] = None) -> "QuadratureRule":
        """
        Rule sized for eigenfunctions of ``spec`` up to index ``n_max``.

        Panels default to max(8, ceil(2λ_N/π)).
        """
        config = config or QuadratureConfig()
        if config.panels is not None:
            panels = config.panels
        elif spec.setting.is_fourier_bessel:
            panels = max(8, math.ceil(2.0 * spec.lam(n_max) / math.pi))
        else:
            panels = max(8, 2 * n_max + math.ceil(spec.alpha + spec.beta + 2))
        return cls.build(spec.measure, panels, config.order, config)

    def values(self, f: Integrand) -> np.ndarray:
        """
        Node values of ``f``.

        Raises:
            QuadratureError: Naming the first node with a non-finite value.
        """
        values = np.asarray(f(self.nodes) if callable(f) else f, dtype=float)
        if values.shape != self.nodes.shape:
            values = np.broadcast_to(values, self.nodes.shape)
        bad = np.flatnonzero(~np.isfinite(values))
        if len(bad):
            node = float(self.nodes[bad[0]])
            raise QuadratureError(f"non-finite integrand at x={node!r}", node=node)
        return values

    def integrate(self, f: Integrand) -> float:
        return float(np.dot(self.weights, self.values(f)))

    def inner_product(self, f: Integrand, g: Integrand) -> float:
        """⟨f, g⟩ = Σ w_i f(x_i) g(x_i)."""
        return float(np.dot(self.weights, self.values(f) * self.values(g)))

    def lp_norm(self, f: Integrand, p: float = 2.0) -> float:
        """
        L^p norm against the rule's measure.

        ``p = inf`` is the maximum over the nodes, a grid sup.
        """
        values = np.abs(self.values(f))
        if math.isinf(p):
            return float(np.max(values))
        if p < 1:
            raise DomainError(f"p must be >= 1, got {p}")
        return float(np.dot(self.weights, values**p) ** (1.0 / p))

    def gram(self, spec: SystemSpec, indices: Sequence[int], kind: Optional[DerivativeKind] = None) -> np.ndarray:
        """
        Gram matrix of eigenfunctions, or of their derivatives when ``kind`` is given.
        """
        if kind is None:
            basis = spec.basis(indices, self.nodes)
        else:
            basis = spec.derivative_basis(indices, self.nodes, kind)
        return (basis * self.weights[None, :]) @ basis.T

    def expand(self, spec: SystemSpec, f: Integrand, count: int) -> "CoefficientVector":
        """
        Coefficients ⟨f, e_n⟩ for the first ``count`` eigenfunctions.

        The rule's measure must be the system's orthogonality measure.
        """
        if spec.max_index is not None and spec.first_index + count - 1 > spec.max_index:
            raise DomainError(f"{count} coefficients exceed the {spec.max_index} available eigenfunctions")
        values = self.values(f)
        basis = spec.basis(spec.indices(count), self.nodes)
        return CoefficientVector(spec, basis @ (self.weights * values))


def tensor_weights(rules: Sequence[QuadratureRule]) -> np.ndarray:
    """Outer product of the rules' weights, for integration over (0,1)^d."""
    weights = np.ones(())
    for rule in rules:
        weights = np.multiply.outer(weights, rule.weights)
    return weights


class CoefficientVector:
    """Expansion coefficients c_1..c_N (c_0..c_{N-1} for Jacobi) against a system."""

    def __init__(self, spec: SystemSpec, coefficients: Sequence[float]):
        """
        Raises:
            DomainError: If a coefficient is not finite.
        """
        coefficients = np.asarray(coefficients, dtype=float)
        if not np.all(np.isfinite(coefficients)):
            raise DomainError("coefficients must be finite")
        self.spec = spec
        self.coefficients = coefficients

    def __len__(self) -> int:
        return len(self.coefficients)

    def __repr__(self) -> str:
        return f"CoefficientVector({self.spec.label()}, N={len(self)})"

    @property
    def indices(self) -> np.ndarray:
        return self.spec.indices(len(self))

    def truncated(self, count: int) -> "CoefficientVector":
        return CoefficientVector(self.spec, self.coefficients[:count])

    def partial_sum(self, x: np.ndarray, count: Optional[int] = None) -> np.ndarray:
        """S_N f(x) = Σ_{n<=N} c_n e_n(x)."""
        count = len(self) if count is None else count
        x = np.asarray(x, dtype=float)
        basis = self.spec.basis(self.spec.indices(count), x.ravel())
        return (self.coefficients[:count] @ basis).reshape(x.shape)

    def l2_norm(self) -> float:
        """Parseval norm sqrt(Σ c_n²)."""
        return float(np.linalg.norm(self.coefficients))

    def derivative(self, kind: DerivativeKind = DerivativeKind.NEW) -> "DifferentiatedVector":
        return DifferentiatedVector(self, kind)

    def to_schema(self) -> CoefficientVectorSchema:
        return CoefficientVectorSchema(
            setting=self.spec.setting.value,
            nu_or_ab=self.spec.parameters,
            coeffs=self.coefficients.tolist(),
        )

    @classmethod
    def from_schema(cls, schema: CoefficientVectorSchema, spec: SystemSpec) -> "CoefficientVector":
        """Rebuild against ``spec``, which must match the recorded setting and parameters."""
        if schema.setting != spec.setting.value or not np.allclose(schema.nu_or_ab, spec.parameters):
            raise DomainError(f"document is for {schema.setting}{schema.nu_or_ab}, not {spec.label()}")
        return cls(spec, schema.coeffs)


class DifferentiatedVector:
    """Σ c_n D e_n for a coefficient vector, evaluated termwise."""

    def __init__(self, vector: CoefficientVector, kind: DerivativeKind = DerivativeKind.NEW):
        self.vector = vector
        self.kind = DerivativeKind(kind)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        spec = self.vector.spec
        basis = spec.derivative_basis(self.vector.indices, x.ravel(), self.kind)
        return (self.vector.coefficients @ basis).reshape(x.shape)
