"""Sobolev and potential norms on the span of the essential system, and derivative diagnostics."""
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from fblab.config import RatioConfig
from fblab.core.quadrature import CoefficientVector, QuadratureRule
from fblab.core.systems import DerivativeKind, Setting, SystemSpec
from fblab.schemas import CalderonReport, DiagnosticEntry, DiagnosticReport
from fblab.utils.exceptions import DomainError, UnsupportedCombinationError
from fblab.utils.helpers import make_rng, parallel_map

Closure = Callable[[np.ndarray], np.ndarray]

DIAGNOSTIC_EPSILONS = (1e-2, 1e-3, 1e-4)
DIVERGENCE_EXPONENT = 0.1
DENSITY_TIMES = (0.1, 0.05, 0.01)


class SobolevElement:
    """A finite combination of essential eigenfunctions paired with an exponent p."""

    def __init__(self, vector: CoefficientVector, p: float = 2.0):
        """
        Raises:
            UnsupportedCombinationError: If the vector is not over an essential system.
            DomainError: If p is not in (1, ∞).
        """
        if not vector.spec.setting.is_essential:
            raise UnsupportedCombinationError("Sobolev elements live on the essential system")
        if not 1 < p < math.inf:
            raise DomainError(f"p must lie in (1, inf), got {p}")
        self.vector = vector
        self.p = float(p)

    @classmethod
    def random(cls, spec: SystemSpec, p: float, count: int, rng: np.random.Generator) -> "SobolevElement":
        return cls(CoefficientVector(spec, rng.standard_normal(count)), p)

    @property
    def spec(self) -> SystemSpec:
        return self.vector.spec

    def __repr__(self) -> str:
        return f"SobolevElement({self.spec.label()}, p={self.p:g}, N={len(self.vector)})"


def sobolev_norm(rule: QuadratureRule, el: SobolevElement) -> float:
    """‖f‖_p + ‖d f‖_p in L^p(dη), with d f summed termwise."""
    f = el.vector.partial_sum(rule.nodes)
    df = el.vector.derivative(DerivativeKind.NEW)(rule.nodes)
    return rule.lp_norm(f, el.p) + rule.lp_norm(df, el.p)


def potential_norm(rule: QuadratureRule, el: SobolevElement, sigma: float = 1.0) -> float:
    """
    ‖g‖_p where f = 𝕴_{σ/2} g, i.e. the L^p norm of Σ λ_n^σ c_n ϕ_n.

    σ = 0 gives ‖f‖_p.

    Raises:
        DomainError: For negative σ.
    """
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    spec = el.spec
    lam = spec.zeros.zeros[: len(el.vector)]
    g = CoefficientVector(spec, lam**sigma * el.vector.coefficients)
    return rule.lp_norm(g.partial_sum(rule.nodes), el.p)


def exact_band(lam1: float) -> Tuple[float, float]:
    """
    Two-sided bounds of ‖f‖_W/‖f‖_pot at p = 2.

    With A = Σλ_n²c_n² and u = ‖c‖ ≤ √A/λ_1, the ratio is
    (u + √(A - λ_1²u²))/√A, whose range is [1/max(1, λ_1), 1 + 1/λ_1].
    """
    return 1.0 / max(1.0, lam1), 1.0 + 1.0 / lam1


def calderon_equivalence_report(
    spec: SystemSpec,
    p: float,
    samples: int = 100,
    seed: int = 0,
    count: int = 16,
    rule: Optional[QuadratureRule] = None,
    baseline_band: Optional[Tuple[float, float]] = None,
) -> CalderonReport:
    """
    Extremes of ‖f‖_W/‖f‖_pot over seeded random span elements.

    Args:
        spec: Essential system.
        p: Exponent in (1, ∞).
        samples: Number of random elements.
        seed: Generator seed, recorded in the report.
        count: Span size, at most 16.
        rule: Quadrature for dη; built when omitted.
        baseline_band: Frozen band [1/c, c] the ratios must stay in.

    Raises:
        DomainError: For ν < -1/2, count > 16 or p outside (1, ∞).
    """
    if not spec.setting.is_essential:
        raise UnsupportedCombinationError("the equivalence is stated on the essential system")
    if spec.nu < -0.5:
        raise DomainError(f"the equivalence is checked for nu >= -1/2, got {spec.nu}")
    if not 1 <= count <= 16:
        raise DomainError(f"count must lie in 1..16, got {count}")
    rule = rule or QuadratureRule.for_system(spec, count)
    rng = make_rng(seed)
    elements = [SobolevElement.random(spec, p, count, rng) for _ in range(samples)]

    def ratio(el: SobolevElement) -> float:
        return sobolev_norm(rule, el) / potential_norm(rule, el, 1.0)

    ratios = np.array(parallel_map(ratio, elements))
    lo, hi = float(np.min(ratios)), float(np.max(ratios))
    exact = exact_band(spec.lam(1)) if p == 2 else None
    within = True
    for band in (baseline_band, exact):
        if band is not None:
            slack = 1e-10 * band[1]
            within = within and band[0] - slack <= lo and hi <= band[1] + slack
    if not within:
        logger.warning(f"Calderon ratio nu={spec.nu} p={p} in [{lo:.4f}, {hi:.4f}] leaves its band")
    return CalderonReport(
        nu=spec.nu,
        p=p,
        samples=samples,
        seed=seed,
        min_ratio=lo,
        max_ratio=hi,
        baseline_band=baseline_band,
        exact_band=exact,
        within_band=within,
    )


def _smoothed_step(width: float = 0.05) -> Tuple[Closure, Closure]:
    def f(x: np.ndarray) -> np.ndarray:
        return 0.5 * (1.0 + np.tanh((x - 0.5) / width))

    def fprime(x: np.ndarray) -> np.ndarray:
        return 0.5 / width / np.cosh((x - 0.5) / width) ** 2

    return f, fprime


def _bump(center: float = 0.5, radius: float = 0.25) -> Tuple[Closure, Closure]:
    def inside(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        u = (x - center) / radius
        mask = np.abs(u) < 1.0
        gap = np.where(mask, 1.0 - u**2, 1.0)
        return u, mask, gap

    def f(x: np.ndarray) -> np.ndarray:
        _, mask, gap = inside(x)
        return np.where(mask, np.exp(1.0 - 1.0 / gap), 0.0)

    def fprime(x: np.ndarray) -> np.ndarray:
        u, mask, gap = inside(x)
        return np.where(mask, np.exp(1.0 - 1.0 / gap) * (-2.0 * u / gap**2) / radius, 0.0)

    return f, fprime


CATALOG: Dict[str, Callable[[], Tuple[Closure, Closure]]] = {
    "smoothed-step": _smoothed_step,
    "bump": _bump,
}


def catalog_function(name: str) -> Tuple[Closure, Closure]:
    """(f, f') for a catalog entry."""
    if name not in CATALOG:
        raise DomainError(f"unknown test function {name!r}; choose from {sorted(CATALOG)}")
    return CATALOG[name]()


def truncated_norm(spec: SystemSpec, f: Closure, fprime: Closure, kind: DerivativeKind, p: float,
                   epsilon: float, panels: int = 16) -> float:
    """‖D f‖_p over (ε, 1-ε) against the system's measure."""
    rule = QuadratureRule.interval(epsilon, 1.0 - epsilon, panels)
    values = np.abs(spec.apply_derivative(f, fprime, rule.nodes, kind)) ** p
    return float(np.dot(rule.weights * spec.measure(rule.nodes), values) ** (1.0 / p))


def growth_exponent(epsilons: Sequence[float], norms: Sequence[float]) -> float:
    """Slope of log norm against log(1/ε)."""
    return float(np.polyfit(np.log(1.0 / np.asarray(epsilons)), np.log(np.asarray(norms)), 1)[0])


def old_derivative_diagnostic(
    nu: float,
    p: float,
    function: str,
    epsilons: Sequence[float] = DIAGNOSTIC_EPSILONS,
    config: Optional[RatioConfig] = None,
) -> DiagnosticReport:
    """
    Truncated-norm growth of the old and new natural and Lebesgue derivatives of a catalog function.

    An entry is divergent when the norm over (ε, 1-ε) grows faster than
    ε^{-0.1} as ε shrinks.
    """
    if not 1 <= p < math.inf:
        raise DomainError(f"p must lie in [1, inf), got {p}")
    f, fprime = catalog_function(function)
    natural = SystemSpec.build(Setting.NATURAL, nu=nu, n_max=2, config=config)
    lebesgue = natural.with_setting(Setting.LEBESGUE)
    cases = [
        ("old-natural", natural, DerivativeKind.OLD),
        ("new-natural", natural, DerivativeKind.NEW),
        ("old-lebesgue", lebesgue, DerivativeKind.OLD),
        ("new-lebesgue", lebesgue, DerivativeKind.NEW),
    ]
    entries: List[DiagnosticEntry] = []
    for name, spec, kind in cases:
        norms = [truncated_norm(spec, f, fprime, kind, p, eps) for eps in epsilons]
        exponent = growth_exponent(epsilons, norms)
        divergent = exponent > DIVERGENCE_EXPONENT
        if divergent:
            logger.info(f"{name} derivative of {function} (nu={nu}, p={p}) diverges, exponent {exponent:.3f}")
        entries.append(DiagnosticEntry(
            derivative=name,
            measure=spec.measure.name,
            epsilons=list(epsilons),
            norms=norms,
            growth_exponent=exponent,
            divergent=divergent,
        ))
    return DiagnosticReport(nu=nu, p=p, function=function, entries=entries)


def sobolev_norm_l2(vector: CoefficientVector) -> float:
    """Exact ‖f‖_2 + ‖d f‖_2 on the span from ‖d ϕ_n‖² = λ_n² - λ_1²."""
    spec = vector.spec
    gaps = np.array([spec.derivative_norm_sq(int(n)) for n in vector.indices])
    c = vector.coefficients
    return float(np.linalg.norm(c) + math.sqrt(np.sum(gaps * c**2)))


def density_check(
    spec: SystemSpec,
    f: Closure,
    count: int = 64,
    t_values: Sequence[float] = DENSITY_TIMES,
    rule: Optional[QuadratureRule] = None,
) -> np.ndarray:
    """
    ‖𝕋_t f - f‖ in the p = 2 Sobolev norm for the expansion of ``f``.

    On the span 𝕋_t multiplies c_n by e^{-tλ_n²}, so each norm is exact
    once the coefficients are known.
    """
    if not spec.setting.is_essential:
        raise UnsupportedCombinationError("the density check runs on the essential system")
    rule = rule or QuadratureRule.for_system(spec, count)
    vector = rule.expand(spec, f, count)
    lam2 = spec.zeros.zeros[:count] ** 2
    norms = [sobolev_norm_l2(CoefficientVector(spec, (np.exp(-t * lam2) - 1.0) * vector.coefficients))
             for t in t_values]
    return np.array(norms)


def coefficient_decay_exponent(vector: CoefficientVector, floor: float = 1e-13) -> float:
    """
    Algebraic decay rate of the coefficients over the upper half of the indices.

    The fit uses the envelope max_{k>=n}|c_k| and ignores entries at or
    below ``floor``.

    Raises:
        DomainError: If fewer than three envelope entries clear the floor.
    """
    c = np.abs(vector.coefficients)
    envelope = np.maximum.accumulate(c[::-1])[::-1]
    n = vector.indices.astype(float)
    keep = (n >= len(c) // 2) & (envelope > floor)
    if np.count_nonzero(keep) < 3:
        raise DomainError("too few coefficients above the floor to fit a decay rate")
    return -float(np.polyfit(np.log(n[keep]), np.log(envelope[keep]), 1)[0])
