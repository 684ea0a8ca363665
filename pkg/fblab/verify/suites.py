"""Named verification suites; each builds a list of checks over shared, cached systems."""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from fblab.config import Config
from fblab.core.bessel import ZeroTable, compute_zeros, identity_residuals
from fblab.core.quadrature import CoefficientVector, QuadratureRule
from fblab.core.ratio import RatioEvaluator, pin2_term
from fblab.core.sobolev import (
    SobolevElement,
    calderon_equivalence_report,
    catalog_function,
    density_check,
    old_derivative_diagnostic,
    potential_norm,
    sobolev_norm,
)
from fblab.core.systems import (
    DerivativeKind,
    MeasureWeight,
    Setting,
    SystemSpec,
    TensorSystem,
    divergence_form_residual,
    essential_generator_residual,
    uniform_bound_report,
)
from fblab.operators.comparators import CASES, comparator_grid, ratio_within_cap, sharp_bound_ratio
from fblab.operators.green import GreenAux, eigen_relation_residual
from fblab.operators.kernels import SeriesKernel, apply_semigroup, gaussian_resolved, probabilistic_mass, sine_series_kernel
from fblab.operators.potential import fractional_power, is_injective_on_span, potential_apply, potential_kernel
from fblab.operators.riesz import (
    RieszVariant,
    modified_condition_ratio,
    modified_constant,
    riesz_adjoint,
    riesz_apply,
    riesz_lp_probe,
    riesz_vectorial,
)
from fblab.operators.trotter import (
    differentiated_generator_residual,
    generator_gap_sup,
    series_endpoint_target,
    trotter_sandwich_check,
)
from fblab.schemas import CalderonReport, RatioReport, Status
from fblab.utils.exceptions import DomainError
from fblab.utils.helpers import make_rng
from fblab.verify.baselines import Baselines
from fblab.verify.checks import Check, Outcome, below, passed_if

COMPARATOR_CASES = ("jacobi", "hsest", "heess", "heess-prob", "hseest")
INTERIOR = np.linspace(0.05, 0.95, 19)


@dataclass
class SuiteContext:
    """
    Shared state of one verification run.

    Ratio evaluators are cached per (ν, n_max) so suites share zero
    tables. Observed ratio spreads and Calderón reports are collected for
    baseline regeneration.
    """

    config: Config
    baselines: Baselines
    seed: int
    samples: int
    nu: Optional[float] = None
    ratio_reports: List[Tuple[str, RatioReport]] = field(default_factory=list)
    calderon_reports: List[CalderonReport] = field(default_factory=list)
    domination: Optional[float] = None
    _ratios: Dict[Tuple[float, int], RatioEvaluator] = field(default_factory=dict)
    _tables: Dict[Tuple[float, int], ZeroTable] = field(default_factory=dict)

    def nus(self, defaults: Sequence[float]) -> List[float]:
        """The run's ν when given, the suite defaults otherwise."""
        return [self.nu] if self.nu is not None else list(defaults)

    def zeros(self, nu: float, count: int) -> ZeroTable:
        key = (nu, count)
        if key not in self._tables:
            self._tables[key] = compute_zeros(nu, count, self.config.zeros)
        return self._tables[key]

    def ratio(self, nu: float, n_max: int = 64) -> RatioEvaluator:
        key = (nu, n_max)
        if key not in self._ratios:
            self._ratios[key] = RatioEvaluator.build(nu, n_max=n_max, config=self.config.ratio)
        return self._ratios[key]

    def spec(self, setting: Setting, nu: float, n_max: int = 64) -> SystemSpec:
        return SystemSpec(setting, ratio=self.ratio(nu, n_max))


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def calogero_suite(ctx: SuiteContext) -> List[Check]:
    """Rayleigh and Calogero sums with certified tails."""
    checks = []
    tail = 10_000
    for nu in ctx.nus([-0.5, 0.0, 0.5, 1.5]):
        for n in range(1, 6):
            def body(nu=nu, n=n) -> Outcome:
                report = identity_residuals(ctx.zeros(nu, tail), n, tail)
                worst = max(abs(c.residual) for c in report.checks)
                return Outcome(report.status, worst, ", ".join(f"{c.name}={c.status.value}" for c in report.checks))

            checks.append(Check(f"calogero.identities[nu={nu:g},n={n}]",
                                "zero sums: Σ1/λ_k² = 1/(4ν+4) and both Calogero sums", body))
    return checks


def zeros_suite(ctx: SuiteContext) -> List[Check]:
    """Closed-form zeros at ν = ±1/2 and interlacing across orders."""

    def half_integer(nu: float, shift: float) -> Outcome:
        table = ctx.zeros(nu, 50)
        target = np.pi * (np.arange(1, 51) - shift)
        return below(float(np.max(np.abs(table.zeros - target))), 1e-12)

    def interlacing() -> Outcome:
        grid = [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]
        bad = [nu for nu in grid if not ctx.zeros(nu, 60).interlaces_with(ctx.zeros(nu + 1.0, 60))]
        return passed_if(not bad, float(len(bad)), f"failing orders {bad}" if bad else "")

    return [
        Check("zeros.closed-form[nu=0.5]", "λ_{n,1/2} = nπ", lambda: half_integer(0.5, 0.0)),
        Check("zeros.closed-form[nu=-0.5]", "λ_{n,-1/2} = (n-1/2)π", lambda: half_integer(-0.5, 0.5)),
        Check("zeros.interlacing", "λ_{n,ν} < λ_{n,ν+1} < λ_{n+1,ν}", interlacing),
    ]


def ratio_suite(ctx: SuiteContext) -> List[Check]:
    """Endpoint slopes of R - R_n."""
    checks = []
    for nu in ctx.nus([0.0, 0.5]):
        for n in (2, 3, 4):
            def body(nu=nu, n=n) -> Outcome:
                ratio = ctx.ratio(nu)
                measured = ratio.endpoint_slopes(n)
                target = ratio.endpoint_slope_targets(n)
                error = max(abs(m - t) / abs(t) for m, t in zip(measured, target))
                return below(error, 1e-4)

            checks.append(Check(f"ratio.endpoint-slopes[nu={nu:g},n={n}]",
                                "(R-R_n)/x → -(λ_n²-λ_1²)/(2ν+2), (R-R_n)/(1-x) → (λ_n²-λ_1²)/3", body))
    return checks


def systems_suite(ctx: SuiteContext) -> List[Check]:
    """Orthonormality, differentiated norms, generators and commutators."""
    checks = []
    count = 20
    for nu in ctx.nus([0.0, 0.5]):
        for setting in (Setting.NATURAL, Setting.LEBESGUE, Setting.ESSENTIAL, Setting.MODIFIED):
            def gram(nu=nu, setting=setting) -> Outcome:
                spec = ctx.spec(setting, nu)
                rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
                g = rule.gram(spec, spec.indices(count))
                return below(float(np.max(np.abs(g - np.eye(count)))), 1e-8)

            def diff_gram(nu=nu, setting=setting) -> Outcome:
                spec = ctx.spec(setting, nu)
                rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
                indices = spec.indices(count)
                g = rule.gram(spec, indices, DerivativeKind.NEW)
                target = np.diag([spec.derivative_norm_sq(int(n)) for n in indices])
                return below(float(np.max(np.abs(g - target)) / np.max(target)), 1e-7)

            checks.append(Check(f"systems.orthonormal[{setting.value},nu={nu:g}]",
                                "eigenfunctions orthonormal in the setting's measure", gram))
            checks.append(Check(f"systems.differentiated-norms[{setting.value},nu={nu:g}]",
                                "‖D e_n‖² = λ_n² - λ_1², differentiated system orthogonal", diff_gram))

        def generator(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            worst = 0.0
            for n in (2, 3, 4):
                scale = spec.lam(n) ** 2 * float(np.max(np.abs(spec.basis([n], INTERIOR))))
                worst = max(worst, float(np.max(np.abs(essential_generator_residual(spec, n, INTERIOR)))) / scale)
            return below(worst, 1e-5)

        def divergence(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.LEBESGUE, nu)
            return below(max(float(np.max(np.abs(divergence_form_residual(spec, n, INTERIOR)))) for n in (2, 3)), 1e-5)

        def commutator(nu=nu) -> Outcome:
            h = 1e-6
            worst = 0.0
            for setting in (Setting.NATURAL, Setting.LEBESGUE, Setting.ESSENTIAL, Setting.MODIFIED):
                spec = ctx.spec(setting, nu)
                worst = max(worst, _commutator_gap(spec, h))
            return below(worst, 1e-6)

        def uniform(nu=nu) -> Outcome:
            report = uniform_bound_report(ctx.spec(Setting.ESSENTIAL, nu), 32)
            return passed_if(report.within_bound, report.eigenfunction_exponent,
                             f"exponents {report.eigenfunction_exponent:.3f}, {report.derivative_exponent:.3f}")

        checks.extend([
            Check(f"systems.essential-generator[nu={nu:g}]", "𝕷ϕ_n = λ_n²ϕ_n, 𝕷 = -d² - ((2ν+1)/x - 2R)d + λ_1²", generator),
            Check(f"systems.divergence-form[nu={nu:g}]", "𝕃f = -(1/ψ_1)(ψ_1²(f/ψ_1)')'", divergence),
            Check(f"systems.commutator[nu={nu:g}]", "[D, D*] = (2ν+1)/x² + 2R'", commutator),
            Check(f"systems.uniform-bounds[nu={nu:g}]", "sup|ϕ_n| ≲ n^{ν+2}, sup|dϕ_n| ≲ n^{ν+5}", uniform),
        ])

    def jacobi() -> Outcome:
        spec = SystemSpec(Setting.JACOBI, alpha=0.5, beta=0.5)
        rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
        g = rule.gram(spec, spec.indices(count))
        gap = float(np.max(np.abs(g - np.eye(count))))
        return below(max(gap, _commutator_gap(spec, 1e-6)), 1e-8)

    checks.append(Check("systems.jacobi[1/2,1/2]", "Φ_k orthonormal; [D, D*] = π²(α+1/2)/(2sin²) + π²(β+1/2)/(2cos²)", jacobi))
    return checks


def _commutator_gap(spec: SystemSpec, h: float) -> float:
    """Relative gap between the commutator symbol and (a + b)' for D = d + a, D* = -d + b."""

    def total(x: np.ndarray) -> np.ndarray:
        a, b = spec.derivative_coefficients(x)
        return a + b

    slope = (total(INTERIOR + h) - total(INTERIOR - h)) / (2.0 * h)
    return _relative(slope, spec.commutator_symbol(INTERIOR))


def quadrature_suite(ctx: SuiteContext) -> List[Check]:
    """Moments, Jacobi normalization and expansion convergence."""

    def moment() -> Outcome:
        rule = QuadratureRule.build(MeasureWeight.natural(0.5), 8, config=ctx.config.quadrature)
        return below(abs(rule.integrate(np.ones_like) - 1.0 / 3.0), 1e-12)

    def jacobi_norms() -> Outcome:
        spec = SystemSpec(Setting.JACOBI, alpha=0.5, beta=0.5)
        rule = QuadratureRule.for_system(spec, 10, ctx.config.quadrature)
        norms = np.sqrt(np.diag(rule.gram(spec, spec.indices(11))))
        return below(float(np.max(np.abs(norms - 1.0))), 1e-10)

    def convergence() -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, 0.0)
        rule = QuadratureRule.for_system(spec, 32, ctx.config.quadrature)
        f, _ = catalog_function("bump")
        vector = rule.expand(spec, f, 32)
        errors = [rule.lp_norm(f(rule.nodes) - vector.partial_sum(rule.nodes, n), 2.0) for n in (8, 16, 32)]
        return passed_if(errors[0] > errors[1] > errors[2], errors[2], f"errors {errors}")

    return [
        Check("quadrature.moment[nu=0.5]", "∫x^{2ν+1}dx = 1/(2ν+2)", moment),
        Check("quadrature.jacobi-norms[1/2,1/2]", "‖Φ_k‖ = 1", jacobi_norms),
        Check("quadrature.expansion-convergence", "S_N f → f in L²(dη) for a smooth bump", convergence),
    ]


def kernels_suite(ctx: SuiteContext) -> List[Check]:
    """Series kernels against closed forms, mass, semigroup law and domination."""
    cfg = ctx.config.kernel
    grid = comparator_grid(16)

    def sine_oracle() -> Outcome:
        kernel = SeriesKernel(ctx.spec(Setting.LEBESGUE, 0.5), cfg)
        X, Y = np.meshgrid(grid, grid, indexing="ij")
        oracle = sine_series_kernel(0.05, X, Y, 200).reshape(X.shape)
        return below(float(np.max(np.abs(kernel.matrix(0.05, grid) - oracle))), 1e-10)

    def jacobi_identity() -> Outcome:
        h = SeriesKernel(SystemSpec(Setting.JACOBI, alpha=0.5, beta=0.5), cfg, differentiated=True)
        g = SeriesKernel(SystemSpec(Setting.JACOBI, alpha=1.5, beta=1.5), cfg)
        return below(_relative(h.matrix(0.05, grid), g.matrix(0.05, grid)), 1e-10)

    def markov(nu: float) -> Outcome:
        mass = probabilistic_mass(ctx.spec(Setting.ESSENTIAL_PROB, nu), 0.1, [0.1, 0.3, 0.5, 0.7, 0.9], cfg)
        return below(float(np.max(np.abs(mass - 1.0))), 1e-8)

    def semigroup(nu: float) -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu)
        kernel = SeriesKernel(spec, cfg)
        rule = QuadratureRule.for_system(spec, int(kernel.indices[-1]), ctx.config.quadrature)
        points = np.array([0.2, 0.5, 0.8])
        left = kernel.matrix(0.05, points, rule.nodes)
        composed = (left * rule.weights[None, :]) @ kernel.matrix(0.05, rule.nodes, points)
        return below(_relative(composed, kernel.matrix(0.1, points)), 1e-7)

    def spectral(nu: float) -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu)

        def phi3(x: np.ndarray) -> np.ndarray:
            return spec.basis([3], x)[0]

        result = apply_semigroup(spec, 0.1, phi3, cfg)(INTERIOR)
        return below(float(np.max(np.abs(result - math.exp(-0.1 * spec.lam(3) ** 2) * phi3(INTERIOR)))), 1e-8)

    def domination(nu: float) -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu)
        heat, diff = SeriesKernel(spec, cfg), SeriesKernel(spec, cfg, differentiated=True)
        X, Y = np.meshgrid(grid, grid, indexing="ij")
        worst = 0.0
        for t in (0.01, 0.1, 1.0, 3.0):
            mask = gaussian_resolved(t, X, Y, cfg.max_exponent)
            worst = max(worst, float(np.max((diff.matrix(t, grid) / heat.matrix(t, grid))[mask])))
        ctx.domination = max(ctx.domination or 0.0, worst)
        return below(worst, ctx.baselines.domination_cap)

    checks = [
        Check("kernels.sine-oracle[nu=0.5]", "Lebesgue kernel at ν=1/2 is 2Σe^{-n²π²t}sin(nπx)sin(nπy)", sine_oracle),
        Check("kernels.jacobi-identity[1/2,1/2]", "H_t^{α,β} = 𝔾_t^{α+1,β+1}", jacobi_identity),
    ]
    for nu in ctx.nus([0.0, 0.5]):
        checks.extend([
            Check(f"kernels.markov-mass[nu={nu:g}]", "∫𝕲_t^M(x,y)dη(y) = 1", lambda nu=nu: markov(nu)),
            Check(f"kernels.semigroup-law[nu={nu:g}]", "∫𝕲_t(x,z)𝕲_s(z,y)dη(z) = 𝕲_{t+s}(x,y)", lambda nu=nu: semigroup(nu)),
            Check(f"kernels.spectral[nu={nu:g}]", "𝕋_tϕ_3 = e^{-tλ_3²}ϕ_3", lambda nu=nu: spectral(nu)),
            Check(f"kernels.domination[nu={nu:g}]", "𝕳_t/𝕲_t bounded on the grid for t up to 3", lambda nu=nu: domination(nu)),
        ])
    return checks


def comparators_suite(ctx: SuiteContext) -> List[Check]:
    """Kernel/comparator ratio extremes against the frozen caps, plus the wrong-constant control."""
    checks = []

    def times(horizon: float) -> List[float]:
        return np.geomspace(0.005, horizon, 4).tolist()

    def run(case: str) -> RatioReport:
        entry = ctx.baselines.ratio_cap(case)
        horizon = entry.horizon if entry else 0.5
        setting = CASES[case].setting
        params = {"alpha": 0.5, "beta": 0.5} if setting is Setting.JACOBI else {"nu": 0.0 if ctx.nu is None else ctx.nu}
        return sharp_bound_ratio(case, times(horizon), grid=24, config=ctx.config.kernel,
                                 cap=entry.cap if entry else None, ratio_config=ctx.config.ratio, **params)

    for case in COMPARATOR_CASES:
        def body(case=case) -> Outcome:
            report = run(case)
            ctx.ratio_reports.append((case, report))
            return passed_if(ratio_within_cap(report), report.spread,
                             f"ratio in [{report.min_ratio:.3e}, {report.max_ratio:.3e}], cap {report.cap}")

        checks.append(Check(f"comparators.{case}", CASES[case].description, body))

    def negative_control() -> Outcome:
        # pinned to ν = 0, where the constant-4 cap is frozen
        entry = ctx.baselines.ratio_cap("heess")
        wrong = sharp_bound_ratio("heess-8t", times(0.5), grid=24, nu=0.0,
                                  config=ctx.config.kernel, ratio_config=ctx.config.ratio)
        if entry is None:
            return Outcome(Status.INCONCLUSIVE, wrong.spread, "no frozen cap for heess")
        return passed_if(wrong.spread > entry.cap, wrong.spread,
                         f"spread with constant 8 is {wrong.spread:.3e}, cap for constant 4 is {entry.cap}")

    checks.append(Check("comparators.wrong-constant", CASES["heess-8t"].description, negative_control))
    return checks


def trotter_suite(ctx: SuiteContext) -> List[Check]:
    """F^ν pieces and the Trotter sandwich."""
    checks = []
    u = np.linspace(0.0, 1.0, 201)

    def pin2() -> Outcome:
        g = pin2_term(u)
        return passed_if(bool(np.all(g <= 0.0) and np.all(g >= 1.0 - np.pi**2 / 4.0)), float(np.min(g)))

    def vanishing() -> Outcome:
        return below(generator_gap_sup(ctx.ratio(0.5)), 1e-8)

    checks.append(Check("trotter.pin2-bracket", "1 - π²/4 ≤ 1/u² - π²/(4sin²(πu/2)) ≤ 0", pin2))
    checks.append(Check("trotter.gap-vanishes[nu=0.5]", "F^{1/2} ≡ 0", vanishing))
    for nu in ctx.nus([0.0, 0.5, 1.5]):
        def endpoint(nu=nu) -> Outcome:
            ratio = ctx.ratio(nu)
            target = series_endpoint_target(ratio)
            return below(abs(ratio.r_prime_series(1.0) - target) / max(1.0, abs(target)), 1e-8)

        def sandwich(nu=nu) -> Outcome:
            report = trotter_sandwich_check(ctx.spec(Setting.LEBESGUE, nu), [0.01, 0.1, 0.5], grid=64,
                                            config=ctx.config.kernel)
            return passed_if(report.passed, float(report.violations), f"c = {report.c:.4f}, {report.unresolved} unresolved")

        def generator(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.LEBESGUE, nu)
            return below(max(float(np.max(np.abs(differentiated_generator_residual(spec, n, INTERIOR)))) for n in (2, 3)), 1e-4)

        checks.extend([
            Check(f"trotter.series-endpoint[nu={nu:g}]", "series term of F^ν at 1 is (λ_1² - (ν+1)(ν+2))/3", endpoint),
            Check(f"trotter.sandwich[nu={nu:g}]", "e^{-ct}H_t^{ν,1/2} ≤ ℍ_t^ν ≤ e^{ct}H_t^{ν,1/2}", sandwich),
            Check(f"trotter.differentiated-generator[nu={nu:g}]", "𝕄_ν𝔻ψ_n = λ_n²𝔻ψ_n", generator),
        ])
    return checks


def green_suite(ctx: SuiteContext) -> List[Check]:
    """Auxiliary F, symmetry, square integrability and the eigen-relation."""
    checks = []
    for nu in ctx.nus([0.0, 0.5]):
        def aux(nu=nu) -> GreenAux:
            return GreenAux(ctx.spec(Setting.LEBESGUE, nu))

        def endpoints(nu=nu) -> Outcome:
            a = aux(nu)
            return below(max(abs(a.F(0.0)), abs(a.F(1.0) - 1.0)), 1e-12)

        def symmetry(nu=nu) -> Outcome:
            a = aux(nu)
            rng = make_rng(ctx.seed)
            x, xi = rng.uniform(0.01, 0.99, 50), rng.uniform(0.01, 0.99, 50)
            return below(float(np.max(np.abs(a.kernel(x, xi) - a.kernel(xi, x)))), 1e-12)

        def square(nu=nu) -> Outcome:
            a = aux(nu)
            coarse, fine = a.square_integral(16), a.square_integral(32)
            reference = a.spectral_square_integral()
            if abs(coarse - fine) > 0.01 * fine:
                return Outcome(Status.FAIL, fine, f"unstable under refinement: {coarse:.6e} vs {fine:.6e}")
            return below(abs(fine - reference) / reference, 1e-3, f"∫∫K² = {fine:.6e}, Σ(λ_n²-λ_1²)^-2 = {reference:.6e}")

        def eigen(nu=nu) -> Outcome:
            a = aux(nu)
            spec = a.spec
            worst = 0.0
            x = np.linspace(0.1, 0.9, 9)
            for n in range(2, 7):
                scale = float(np.max(np.abs(spec.derivative_basis([n], x)[0]))) / spec.derivative_norm_sq(n)
                worst = max(worst, eigen_relation_residual(a, n, x) / scale)
            return below(worst, 1e-6)

        checks.extend([
            Check(f"green.F-endpoints[nu={nu:g}]", "F(0) = 0, F(1) = 1", endpoints),
            Check(f"green.symmetry[nu={nu:g}]", "K_ν(x,ξ) = K_ν(ξ,x)", symmetry),
            Check(f"green.square-integrable[nu={nu:g}]", "∫∫K_ν² = Σ(λ_n² - λ_1²)^{-2}, stable under refinement", square),
            Check(f"green.eigen-relation[nu={nu:g}]", "T_ν𝔻ψ_n = 𝔻ψ_n/(λ_n² - λ_1²)", eigen),
        ])
    return checks


def riesz_suite(ctx: SuiteContext) -> List[Check]:
    """Contractions, spectral fidelity, adjoint pairing, L^p probes and the modified constant."""
    checks = []
    count = 16
    for nu in ctx.nus([0.0, 0.5]):
        def contraction(nu=nu) -> Outcome:
            rng = make_rng(ctx.seed)
            worst = 0.0
            for setting, variant in ((Setting.ESSENTIAL, RieszVariant.STANDARD),
                                     (Setting.ESSENTIAL_PROB, RieszVariant.PROBABILISTIC),
                                     (Setting.MODIFIED, RieszVariant.MODIFIED)):
                spec = ctx.spec(setting, nu)
                for _ in range(ctx.samples):
                    vector = CoefficientVector(spec, rng.standard_normal(count))
                    worst = max(worst, riesz_apply(vector, variant).l2_norm() / vector.l2_norm())
            return below(worst, 1.0 + 1e-9)

        def fidelity(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            worst = 0.0
            for n in range(2, 7):
                vector = CoefficientVector(spec, np.eye(count)[n - 1])
                target = spec.derivative_basis([n], INTERIOR)[0] / spec.lam(n)
                worst = max(worst, _relative(riesz_apply(vector)(INTERIOR), target))
            return below(worst, 1e-9)

        def adjoint(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
            f, _ = catalog_function("bump")
            vector = CoefficientVector(spec, make_rng(ctx.seed).standard_normal(count))
            lhs = rule.inner_product(riesz_apply(vector)(rule.nodes), f)
            rhs = float(vector.coefficients @ riesz_adjoint(spec, rule, f, count).coefficients)
            return below(abs(lhs - rhs), 1e-9)

        def probes(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
            reports = [riesz_lp_probe(spec, RieszVariant.STANDARD, p, ctx.samples, ctx.seed, count, rule) for p in (1.5, 4.0)]
            if not all(r.asserted for r in reports):
                return Outcome(Status.INCONCLUSIVE, None, "outside the range where the bound is proved")
            return passed_if(all(r.within_bound for r in reports), max(r.max_ratio for r in reports),
                             f"bound {reports[0].bound:g}")

        def condition(nu=nu) -> Outcome:
            if nu <= -0.5:
                return Outcome(Status.INCONCLUSIVE, None, "K is defined for nu > -1/2")
            spec = ctx.spec(Setting.MODIFIED, nu)
            grid = np.linspace(1e-4, 1.0 - 1e-4, 2001)
            return below(modified_condition_ratio(spec, grid), modified_constant(nu))

        checks.extend([
            Check(f"riesz.contraction[nu={nu:g}]", "𝕽, 𝕽^M and 𝕽̌ are L² contractions", contraction),
            Check(f"riesz.spectral[nu={nu:g}]", "𝕽ϕ_n = λ_n^{-1}dϕ_n", fidelity),
            Check(f"riesz.adjoint[nu={nu:g}]", "⟨𝕽f, g⟩ = ⟨f, 𝕽*g⟩ in L²(dη)", adjoint),
            Check(f"riesz.lp-probe[nu={nu:g}]", "‖𝕽‖_{p→p} ≤ 48(p*-1)", probes),
            Check(f"riesz.modified-constant[nu={nu:g}]", "(R - 1/(1-x))² x(1-x)/(2ν+1) ≤ K", condition),
        ])

    def vectorial() -> Outcome:
        nu = 0.0 if ctx.nu is None else ctx.nu
        spec = ctx.spec(Setting.ESSENTIAL, nu)
        tensor = TensorSystem([spec, spec])
        unit = np.zeros((2, 1))
        unit[1, 0] = 1.0
        lam1, lam2 = spec.lam(1), spec.lam(2)
        exact = math.sqrt((lam2**2 - lam1**2) / (lam2**2 + lam1**2))
        gap = abs(riesz_vectorial(tensor, unit).l2_norm() - exact)
        rng = make_rng(ctx.seed)
        worst = 0.0
        for _ in range(50):
            coefficients = rng.standard_normal((4, 4))
            worst = max(worst, riesz_vectorial(tensor, coefficients).l2_norm() / float(np.linalg.norm(coefficients)))
        return passed_if(gap <= 1e-12 and worst <= 1.0 + 1e-12, worst, f"ϕ_(2,1) norm gap {gap:.2e}")

    checks.append(Check("riesz.vectorial[d=2]", "|(𝕽¹f, 𝕽²f)| is an L² contraction", vectorial))
    return checks


def potential_suite(ctx: SuiteContext) -> List[Check]:
    """Coefficient and kernel routes, inversion and injectivity."""
    nu = 0.5 if ctx.nu is None else ctx.nu

    def routes() -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu, n_max=200)
        x, y = 0.3, 0.7
        kernel = potential_kernel(spec, 0.5, x, y, 200, config=ctx.config.kernel)
        vector = CoefficientVector(spec, spec.basis(spec.indices(200), np.array([y]))[:, 0])
        coefficient = float(potential_apply(vector, 0.5).partial_sum(np.array([x]))[0])
        return below(abs(kernel - coefficient) / max(1.0, abs(kernel)), 1e-8)

    def inversion() -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu)
        vector = CoefficientVector(spec, make_rng(ctx.seed).standard_normal(16))
        back = potential_apply(fractional_power(vector, 0.5), 0.5)
        return below(float(np.max(np.abs(back.coefficients - vector.coefficients))), 1e-10)

    def injective() -> Outcome:
        spec = ctx.spec(Setting.ESSENTIAL, nu)
        ok = all(is_injective_on_span(spec, sigma, 64) for sigma in (0.25, 0.5, 1.0, 2.0))
        return passed_if(ok and is_injective_on_span(spec, 0.5, 64, probabilistic=True))

    return [
        Check(f"potential.routes[nu={nu:g}]", "𝕶_σ = Γ(σ)^{-1}∫𝕲_t t^{σ-1}dt agrees with λ_n^{-2σ} multipliers", routes),
        Check(f"potential.inversion[nu={nu:g}]", "𝕴_{1/2}𝕷^{1/2} = identity on the span", inversion),
        Check(f"potential.injective[nu={nu:g}]", "𝕴_σ is injective on the span", injective),
    ]


def sobolev_suite(ctx: SuiteContext) -> List[Check]:
    """Calderón equivalence, closed forms, Parseval, density and derivative diagnostics."""
    checks = []
    count = 16
    for nu in ctx.nus([-0.5, 0.0, 0.5]):
        for p in (1.5, 2.0, 3.0):
            def equivalence(nu=nu, p=p) -> Outcome:
                spec = ctx.spec(Setting.ESSENTIAL, nu)
                rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
                report = calderon_equivalence_report(spec, p, ctx.samples, ctx.seed, count, rule,
                                                     ctx.baselines.calderon_band(nu, p))
                ctx.calderon_reports.append(report)
                return passed_if(report.within_band, report.max_ratio / report.min_ratio,
                                 f"ratio in [{report.min_ratio:.4f}, {report.max_ratio:.4f}]")

            checks.append(Check(f"sobolev.calderon[nu={nu:g},p={p:g}]",
                                "‖f‖_W and ‖f‖_{𝕷^{p,1}} are equivalent on the span", equivalence))

        def closed_form(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
            worst = 0.0
            for n in range(1, 7):
                el = SobolevElement(CoefficientVector(spec, np.eye(count)[n - 1]), 2.0)
                lam = spec.lam(n)
                target = (1.0 + math.sqrt(lam**2 - spec.lam(1) ** 2)) / lam
                worst = max(worst, abs(sobolev_norm(rule, el) / potential_norm(rule, el) - target))
            return below(worst, 1e-10)

        def parseval(nu=nu) -> Outcome:
            spec = ctx.spec(Setting.ESSENTIAL, nu)
            rule = QuadratureRule.for_system(spec, count, ctx.config.quadrature)
            el = SobolevElement(CoefficientVector(spec, make_rng(ctx.seed).standard_normal(count)), 2.0)
            exact = float(np.sum(spec.zeros.zeros[:count] ** 2 * el.vector.coefficients**2))
            return below(abs(potential_norm(rule, el) ** 2 - exact) / exact, 1e-10)

        def density(nu=nu) -> Outcome:
            f, _ = catalog_function("bump")
            norms = density_check(ctx.spec(Setting.ESSENTIAL, nu), f, 64)
            return passed_if(bool(np.all(np.diff(norms) < 0)), float(norms[-1]), f"norms {norms.tolist()}")

        checks.extend([
            Check(f"sobolev.closed-form[nu={nu:g}]", "‖ϕ_n‖_W/‖ϕ_n‖_{𝕷^{2,1}} = (1 + √(λ_n²-λ_1²))/λ_n", closed_form),
            Check(f"sobolev.parseval[nu={nu:g}]", "‖f‖_{𝕷^{2,1}}² = Σλ_n²c_n²", parseval),
            Check(f"sobolev.density[nu={nu:g}]", "‖𝕋_tf - f‖_W decreases as t ↓ 0", density),
        ])

    def diagnostics() -> Outcome:
        nu = 0.0 if ctx.nu is None else ctx.nu
        step = {e.derivative: e for e in old_derivative_diagnostic(nu, 2.0, "smoothed-step", config=ctx.config.ratio).entries}
        bump = old_derivative_diagnostic(nu, 2.0, "bump", config=ctx.config.ratio).entries
        ok = step["new-natural"].divergent and not any(e.divergent for e in bump)
        return passed_if(ok, step["new-natural"].growth_exponent, "growth exponent of δf for the smoothed step")

    def coincidence() -> Outcome:
        f, fprime = catalog_function("bump")
        lebesgue = ctx.spec(Setting.LEBESGUE, -0.5)
        jacobi = SystemSpec(Setting.JACOBI, alpha=-0.5, beta=0.5)
        return below(_relative(lebesgue.apply_derivative(f, fprime, INTERIOR), jacobi.apply_derivative(f, fprime, INTERIOR)), 1e-9)

    checks.append(Check("sobolev.old-derivative", "δf ∉ L^p(dμ) for a smoothed step; a compact bump is fine", diagnostics))
    checks.append(Check("sobolev.jacobi-coincidence", "𝔻_{-1/2} coincides with the Jacobi (-1/2, 1/2) derivative", coincidence))
    return checks


SUITES: Dict[str, Callable[[SuiteContext], List[Check]]] = {
    "calogero": calogero_suite,
    "zeros": zeros_suite,
    "ratio": ratio_suite,
    "systems": systems_suite,
    "quadrature": quadrature_suite,
    "kernels": kernels_suite,
    "comparators": comparators_suite,
    "trotter": trotter_suite,
    "green": green_suite,
    "riesz": riesz_suite,
    "potential": potential_suite,
    "sobolev": sobolev_suite,
}


def build_checks(names: Sequence[str], ctx: SuiteContext) -> List[Check]:
    """
    Checks of the named suites, in order.

    Raises:
        DomainError: For an unknown suite name.
    """
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise DomainError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    checks = []
    for name in names:
        suite = SUITES[name](ctx)
        logger.info(f"Suite {name}: {len(suite)} checks")
        checks.extend(suite)
    return checks
