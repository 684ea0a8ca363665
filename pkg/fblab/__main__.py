"""Main entry point for the fblab command line."""
import argparse
import sys
from typing import Any, List, Optional, Sequence

import numpy as np
from loguru import logger

from fblab.config import Config, RunConfig, load_config, set_config
from fblab.core.bessel import compute_zeros
from fblab.core.quadrature import QuadratureRule
from fblab.core.sobolev import CATALOG, calderon_equivalence_report, catalog_function, old_derivative_diagnostic
from fblab.core.systems import DerivativeKind, Setting, SystemSpec
from fblab.operators.comparators import CASES, sharp_bound_ratio
from fblab.operators.green import GreenAux
from fblab.operators.kernels import SeriesKernel
from fblab.operators.potential import potential_kernel
from fblab.operators.riesz import RieszVariant, riesz_lp_probe
from fblab.schemas import TableDocument, VerifyReport
from fblab.utils.exceptions import CertificationFailure, ConfigurationError, FBLabException
from fblab.utils.helpers import render_csv, render_json, uniform_grid, write_output
from fblab.utils.logger import setup_logging
from fblab.verify.baselines import load_baselines, regenerate, save_baselines
from fblab.verify.checks import format_table, run_checks
from fblab.verify.suites import SUITES, SuiteContext, build_checks

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_FAILED = 3
EXIT_INCONCLUSIVE = 4

RUN_FIELDS = ("setting", "nu", "alpha", "beta", "truncation", "tolerance", "t_min", "grid", "output", "format")


def option(args: argparse.Namespace, config: Config, name: str, default: Any) -> Any:
    """A subcommand option: the flag, else the config file's run section, else ``default``."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return (config.run or {}).get(name, default)


def build_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """
    Merge the config file's run section with the flags; flags win.

    Raises:
        ValidationError: If the merged values violate a precondition.
    """
    values = dict(config.run or {})
    for name in RUN_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    return RunConfig(**values)


def build_spec(run: RunConfig, config: Config, setting: Optional[str] = None, n_max: int = 64) -> SystemSpec:
    n_max = max(n_max, run.truncation or 0)
    return SystemSpec.build(setting or run.setting, nu=run.nu, alpha=run.alpha, beta=run.beta,
                            n_max=n_max, config=config.ratio)


def emit_table(run: RunConfig, document: TableDocument) -> None:
    if run.format == "csv":
        text = render_csv(document.columns, document.rows)
    else:
        text = render_json(document)
    write_output(text, run.output)


def run_zeros(args: argparse.Namespace, config: Config) -> int:
    """First ``count`` zeros of J_ν with their certified brackets."""
    run = build_run_config(args, config)
    count = int(option(args, config, "count", 10))
    table = compute_zeros(run.nu, count, config.zeros)
    if run.format == "csv":
        rows = [(n, float(z), float(lo), float(hi)) for n, (z, (lo, hi)) in enumerate(zip(table.zeros, table.brackets), 1)]
        write_output(render_csv(["n", "zero", "lower", "upper"], rows), run.output)
    else:
        write_output(render_json(table.to_schema()), run.output)
    return EXIT_OK


def run_eval(args: argparse.Namespace, config: Config) -> int:
    """Eigenfunctions, or their derivatives, on a midpoint grid."""
    run = build_run_config(args, config)
    indices: List[int] = option(args, config, "index", None) or [1, 2, 3]
    spec = build_spec(run, config, n_max=max(indices))
    x = uniform_grid(run.grid)
    derivative = option(args, config, "derivative", "none")
    if derivative == "none":
        values = spec.basis(indices, x)
    else:
        values = spec.derivative_basis(indices, x, DerivativeKind(derivative))
    rows = [[float(xi), *map(float, values[:, i])] for i, xi in enumerate(x)]
    emit_table(run, TableDocument(
        kind=f"eval:{derivative}",
        setting=spec.setting.value,
        parameters=spec.parameters,
        columns=["x", *(f"n={n}" for n in indices)],
        rows=rows,
    ))
    return EXIT_OK


def run_expand(args: argparse.Namespace, config: Config) -> int:
    """Expansion coefficients of a catalog function."""
    run = build_run_config(args, config)
    count = int(option(args, config, "count", 16))
    spec = build_spec(run, config, n_max=count)
    f, _ = catalog_function(option(args, config, "function", "bump"))
    rule = QuadratureRule.for_system(spec, spec.first_index + count - 1, config.quadrature)
    vector = rule.expand(spec, f, count)
    if run.format == "csv":
        rows = [(int(n), float(c)) for n, c in zip(vector.indices, vector.coefficients)]
        write_output(render_csv(["n", "coefficient"], rows), run.output)
    else:
        write_output(render_json(vector.to_schema()), run.output)
    return EXIT_OK


def run_heat(args: argparse.Namespace, config: Config) -> int:
    """Kernel dump on grid², or a comparator ratio report with ``--compare``."""
    run = build_run_config(args, config)
    kernel_config = run.kernel_config(config.kernel)
    case = option(args, config, "compare", None)
    if case is not None:
        t_values = option(args, config, "t_values", None) or [0.01, 0.05, 0.1, 0.5]
        report = sharp_bound_ratio(case, t_values, grid=run.grid, nu=run.nu, alpha=run.alpha, beta=run.beta,
                                   config=kernel_config, ratio_config=config.ratio)
        write_output(render_json(report), run.output)
        return EXIT_OK

    t = float(option(args, config, "t", 0.1))
    differentiated = bool(option(args, config, "differentiated", False))
    spec = build_spec(run, config, n_max=128)
    kernel = SeriesKernel(spec, kernel_config, differentiated=differentiated)
    x = uniform_grid(run.grid)
    values = kernel.matrix(t, x)
    rows = [[float(xi), float(yj), t, float(values[i, j])] for i, xi in enumerate(x) for j, yj in enumerate(x)]
    emit_table(run, TableDocument(
        kind="diff-heat" if differentiated else "heat",
        setting=spec.setting.value,
        parameters=spec.parameters,
        columns=["x", "y", "t", "value"],
        rows=rows,
        metadata={"truncation": float(kernel.truncation), "tolerance": kernel_config.tolerance},
    ))
    return EXIT_OK


def run_green(args: argparse.Namespace, config: Config) -> int:
    """Green function K_ν of the Lebesgue setting on grid²."""
    run = build_run_config(args, config)
    aux = GreenAux(build_spec(run, config, setting=Setting.LEBESGUE.value))
    x = uniform_grid(run.grid)
    X, Y = np.meshgrid(x, x, indexing="ij")
    values = aux.kernel(X, Y)
    rows = [[float(X[i, j]), float(Y[i, j]), float(values[i, j])] for i in range(len(x)) for j in range(len(x))]
    emit_table(run, TableDocument(kind="green", setting=Setting.LEBESGUE.value, parameters=[aux.nu],
                                  columns=["x", "xi", "value"], rows=rows))
    return EXIT_OK


def run_riesz(args: argparse.Namespace, config: Config) -> int:
    """Empirical L^p probe of a Riesz transform."""
    run = build_run_config(args, config)
    variant = RieszVariant(option(args, config, "variant", RieszVariant.STANDARD.value))
    setting = {
        RieszVariant.STANDARD: Setting.ESSENTIAL,
        RieszVariant.PROBABILISTIC: Setting.ESSENTIAL_PROB,
        RieszVariant.MODIFIED: Setting.MODIFIED,
    }[variant].value
    count = int(option(args, config, "count", 16))
    spec = build_spec(run, config, setting=setting)
    seed = int(option(args, config, "seed", config.verify.seed))
    report = riesz_lp_probe(spec, variant, float(option(args, config, "p", 2.0)),
                            int(option(args, config, "samples", config.verify.samples)), seed, count)
    write_output(render_json(report), run.output)
    return EXIT_OK


def run_potential(args: argparse.Namespace, config: Config) -> int:
    """Potential kernel 𝕶_σ on grid²."""
    run = build_run_config(args, config)
    kernel_config = run.kernel_config(config.kernel)
    count = int(option(args, config, "count", kernel_config.truncation or 64))
    sigma = float(option(args, config, "sigma", 0.5))
    probabilistic = bool(option(args, config, "probabilistic", False))
    spec = build_spec(run, config, n_max=count)
    x = uniform_grid(run.grid)
    X, Y = np.meshgrid(x, x, indexing="ij")
    values = potential_kernel(spec, sigma, X, Y, count, probabilistic, config=kernel_config)
    rows = [[float(X[i, j]), float(Y[i, j]), float(values[i, j])] for i in range(len(x)) for j in range(len(x))]
    emit_table(run, TableDocument(kind="potential", setting=spec.setting.value, parameters=spec.parameters,
                                  columns=["x", "y", "value"], rows=rows,
                                  metadata={"sigma": sigma, "count": float(count)}))
    return EXIT_OK


def run_sobolev(args: argparse.Namespace, config: Config) -> int:
    """Calderón equivalence report, or the old-derivative diagnostic with ``--diagnostic``."""
    run = build_run_config(args, config)
    p = float(option(args, config, "p", 2.0))
    function = option(args, config, "diagnostic", None)
    if function is not None:
        report = old_derivative_diagnostic(run.nu, p, function, config=config.ratio)
    else:
        spec = build_spec(run, config, setting=Setting.ESSENTIAL.value)
        baselines = load_baselines(option(args, config, "baselines", config.verify.baselines))
        report = calderon_equivalence_report(
            spec, p,
            samples=int(option(args, config, "samples", config.verify.samples)),
            seed=int(option(args, config, "seed", config.verify.seed)),
            count=int(option(args, config, "count", 16)),
            baseline_band=baselines.calderon_band(run.nu, p),
        )
    write_output(render_json(report), run.output)
    return EXIT_OK


def run_verify(args: argparse.Namespace, config: Config) -> int:
    """
    Run verification suites and print the check table.

    Returns 3 when a check fails and 4 when one is inconclusive under
    ``--strict``.
    """
    verify = config.verify
    seed = args.seed if args.seed is not None else verify.seed
    samples = args.samples if args.samples is not None else verify.samples
    strict = args.strict or verify.strict
    baseline_path = args.baselines or verify.baselines
    names = args.suite or list(SUITES)

    ctx = SuiteContext(config=config, baselines=load_baselines(baseline_path), seed=seed, samples=samples, nu=args.nu)
    logger.info(f"Verifying suites {names} with seed {seed}")
    results = run_checks(build_checks(names, ctx))
    report = VerifyReport(seed=seed, suites=names, results=results)

    print(f"seed: {seed}")
    print(format_table(results))
    if args.output:
        write_output(render_json(report), args.output)

    if args.update_baselines:
        updated = regenerate(ctx.baselines, ctx.ratio_reports, ctx.calderon_reports, ctx.domination)
        save_baselines(updated, baseline_path)

    if report.failed:
        logger.error(f"{len(report.failed)} of {len(results)} checks failed")
        return EXIT_FAILED
    if report.inconclusive and strict:
        logger.warning(f"{len(report.inconclusive)} checks inconclusive under --strict")
        return EXIT_INCONCLUSIVE
    logger.success(f"All {len(results)} checks passed or recorded")
    return EXIT_OK


COMMANDS = {
    "zeros": run_zeros,
    "eval": run_eval,
    "expand": run_expand,
    "heat": run_heat,
    "green": run_green,
    "riesz": run_riesz,
    "potential": run_potential,
    "sobolev": run_sobolev,
    "verify": run_verify,
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per computation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="Path to configuration file", default=None)
    common.add_argument("--log-level", help="Override the configured log level", default=None)
    common.add_argument("--output", help="Write output to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="Output format")

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--setting", choices=[s.value for s in Setting], help="Measure setting")
    system.add_argument("--nu", type=float, help="Bessel order ν > -1")
    system.add_argument("--alpha", type=float, help="Jacobi α > -1")
    system.add_argument("--beta", type=float, help="Jacobi β > -1")
    system.add_argument("--truncation", type=int, help="Series truncation N")
    system.add_argument("--tolerance", type=float, help="Series remainder tolerance")
    system.add_argument("--t-min", dest="t_min", type=float, help="Smallest admissible time")
    system.add_argument("--grid", type=int, help="Grid points per axis")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, help="Random seed")
    seeded.add_argument("--samples", type=int, help="Number of random span elements")

    parser = argparse.ArgumentParser(prog="fblab", description="fblab - discrete Fourier-Bessel analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    zeros = sub.add_parser("zeros", parents=[common, system], help="Positive zeros of J_nu")
    zeros.add_argument("--count", type=int, help="Number of zeros")

    evaluate = sub.add_parser("eval", parents=[common, system], help="Evaluate eigenfunctions or derivatives")
    evaluate.add_argument("--index", type=int, nargs="+", help="Eigenfunction indices")
    evaluate.add_argument("--derivative", choices=["none", "new", "old"], help="Derivative to evaluate")

    expand = sub.add_parser("expand", parents=[common, system], help="Expansion coefficients of a test function")
    expand.add_argument("--function", choices=sorted(CATALOG), help="Test function")
    expand.add_argument("--count", type=int, help="Number of coefficients")

    heat = sub.add_parser("heat", parents=[common, system], help="Heat kernels and comparator ratios")
    heat.add_argument("--t", type=float, help="Time")
    heat.add_argument("--differentiated", action="store_true", default=None, help="Differentiated kernel")
    heat.add_argument("--compare", choices=sorted(CASES), help="Report kernel/comparator ratio extremes")
    heat.add_argument("--t-values", dest="t_values", type=float, nargs="+", help="Times for --compare")

    sub.add_parser("green", parents=[common, system], help="Green function of the Lebesgue setting")

    riesz = sub.add_parser("riesz", parents=[common, system, seeded], help="L^p probe of a Riesz transform")
    riesz.add_argument("--variant", choices=[v.value for v in RieszVariant], help="Riesz variant")
    riesz.add_argument("--p", type=float, help="Exponent p > 1")
    riesz.add_argument("--count", type=int, help="Span size")

    potential = sub.add_parser("potential", parents=[common, system], help="Potential kernel")
    potential.add_argument("--sigma", type=float, help="Order σ > 0")
    potential.add_argument("--count", type=int, help="Number of terms")
    potential.add_argument("--probabilistic", action="store_true", default=None, help="Shifted multipliers")

    sobolev = sub.add_parser("sobolev", parents=[common, system, seeded], help="Sobolev/potential equivalence")
    sobolev.add_argument("--p", type=float, help="Exponent p > 1")
    sobolev.add_argument("--count", type=int, help="Span size, at most 16")
    sobolev.add_argument("--diagnostic", choices=sorted(CATALOG), help="Old-derivative diagnostic for a test function")
    sobolev.add_argument("--baselines", help="Baseline file")

    verify = sub.add_parser("verify", parents=[common, seeded], help="Run verification suites")
    verify.add_argument("--suite", action="append", choices=sorted(SUITES), help="Suite to run (repeatable)")
    verify.add_argument("--nu", type=float, help="Restrict suites to this order")
    verify.add_argument("--strict", action="store_true", help="Exit 4 on inconclusive checks")
    verify.add_argument("--update-baselines", action="store_true", help="Rewrite frozen caps and bands")
    verify.add_argument("--baselines", help="Baseline file")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    code = EXIT_ERROR
    try:
        config = load_config(args.config)
        if args.log_level:
            config.logging.level = args.log_level.upper()
        setup_logging(config.logging)
        set_config(config)
        code = COMMANDS[args.command](args, config)
    except (ConfigurationError, ValueError, FileNotFoundError) as e:
        logger.error(f"Configuration error: {e}")
        code = EXIT_CONFIG
    except CertificationFailure as e:
        logger.error(f"Certification failure: {e}")
        code = EXIT_FAILED
    except FBLabException as e:
        logger.error(f"Error running {args.command}: {e}")
        code = EXIT_ERROR
    sys.exit(code)


if __name__ == "__main__":
    main()
