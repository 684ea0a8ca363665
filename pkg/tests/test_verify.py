"""Tests for the verification harness and the frozen baselines."""
import pytest

from fblab.config import Config
from fblab.schemas import CalderonReport, RatioReport, Status
from fblab.utils.exceptions import ConfigurationError, DomainError
from fblab.verify.baselines import (
    HEADROOM,
    Baselines,
    RatioBaseline,
    band_key,
    load_baselines,
    regenerate,
    save_baselines,
)
from fblab.verify.checks import Check, Outcome, below, format_table, passed_if, run_checks
from fblab.verify.suites import SUITES, SuiteContext, build_checks


@pytest.fixture
def context():
    return SuiteContext(config=Config(), baselines=load_baselines(), seed=1, samples=4, nu=0.5)


def test_outcome_helpers():
    assert below(1e-9, 1e-8).status is Status.PASS
    assert below(1e-7, 1e-8).status is Status.FAIL
    assert passed_if(True).status is Status.PASS


def test_library_errors_become_failures():
    def body():
        raise DomainError("bad index")

    result = Check("demo.error", "anchor", body).run()
    assert result.status is Status.FAIL
    assert "DomainError" in result.detail


def test_format_table():
    results = run_checks([
        Check("demo.pass", "x = x", lambda: below(0.0, 1.0)),
        Check("demo.inconclusive", "maybe", lambda: Outcome(Status.INCONCLUSIVE)),
    ])
    lines = format_table(results).splitlines()
    assert lines[0].split() == ["check", "anchor", "status", "measured"]
    assert set(lines[1].replace(" ", "")) == {"-"}
    assert "inconclusive" in lines[3]


def test_unknown_suite(context):
    with pytest.raises(DomainError):
        build_checks(["nope"], context)


def test_every_suite_builds_checks(context):
    for name in SUITES:
        checks = build_checks([name], context)
        assert checks
        assert all(check.check_id.startswith(name) for check in checks)


@pytest.mark.parametrize("suite", ["zeros", "ratio"])
def test_cheap_suites_pass(context, suite):
    results = run_checks(build_checks([suite], context))
    assert [r.check_id for r in results if r.status is not Status.PASS] == []


def test_context_restricts_orders(context):
    assert context.nus([0.0, 1.0]) == [0.5]
    assert context.ratio(0.5) is context.ratio(0.5)


def test_packaged_baselines():
    baselines = load_baselines()
    assert baselines.ratio_cap("jacobi").cap == 50.0
    assert baselines.ratio_cap("missing") is None
    assert baselines.calderon_band(0.0, 2.0) == (0.05, 5.0)


def test_baseline_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_baselines(str(tmp_path / "missing.yaml"))
    path = tmp_path / "bad.yaml"
    path.write_text("calderon_bands:\n  default: [5.0, 1.0]\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_baselines(str(path))


def test_save_and_reload(tmp_path):
    path = tmp_path / "baselines.yaml"
    original = Baselines(ratio_caps={"jacobi": RatioBaseline(cap=12.0, horizon=0.5)}, calderon_bands={"default": (0.1, 3.0)})
    save_baselines(original, str(path))
    assert path.read_text(encoding="utf-8").startswith("#")
    assert load_baselines(str(path)) == original


def test_regenerate_applies_headroom():
    current = Baselines(ratio_caps={"heess": RatioBaseline(cap=100.0, horizon=0.5)}, domination_cap=10.0)
    ratio = RatioReport(kernel="k", comparator="jacobi", parameters={}, t_values=[0.01, 0.2], grid=8,
                        resolved_points=10, min_ratio=0.5, max_ratio=1.5, config={})
    calderon = CalderonReport(nu=0.0, p=3.0, samples=4, seed=1, min_ratio=0.8, max_ratio=1.2, within_band=True)
    updated = regenerate(current, [("jacobi", ratio)], [calderon], domination=2.0)
    assert updated.ratio_caps["jacobi"].cap >= HEADROOM * ratio.spread
    assert updated.ratio_caps["jacobi"].horizon == 0.2
    assert updated.ratio_caps["heess"].cap == 100.0
    low, high = updated.calderon_bands[band_key(0.0, 3.0)]
    assert low <= 0.8 / HEADROOM and high >= 1.2 * HEADROOM
    assert updated.domination_cap == pytest.approx(4.0)


@pytest.mark.slow
def test_every_suite_passes_reduced():
    ctx = SuiteContext(config=Config(), baselines=load_baselines(), seed=1, samples=4, nu=0.0)
    results = run_checks(build_checks(list(SUITES), ctx))
    assert [r.check_id for r in results if r.status is Status.FAIL] == []


def test_wrong_constant_exceeds_cap():
    ctx = SuiteContext(config=Config(), baselines=load_baselines(), seed=1, samples=4, nu=0.0)
    check = next(c for c in build_checks(["comparators"], ctx) if c.check_id == "comparators.wrong-constant")
    result = check.run()
    assert result.status is Status.PASS
    assert result.measured > load_baselines().ratio_cap("heess").cap
