import pytest

from cli.app import EXIT_ERROR, EXIT_OK, run
from experiments import selftest
from experiments.growth import max_feasible_N
from experiments.selftest import (ENDPOINT_N_RANGE, FAIL, HEAVY_CHECKS, PASS, SKIP, CheckResult,
                                  SelftestOptions, SelftestReport, endpoint_contrast_config,
                                  growth_law_config, run_selftest, selected_checks)
from experiments.settings import build_resources


@pytest.mark.parametrize("statuses, passed", (
    ((PASS, PASS), True),
    ((PASS, SKIP), False),
    ((SKIP,), False),
    ((PASS, FAIL), False),
    ((), False),
))
def test_only_all_passes_make_a_passing_report(statuses, passed):
    report = SelftestReport([CheckResult(f"check{i}", status) for i, status in enumerate(statuses)])
    assert report.passed is passed


@pytest.fixture
def stub_checks(monkeypatch):
    def install(*outcomes):
        checks = [(f"stub{i}", lambda options, outcome=outcome: outcome)
                  for i, outcome in enumerate(outcomes)]
        monkeypatch.setattr(selftest, 'CHECKS', checks)
    return install


def test_a_skipped_check_makes_the_cli_exit_with_one(stub_checks, capsys):
    stub_checks((PASS, "fine"), (SKIP, "not resolvable"))
    assert run(['-q', 'selftest']) == EXIT_ERROR
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[1] for line in lines] == [PASS, SKIP]


def test_all_passing_checks_exit_with_zero(stub_checks):
    stub_checks((PASS, "fine"), (PASS, "also fine"))
    assert run(['-q', 'selftest']) == EXIT_OK


def test_quick_run_leaves_out_the_heavy_checks():
    names = selected_checks(SelftestOptions(quick=True))
    assert not HEAVY_CHECKS & set(names)
    assert names[0] == 'exact_algebra' and names[-1] == 'reproducibility'
    assert set(selected_checks(SelftestOptions())) >= HEAVY_CHECKS
    assert selected_checks(SelftestOptions(quick=True), ['growth_law']) == ['growth_law']


def test_quick_report_lists_only_the_checks_that_ran(stub_checks, monkeypatch):
    monkeypatch.setattr(selftest, 'HEAVY_CHECKS', frozenset({'stub1'}))
    stub_checks((PASS, "fine"), (SKIP, "heavy"))
    report = run_selftest(SelftestOptions(quick=True))
    assert [result.name for result in report.results] == ['stub0']
    assert report.passed


def test_endpoint_contrast_config_resolves_its_range():
    options = SelftestOptions()
    config = endpoint_contrast_config(options)
    assert config.j_max > options.j_max
    assert config.candidate_families == ('section6',)
    assert not config.exclude_capped
    assert max_feasible_N(config, build_resources(config)) >= ENDPOINT_N_RANGE[1]
    coarser = config.with_values(j_max=config.j_max - 1)
    assert max_feasible_N(coarser, build_resources(coarser)) < ENDPOINT_N_RANGE[1]


def test_growth_law_config_fits_capped_rows():
    config = growth_law_config(SelftestOptions())
    assert (config.N_min, config.N_max) == (3, 8)
    assert not config.exclude_capped
    assert growth_law_config(SelftestOptions(j_max=10)) is None
