import dataclasses
import json
import math

import pytest
from pytest import approx

from analysis.grid import make_grid
from analysis.littlewood_paley import build_filter_bank
from experiments.fitting import CONSISTENT, fit_slope
from experiments.growth import ContrastReport, GrowthReport, GrowthRow
from experiments.regimes import predicted_exponent
from experiments.settings import ExperimentConfig
from utils.config import CALIBRATION_CSV_COLUMNS, GROWTH_CSV_COLUMNS, SUMMARY_CSV_COLUMNS
from utils.csv_exporter import (CSVExporter, calibration_text, contrast_report_text, format_value,
                                growth_report_text)
from utils.partial_exporter import ReportExporter, growth_report_dict
from utils.workspace import Workspace


def _report(config, law):
    rows = tuple(
        GrowthRow(N, 1 << N, f"full_range:0-{N}", N + 1, 2, 1, 2, law(N), 'section5',
                  (config.seed, N, 0, 1), N > 2, 2.0 ** (0.2 * N))
        for N in config.N_range)
    fit = fit_slope([(row.N, math.log2(row.gamma_hat)) for row in rows])
    prediction = predicted_exponent(config.p, config.q, config.s)
    return GrowthReport(config, rows, fit, prediction, prediction.exponent, CONSISTENT)


@pytest.fixture
def report():
    config = ExperimentConfig(6.0, 2.0, -0.7, N_min=1, N_max=4, samples=3)
    return _report(config, lambda N: 0.2 * N)


def test_format_value():
    assert format_value(None) == ''
    assert format_value(True) == 'true'
    assert format_value(0.1) == '0.1'
    assert format_value(3) == '3'


def test_growth_report_text_layout(report):
    lines = growth_report_text(report).splitlines()
    assert lines[0] == '# [config]'
    header = lines.index(",".join(GROWTH_CSV_COLUMNS))
    assert lines[header + 1].startswith("1,2,full_range:0-1,2,1,0.2,section5,")
    assert lines[header + 1].endswith(f"{report.config.seed}:1:0:1")
    summary = lines.index(",".join(SUMMARY_CSV_COLUMNS))
    assert summary == header + 5
    assert lines[summary + 1].endswith(",consistent")


def test_growth_report_csv_reproduces_config(tmp_path, report):
    path = tmp_path / "growth.csv"
    assert CSVExporter.export_growth_report(str(path), report)
    again = ExperimentConfig.from_mapping(Workspace.load(str(path)))
    assert again == report.config


def test_export_to_missing_directory_fails(tmp_path, report):
    assert not CSVExporter.export_growth_report(str(tmp_path / "no" / "x.csv"), report)
    assert not ReportExporter.export_growth_report(str(tmp_path / "no" / "x.json"), report)


def test_json_mirror(tmp_path, report):
    path = tmp_path / "growth.json"
    assert ReportExporter.export_growth_report(str(path), report)
    data = json.loads(path.read_text())
    assert data['metadata']['kind'] == 'growth'
    assert 'timestamp' not in data['metadata']
    body = data['report']
    assert body['regime'] == report.prediction.regime
    assert body['prediction']['predicted_slope'] == approx(0.2)
    assert [row['N'] for row in body['rows']] == [1, 2, 3, 4]
    assert body['rows'][3]['capped'] is True
    assert body['fit']['points'] == 4
    summary = ReportExporter.get_report_summary(str(path))
    assert summary['verdict'] == CONSISTENT
    assert summary['row_count'] == 4


def test_json_maps_infinite_bounds_to_null(report):
    infinite_row = dataclasses.replace(report.rows[0], upper_bound=float('inf'))
    body = growth_report_dict(GrowthReport(report.config, (infinite_row,), None,
                                           report.prediction, None, 'inconclusive'))
    assert body['rows'][0]['upper_bound'] is None
    assert body['fit'] is None
    json.dumps(body, allow_nan=False)


def test_load_report_failures(tmp_path):
    assert ReportExporter.load_report(str(tmp_path / "missing.json")) is None
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert ReportExporter.load_report(str(broken)) is None
    assert ReportExporter.get_report_summary(str(broken)) is None


def test_contrast_report_text(report):
    separated = _report(report.config.with_values(set_builder='separated', fit_against='log2N'),
                        lambda N: 0.1 * N)
    contrast = ContrastReport(report, separated, {N: 2.0 for N in report.config.N_range},
                              1.0, 2.0)
    text = contrast_report_text(contrast)
    assert 'set_builder' not in text
    assert 'N,gamma_full,gamma_sep,ratio' in text.splitlines()
    assert '1,0.2,0.1,2.0' in text.splitlines()
    assert not contrast.increasing


def test_calibration_text(tmp_path):
    bank = build_filter_bank(3, 0.5, make_grid(8, -1, 2))
    lines = calibration_text([bank]).splitlines()
    assert lines[0] == ",".join(CALIBRATION_CSV_COLUMNS)
    assert lines[1].startswith("psi_m3_r0.5,3,0.5,")
    assert not CSVExporter.export_calibration(str(tmp_path / "cal.csv"), [])
    assert CSVExporter.export_calibration(str(tmp_path / "cal.csv"), [bank])
