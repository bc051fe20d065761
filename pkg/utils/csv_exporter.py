"""
CSV Exporter Module
Exports growth reports, endpoint contrasts and filter-bank calibrations to CSV.

Reports start with the resolved configuration as a commented `# [config]`
block, followed by the row table and a one-line summary table. Floats are
written with repr so a re-run from the embedded config is byte-identical.
"""

import csv
import io
import logging
from typing import Iterable, List, Optional, Sequence

from .config import (CALIBRATION_CSV_COLUMNS, CONTRAST_CSV_COLUMNS, CONTRAST_SUMMARY_COLUMNS,
                     GROWTH_CSV_COLUMNS, SUMMARY_CSV_COLUMNS)
from .workspace import config_block

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """CSV cell text: '' for None, repr for floats, lower-case booleans."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _table(columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def _fit_cells(fit) -> List[Optional[float]]:
    if fit is None:
        return [None, None, None]
    return [fit.slope, fit.intercept, fit.r2]


def growth_report_text(report) -> str:
    """Config block, one row per N, then 'slope,intercept,r2,predicted,verdict'."""
    rows = [(row.N, row.lam, row.set_desc, row.z_bar, row.z_under, row.gamma_hat,
             row.family, row.seed_text) for row in report.rows]
    summary = [_fit_cells(report.fit) + [report.predicted, report.verdict]]
    return (config_block(report.config.to_mapping())
            + _table(GROWTH_CSV_COLUMNS, rows)
            + _table(SUMMARY_CSV_COLUMNS, summary))


def contrast_report_text(report) -> str:
    rows = [(N, report.full.gamma(N), report.separated.gamma(N), ratio)
            for N, ratio in sorted(report.ratios.items())]
    fit = report.separated.fit
    summary = [(report.ratio_of_ratios, report.expected_ratio_of_ratios, report.increasing,
                fit.slope if fit else None, fit.r2 if fit else None, report.verdict)]
    mapping = report.full.config.to_mapping()
    mapping.pop('set_builder', None)
    mapping.pop('candidate_families', None)
    mapping.pop('fit_against', None)
    return (config_block(mapping)
            + _table(CONTRAST_CSV_COLUMNS, rows)
            + _table(CONTRAST_SUMMARY_COLUMNS, summary))


def calibration_text(banks) -> str:
    rows = [[bank.calibration_row()[column] for column in CALIBRATION_CSV_COLUMNS]
            for bank in banks]
    return _table(CALIBRATION_CSV_COLUMNS, rows)


class CSVExporter:
    """Exporter for experiment reports to CSV format."""

    @staticmethod
    def _write(filename: str, text: str) -> bool:
        try:
            with open(filename, 'w', newline='') as csvfile:
                csvfile.write(text)
            return True
        except OSError as e:
            logger.error("Error exporting to CSV %s: %s", filename, e)
            return False

    @staticmethod
    def export_growth_report(filename: str, report) -> bool:
        """
        Export a growth report to CSV.

        Args:
            filename: Path to save CSV file
            report: GrowthReport from experiments.growth

        Returns:
            True if export successful, False otherwise
        """
        return CSVExporter._write(filename, growth_report_text(report))

    @staticmethod
    def export_contrast_report(filename: str, report) -> bool:
        return CSVExporter._write(filename, contrast_report_text(report))

    @staticmethod
    def export_calibration(filename: str, banks) -> bool:
        """
        Export one calibration row per filter bank.

        Returns:
            True if export successful, False otherwise
        """
        if not banks:
            logger.error("No filter banks to export")
            return False
        return CSVExporter._write(filename, calibration_text(banks))
