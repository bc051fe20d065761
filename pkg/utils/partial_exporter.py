"""
Report Exporter Module
Exports and imports structured experiment reports in JSON format.

The JSON mirrors the CSV report: metadata, the resolved config, one object per
row and the fit summary. No timestamps are written, so output stays
byte-identical across re-runs.
"""

import json
import logging
import math
from typing import Dict, Optional

from .config import APP_NAME, APP_VERSION

logger = logging.getLogger(__name__)


def _number(value):
    """JSON-safe float: None for NaN and infinities."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _fit_dict(fit) -> Optional[Dict]:
    if fit is None:
        return None
    return {
        'slope': fit.slope,
        'intercept': fit.intercept,
        'r2': fit.r2,
        'stderr': fit.stderr,
        'ci': [fit.ci_low, fit.ci_high],
        'points': fit.n,
    }


def growth_report_dict(report) -> Dict:
    prediction = report.prediction
    return {
        'config': report.config.to_mapping(),
        'regime': prediction.regime,
        'prediction': {
            'exponent': prediction.exponent,
            'flag': prediction.flag,
            'lower_log_rate': prediction.lower_log_rate,
            'upper_log_rate': prediction.upper_log_rate,
            'fit_axis': report.fit_axis,
            'predicted_slope': report.predicted,
        },
        'rows': [
            {
                'N': row.N,
                'lambda': row.lam,
                'set_desc': row.set_desc,
                'size': row.size,
                'z_bar': row.z_bar,
                'z_under': row.z_under,
                'z_n': row.z_n,
                'gamma_hat': row.gamma_hat,
                'family': row.family,
                'seed': list(row.seed) if row.seed else None,
                'capped': row.capped,
                'upper_bound': _number(row.upper_bound),
            }
            for row in report.rows
        ],
        'fit': _fit_dict(report.fit),
        'verdict': report.verdict,
    }


def contrast_report_dict(report) -> Dict:
    return {
        'full': growth_report_dict(report.full),
        'separated': growth_report_dict(report.separated),
        'ratios': {str(N): ratio for N, ratio in sorted(report.ratios.items())},
        'ratio_of_ratios': report.ratio_of_ratios,
        'expected_ratio_of_ratios': report.expected_ratio_of_ratios,
        'increasing': report.increasing,
        'verdict': report.verdict,
    }


class ReportExporter:
    """Exporter for experiment reports to JSON format."""

    @staticmethod
    def export_report(filename: str, body: Dict, metadata: Optional[Dict] = None) -> bool:
        """
        Export a report body to JSON.

        Args:
            filename: Path to save JSON file
            body: Report dictionary (growth_report_dict or contrast_report_dict)
            metadata: Optional metadata to include in export

        Returns:
            True if export successful, False otherwise
        """
        try:
            metadata = dict(metadata or {})
            metadata.update({'app_name': APP_NAME, 'app_version': APP_VERSION})
            export_data = {'metadata': metadata, 'report': body}
            with open(filename, 'w') as f:
                json.dump(export_data, f, indent=2, allow_nan=False)
                f.write('\n')
            return True
        except (OSError, TypeError, ValueError) as e:
            logger.error("Error exporting report to %s: %s", filename, e)
            return False

    @staticmethod
    def export_growth_report(filename: str, report, metadata: Optional[Dict] = None) -> bool:
        return ReportExporter.export_report(filename, growth_report_dict(report),
                                            dict(metadata or {}, kind='growth'))

    @staticmethod
    def export_contrast_report(filename: str, report, metadata: Optional[Dict] = None) -> bool:
        return ReportExporter.export_report(filename, contrast_report_dict(report),
                                            dict(metadata or {}, kind='contrast'))

    @staticmethod
    def load_report(filename: str) -> Optional[Dict]:
        """
        Load a report from JSON file.

        Returns:
            Dictionary with loaded data or None if failed
        """
        try:
            with open(filename, 'r') as f:
                return json.load(f)
        except (OSError, ValueError) as e:
            logger.error("Error loading report %s: %s", filename, e)
            return None

    @staticmethod
    def get_report_summary(filename: str) -> Optional[Dict]:
        """
        Summary of a report file: metadata, verdict and row count.

        Returns:
            Dictionary with summary info or None if failed
        """
        data = ReportExporter.load_report(filename)
        if data is None:
            return None
        report = data.get('report', {})
        return {
            'metadata': data.get('metadata', {}),
            'verdict': report.get('verdict'),
            'row_count': len(report.get('rows', report.get('ratios', {}))),
        }
