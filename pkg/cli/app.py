"""
CLI Module
Command-line front end.

Subcommands: calibrate, norm, project, experiment, contrast, selftest.
Exit codes: 0 on success, 1 on configuration or usage errors, 2 when an
experiment's verdict is inconsistent.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from analysis.errors import ConfigurationError, HaarLabError
from analysis.grid import make_grid
from analysis.haar import HaarCoefficients, HaarSubset, SignAssignment, sequence_norm, synthesize
from analysis.littlewood_paley import TLParams, build_filter_bank, f_norm
from experiments.fitting import INCONSISTENT
from experiments.growth import endpoint_contrast, growth_curve
from experiments.selftest import CHECKS, SelftestOptions, run_selftest
from experiments.settings import ExperimentConfig
from utils.config import APP_NAME, APP_VERSION, DEFAULT_J_MAX, DEFAULT_M1, STANDARD_SUPPORT_RADII
from utils.csv_exporter import CSVExporter, calibration_text, contrast_report_text, growth_report_text
from utils.logging_setup import configure_logging
from utils.partial_exporter import ReportExporter
from utils.workspace import Workspace, apply_overrides

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 2


class UsageError(Exception):
    """Raised instead of exiting when argparse rejects the command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(raw: str) -> List[int]:
    try:
        return [int(v) for v in raw.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='haar-lab', description=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="more logging")
    parser.add_argument('-q', '--quiet', action='store_true', help="warnings only")
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)
    sub.required = True

    calibrate = sub.add_parser('calibrate', help="build a filter bank and report its calibration")
    calibrate.add_argument('--m1', type=int, default=DEFAULT_M1)
    calibrate.add_argument('--support', type=float, default=STANDARD_SUPPORT_RADII[0])
    calibrate.add_argument('--j-max', type=int, default=DEFAULT_J_MAX)
    calibrate.add_argument('-o', '--output')

    norm = sub.add_parser('norm', help="norm of a coefficient file")
    norm.add_argument('--p', type=float, required=True)
    norm.add_argument('--q', type=float, required=True)
    norm.add_argument('--s', type=float, required=True)
    norm.add_argument('-f', '--file', required=True, help="coefficients ('j mu value' lines)")
    norm.add_argument('--kind', choices=('dyadic', 'local'), default='dyadic')
    norm.add_argument('--m1', type=int, default=DEFAULT_M1)
    norm.add_argument('--support', type=float, default=STANDARD_SUPPORT_RADII[0])

    project = sub.add_parser('project', help="Haar projection of a coefficient file")
    project.add_argument('-f', '--file', required=True)
    project.add_argument('--levels', type=_int_list, required=True)
    project.add_argument('--window', type=_int_list, default=[0, 1],
                         help="integer interval containing the supports (default 0,1)")
    project.add_argument('--seed', type=int, help="apply seeded random signs per level")
    project.add_argument('-o', '--output')

    for name, text in (('experiment', "growth curve of the projection norms"),
                       ('contrast', "endpoint contrast between dense and separated sets")):
        command = sub.add_parser(name, help=text)
        command.add_argument('-c', '--config', required=True)
        command.add_argument('-o', '--output')
        command.add_argument('--set', action='append', default=[], metavar='KEY=VALUE')

    selftest = sub.add_parser('selftest', help="run the acceptance suite")
    selftest.add_argument('--quick', action='store_true')
    selftest.add_argument('--j-max', type=int)
    selftest.add_argument('--only', action='append', choices=[name for name, _ in CHECKS])
    return parser


def _emit(text: str, output: Optional[str]) -> bool:
    if output is None:
        sys.stdout.write(text)
        return True
    try:
        Path(output).write_text(text)
        return True
    except OSError as e:
        logger.error("cannot write %s: %s", output, e)
        return False


def _load_config(path: str, overrides: Sequence[str]) -> ExperimentConfig:
    values = Workspace.load(path)
    if values is None:
        raise ConfigurationError('config', f"cannot read {path}")
    return ExperimentConfig.from_mapping(apply_overrides(values, overrides))


def _read_coefficients(path: str) -> HaarCoefficients:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigurationError('file', f"cannot read {path}: {e}") from None
    return HaarCoefficients.from_text(text)


def cmd_calibrate(args) -> int:
    grid = make_grid(args.j_max, -1, 2)
    bank = build_filter_bank(args.m1, args.support, grid)
    if args.output is not None:
        return EXIT_OK if CSVExporter.export_calibration(args.output, [bank]) else EXIT_ERROR
    return EXIT_OK if _emit(calibration_text([bank]), None) else EXIT_ERROR


def cmd_norm(args) -> int:
    coeffs = _read_coefficients(args.file)
    if args.kind == 'dyadic':
        value = sequence_norm(coeffs, args.p, args.q, args.s)
    else:
        bank = build_filter_bank(args.m1, args.support, coeffs.grid)
        value = f_norm(synthesize(coeffs), TLParams(args.p, args.q, args.s), bank)
    sys.stdout.write(f"{value!r}\n")
    return EXIT_OK


def cmd_project(args) -> int:
    if len(args.window) != 2:
        raise ConfigurationError('window', "expected two integers lo,hi")
    coeffs = _read_coefficients(args.file)
    E = HaarSubset.full_levels(args.levels, args.window[0], args.window[1])
    projected = coeffs.restrict(E)
    if args.seed is not None:
        signs = SignAssignment.draw(E.levels, args.seed)
        projected = projected.scaled_by_level({j: float(signs.sign(j)) for j in E.levels})
    logger.info("projected onto %d indices on levels %s", len(E), list(E.levels))
    return EXIT_OK if _emit(projected.to_text(), args.output) else EXIT_ERROR


def _json_path(output: str) -> str:
    return str(Path(output).with_suffix('.json'))


def cmd_experiment(args) -> int:
    config = _load_config(args.config, args.set)
    report = growth_curve(config)
    if args.output is None:
        _emit(growth_report_text(report), None)
    elif not (CSVExporter.export_growth_report(args.output, report)
              and ReportExporter.export_growth_report(_json_path(args.output), report)):
        return EXIT_ERROR
    return EXIT_INCONSISTENT if report.verdict == INCONSISTENT else EXIT_OK


def cmd_contrast(args) -> int:
    config = _load_config(args.config, args.set)
    report = endpoint_contrast(config.p, config.q, config.N_range, config)
    if args.output is None:
        _emit(contrast_report_text(report), None)
    elif not (CSVExporter.export_contrast_report(args.output, report)
              and ReportExporter.export_contrast_report(_json_path(args.output), report)):
        return EXIT_ERROR
    return EXIT_INCONSISTENT if report.verdict == INCONSISTENT else EXIT_OK


def cmd_selftest(args) -> int:
    options = SelftestOptions(quick=args.quick)
    if args.j_max is not None:
        options = SelftestOptions(quick=args.quick, j_max=args.j_max)
    report = run_selftest(options, args.only)
    sys.stdout.write("\n".join(report.summary_lines()) + "\n")
    return EXIT_OK if report.passed else EXIT_ERROR


COMMANDS = {
    'calibrate': cmd_calibrate,
    'norm': cmd_norm,
    'project': cmd_project,
    'experiment': cmd_experiment,
    'contrast': cmd_contrast,
    'selftest': cmd_selftest,
}


def run(argv: Sequence[str]) -> int:
    """Parse argv, dispatch the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as e:
        sys.stderr.write(f"{parser.format_usage()}{e}\n")
        return EXIT_ERROR
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(-1 if args.quiet else args.verbose)
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as e:
        logger.error("configuration error: %s", e)
        return EXIT_ERROR
    except HaarLabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR
