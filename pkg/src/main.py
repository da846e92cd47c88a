"""Command line: ``python -m src.main {verify,sweep,decompose,delta}``.

Exit codes: 0 when every asserted check passes, 1 on a failed check or
broken structure, 2 on configuration or resource errors.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from config.settings import _parse_int_list, settings
from src.coinvariants.bounds import delta_table
from src.cosets.filtration import decompose_submodule
from src.groups.level import LevelContext
from src.reports.suite_config import FORMATS, SuiteConfig, build_config, read_config_file
from src.reports.suites import iter_task_rows, plan_verify, run_tasks
from src.reports.sweeps import plan_sweep
from src.reports.writers import open_report, sort_rows, write_json_lines, write_report
from src.utils.exceptions import AlgebraLabError, ParameterError
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)

SWEEP_SORT_KEYS = ['table', 'p', 'N', 't', 'seed', 'module', 'subgroup']


def _int_list(raw: str) -> List[int]:
    try:
        return _parse_int_list(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'expected comma-separated integers, got {raw!r}') from exc


def _suite_arguments() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--p', dest='primes', type=_int_list, help='primes, comma separated')
    parent.add_argument('--n-max', dest='n_max', type=int)
    parent.add_argument('--product-n-max', dest='product_n_max', type=int)
    parent.add_argument('--t', dest='t_values', type=_int_list, help='copies of G, comma separated (1, 2)')
    parent.add_argument('--seed', type=int)
    parent.add_argument('--enum-cap', dest='enum_cap', type=int)
    parent.add_argument('--dim-cap', dest='dim_cap', type=int)
    parent.add_argument('--modules', dest='random_modules', type=int, help='random cyclic modules per point')
    parent.add_argument('--workers', type=int)
    parent.add_argument('--out')
    parent.add_argument('--format', dest='fmt', choices=FORMATS)
    parent.add_argument('--relaxed-decompose', dest='relaxed_decompose', action='store_true', default=None)
    parent.add_argument('--config', type=Path, help='KEY=VALUE file; flags override it')
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='coinvariant-lab', description=__doc__)
    parser.add_argument('--log-level', default=None)
    commands = parser.add_subparsers(dest='command', required=True)

    suite_args = _suite_arguments()
    commands.add_parser('verify', parents=[suite_args], help='run every assertion suite')
    commands.add_parser('sweep', parents=[suite_args], help='decay, growth and ratio tables')

    decompose = commands.add_parser('decompose', help='filtration of F(d) with its quotient levels')
    decompose.add_argument('--d', type=int, required=True)
    decompose.add_argument('--p', type=int, required=True)
    decompose.add_argument('--k', type=int, required=True)
    decompose.add_argument('--relaxed-decompose', action='store_true')
    decompose.add_argument('--enum-cap', type=int)
    decompose.add_argument('--dim-cap', type=int)

    delta = commands.add_parser('delta', help='delta(p) for primes up to pmax')
    delta.add_argument('--pmax', type=int, default=100)
    delta.add_argument('--out')
    delta.add_argument('--format', dest='fmt', choices=FORMATS, default='csv')
    return parser


def _config_from(args: argparse.Namespace, default_format: str) -> SuiteConfig:
    names = [
        'primes', 'n_max', 'product_n_max', 't_values', 'seed', 'enum_cap', 'dim_cap',
        'random_modules', 'workers', 'out', 'fmt', 'relaxed_decompose',
    ]
    overrides: Dict[str, Any] = {name: getattr(args, name) for name in names}
    file_values = read_config_file(args.config) if args.config is not None else {}
    if overrides['fmt'] is None and 'fmt' not in file_values:
        overrides['fmt'] = default_format
    return build_config(overrides, args.config)


def cmd_verify(config: SuiteConfig) -> int:
    """Run every suite; JSON lines are written as each task finishes."""
    tasks = plan_verify(config)
    if config.fmt == 'json':
        checks, failures = 0, 0
        with open_report(config.out) as stream:
            for rows in iter_task_rows(tasks, config):
                write_json_lines(rows, stream)
                checks += len(rows)
                failures += _log_failures(rows)
    else:
        rows = run_tasks(tasks, config)
        write_report(rows, config.fmt, config.out)
        checks, failures = len(rows), _log_failures(rows)
    logger.info('Verify finished: %s checks, %s failures, seed %s', checks, failures, config.seed)
    return 1 if failures else 0


def _log_failures(rows: List[Dict[str, Any]]) -> int:
    failures = [row for row in rows if row['asserted'] and not row['passed']]
    for row in failures:
        logger.error(
            'Check failed: %s / %s at p=%s, N=%s, params %s: %s',
            row['suite'], row['check'], row['p'], row['N'], row['params'], row['detail'],
        )
    return len(failures)


def cmd_sweep(config: SuiteConfig) -> int:
    rows = sort_rows(run_tasks(plan_sweep(config), config), SWEEP_SORT_KEYS)
    write_report(rows, config.fmt, config.out)
    return 0


def cmd_decompose(d: int, p: int, k: int, relaxed: bool = False) -> int:
    descriptor = decompose_submodule(d, k, LevelContext(p, k), relaxed=relaxed)
    sys.stdout.write(json.dumps(descriptor.to_json(), sort_keys=True) + '\n')
    return 0 if descriptor.holds else 1


def cmd_delta(pmax: int, fmt: str = 'csv', out: Optional[str] = None) -> int:
    if pmax < 2:
        raise ParameterError(f'pmax={pmax} leaves no primes; the table would be empty')
    write_report(delta_table(pmax), fmt, out)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        if args.command == 'verify':
            return cmd_verify(_config_from(args, 'json'))
        if args.command == 'sweep':
            return cmd_sweep(_config_from(args, 'csv'))
        if args.command == 'decompose':
            if args.enum_cap is not None:
                settings.ENUMERATION_CAP = args.enum_cap
            if args.dim_cap is not None:
                settings.LINALG_DIMENSION_CAP = args.dim_cap
            return cmd_decompose(args.d, args.p, args.k, args.relaxed_decompose)
        return cmd_delta(args.pmax, args.fmt, args.out)
    except AlgebraLabError as exc:
        logger.error('%s aborted (%s): %s', args.command, type(exc).__name__, exc)
        return exc.exit_code
    except Exception as exc:
        logger.exception('%s failed unexpectedly: %s', args.command, exc)
        return AlgebraLabError.exit_code


if __name__ == '__main__':
    sys.exit(main())
