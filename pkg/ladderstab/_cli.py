import argparse
import contextlib
import logging
import os
import sys

import numpy as np

from ._config import load_config
from ._errors import ConfigError, Error, NumericalError
from ._montecarlo import SimConfig
from ._run import cmd_perturb, cmd_psd, cmd_simulate, cmd_solve, cmd_table1, cmd_validate


logger = logging.getLogger(__name__)

_LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as :class:`ConfigError`."""

    def error(self, message):
        raise ConfigError('{}: {}'.format(self.prog, message))


def _add_common(parser, config_required=True):
    parser.add_argument('--config', required=config_required, help='JSON run configuration')
    parser.add_argument('--out', help='write <command>.csv into this directory instead of stdout')
    parser.add_argument('-v', '--verbose', action='count', default=0)


def build_parser():
    parser = _Parser(
        prog='ladderstab',
        description='Moment stability of linear systems forced by filtered white noise.',
    )
    subparsers = parser.add_subparsers(dest='command', parser_class=_Parser)
    subparsers.required = True

    _add_common(subparsers.add_parser('validate', help='check the filter basic conditions'))

    psd_parser = subparsers.add_parser('psd', help='power spectral density on a grid')
    _add_common(psd_parser)
    psd_parser.add_argument('--omega-min', type=float, default=0.0)
    psd_parser.add_argument('--omega-max', type=float, default=5.0)
    psd_parser.add_argument('--omega-count', type=int, default=101)

    _add_common(subparsers.add_parser('perturb', help='second-order moment growth rate'))

    solve_parser = subparsers.add_parser('solve', help='truncated eigenvalue problem')
    _add_common(solve_parser)
    solve_parser.add_argument('--eps-list', type=float, nargs='*', help='forcing amplitudes')
    solve_parser.add_argument(
        '--bracket', type=float, nargs=2, metavar=('LO', 'HI'), help='critical amplitude search'
    )
    solve_parser.add_argument('--workers', type=int)

    simulate_parser = subparsers.add_parser('simulate', help='Monte Carlo moment estimate')
    _add_common(simulate_parser)
    simulate_parser.add_argument('--seed', type=int)

    _add_common(
        subparsers.add_parser('table1', help='reference truncation vs. perturbation table'),
        config_required=False,
    )
    return parser


def _configure_logging(verbosity):
    level = _LOG_LEVELS[min(verbosity, len(_LOG_LEVELS) - 1)]
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


@contextlib.contextmanager
def _output(args, config):
    directory = args.out
    if directory is None and config is not None:
        directory = config.output['directory']
    if directory is None:
        yield sys.stdout
        return
    try:
        os.makedirs(directory, exist_ok=True)
        stream = open(os.path.join(directory, '{}.csv'.format(args.command)), 'w')
    except OSError as e:
        raise ConfigError('Cannot write output to {}: {}'.format(directory, e))
    with stream:
        yield stream


def _dispatch(args, config, stream):
    if args.command == 'validate':
        report = cmd_validate(config, stream)
        return 0 if report.passed else 1
    elif args.command == 'psd':
        cmd_psd(config, args.omega_min, args.omega_max, args.omega_count, stream)
    elif args.command == 'perturb':
        cmd_perturb(config, stream)
    elif args.command == 'solve':
        cmd_solve(config, args.eps_list, args.bracket, stream, workers=args.workers)
    elif args.command == 'simulate':
        if args.seed is not None:
            fields = config.simulate._asdict()
            fields['seed'] = args.seed
            config = config._replace(simulate=SimConfig(**fields))
        cmd_simulate(config, stream)
    elif args.command == 'table1':
        cmd_table1(stream)
    return 0


def main(argv=None):
    """Command-line entry point.

    Returns:
        Exit status: 0 on success, 1 on a validation failure, 2 on a numerical
        failure and 3 on a configuration or usage error.
    """
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        sys.stderr.write('{}\n'.format(e))
        return e.exit_code
    except SystemExit as e:
        return e.code or 0
    _configure_logging(args.verbose)
    try:
        config = load_config(args.config) if args.config is not None else None
        with _output(args, config) as stream:
            return _dispatch(args, config, stream)
    except Error as e:
        logger.error('%s failed: %s', args.command, e)
        if e.diagnostics:
            logger.debug('diagnostics: %r', e.diagnostics)
        return e.exit_code
    except np.linalg.LinAlgError as e:
        logger.error('%s failed: %s', args.command, e)
        return NumericalError.exit_code
    except (TypeError, ValueError) as e:
        logger.error('%s: invalid argument: %s', args.command, e)
        return ConfigError.exit_code


__all__ = []
