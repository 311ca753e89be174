import collections
import logging
import sys

from ._config import require_filter2, require_system
from ._errors import ConfigError, NumericalError
from ._filter import validate_basic_conditions
from ._moments import mathieu_system
from ._montecarlo import growth_rate, simulate, write_series_csv
from ._perturbation import fit_lambda4, mathieu_closed_form, predict, write_branch_csv
from ._spectral import psd_grid, write_psd_csv
from ._truncation import TruncationConfig, critical_epsilon, sweep, write_sweep_csv
from ._utils import format_value, write_csv
from .specs import Filter2Spec


logger = logging.getLogger(__name__)

REFERENCE_FILTER = Filter2Spec(mu1=1.8, mu2=0.9, beta=1.0, a1=1.0, a2=0.9)
REFERENCE_OMEGA0 = 0.5
REFERENCE_GAMMA = 0.01
REFERENCE_EPSILONS = (0.01, 0.05, 0.10)
REFERENCE_TRUNCATION = TruncationConfig(Nm=7, Nh=5, tol=float('inf'))

SolveReport = collections.namedtuple('SolveReport', ['results', 'critical'])
ReferenceRow = collections.namedtuple('ReferenceRow', ['epsilon', 'value', 'e2', 'ratio'])
ReferenceReport = collections.namedtuple('ReferenceReport', ['rows', 'lambda0', 'lambda2', 'fit'])


def _header(config, command):
    return ['ladderstab {} config={}'.format(command, config.digest)]


def cmd_validate(config, stream=sys.stdout):
    """Check the basic conditions of the configured filter and report every clause."""
    report = validate_basic_conditions(config.filter)
    rows = [(c.name, c.passed, c.detail) for c in report.clauses]
    write_csv(stream, ['clause', 'passed', 'detail'], rows, _header(config, 'validate'))
    logger.info('validate: %s', 'pass' if report.passed else 'fail ({})'.format(report.failing_clause))
    return report


def cmd_psd(config, omega_min=0.0, omega_max=5.0, count=101, stream=sys.stdout):
    if count < 2:
        raise ConfigError('Expected at least 2 grid points; got --omega-count {}'.format(count))
    rows = psd_grid(config.filter, omega_min, omega_max, count)
    write_psd_csv(rows, stream, _header(config, 'psd'))
    return rows


def cmd_perturb(config, stream=sys.stdout):
    """Second-order prediction for every dominant branch, plus the chosen one.

    With the oscillator shorthand and ``p <= 3`` the closed-form real parts are
    echoed as well.
    """
    system = require_system(config, 'perturb')
    prediction = predict(system, config.filter)
    selected = prediction.branches[prediction.selected]
    comments = _header(config, 'perturb') + [
        'epsilon={} selected_branch={} predicted={}'.format(
            format_value(prediction.epsilon),
            format_value(selected.lambda0),
            format_value(prediction.predicted),
        )
    ]
    if config.mathieu is not None and system.p in (1, 2, 3):
        form = mathieu_closed_form(
            config.mathieu['gamma'], config.mathieu['omega0'], config.filter, system.p
        )
        comments.append(
            'closed_form lambda0_re={} lambda2_re={}'.format(
                format_value(form.lambda0), format_value(form.lambda2)
            )
        )
    write_branch_csv(prediction, stream, comments)
    return prediction


def cmd_solve(config, epsilons=None, bracket=None, stream=sys.stdout, workers=None):
    """Truncation sweep over ``epsilons`` and optional critical amplitude in ``bracket``.

    ``epsilons=None`` means the configured ``system.epsilon``; an empty list is
    a usage error.
    """
    system = require_system(config, 'solve')
    filter2 = require_filter2(config, 'solve')
    if epsilons is None:
        epsilons = [system.epsilon]
    if not len(epsilons):
        raise ConfigError('Empty epsilon sweep')
    results = sweep(system, filter2, config.truncation, epsilons, workers=workers)
    critical = None
    comments = _header(config, 'solve')
    if bracket is not None:
        critical = critical_epsilon(system, filter2, config.truncation, bracket)
        comments.append(
            'critical_epsilon={} bracket={},{}'.format(
                format_value(critical.epsilon), format_value(bracket[0]), format_value(bracket[1])
            )
        )
    write_sweep_csv(results, stream, comments)
    return SolveReport(results, critical)


def cmd_simulate(config, stream=sys.stdout):
    system = require_system(config, 'simulate')
    cfg = config.simulate
    series = simulate(config.filter, system, cfg)
    comments = _header(config, 'simulate') + [
        'dt={} T={} paths={} seed={} burn_in={} epsilon={}'.format(
            cfg.dt, cfg.T, cfg.paths, cfg.seed, cfg.burn_in, system.epsilon
        )
    ]
    try:
        rate = growth_rate(series)
        comments.append(
            'growth_rate={} stderr={} method={}'.format(
                format_value(rate.rate), format_value(rate.stderr), rate.method
            )
        )
    except NumericalError as e:
        logger.warning('simulate: no growth rate estimate (%s)', e)
    if series.blowup_time is not None:
        comments.append('blowup_time={}'.format(series.blowup_time))
    write_series_csv(series, stream, comments)
    return series


def cmd_table1(stream=sys.stdout):
    """Truncation eigenvalue and second-order error for the reference configuration.

    Columns: ``lambda(eps)``, ``E2 = |lambda0 + eps^2 lambda2 - lambda(eps)|``
    and ``E2 / eps^4``. A least-squares fourth-order coefficient is fitted from
    the residuals; no fourth-order error column is produced since that
    coefficient has no closed form.
    """
    system = mathieu_system(REFERENCE_OMEGA0, REFERENCE_GAMMA, p=2)
    prediction = predict(system, REFERENCE_FILTER.to_filter_spec())
    branch = min(prediction.branches, key=lambda b: (abs(b.lambda0.imag), b.branch))
    results = sweep(system, REFERENCE_FILTER, REFERENCE_TRUNCATION, REFERENCE_EPSILONS)
    rows = []
    for result in results:
        e2 = abs(branch.lambda0 + result.epsilon ** 2 * branch.lambda2 - result.value)
        rows.append(ReferenceRow(result.epsilon, result.value.real, e2, e2 / result.epsilon ** 4))
    fit = fit_lambda4(
        [r.epsilon for r in results], [r.value for r in results], branch.lambda0, branch.lambda2
    )
    comments = [
        'ladderstab table1 Nm={} Nh={} p=2'.format(REFERENCE_TRUNCATION.Nm, REFERENCE_TRUNCATION.Nh),
        'lambda0={} lambda2={}'.format(format_value(branch.lambda0.real), format_value(branch.lambda2.real)),
        'lambda4_fitted={} (empirical least-squares fit of residuals)'.format(format_value(fit.lambda4)),
        'E4 omitted: the fourth-order coefficient has no closed form',
    ]
    write_csv(stream, ['epsilon', 'lambda', 'E2', 'E2_over_eps4'], rows, comments)
    return ReferenceReport(rows, branch.lambda0, branch.lambda2, fit)


__all__ = [
    'cmd_perturb',
    'cmd_psd',
    'cmd_simulate',
    'cmd_solve',
    'cmd_table1',
    'cmd_validate',
]
