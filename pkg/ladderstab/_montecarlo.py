import collections
import concurrent.futures
import logging
import warnings

import numpy as np
import scipy.linalg
import scipy.signal

from ._errors import AdvisoryWarning, NumericalError, ValidationError
from ._filter import filter_modes, stationary_covariance
from ._moments import MomentBasis
from ._utils import write_csv
from .specs import FilterSpec, SystemSpec, check_spec_type


logger = logging.getLogger(__name__)

STABILITY_GUARD = 0.1
PSD_TOL = 1e-12


class SimConfig(
    collections.namedtuple(
        'SimConfig',
        ['dt', 'T', 'paths', 'seed', 'burn_in', 'chunk_size', 'record_every', 'workers'],
    )
):
    """Euler-Maruyama ensemble settings.

    Paths are simulated in chunks of ``chunk_size``; chunk ``c`` draws from the
    ``c``-th child of ``SeedSequence(seed)``, so results depend on the seed and
    the chunk size but never on ``workers``.
    """

    def __new__(
        cls,
        dt=1e-3,
        T=200.0,
        paths=10000,
        seed=0,
        burn_in=0.25,
        chunk_size=2500,
        record_every=10,
        workers=None,
    ):
        counts = {'paths': paths, 'seed': seed, 'chunk_size': chunk_size, 'record_every': record_every}
        if workers is not None:
            counts['workers'] = workers
        fractional = sorted(k for k, v in counts.items() if isinstance(v, bool) or int(v) != v)
        if fractional:
            raise TypeError(
                'Expected integer {}; got {}'.format(
                    ', '.join(fractional), ', '.join(repr(counts[k]) for k in fractional)
                )
            )
        if not dt > 0 or not T > dt:
            raise ValidationError('Expected 0 < dt < T; got dt={}, T={}'.format(dt, T))
        if paths < 2:
            raise ValidationError('Expected at least 2 paths; got {}'.format(paths))
        if not 0 <= burn_in < 1:
            raise ValidationError('Expected 0 <= burn_in < 1; got {}'.format(burn_in))
        if chunk_size < 1 or record_every < 1:
            raise ValidationError('Expected positive chunk_size and record_every')
        if workers is not None and workers < 1:
            raise ValidationError('Expected workers >= 1; got {}'.format(workers))
        return super(SimConfig, cls).__new__(
            cls,
            float(dt),
            float(T),
            int(paths),
            int(seed),
            float(burn_in),
            int(chunk_size),
            int(record_every),
            None if workers is None else int(workers),
        )

    @property
    def steps(self):
        return int(round(self.T / self.dt))

    def chunks(self):
        sizes = []
        remaining = self.paths
        while remaining > 0:
            sizes.append(min(self.chunk_size, remaining))
            remaining -= sizes[-1]
        return sizes


MomentSeries = collections.namedtuple(
    'MomentSeries',
    [
        'times',
        'moments',
        'stderr',
        'covariance',
        'covariance_stderr',
        'basis',
        'blowup_time',
        'config',
    ],
)
MomentSeries.__doc__ = """Ensemble averages of ``x^alpha`` (columns follow ``basis``) and
of ``s s^T`` on the recorded time grid, with standard errors from the path
variance. ``blowup_time`` is the first time a path overflowed (series are
truncated there) or ``None``.
"""

GrowthRate = collections.namedtuple(
    'GrowthRate', ['rate', 'stderr', 'method', 'component', 'blowup']
)

CovarianceEstimate = collections.namedtuple(
    'CovarianceEstimate', ['final', 'final_stderr', 'time_average']
)

EmpiricalPsd = collections.namedtuple('EmpiricalPsd', ['omega', 'S', 'stderr'])

LaggedCovariance = collections.namedtuple('LaggedCovariance', ['lags', 'value', 'stderr'])


def factor_noise(B):
    """Factor ``B = C C^T`` for symmetric PSD ``B``.

    Full-rank ``B`` uses the Cholesky factor; rank-deficient ``B`` keeps only
    the columns of its eigen-decomposition with non-negligible eigenvalues,
    e.g. ``diag(1, 0) -> (1, 0)^T``.

    Raises:
        :class:`ladderstab.ValidationError`: ``B`` is indefinite.
    """
    B = np.asarray(B, dtype=float)
    values, vectors = np.linalg.eigh((B + B.T) / 2)
    scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    if values[0] < -PSD_TOL * scale:
        raise ValidationError(
            'Noise matrix is indefinite (min eigenvalue {:.3e})'.format(values[0]),
            {'eigenvalues': values},
        )
    keep = values > PSD_TOL * scale
    if np.all(keep):
        return scipy.linalg.cholesky(B, lower=True)
    C = vectors[:, keep] * np.sqrt(values[keep])[np.newaxis, :]
    signs = np.sign(C[np.argmax(np.abs(C), axis=0), np.arange(C.shape[1])])
    return C[:, ::-1] * signs[::-1][np.newaxis, :]


def _check_step(spec, sys, cfg):
    mu_max = np.max(np.abs(filter_modes(spec).mu))
    covariance = stationary_covariance(spec).sigma_inverse
    s_scale = 3.0 * np.sqrt(max(spec.a @ covariance @ spec.a, 0.0))
    rate = max(
        mu_max, np.linalg.norm(sys.A0, 2) + sys.epsilon * np.linalg.norm(sys.A1, 2) * s_scale
    )
    if cfg.dt * rate > STABILITY_GUARD:
        warnings.warn(
            'dt = {} exceeds the stability guard {} / {:.3g}'.format(cfg.dt, STABILITY_GUARD, rate),
            AdvisoryWarning,
        )


def _simulate_chunk(spec, sys, cfg, basis, paths, rng):
    C = factor_noise(spec.B)
    n = spec.n
    s = np.zeros((paths, n))
    x = np.tile(sys.x0, (paths, 1))
    records = cfg.steps // cfg.record_every + 1
    sums = np.zeros((records, basis.J))
    squares = np.zeros((records, basis.J))
    cov_sums = np.zeros((records, n, n))
    cov_squares = np.zeros((records, n, n))
    root_dt = np.sqrt(cfg.dt)
    A0T, A1T, HT, CT = sys.A0.T, sys.A1.T, spec.H.T, C.T

    def record(r):
        values = basis.evaluate(x)
        sums[r] = values.sum(axis=0)
        squares[r] = (values ** 2).sum(axis=0)
        outer = s[:, :, np.newaxis] * s[:, np.newaxis, :]
        cov_sums[r] = outer.sum(axis=0)
        cov_squares[r] = (outer ** 2).sum(axis=0)

    record(0)
    with np.errstate(over='ignore', invalid='ignore'):
        for step in range(1, cfg.steps + 1):
            f = s @ spec.a
            x = x + (x @ A0T + sys.epsilon * f[:, np.newaxis] * (x @ A1T)) * cfg.dt
            s = s + (s @ HT) * cfg.dt + root_dt * (rng.standard_normal((paths, C.shape[1])) @ CT)
            if step % cfg.record_every == 0:
                if not np.all(np.isfinite(x)):
                    return sums, squares, cov_sums, cov_squares, step // cfg.record_every
                record(step // cfg.record_every)
    return sums, squares, cov_sums, cov_squares, records


def _run_chunks(func, cfg):
    children = np.random.SeedSequence(cfg.seed).spawn(len(cfg.chunks()))
    jobs = [
        (size, np.random.default_rng(child)) for size, child in zip(cfg.chunks(), children)
    ]
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        return list(executor.map(lambda job: func(*job), jobs))


def _mean_and_stderr(total, squares, count):
    mean = total / count
    variance = np.maximum(squares / count - mean ** 2, 0.0) * count / (count - 1)
    return mean, np.sqrt(variance / count)


def simulate(spec, sys, cfg):
    """Euler-Maruyama ensemble of the filter ``s`` and the forced system ``x``.

    ``s(0) = 0`` and ``x(0) = sys.x0``; each step advances ``x`` with the
    forcing ``eps <a, s>`` from the start of the step. Chunk reductions are
    combined in chunk order, so the output is reproducible for a fixed seed.

    Returns:
        :class:`MomentSeries` of the ``p``-th moments of ``x`` and of ``s s^T``.
    """
    check_spec_type(spec, {FilterSpec})
    check_spec_type(sys, {SystemSpec}, 'sys')
    _check_step(spec, sys, cfg)
    basis = MomentBasis(sys.N, sys.p)
    logger.info(
        'simulate: %d paths in %d chunk(s), %d steps', cfg.paths, len(cfg.chunks()), cfg.steps
    )
    results = _run_chunks(
        lambda size, rng: _simulate_chunk(spec, sys, cfg, basis, size, rng), cfg
    )
    records = min(result[4] for result in results)
    blowup_time = None
    if records < cfg.steps // cfg.record_every + 1:
        blowup_time = records * cfg.record_every * cfg.dt
        warnings.warn('Moment series blew up at t = {}'.format(blowup_time), AdvisoryWarning)
    sums = sum(result[0][:records] for result in results)
    squares = sum(result[1][:records] for result in results)
    cov_sums = sum(result[2][:records] for result in results)
    cov_squares = sum(result[3][:records] for result in results)
    moments, stderr = _mean_and_stderr(sums, squares, cfg.paths)
    covariance, covariance_stderr = _mean_and_stderr(cov_sums, cov_squares, cfg.paths)
    times = np.arange(records) * cfg.record_every * cfg.dt
    return MomentSeries(
        times, moments, stderr, covariance, covariance_stderr, basis, blowup_time, cfg
    )


def _window(series, window):
    if window is None:
        window = (series.config.burn_in * series.config.T, series.times[-1])
    start, end = window
    return (series.times >= start) & (series.times <= end)


def growth_rate(series, window=None, component=None):
    """Exponential growth rate of a moment over ``window``.

    The component defaults to the one of largest mean magnitude. Signals with
    at least three local maxima are fitted through their envelope (the maxima);
    otherwise the log of the signal is fitted directly. Slopes and standard
    errors come from a least-squares line.

    Raises:
        :class:`ladderstab.NumericalError`: no positive values, or too few points, to fit.
    """
    mask = _window(series, window)
    times = series.times[mask]
    values = series.moments[mask]
    if component is None:
        component = int(np.argmax(np.mean(np.abs(values), axis=0)))
    signal = values[:, component]
    peaks, _ = scipy.signal.find_peaks(signal)
    peaks = peaks[signal[peaks] > 0]
    if len(peaks) >= 3:
        method, t, y = 'envelope', times[peaks], signal[peaks]
    elif np.all(signal > 0):
        method, t, y = 'direct', times, signal
    else:
        raise NumericalError(
            'No positive envelope to fit for component {}'.format(component),
            {'component': component},
        )
    if len(t) < 4:
        raise NumericalError(
            'Too few points ({}) to fit a growth rate'.format(len(t)), {'method': method}
        )
    coefficients, covariance = np.polyfit(t, np.log(y), 1, cov=True)
    return GrowthRate(
        float(coefficients[0]),
        float(np.sqrt(max(covariance[0, 0], 0.0))),
        method,
        component,
        series.blowup_time is not None,
    )


def stationary_covariance_estimate(series, window=None):
    """``<s s^T>`` at the final record with its standard error, plus the time
    average over ``window``.
    """
    mask = _window(series, window)
    return CovarianceEstimate(
        series.covariance[-1],
        series.covariance_stderr[-1],
        np.mean(series.covariance[mask], axis=0),
    )


def _sample_steps(cfg):
    start = max(int(cfg.burn_in * cfg.steps), 1)
    first = -(-start // cfg.record_every) * cfg.record_every
    return np.arange(first, cfg.steps + 1, cfg.record_every)


def _filter_samples(spec, cfg, paths, rng):
    """Readout ``<a, s>`` sampled every ``record_every`` steps after burn-in.

    Returns a preallocated ``(paths, samples)`` array.
    """
    C = factor_noise(spec.B)
    s = np.zeros((paths, spec.n))
    steps = _sample_steps(cfg)
    samples = np.empty((paths, len(steps)))
    root_dt = np.sqrt(cfg.dt)
    HT, CT = spec.H.T, C.T
    column = 0
    for step in range(1, cfg.steps + 1):
        s = s + (s @ HT) * cfg.dt + root_dt * (rng.standard_normal((paths, C.shape[1])) @ CT)
        if column < len(steps) and step == steps[column]:
            samples[:, column] = s @ spec.a
            column += 1
    return samples


def empirical_psd(spec, cfg, nperseg=None):
    """Welch estimate of the readout PSD, averaged over paths.

    Converts the one-sided density per Hz to the two-sided angular spectrum:
    ``S(omega) = P(omega / 2 pi) / 2``.

    Returns:
        :class:`EmpiricalPsd` with angular frequencies, ``S`` and the standard
        error of the path average.
    """
    check_spec_type(spec, {FilterSpec})
    sample_dt = cfg.dt * cfg.record_every
    if nperseg is None:
        nperseg = int(min(40.0 / sample_dt, (1 - cfg.burn_in) * cfg.steps / cfg.record_every))

    def chunk(size, rng):
        samples = _filter_samples(spec, cfg, size, rng)
        frequencies, density = scipy.signal.welch(
            samples, fs=1.0 / sample_dt, nperseg=nperseg, axis=-1
        )
        return frequencies, density.sum(axis=0), (density ** 2).sum(axis=0)

    results = _run_chunks(chunk, cfg)
    frequencies = results[0][0]
    total = sum(result[1] for result in results)
    squares = sum(result[2] for result in results)
    mean, stderr = _mean_and_stderr(total, squares, cfg.paths)
    return EmpiricalPsd(2 * np.pi * frequencies, mean / 2, stderr / 2)


def lagged_covariance(spec, cfg, lags):
    """Monte Carlo estimate of ``<<a, s(t)> <a, s(t + tau)>>`` on ``lags``.

    Each path contributes its time average; the standard error comes from the
    spread of those per-path averages.
    """
    check_spec_type(spec, {FilterSpec})
    sample_dt = cfg.dt * cfg.record_every
    offsets = [int(round(tau / sample_dt)) for tau in lags]

    def chunk(size, rng):
        samples = _filter_samples(spec, cfg, size, rng)
        width = samples.shape[1]
        per_path = np.array(
            [np.mean(samples[:, : width - k] * samples[:, k:], axis=1) for k in offsets]
        ).T
        return per_path.sum(axis=0), (per_path ** 2).sum(axis=0)

    results = _run_chunks(chunk, cfg)
    total = sum(result[0] for result in results)
    squares = sum(result[1] for result in results)
    mean, stderr = _mean_and_stderr(total, squares, cfg.paths)
    return LaggedCovariance(np.asarray(lags, dtype=float), mean, stderr)


def write_series_csv(series, stream, comments=()):
    labels = series.basis.labels()
    header = ['t'] + ['moment_{}'.format(x) for x in labels] + ['stderr_{}'.format(x) for x in labels]
    rows = [
        [t] + list(m) + list(e) for t, m, e in zip(series.times, series.moments, series.stderr)
    ]
    write_csv(stream, header, rows, comments)


__all__ = [
    'empirical_psd',
    'factor_noise',
    'growth_rate',
    'lagged_covariance',
    'simulate',
    'SimConfig',
    'stationary_covariance_estimate',
    'write_series_csv',
]
