import io

import ladderstab
import numpy as np
import pytest


SCALAR = ladderstab.FilterSpec(H=[[-2.0]], B=[[4.0]], a=[1.0])
REFERENCE = ladderstab.Filter2Spec(mu1=1.8, mu2=0.9, beta=1.0, a1=1.0, a2=0.9).to_filter_spec()
SYSTEM = ladderstab.mathieu_system(0.5, 0.01, p=2)
SMALL = ladderstab.SimConfig(dt=0.01, T=2.0, paths=50, seed=3, chunk_size=20, record_every=10)


def _series(times, values):
    values = np.asarray(values, dtype=float).reshape(len(times), -1)
    return ladderstab._montecarlo.MomentSeries(
        times, values, np.zeros_like(values), None, None, None, None, None
    )


def test__factor_noise__rank_deficient():
    C = ladderstab.factor_noise(np.diag([1.0, 0.0]))
    assert C.shape == (2, 1)
    assert np.allclose(C, [[1.0], [0.0]])


def test__factor_noise__full_rank():
    B = np.array([[4.0, 2.0], [2.0, 3.0]])
    C = ladderstab.factor_noise(B)
    assert np.allclose(C @ C.T, B)
    assert np.allclose(C, np.tril(C))


def test__factor_noise__indefinite():
    with pytest.raises(ladderstab.ValidationError) as excinfo:
        ladderstab.factor_noise(np.diag([1.0, -1.0]))
    assert 'indefinite' in str(excinfo.value)


def test_sim_config():
    cfg = ladderstab.SimConfig(dt=0.01, T=1.0, paths=10, chunk_size=4)
    assert cfg.steps == 100
    assert cfg.chunks() == [4, 4, 2]


@pytest.mark.parametrize(
    'kwargs',
    [
        {'dt': 0.0},
        {'T': 1e-4},
        {'paths': 1},
        {'burn_in': 1.0},
        {'chunk_size': 0},
        {'record_every': 0},
        {'workers': 0},
    ],
)
def test_sim_config__invalid(kwargs):
    with pytest.raises(ladderstab.ValidationError):
        ladderstab.SimConfig(**kwargs)


@pytest.mark.parametrize(
    'kwargs', [{'paths': 10.7}, {'chunk_size': 2.5}, {'record_every': True}, {'workers': 1.5}]
)
def test_sim_config__fractional_counts(kwargs):
    with pytest.raises(TypeError) as excinfo:
        ladderstab.SimConfig(**kwargs)
    assert 'Expected integer {}'.format(list(kwargs)[0]) in str(excinfo.value)


def test_sim_config__integral_floats():
    cfg = ladderstab.SimConfig(paths=20.0, chunk_size=5.0, workers=2.0)
    assert (cfg.paths, cfg.chunk_size, cfg.workers) == (20, 5, 2)
    assert isinstance(cfg.paths, int)


def test__simulate__shapes():
    series = ladderstab.simulate(SCALAR, SYSTEM, SMALL)
    assert series.times.shape == (21,)
    assert series.moments.shape == (21, 3)
    assert series.covariance.shape == (21, 1, 1)
    assert series.times[-1] == pytest.approx(2.0)
    assert series.blowup_time is None
    assert np.allclose(series.moments[0], [1.0, 0.0, 0.0])
    assert np.all(series.stderr[0] == 0)


def test__simulate__rank_deficient_noise():
    series = ladderstab.simulate(REFERENCE, SYSTEM, SMALL)
    assert series.covariance.shape == (21, 2, 2)
    assert np.allclose(series.covariance[0], 0.0)
    assert np.array_equal(series.covariance[-1], series.covariance[-1].T)
    assert series.covariance[-1][0, 0] > 0


def test__simulate__reproducible():
    first = ladderstab.simulate(SCALAR, SYSTEM.with_epsilon(0.3), SMALL)
    second = ladderstab.simulate(SCALAR, SYSTEM.with_epsilon(0.3), SMALL._replace(workers=1))
    assert np.array_equal(first.moments, second.moments)
    third = ladderstab.simulate(SCALAR, SYSTEM.with_epsilon(0.3), SMALL._replace(seed=4))
    assert not np.array_equal(first.moments, third.moments)


def test__simulate__unforced_is_deterministic():
    cfg = ladderstab.SimConfig(dt=1e-3, T=1.0, paths=4, chunk_size=2, record_every=100)
    series = ladderstab.simulate(SCALAR, SYSTEM, cfg)
    x = ladderstab.expm(SYSTEM.A0, 1.0) @ SYSTEM.x0
    expected = series.basis.evaluate(x[np.newaxis, :])[0]
    assert np.allclose(series.moments[-1], expected, rtol=1e-2, atol=1e-3)
    assert np.allclose(series.stderr[-1], 0.0, atol=1e-6)


def test__simulate__stationary_covariance():
    cfg = ladderstab.SimConfig(dt=0.01, T=5.0, paths=5000, seed=11, burn_in=0.5)
    series = ladderstab.simulate(SCALAR, SYSTEM, cfg)
    estimate = ladderstab.stationary_covariance_estimate(series)
    assert estimate.final[0, 0] == pytest.approx(1.0, abs=0.1)
    assert estimate.time_average[0, 0] == pytest.approx(1.0, abs=0.1)
    assert estimate.final_stderr[0, 0] < 0.05


def test__simulate__blowup():
    sys = ladderstab.SystemSpec(A0=[[50.0]], A1=[[0.0]], p=1)
    cfg = ladderstab.SimConfig(dt=0.01, T=20.0, paths=2, chunk_size=2, record_every=10)
    with pytest.warns(ladderstab.AdvisoryWarning):
        series = ladderstab.simulate(SCALAR, sys, cfg)
    assert series.blowup_time is not None
    assert series.blowup_time < 20.0
    assert len(series.times) == len(series.moments)


def test__simulate__step_guard():
    cfg = ladderstab.SimConfig(dt=0.1, T=1.0, paths=2, chunk_size=2, record_every=1)
    with pytest.warns(ladderstab.AdvisoryWarning) as record:
        ladderstab.simulate(SCALAR, SYSTEM, cfg)
    assert 'stability guard' in str(record[0].message)


def test__growth_rate__direct():
    times = np.linspace(0.0, 10.0, 101)
    rate = ladderstab.growth_rate(_series(times, 2.0 * np.exp(0.3 * times)), window=(0.0, 10.0))
    assert rate.method == 'direct'
    assert rate.rate == pytest.approx(0.3)
    assert rate.component == 0
    assert not rate.blowup


def test__growth_rate__envelope():
    times = np.linspace(0.0, 40.0, 4001)
    values = np.exp(0.2 * times) * (1.5 + np.cos(5.0 * times))
    rate = ladderstab.growth_rate(_series(times, values), window=(0.0, 40.0))
    assert rate.method == 'envelope'
    assert rate.rate == pytest.approx(0.2, abs=1e-2)


def test__growth_rate__component():
    times = np.linspace(0.0, 10.0, 101)
    values = np.column_stack([np.exp(-0.1 * times), 5 * np.exp(0.4 * times)])
    rate = ladderstab.growth_rate(_series(times, values), window=(0.0, 10.0))
    assert rate.component == 1
    assert rate.rate == pytest.approx(0.4)
    rate = ladderstab.growth_rate(_series(times, values), window=(0.0, 10.0), component=0)
    assert rate.rate == pytest.approx(-0.1)


def test__growth_rate__no_positive_values():
    times = np.linspace(0.0, 10.0, 101)
    with pytest.raises(ladderstab.NumericalError):
        ladderstab.growth_rate(_series(times, -np.exp(times)), window=(0.0, 10.0))


def test__growth_rate__simulated():
    cfg = ladderstab.SimConfig(dt=1e-3, T=40.0, paths=2, chunk_size=2, record_every=10, burn_in=0.0)
    series = ladderstab.simulate(SCALAR, SYSTEM, cfg)
    rate = ladderstab.growth_rate(series, component=0)
    assert rate.method == 'envelope'
    assert rate.rate == pytest.approx(-0.01, abs=2e-3)


def test__write_series_csv():
    stream = io.StringIO()
    series = ladderstab.simulate(SCALAR, SYSTEM, SMALL)
    ladderstab.write_series_csv(series, stream, ['seed=3'])
    lines = stream.getvalue().splitlines()
    assert lines[0] == '# seed=3'
    assert lines[1] == 't,moment_2_0,moment_1_1,moment_0_2,stderr_2_0,stderr_1_1,stderr_0_2'
    assert len(lines) == 2 + 21


@pytest.mark.slow
def test__empirical_psd():
    cfg = ladderstab.SimConfig(dt=0.01, T=200.0, paths=200, seed=5, chunk_size=50, record_every=1)
    estimate = ladderstab.empirical_psd(SCALAR, cfg, nperseg=2000)
    mask = (estimate.omega > 0.2) & (estimate.omega < 4.0)
    expected = np.array([ladderstab.psd(SCALAR, w) for w in estimate.omega[mask]])
    assert np.allclose(estimate.S[mask], expected, rtol=0.1)


@pytest.mark.slow
def test__lagged_covariance():
    cfg = ladderstab.SimConfig(dt=0.01, T=100.0, paths=40, seed=5, chunk_size=10, record_every=1)
    estimate = ladderstab.lagged_covariance(SCALAR, cfg, [0.0, 0.25, 0.5])
    expected = [ladderstab.autocorrelation(SCALAR, tau)[0, 0] for tau in [0.0, 0.25, 0.5]]
    assert np.allclose(estimate.value, expected, atol=0.05)



def test__filter_samples__after_burn_in():
    cfg = ladderstab.SimConfig(dt=0.01, T=1.0, paths=3, burn_in=0.5, record_every=10)
    assert list(ladderstab._montecarlo._sample_steps(cfg)) == [50, 60, 70, 80, 90, 100]
    first = ladderstab._montecarlo._filter_samples(REFERENCE, cfg, 3, np.random.default_rng(1))
    second = ladderstab._montecarlo._filter_samples(REFERENCE, cfg, 3, np.random.default_rng(1))
    assert first.shape == (3, 6)
    assert np.array_equal(first, second)
    assert np.all(np.isfinite(first))


@pytest.mark.slow
@pytest.mark.parametrize('epsilon, sign', [(0.01, -1), (0.10, 1)])
def test__growth_rate__reference_sign(epsilon, sign):
    cfg = ladderstab.SimConfig(paths=1000)
    series = ladderstab.simulate(REFERENCE, SYSTEM.with_epsilon(epsilon), cfg)
    rate = ladderstab.growth_rate(series)
    assert np.sign(rate.rate) == sign
    assert not rate.blowup


@pytest.mark.slow
def test__simulate__reference_covariance():
    cfg = ladderstab.SimConfig(dt=0.01, T=10.0, paths=4000, seed=7, chunk_size=1000)
    estimate = ladderstab.stationary_covariance_estimate(ladderstab.simulate(REFERENCE, SYSTEM, cfg))
    expected = ladderstab.stationary_covariance(REFERENCE).sigma_inverse
    assert np.all(np.abs(estimate.final - expected) <= 3 * estimate.final_stderr + 5e-3)


@pytest.mark.slow
def test__empirical_psd__reference():
    cfg = ladderstab.SimConfig(dt=0.01, T=200.0, paths=200, seed=5, chunk_size=50, record_every=1)
    estimate = ladderstab.empirical_psd(REFERENCE, cfg, nperseg=4000)
    mask = (estimate.omega > 0.3) & (estimate.omega < 4.0)
    expected = np.array([ladderstab.psd(REFERENCE, w) for w in estimate.omega[mask]])
    assert np.allclose(estimate.S[mask], expected, rtol=0.1)


@pytest.mark.slow
def test__simulate__step_halving():
    sys = SYSTEM.with_epsilon(0.05)
    coarse = ladderstab.SimConfig(dt=0.01, T=10.0, paths=2000, seed=9, record_every=10)
    fine = coarse._replace(dt=0.005, record_every=20)
    first = ladderstab.simulate(REFERENCE, sys, coarse)
    second = ladderstab.simulate(REFERENCE, sys, fine)
    assert np.allclose(first.times, second.times)
    spread = 4 * np.hypot(first.covariance_stderr[-1], second.covariance_stderr[-1])
    assert np.all(np.abs(first.covariance[-1] - second.covariance[-1]) <= spread + 5e-3)
    spread = 4 * np.hypot(first.stderr[-1], second.stderr[-1])
    bias = 0.05 * np.max(np.abs(first.moments[-1]))
    assert np.all(np.abs(first.moments[-1] - second.moments[-1]) <= spread + bias)
