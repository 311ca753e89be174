import collections
import logging

import numpy as np

from ._errors import NumericalError
from ._filter import require_basic_conditions, stationary_covariance
from ._ladder import ladder_eigensystem
from ._numerics import expm
from ._utils import write_csv
from .specs import FilterSpec, check_spec_type, filter_operator


logger = logging.getLogger(__name__)


SpectralQuery = collections.namedtuple('SpectralQuery', ['z', 'valid', 'offending'])


def spectral_query(mu, z):
    """Check ``Re(mu_l + z) > 0`` for every increment ``mu_l``."""
    offending = [m for m in np.asarray(mu) if not (m + z).real > 0]
    return SpectralQuery(complex(z), not offending, offending)


def g_from_coefficients(mu, alpha, beta, z):
    """``-sum_l alpha_l beta_l / (mu_l + z)`` without a domain check."""
    return complex(-np.sum(alpha * beta / (mu + z)))


@filter_operator()
def autocorrelation(spec, tau):
    """Asymptotic autocorrelation ``R(tau) = <s(t) s(t + tau)^T> = Sigma^-1 e^{H^T tau}``.

    Negative lags use ``R(-tau)^T``.
    """
    if tau < 0:
        return autocorrelation(spec, -tau).T
    covariance = stationary_covariance(spec)
    return covariance.sigma_inverse @ expm(spec.H.T, tau)


@filter_operator()
def extended_psd_matrix(spec, z):
    """Matrix form ``-Sigma^-1 (H^T - z I)^-1`` of the one-sided Laplace
    transform of ``R``.
    """
    check_spec_type(spec, {FilterSpec})
    covariance = stationary_covariance(spec)
    resolvent = np.linalg.inv(spec.H.T - z * np.eye(spec.n))
    return -covariance.sigma_inverse @ resolvent


@filter_operator()
def extended_psd(spec, z, ladder=None):
    """Extended power spectral density ``G(z)`` of the readout ``<a, s(t)>``.

    Args:
        spec: the filter.
        z: complex evaluation point with ``Re(mu_l + z) > 0`` for all ``l``.
        ladder: optional precomputed :class:`LadderSystem`.

    Returns:
        ``-sum_l alpha_l beta_l / (mu_l + z)``, checked against the resolvent
        form contracted with ``a``.

    Raises:
        :class:`ladderstab.NumericalError`: ``z`` outside the domain; the
            offending increments are listed in ``diagnostics``.
    """
    if ladder is None:
        ladder = ladder_eigensystem(spec)
    query = spectral_query(ladder.mu, z)
    if not query.valid:
        raise NumericalError(
            'G(z) undefined at z = {}: Re(mu_l + z) <= 0 for mu_l = {}'.format(z, query.offending),
            {'offending': query.offending},
        )
    value = g_from_coefficients(ladder.mu, ladder.alpha, ladder.beta, z)
    matrix_value = spec.a @ extended_psd_matrix(spec, z) @ spec.a
    gap = abs(value - matrix_value)
    if gap > 1e-8 * max(1.0, abs(value)):
        raise NumericalError(
            'Ladder and resolvent forms of G disagree by {:.3e}'.format(gap),
            {'ladder': value, 'resolvent': matrix_value},
        )
    return value


@filter_operator()
def psd_matrix(spec, omega):
    """Hermitian spectral matrix ``(H + i w I)^-1 B (H^T - i w I)^-1``."""
    check_spec_type(spec, {FilterSpec})
    eye = np.eye(spec.n)
    left = np.linalg.inv(spec.H + 1j * omega * eye)
    right = np.linalg.inv(spec.H.T - 1j * omega * eye)
    return left @ spec.B @ right


@filter_operator()
def psd(spec, omega):
    """Power spectral density ``S(w) = <a, S(w) a>`` of the readout; equals
    ``2 Re G(i w)``.
    """
    require_basic_conditions(spec)
    return float((spec.a @ psd_matrix(spec, omega) @ spec.a).real)


PsdRow = collections.namedtuple('PsdRow', ['omega', 'S'])


@filter_operator()
def psd_grid(spec, omega_min, omega_max, count):
    """``count`` rows of ``(omega, S)`` on a uniform grid including both ends."""
    if count < 2:
        raise ValueError('Expected count >= 2; got {}'.format(count))
    require_basic_conditions(spec)
    rows = []
    for omega in np.linspace(omega_min, omega_max, int(count)):
        rows.append(PsdRow(float(omega), float((spec.a @ psd_matrix(spec, omega) @ spec.a).real)))
    logger.debug('psd_grid: %d rows on [%g, %g]', len(rows), omega_min, omega_max)
    return rows


def write_psd_csv(rows, stream, comments=()):
    write_csv(stream, ['omega', 'S'], rows, comments)


__all__ = [
    'autocorrelation',
    'extended_psd',
    'extended_psd_matrix',
    'psd',
    'psd_grid',
    'psd_matrix',
    'write_psd_csv',
]
