import collections
import logging

import numpy as np
import scipy.linalg

from ._errors import NumericalError, ValidationError
from ._numerics import eig_dense, lyapunov_solve, repeated_pairs
from .specs import FilterSpec, check_spec_type, filter_operator


logger = logging.getLogger(__name__)

PSD_TOL = 1e-12
RANK_TOL = 1e-10
COVARIANCE_AGREEMENT_TOL = 1e-8


ClauseResult = collections.namedtuple('ClauseResult', ['name', 'passed', 'detail'])


class ValidationReport(collections.namedtuple('ValidationReport', ['clauses'])):
    """Outcome of the basic-conditions check, one :class:`ClauseResult` per clause."""

    @property
    def passed(self):
        return all(clause.passed for clause in self.clauses)

    @property
    def failing_clause(self):
        for clause in self.clauses:
            if not clause.passed:
                return clause.name
        return None

    def __bool__(self):
        return self.passed


FilterModes = collections.namedtuple('FilterModes', ['mu', 'U', 'V', 'conjugate_index'])
FilterModes.__doc__ = """Eigenstructure of the filter drift: ``H u_k = -mu_k u_k``.

Columns of ``U`` are unit-norm right eigenvectors, columns of ``V`` the
adjoints with ``<v_k, u_j> = delta_kj``; ``conjugate_index[k]`` is the index of
the mode carrying ``conj(mu_k)``.
"""


StationaryCovariance = collections.namedtuple(
    'StationaryCovariance', ['sigma_inverse', 'sigma', 'min_eigenvalue', 'agreement']
)
StationaryCovariance.__doc__ = """Stationary covariance ``sigma_inverse = <s s^T>``
of the filter state and its inverse ``sigma``.
"""


def controllability_matrix(H, B):
    """``[B, HB, ..., H^{n-1} B]``."""
    H = np.asarray(H, dtype=float)
    blocks = [np.asarray(B, dtype=float)]
    for _ in range(H.shape[0] - 1):
        blocks.append(H @ blocks[-1])
    return np.hstack(blocks)


def _check_noise(B):
    asymmetry = np.max(np.abs(B - B.T)) if B.size else 0.0
    norm = np.linalg.norm(B, 2)
    if asymmetry > PSD_TOL * max(norm, 1.0):
        return ClauseResult('symmetric_psd_noise', False, 'B is not symmetric (max |B - B^T| = {:.3e})'.format(asymmetry))
    smallest = np.min(np.linalg.eigvalsh((B + B.T) / 2))
    if smallest < -PSD_TOL * norm:
        return ClauseResult('symmetric_psd_noise', False, 'B is not PSD (min eigenvalue {:.6g})'.format(smallest))
    return ClauseResult('symmetric_psd_noise', True, 'min eigenvalue {:.6g}'.format(smallest))


def _check_drift(H):
    values = scipy.linalg.eigvals(H)
    unstable = [v for v in values if not v.real < 0]
    if unstable:
        return ClauseResult(
            'simple_stable_drift', False, 'eigenvalue(s) {} of H are not stable'.format(unstable)
        )
    repeated = repeated_pairs(values)
    if repeated:
        i, j = repeated[0]
        return ClauseResult(
            'simple_stable_drift',
            False,
            'eigenvalues {} and {} of H are not simple'.format(values[i], values[j]),
        )
    return ClauseResult('simple_stable_drift', True, 'eigenvalues {}'.format(values))


def _check_controllable(H, B):
    singular_values = scipy.linalg.svdvals(controllability_matrix(H, B))
    largest = singular_values[0] if singular_values.size else 0.0
    rank = int(np.sum(singular_values > RANK_TOL * largest)) if largest > 0 else 0
    n = H.shape[0]
    return ClauseResult(
        'controllable',
        rank == n,
        'rank[B, HB, ..., H^(n-1)B] = {} of {}'.format(rank, n),
    )


@filter_operator()
def validate_basic_conditions(spec):
    """Check the standing hypotheses on ``(H, B)``.

    Clauses, in order: ``symmetric_psd_noise`` (B symmetric positive
    semi-definite), ``simple_stable_drift`` (H has simple eigenvalues with
    negative real parts) and ``controllable`` (the controllability matrix has
    full rank, judged by singular values above ``1e-10 * sigma_max``).

    Never raises for well-shaped input; failures show up in the report.
    """
    check_spec_type(spec, {FilterSpec})
    clauses = []
    for name, check, args in [
        ('symmetric_psd_noise', _check_noise, (spec.B,)),
        ('simple_stable_drift', _check_drift, (spec.H,)),
        ('controllable', _check_controllable, (spec.H, spec.B)),
    ]:
        try:
            clauses.append(check(*args))
        except (np.linalg.LinAlgError, ValueError) as e:
            clauses.append(ClauseResult(name, False, 'check failed: {}'.format(e)))
    report = ValidationReport(clauses)
    logger.debug('validate_basic_conditions: %s', report)
    return report


def require_basic_conditions(spec):
    report = validate_basic_conditions(spec)
    if not report.passed:
        raise ValidationError(
            'Filter violates the basic conditions ({})'.format(report.failing_clause),
            {'report': report},
        )
    return report


@filter_operator()
def filter_modes(spec):
    """Eigen-modes of the drift, sorted by ``(Re mu, Im mu)``.

    Example:
        >>> filter_modes(FilterSpec(H=[[-2.0]], B=[[4.0]], a=[1.0])).mu
        array([2.+0.j])
    """
    check_spec_type(spec, {FilterSpec})
    decomposition = eig_dense(spec.H, normalize=True)
    mu = -decomposition.values
    order = sorted(range(spec.n), key=lambda k: (round(mu[k].real, 12), mu[k].imag))
    mu = mu[order]
    U = decomposition.right[:, order]
    V = decomposition.left[:, order]
    conjugate_index = np.array([int(np.argmin(np.abs(mu - np.conj(m)))) for m in mu])
    return FilterModes(mu, U, V, conjugate_index)


def raising_blocks(spec, modes):
    """Top blocks ``P`` and ``Q`` of the raising vectors ``y^k = (p_k, q_k, 0)``.

    ``q_k = conj(v_k)`` and ``p_k = -(H - mu_k I)^-1 B conj(v_k)``.
    """
    n = spec.n
    Q = modes.V.conj()
    P = np.empty((n, n), dtype=complex)
    for k in range(n):
        P[:, k] = -np.linalg.solve(spec.H - modes.mu[k] * np.eye(n), spec.B @ Q[:, k])
    return P, Q


@filter_operator()
def stationary_covariance(spec):
    """Stationary covariance of the filter state.

    Computed twice, from the Lyapunov equation ``H X + X H^T = -B`` and as
    ``P Q^-1`` from the raising vectors; the two must agree to ``1e-8``
    relative.

    Raises:
        :class:`ladderstab.ValidationError`: basic conditions violated.
        :class:`ladderstab.NumericalError`: the two paths disagree or the
            result is not positive definite.
    """
    report = require_basic_conditions(spec)
    sigma_inverse = lyapunov_solve(spec.H, spec.B)
    P, Q = raising_blocks(spec, filter_modes(spec))
    from_ladder = (P @ np.linalg.inv(Q)).real
    agreement = np.linalg.norm(sigma_inverse - from_ladder) / np.linalg.norm(sigma_inverse)
    logger.debug('stationary_covariance: Lyapunov vs P Q^-1 relative gap %.3e', agreement)
    if agreement > COVARIANCE_AGREEMENT_TOL:
        raise NumericalError(
            'Lyapunov and ladder covariances disagree (relative gap {:.3e})'.format(agreement),
            {'lyapunov': sigma_inverse, 'ladder': from_ladder},
        )
    min_eigenvalue = np.min(np.linalg.eigvalsh(sigma_inverse))
    if min_eigenvalue <= 0:
        raise NumericalError(
            'Stationary covariance is not positive definite (min eigenvalue {:.3e})'.format(
                min_eigenvalue
            ),
            {'controllability': report.clauses[2].detail},
        )
    return StationaryCovariance(
        sigma_inverse, np.linalg.inv(sigma_inverse), min_eigenvalue, agreement
    )


def example_filter(mu1, mu2, beta, sigma):
    """Second-order filter whose PSD ``sigma beta^2 w^2 / ((w^2 + mu1^2)(w^2 + mu2^2))``
    vanishes together with its slope at zero frequency.
    """
    return FilterSpec(
        H=[[-mu1, 0.0], [beta, -mu2]],
        B=[[sigma, 0.0], [0.0, 0.0]],
        a=[beta, -mu2],
    )


__all__ = [
    'controllability_matrix',
    'example_filter',
    'filter_modes',
    'stationary_covariance',
    'validate_basic_conditions',
    'ValidationReport',
]
