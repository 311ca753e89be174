import itertools
import logging

import numpy as np

from ._errors import NumericalError
from ._filter import filter_modes, raising_blocks, require_basic_conditions
from .specs import FilterSpec, check_spec_type, filter_operator


logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-10
COMMUTATOR_TOL = 1e-10
DSUM_TOL = 1e-9
COEFFICIENT_TOL = 1e-10


@filter_operator()
def build_AD(spec):
    """Coefficient matrices of the filter's Fokker-Planck operator.

    In ``(n, n, 1)`` blocks::

        A = [[0, I, 0], [-I, 0, 0], [0, 0, 0]]
        D = [[B, -H, 0], [-H^T, 0, 0], [0, 0, -tr H]]

    ``A`` is antisymmetric and ``D`` symmetric.
    """
    check_spec_type(spec, {FilterSpec})
    n = spec.n
    size = 2 * n + 1
    eye = np.eye(n)
    A = np.zeros((size, size))
    A[:n, n : 2 * n] = eye
    A[n : 2 * n, :n] = -eye
    D = np.zeros((size, size))
    D[:n, :n] = spec.B
    D[:n, n : 2 * n] = -spec.H
    D[n : 2 * n, :n] = -spec.H.T
    D[2 * n, 2 * n] = -np.trace(spec.H)
    return A, D


@filter_operator()
def t_matrix(spec):
    A, D = build_AD(spec)
    return D @ A


@filter_operator()
def alpha_beta(spec, modes=None):
    """Expansion coefficients of the readout in the ladder basis.

    ``alpha = U^T a`` and
    ``beta_k = -sum_m conj(alpha_m) <v_k, B v_m> / (conj(mu_m) + mu_k)``.

    Raises:
        :class:`ladderstab.NumericalError`: if ``a`` is not recovered as
            ``sum_k alpha_k conj(v_k)``.
    """
    check_spec_type(spec, {FilterSpec})
    if modes is None:
        modes = filter_modes(spec)
    alpha = modes.U.T @ spec.a
    gram = modes.V.conj().T @ spec.B @ modes.V
    denominator = modes.mu.conj()[np.newaxis, :] + modes.mu[:, np.newaxis]
    beta = -(gram / denominator) @ alpha.conj()
    mismatch = np.linalg.norm(modes.V.conj() @ alpha - spec.a)
    if mismatch > COEFFICIENT_TOL * max(1.0, np.linalg.norm(spec.a)):
        raise NumericalError(
            'Readout reconstruction mismatch {:.3e}'.format(mismatch),
            {'alpha': alpha, 'mismatch': mismatch},
        )
    return alpha, beta


class LadderSystem(object):
    """Ladder vectors ``y^{+-k}``, adjoints ``w^{+-k}`` and readout coefficients.

    Columns of ``lowering``/``raising`` hold ``y^{-k}``/``y^{k}`` for
    ``k = 1..n`` (the ordering of :func:`filter_modes`); ``y0 = e_{2n+1}``.
    """

    def __init__(self, spec, modes, A, D, lowering, raising, lowering_adjoint, raising_adjoint, alpha, beta):
        self.spec = spec
        self.modes = modes
        self.A = A
        self.D = D
        self.lowering = lowering
        self.raising = raising
        self.lowering_adjoint = lowering_adjoint
        self.raising_adjoint = raising_adjoint
        self.alpha = alpha
        self.beta = beta
        self.y0 = np.eye(2 * spec.n + 1)[:, -1]

    @property
    def n(self):
        return self.spec.n

    @property
    def mu(self):
        return self.modes.mu

    @property
    def mu0(self):
        return -np.trace(self.spec.H)

    @property
    def T(self):
        return self.D @ self.A

    def vector(self, k):
        """``y^k`` for ``-n <= k <= n``."""
        if k == 0:
            return self.y0.astype(complex)
        if abs(k) > self.n:
            raise ValueError('Expected |k| <= {}; got {}'.format(self.n, k))
        return self.raising[:, k - 1] if k > 0 else self.lowering[:, -k - 1]

    def adjoint(self, k):
        if k == 0:
            return self.y0.astype(complex)
        if abs(k) > self.n:
            raise ValueError('Expected |k| <= {}; got {}'.format(self.n, k))
        return self.raising_adjoint[:, k - 1] if k > 0 else self.lowering_adjoint[:, -k - 1]

    def increment(self, k):
        """Eigenvalue of ``T`` carried by ``y^k``."""
        if k == 0:
            return 0j
        return np.sign(k) * self.mu[abs(k) - 1]

    def indices(self):
        return list(range(-self.n, 0)) + list(range(1, self.n + 1))


def _scale(*vectors):
    return max([1.0] + [np.linalg.norm(v) for v in vectors])


def commutator_matrix(ladder):
    """``(y^j)^T A y^k`` over ``j, k`` in ``-n..-1, 1..n``."""
    indices = ladder.indices()
    return np.array(
        [[ladder.vector(j) @ ladder.A @ ladder.vector(k) for k in indices] for j in indices]
    )


def expected_commutators(n):
    """Identity pattern: ``(y^{-j})^T A y^k = delta_jk``, ``-delta_jk`` for the
    transposed order, zero otherwise.
    """
    expected = np.zeros((2 * n, 2 * n))
    expected[:n, n:] = np.fliplr(np.eye(n))
    expected[n:, :n] = -expected[:n, n:].T
    return expected


def d_decomposition(ladder):
    """``mu0 e e^T + sum_k mu_k (y^{-k} (y^k)^T + y^k (y^{-k})^T)``; equals ``D``."""
    total = ladder.mu0 * np.outer(ladder.y0, ladder.y0).astype(complex)
    for k in range(1, ladder.n + 1):
        lower, upper = ladder.vector(-k), ladder.vector(k)
        total += ladder.mu[k - 1] * (np.outer(lower, upper) + np.outer(upper, lower))
    return total


def _certify(ladder):
    T = ladder.T
    norm_T = max(1.0, np.linalg.norm(T, 2))
    residuals = {}
    failures = []

    eigen = 0.0
    for k in ladder.indices():
        y = ladder.vector(k)
        r = np.linalg.norm(T @ y - ladder.increment(k) * y) / (norm_T * _scale(y))
        eigen = max(eigen, r)
    residuals['eigen'] = eigen
    if eigen > EIGEN_TOL:
        failures.append('eigen')

    commutator = 0.0
    for j in range(1, ladder.n + 1):
        for k in range(1, ladder.n + 1):
            lower, upper_j, upper_k = ladder.vector(-j), ladder.vector(j), ladder.vector(k)
            r1 = abs(lower @ ladder.A @ upper_k - (1.0 if j == k else 0.0)) / _scale(lower, upper_k) ** 2
            r2 = abs(upper_j @ ladder.A @ upper_k) / _scale(upper_j, upper_k) ** 2
            commutator = max(commutator, r1, r2)
    residuals['commutator'] = commutator
    if commutator > COMMUTATOR_TOL:
        failures.append('commutator')

    vectors = [ladder.vector(k) for k in ladder.indices()]
    dsum = np.linalg.norm(d_decomposition(ladder) - ladder.D) / (
        max(1.0, np.linalg.norm(ladder.D)) * _scale(*vectors) ** 2
    )
    residuals['d_decomposition'] = dsum
    if dsum > DSUM_TOL:
        failures.append('d_decomposition')

    indices = [0] + ladder.indices()
    W = np.column_stack([ladder.adjoint(k) for k in indices])
    Y = np.column_stack([ladder.vector(k) for k in indices])
    biorthogonality = np.max(np.abs(W.conj().T @ Y - np.eye(len(indices)))) / (
        _scale(*W.T) * _scale(*Y.T)
    )
    residuals['biorthogonality'] = biorthogonality
    if biorthogonality > EIGEN_TOL:
        failures.append('biorthogonality')

    logger.debug('ladder residuals: %s', residuals)
    if failures:
        raise NumericalError(
            'Ladder identities violated: {}'.format(', '.join(failures)), residuals
        )
    return residuals


@filter_operator()
def ladder_eigensystem(spec, modes=None):
    """Build and certify the ladder system of a filter.

    ``y^{-k} = (u_k, 0, 0)``, ``y^k = (-(H - mu_k I)^-1 B conj(v_k), conj(v_k), 0)``
    with adjoints ``w^{-k} = (v_k, (H - conj(mu_k) I)^-1 B v_k, 0)`` and
    ``w^k = (0, conj(u_k), 0)``, so that ``<w^j, y^k> = delta_jk``.

    Raises:
        :class:`ladderstab.ValidationError`: basic conditions violated.
        :class:`ladderstab.NumericalError`: an identity fails; ``diagnostics``
            holds the residual report.
    """
    require_basic_conditions(spec)
    if modes is None:
        modes = filter_modes(spec)
    n = spec.n
    A, D = build_AD(spec)
    P, Q = raising_blocks(spec, modes)
    zeros = np.zeros((1, n))
    lowering = np.vstack([modes.U, np.zeros((n, n)), zeros])
    raising = np.vstack([P, Q, zeros])
    lowering_adjoint = np.empty((2 * n + 1, n), dtype=complex)
    for k in range(n):
        v = modes.V[:, k]
        lower_block = np.linalg.solve(spec.H - np.conj(modes.mu[k]) * np.eye(n), spec.B @ v)
        lowering_adjoint[:, k] = np.concatenate([v, lower_block, [0.0]])
    raising_adjoint = np.vstack([np.zeros((n, n)), modes.U.conj(), zeros])
    alpha, beta = alpha_beta(spec, modes)
    ladder = LadderSystem(
        spec, modes, A, D, lowering, raising, lowering_adjoint, raising_adjoint, alpha, beta
    )
    _certify(ladder)
    return ladder


def sigma_inverse_from_ladder(ladder):
    """Stationary covariance as ``P Q^-1`` from the raising vectors."""
    n = ladder.n
    P = ladder.raising[:n, :]
    Q = ladder.raising[n : 2 * n, :]
    return (P @ np.linalg.inv(Q)).real


def lattice_eigenvalues(mu, max_order):
    """Values ``-sum_j k_j mu_j`` over non-negative ``k`` with ``sum k_j <= max_order``."""
    mu = np.asarray(mu)
    values = []
    for k in itertools.product(range(max_order + 1), repeat=len(mu)):
        if sum(k) <= max_order:
            values.append(-np.dot(k, mu))
    return sorted(values, key=lambda v: (-v.real, v.imag))


__all__ = [
    'alpha_beta',
    'build_AD',
    'commutator_matrix',
    'ladder_eigensystem',
    'lattice_eigenvalues',
    'LadderSystem',
    'sigma_inverse_from_ladder',
    't_matrix',
]
