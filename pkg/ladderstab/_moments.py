import collections
import itertools
import logging

import numpy as np

from ._errors import NumericalError
from ._numerics import biorthonormalize, eig_dense, spectral_order
from .specs import SystemSpec, check_spec_type, system_operator


logger = logging.getLogger(__name__)

DOMINANCE_TOL = 1e-9
DEGENERACY_TOL = 1e-12


class MomentBasis(object):
    """Monomials ``x^alpha`` with ``|alpha| = p`` in graded-lexicographic,
    ``x_1``-major order; for ``N = 2, p = 2`` that is ``(x1^2, x1 x2, x2^2)``.
    """

    def __init__(self, N, p):
        if N < 1 or p < 1:
            raise ValueError('Expected N >= 1 and p >= 1; got N={}, p={}'.format(N, p))
        self.N = N
        self.p = p
        self.multi_indices = []
        for combination in itertools.combinations_with_replacement(range(N), p):
            counts = [0] * N
            for i in combination:
                counts[i] += 1
            self.multi_indices.append(tuple(counts))
        self.index = {alpha: i for i, alpha in enumerate(self.multi_indices)}

    @property
    def J(self):
        return len(self.multi_indices)

    def __len__(self):
        return self.J

    def __repr__(self):
        return 'MomentBasis(N={}, p={})'.format(self.N, self.p)

    def labels(self):
        return ['_'.join(str(c) for c in alpha) for alpha in self.multi_indices]

    def evaluate(self, x):
        """Monomial values for a batch of states ``x`` (rows)."""
        powers = np.array(self.multi_indices)
        return np.prod(np.asarray(x)[:, np.newaxis, :] ** powers[np.newaxis, :, :], axis=2)


def moment_basis(N, p):
    return MomentBasis(N, p)


def moment_matrix(basis, M):
    """Generator of ``d/dt <x^alpha>`` for ``dx/dt = M x``.

    Row ``alpha`` gets ``alpha_i M_ij`` at column ``alpha - e_i + e_j`` for
    every ``i`` with ``alpha_i > 0``.
    """
    Gamma = np.zeros((basis.J, basis.J))
    for row, alpha in enumerate(basis.multi_indices):
        for i in range(basis.N):
            if alpha[i] == 0:
                continue
            for j in range(basis.N):
                target = list(alpha)
                target[i] -= 1
                target[j] += 1
                Gamma[row, basis.index[tuple(target)]] += alpha[i] * M[i, j]
    return Gamma


MomentOperator = collections.namedtuple('MomentOperator', ['gamma0', 'gamma1', 'basis'])

GammaEigen = collections.namedtuple('GammaEigen', ['values', 'right', 'left', 'dominant'])
GammaEigen.__doc__ = """Eigen-data of ``Gamma0``: ``right`` columns ``phi_j``,
``left`` columns ``psi_j`` with ``<psi_k, phi_j> = delta_kj`` and the indices of
the dominant (maximal real part) eigenvalues.
"""


@system_operator()
def build_gamma(sys):
    check_spec_type(sys, {SystemSpec}, 'sys')
    basis = MomentBasis(sys.N, sys.p)
    op = MomentOperator(moment_matrix(basis, sys.A0), moment_matrix(basis, sys.A1), basis)
    logger.debug('build_gamma: N=%d p=%d J=%d', sys.N, sys.p, basis.J)
    return op


def eig_gamma(op):
    """Eigen-decomposition of ``Gamma0`` sorted by decreasing real part.

    Every eigenvalue whose real part is within ``1e-9`` of the maximum is a
    dominant branch.

    Raises:
        :class:`ladderstab.NumericalError`: ``Gamma0`` is defective, or a
            dominant eigenvalue coincides with another one.
    """
    decomposition = eig_dense(op.gamma0)
    values = decomposition.values
    order = spectral_order(values)
    values = values[order]
    top = np.max(values.real)
    dominant = tuple(i for i, v in enumerate(values) if v.real >= top - DOMINANCE_TOL)
    for i in dominant:
        for j in range(len(values)):
            if j != i and abs(values[i] - values[j]) <= DEGENERACY_TOL * max(1.0, abs(values[i])):
                raise NumericalError(
                    'Dominant eigenvalue {} of Gamma0 is degenerate'.format(values[i]),
                    {'values': values},
                )
    left = biorthonormalize(decomposition.right, decomposition.left)
    return GammaEigen(values, decomposition.right[:, order], left[:, order], dominant)


def mathieu_system(omega0, gamma, p=2, epsilon=0.0, x0=None):
    """Damped oscillator ``x'' + gamma x' + (omega0^2 - eps f(t)) x = 0`` in
    first-order form.
    """
    return SystemSpec(
        A0=[[0.0, 1.0], [-omega0 ** 2, -gamma]],
        A1=[[0.0, 0.0], [1.0, 0.0]],
        p=p,
        epsilon=epsilon,
        x0=x0,
    )


__all__ = [
    'build_gamma',
    'eig_gamma',
    'mathieu_system',
    'moment_basis',
    'MomentBasis',
]
