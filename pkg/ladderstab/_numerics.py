import collections
import logging

import numpy as np
import scipy.linalg

from ._errors import NumericalError
from ._utils import inner


logger = logging.getLogger(__name__)

EIG_RESIDUAL_TOL = 1e-10
DEFECTIVE_TOL = 1e-10
SIMPLE_GAP = 1e-8
LYAPUNOV_RESIDUAL_TOL = 1e-10


EigenDecomposition = collections.namedtuple(
    'EigenDecomposition', ['values', 'right', 'left', 'repeated']
)


def _check_square(M, name='M'):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError('Expected {} to be a square matrix; got shape {}'.format(name, M.shape))
    if not np.all(np.isfinite(M)):
        raise ValueError('Expected {} to have finite entries'.format(name))
    return M


def _fix_phase(vectors):
    """Rotate each column so its largest-magnitude entry is real and positive."""
    vectors = np.array(vectors, dtype=complex)
    for i in range(vectors.shape[1]):
        column = vectors[:, i]
        pivot = column[np.argmax(np.abs(column))]
        if pivot != 0:
            vectors[:, i] = column * (abs(pivot) / pivot)
    return vectors


def repeated_pairs(values, gap=SIMPLE_GAP):
    """Index pairs (i, j), i < j, whose eigenvalues agree to relative gap ``gap``."""
    values = np.asarray(values)
    if values.size == 0:
        return []
    scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    pairs = []
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if abs(values[i] - values[j]) <= gap * scale:
                pairs.append((i, j))
    return pairs


def spectral_order(values):
    """Indices sorting by decreasing real part, then real before complex, then imaginary part."""
    values = np.asarray(values)
    return sorted(
        range(len(values)),
        key=lambda i: (
            -round(values[i].real, 12),
            round(abs(values[i].imag), 12),
            values[i].imag,
        ),
    )


def biorthonormalize(right, left, tol=DEFECTIVE_TOL):
    """Rescale ``left`` so that <left_i, right_i> = 1 for every column.

    Raises:
        :class:`ladderstab.NumericalError`: if some pair is (numerically)
            defective, i.e. ``|<left_i, right_i>| < tol``.
    """
    left = np.array(left, dtype=complex)
    overlaps = np.array([inner(left[:, i], right[:, i]) for i in range(left.shape[1])])
    defective = [i for i, c in enumerate(overlaps) if abs(c) < tol]
    if defective:
        raise NumericalError(
            'Defective eigenvalue(s) at index {}'.format(defective),
            {'overlaps': overlaps, 'defective': defective},
        )
    return left / overlaps.conj()[np.newaxis, :]


def eig_dense(M, normalize=False, check=True):
    """Dense non-symmetric eigendecomposition with left and right eigenvectors.

    Args:
        M: square (complex or real) matrix.
        normalize: if True, bi-orthonormalize so that ``<w_i, v_j> = delta_ij``;
            requires a simple spectrum.
        check: verify ``M v_i = lambda_i v_i`` to ``1e-10 * ||M||``.

    Returns:
        :class:`EigenDecomposition` with eigenvalues, right vectors as columns
        (unit 2-norm, phase-fixed), left vectors as columns satisfying
        ``w_i^H M = lambda_i w_i^H`` and the list of repeated index pairs.
    """
    M = _check_square(M)
    try:
        values, left, right = scipy.linalg.eig(M, left=True, right=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalError('Eigensolver failed: {}'.format(e), {'shape': M.shape})
    right = _fix_phase(right)
    right /= np.linalg.norm(right, axis=0)[np.newaxis, :]
    if check and M.size:
        norm = np.linalg.norm(M, 2)
        residuals = np.linalg.norm(M @ right - right * values[np.newaxis, :], axis=0)
        worst = np.max(residuals)
        logger.debug('eig_dense: n=%d worst residual %.3e', M.shape[0], worst)
        if worst > EIG_RESIDUAL_TOL * norm:
            raise NumericalError(
                'Eigenpair residual {:.3e} exceeds tolerance'.format(worst),
                {'residuals': residuals, 'norm': norm},
            )
    repeated = repeated_pairs(values)
    if normalize:
        if repeated:
            raise NumericalError(
                'Cannot bi-orthonormalize a spectrum with repeated eigenvalues',
                {'repeated': repeated, 'values': values},
            )
        left = biorthonormalize(right, left)
    return EigenDecomposition(values, right, left, repeated)


def eigvals_dense(M):
    M = _check_square(M)
    try:
        return scipy.linalg.eigvals(M)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalError('Eigensolver failed: {}'.format(e), {'shape': M.shape})


def _lyapunov_kronecker(H, B):
    n = H.shape[0]
    eye = np.eye(n)
    K = np.kron(eye, H) + np.kron(H, eye)
    x = np.linalg.solve(K, -B.reshape(-1, order='F'))
    return x.reshape((n, n), order='F')


def lyapunov_solve(H, B):
    """Solve ``H X + X H^T = -B`` for stable ``H``.

    Uses the Bartels-Stewart solver of :func:`scipy.linalg.solve_continuous_lyapunov`;
    if the Schur reduction fails, falls back to the Kronecker-product linear solve
    ``(I (x) H + H (x) I) vec X = -vec B``.

    Raises:
        :class:`ladderstab.NumericalError`: if ``H`` has an eigenvalue with
            non-negative real part, or the residual check fails.
    """
    H = np.asarray(_check_square(H, 'H'), dtype=float)
    B = np.asarray(_check_square(B, 'B'), dtype=float)
    if B.shape != H.shape:
        raise ValueError('Expected B to have shape {}; got {}'.format(H.shape, B.shape))
    values = eigvals_dense(H)
    unstable = [v for v in values if v.real >= 0]
    if unstable:
        raise NumericalError(
            'H is not stable: eigenvalue {} has non-negative real part'.format(unstable[0]),
            {'eigenvalues': values},
        )
    try:
        X = scipy.linalg.solve_continuous_lyapunov(H, -B)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        logger.debug('lyapunov_solve: Schur solver failed (%s), using Kronecker solve', e)
        X = _lyapunov_kronecker(H, B)
    X = (X + X.T) / 2
    residual = np.linalg.norm(H @ X + X @ H.T + B)
    scale = np.linalg.norm(B) + np.linalg.norm(H) * np.linalg.norm(X)
    logger.debug('lyapunov_solve: residual %.3e', residual)
    if residual > LYAPUNOV_RESIDUAL_TOL * scale:
        raise NumericalError(
            'Lyapunov residual {:.3e} exceeds tolerance'.format(residual),
            {'residual': residual},
        )
    return X


def expm(M, t=1.0):
    """Matrix exponential ``e^{M t}`` (scaling and squaring)."""
    M = _check_square(M)
    return scipy.linalg.expm(M * t)


__all__ = [
    'biorthonormalize',
    'eig_dense',
    'eigvals_dense',
    'expm',
    'lyapunov_solve',
]
