import collections
import concurrent.futures
import logging
import warnings

import numpy as np
import scipy.optimize

from ._errors import AdvisoryWarning, NumericalError, ValidationError
from ._moments import build_gamma
from ._numerics import eigvals_dense
from ._utils import write_csv
from .specs import Filter2Spec, SystemSpec, check_spec_type


logger = logging.getLogger(__name__)

CRITICAL_TOL = 1e-9


class TruncationConfig(collections.namedtuple('TruncationConfig', ['Nm', 'Nh', 'tol'])):
    """Highest ``s2``-moment index ``Nm`` and Hermite index ``Nh`` kept, both
    inclusive, and the convergence tolerance on ``|delta lambda|``.
    """

    def __new__(cls, Nm=7, Nh=5, tol=1e-8):
        if int(Nm) != Nm or int(Nh) != Nh:
            raise TypeError('Expected integer truncation orders; got Nm={!r}, Nh={!r}'.format(Nm, Nh))
        if Nm < 2 or Nh < 2:
            raise ValidationError('Expected Nm, Nh >= 2; got Nm={}, Nh={}'.format(Nm, Nh))
        if not tol > 0:
            raise ValidationError('Expected tol > 0; got {}'.format(tol))
        return super(TruncationConfig, cls).__new__(cls, int(Nm), int(Nh), float(tol))

    def dimension(self, J):
        return (self.Nm + 1) * (self.Nh + 1) * J

    def refined(self, step):
        return TruncationConfig(self.Nm + step, self.Nh + step, self.tol)


TruncationResult = collections.namedtuple(
    'TruncationResult', ['epsilon', 'value', 'Nm', 'Nh', 'converged', 'history', 'spectrum']
)
TruncationResult.__doc__ = """Largest-real-part eigenvalue of the truncated operator.

``history`` lists ``(Nm, Nh, value)`` for every refinement evaluated.
"""

CriticalEpsilon = collections.namedtuple(
    'CriticalEpsilon', ['epsilon', 'bracket', 'value', 'iterations']
)


def _check_inputs(sys, f2):
    check_spec_type(sys, {SystemSpec}, 'sys')
    check_spec_type(f2, {Filter2Spec}, 'f2')


def assemble_L(sys, f2, cfg, epsilon, op=None):
    """Truncated matrix of the moment eigenproblem for the two-dimensional filter.

    Unknowns ``c_j^k`` (``j``: moment of ``s2``, ``k``: Hermite index in
    ``s1``) obey::

        lambda c_j^k = (G0 - (k mu1 + j mu2) I) c_j^k
                       + j beta / (2 sqrt(mu1)) (c_{j-1}^{k-1} + 2 (k+1) c_{j-1}^{k+1})
                       + eps a1 / (2 sqrt(mu1)) G1 (c_j^{k-1} + 2 (k+1) c_j^{k+1})
                       + eps a2 G1 c_{j+1}^k

    with blocks outside ``[0, Nm] x [0, Nh]`` dropped. Rows and columns run
    over ``(j, k, component)`` lexicographically.
    """
    _check_inputs(sys, f2)
    if op is None:
        op = build_gamma(sys)
    J = op.basis.J
    Nm, Nh = cfg.Nm, cfg.Nh
    L = np.zeros((cfg.dimension(J), cfg.dimension(J)))
    eye = np.eye(J)
    root = 2.0 * np.sqrt(f2.mu1)

    def block(j, k):
        start = (j * (Nh + 1) + k) * J
        return slice(start, start + J)

    for j in range(Nm + 1):
        for k in range(Nh + 1):
            row = block(j, k)
            L[row, block(j, k)] += op.gamma0 - (k * f2.mu1 + j * f2.mu2) * eye
            if j >= 1:
                coupling = j * f2.beta / root
                if k >= 1:
                    L[row, block(j - 1, k - 1)] += coupling * eye
                if k + 1 <= Nh:
                    L[row, block(j - 1, k + 1)] += coupling * 2 * (k + 1) * eye
            if epsilon:
                forcing = epsilon * f2.a1 / root
                if k >= 1:
                    L[row, block(j, k - 1)] += forcing * op.gamma1
                if k + 1 <= Nh:
                    L[row, block(j, k + 1)] += forcing * 2 * (k + 1) * op.gamma1
                if j + 1 <= Nm:
                    L[row, block(j + 1, k)] += epsilon * f2.a2 * op.gamma1
    return L


def top_eigenvalue(L, full_spectrum=False):
    """Eigenvalue of ``L`` with maximal real part (largest imaginary part on ties).

    Returns:
        The eigenvalue, or ``(eigenvalue, spectrum)`` if ``full_spectrum``.
    """
    spectrum = eigvals_dense(L)
    value = spectrum[max(range(len(spectrum)), key=lambda i: (spectrum[i].real, spectrum[i].imag))]
    value = complex(value)
    if full_spectrum:
        return value, spectrum
    return value


def solve(sys, f2, cfg, epsilon, full_spectrum=False):
    """Single evaluation of ``lambda(eps)`` at ``cfg``."""
    L = assemble_L(sys, f2, cfg, epsilon)
    value, spectrum = top_eigenvalue(L, full_spectrum=True)
    logger.debug('solve: eps=%g dim=%d lambda=%s', epsilon, L.shape[0], value)
    return TruncationResult(
        epsilon,
        value,
        cfg.Nm,
        cfg.Nh,
        True,
        [(cfg.Nm, cfg.Nh, value)],
        spectrum if full_spectrum else None,
    )


def convergence_study(sys, f2, cfg, epsilon, step=2, max_refinements=6):
    """Refine ``(Nm, Nh)`` by ``step`` until successive values differ by less
    than ``cfg.tol``.

    An infinite tolerance means a single evaluation. Hitting
    ``max_refinements`` emits an :class:`AdvisoryWarning` and returns the last
    value with ``converged=False``.
    """
    _check_inputs(sys, f2)
    op = build_gamma(sys)
    value = top_eigenvalue(assemble_L(sys, f2, cfg, epsilon, op))
    history = [(cfg.Nm, cfg.Nh, value)]
    if np.isinf(cfg.tol):
        return TruncationResult(epsilon, value, cfg.Nm, cfg.Nh, True, history, None)
    current = cfg
    for _ in range(max_refinements):
        current = current.refined(step)
        refined = top_eigenvalue(assemble_L(sys, f2, current, epsilon, op))
        history.append((current.Nm, current.Nh, refined))
        delta = abs(refined - value)
        value = refined
        if delta < cfg.tol:
            logger.debug('convergence_study: eps=%g converged at %s', epsilon, current[:2])
            return TruncationResult(epsilon, value, current.Nm, current.Nh, True, history, None)
    warnings.warn(
        'Truncation did not converge to {} at eps={} after {} refinements'.format(
            cfg.tol, epsilon, max_refinements
        ),
        AdvisoryWarning,
    )
    return TruncationResult(epsilon, value, current.Nm, current.Nh, False, history, None)


def critical_epsilon(sys, f2, cfg, bracket):
    """Forcing amplitude where ``Re lambda(eps)`` crosses zero, by bisection.

    Raises:
        :class:`ladderstab.NumericalError`: no sign change over ``bracket``.
    """
    _check_inputs(sys, f2)
    lo, hi = bracket
    op = build_gamma(sys)

    def real_part(epsilon):
        return top_eigenvalue(assemble_L(sys, f2, cfg, epsilon, op)).real

    f_lo, f_hi = real_part(lo), real_part(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NumericalError(
            'Re lambda does not change sign over [{}, {}]'.format(lo, hi),
            {'bracket': (lo, hi), 'values': (f_lo, f_hi)},
        )
    root, info = scipy.optimize.bisect(real_part, lo, hi, xtol=1e-12, full_output=True)
    value = real_part(root)
    if abs(value) >= CRITICAL_TOL:
        raise NumericalError(
            'Bisection stopped at |Re lambda| = {:.3e}'.format(abs(value)),
            {'epsilon': root, 'value': value},
        )
    logger.info('critical_epsilon: eps* = %.10g after %d iterations', root, info.iterations)
    return CriticalEpsilon(root, (lo, hi), value, info.iterations)


def sweep(sys, f2, cfg, epsilons, workers=None, step=2):
    """:func:`convergence_study` over ``epsilons``, in input order."""
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(
            executor.map(lambda eps: convergence_study(sys, f2, cfg, eps, step=step), epsilons)
        )


def write_sweep_csv(results, stream, comments=()):
    rows = [
        (r.epsilon, r.value.real, r.value.imag, r.Nm, r.Nh, r.converged) for r in results
    ]
    write_csv(stream, ['epsilon', 'lambda_re', 'lambda_im', 'Nm', 'Nh', 'converged'], rows, comments)


__all__ = [
    'assemble_L',
    'convergence_study',
    'critical_epsilon',
    'solve',
    'sweep',
    'top_eigenvalue',
    'TruncationConfig',
    'write_sweep_csv',
]
