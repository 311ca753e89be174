import collections
import logging
import warnings

import numpy as np

from ._errors import AdvisoryWarning, ValidationError
from ._ladder import ladder_eigensystem
from ._moments import build_gamma, eig_gamma
from ._numerics import eig_dense, spectral_order
from ._spectral import g_from_coefficients, psd
from ._utils import inner, write_csv
from .specs import FilterSpec, SystemSpec, check_spec_type, system_operator


logger = logging.getLogger(__name__)


PerturbationResult = collections.namedtuple(
    'PerturbationResult',
    [
        'branch',
        'lambda0',
        'lambda1',
        'lambda2',
        'contributions',
        'valid',
        'advisory',
        'epsilon',
        'predicted',
    ],
)
PerturbationResult.__doc__ = """Second-order expansion ``lambda(eps) = lambda0 + eps^2 lambda2``
of one dominant branch.

``contributions[j]`` is ``<psi_1, G1 phi_j><psi_j, G1 phi_1> G(nu_1 - nu_j)``;
``valid[j, k]`` is ``Re(nu_1 - nu_j + mu_k) > 0``. A result with any invalid
flag is ``advisory``.
"""

Prediction = collections.namedtuple('Prediction', ['branches', 'selected', 'epsilon', 'predicted'])

ClosedForm = collections.namedtuple('ClosedForm', ['p', 'lambda0', 'lambda2'])

Lambda4Fit = collections.namedtuple('Lambda4Fit', ['lambda4', 'epsilons', 'residuals', 'ratios'])


class _Problem(object):
    def __init__(self, sys, spec):
        check_spec_type(sys, {SystemSpec}, 'sys')
        check_spec_type(spec, {FilterSpec})
        self.sys = sys
        self.op = build_gamma(sys)
        self.eigen = eig_gamma(self.op)
        self.ladder = ladder_eigensystem(spec)
        self.kernel = self.eigen.left.conj().T @ self.op.gamma1 @ self.eigen.right

    def branch_index(self, branch):
        if branch is None:
            return self.eigen.dominant[0]
        if not 0 <= branch < len(self.eigen.values):
            raise ValueError(
                'Expected branch index in [0, {}); got {}'.format(len(self.eigen.values), branch)
            )
        return branch

    def g(self, z):
        ladder = self.ladder
        return g_from_coefficients(ladder.mu, ladder.alpha, ladder.beta, z)

    def validity(self, b):
        nu = self.eigen.values
        return ((nu[b] - nu)[:, np.newaxis] + self.ladder.mu[np.newaxis, :]).real > 0

    def contributions(self, b):
        nu = self.eigen.values
        K = self.kernel
        return np.array([K[b, j] * K[j, b] * self.g(nu[b] - nu[j]) for j in range(len(nu))])


def _warn_if_invalid(valid, label):
    if not np.all(valid):
        warnings.warn(
            'Validity condition Re(nu_1 - nu_j + mu_k) > 0 fails for {}; '
            'the second-order coefficient is advisory'.format(label),
            AdvisoryWarning,
        )


@system_operator()
def lambda2_spectral(sys, spec, branch=None):
    """Second-order coefficient ``sum_j <psi_1, G1 phi_j><psi_j, G1 phi_1> G(nu_1 - nu_j)``.

    Args:
        sys: the forced system.
        spec: the filter.
        branch: index of ``nu_1`` in the (sorted) eigenvalues of ``Gamma0``;
            defaults to the first dominant branch.
    """
    problem = _Problem(sys, spec)
    b = problem.branch_index(branch)
    _warn_if_invalid(problem.validity(b), 'branch {}'.format(problem.eigen.values[b]))
    return complex(np.sum(problem.contributions(b)))


def _lambda2_direct(problem, b):
    eigen = problem.eigen
    ladder = problem.ladder
    nu = eigen.values
    total = 0j
    for k in range(ladder.n):
        weights = ladder.beta[k] * problem.kernel[:, b] / (nu[b] - nu + ladder.mu[k])
        c_k = eigen.right @ weights
        total += ladder.alpha[k] * inner(eigen.left[:, b], problem.op.gamma1 @ c_k)
    return -total


@system_operator()
def lambda2_direct(sys, spec, branch=None):
    """Second-order coefficient from the solvability condition.

    Builds ``c_k = sum_j beta_k <psi_j, G1 phi_1> phi_j / (nu_1 - nu_j + mu_k)``
    and returns ``-sum_k <psi_1, alpha_k G1 c_k>``.
    """
    problem = _Problem(sys, spec)
    b = problem.branch_index(branch)
    _warn_if_invalid(problem.validity(b), 'branch {}'.format(problem.eigen.values[b]))
    return complex(_lambda2_direct(problem, b))


def tensor_coefficients(sys):
    """``C_jklm = (d_jm a_kl + d_km a_jl + d_jl a_km + d_kl a_jm) / 4`` with
    ``a_kl = <g_k, A1 h_l>`` in the eigenbasis ``A0 h_l = sigma_l h_l``.

    Returns:
        ``(sigma, C)`` with ``sigma`` sorted by decreasing real part.
    """
    decomposition = eig_dense(sys.A0, normalize=True)
    sigma = decomposition.values
    order = spectral_order(sigma)
    sigma = sigma[order]
    h = decomposition.right[:, order]
    g = decomposition.left[:, order]
    a = g.conj().T @ sys.A1 @ h
    d = np.eye(sys.N)
    C = 0.25 * (
        np.einsum('jm,kl->jklm', d, a)
        + np.einsum('km,jl->jklm', d, a)
        + np.einsum('jl,km->jklm', d, a)
        + np.einsum('kl,jm->jklm', d, a)
    )
    return sigma, C


@system_operator()
def lambda2_tensor(sys, spec, pair=(0, 1)):
    """Second-order coefficient for second moments from the eigen-data of ``A0``
    alone, for the branch ``lambda0 = sigma_q + sigma_r``.

    ``lambda2 = 8 sum_jk C_jkqr C_qrjk G(sigma_q + sigma_r - sigma_j - sigma_k) / (1 + d_qr)``.

    Args:
        pair: zero-based indices ``(q, r)`` into the sorted eigenvalues of ``A0``.
    """
    check_spec_type(sys, {SystemSpec}, 'sys')
    if sys.p != 2:
        raise ValueError('Expected moment order p = 2; got {}'.format(sys.p))
    q, r = pair
    sigma, C = tensor_coefficients(sys)
    ladder = ladder_eigensystem(spec)
    branch = sigma[q] + sigma[r]
    total = 0j
    valid = True
    for j in range(sys.N):
        for k in range(sys.N):
            z = branch - sigma[j] - sigma[k]
            valid = valid and bool(np.all((z + ladder.mu).real > 0))
            total += C[j, k, q, r] * C[q, r, j, k] * g_from_coefficients(
                ladder.mu, ladder.alpha, ladder.beta, z
            )
    if not valid:
        warnings.warn(
            'Validity condition fails for tensor branch {}; the second-order '
            'coefficient is advisory'.format(branch),
            AdvisoryWarning,
        )
    return complex(8 * total / (2.0 if q == r else 1.0))


def mathieu_closed_form(gamma, omega0, spec, p):
    """Real parts ``(Re lambda0, Re lambda2)`` of the dominant second-order
    expansion for moments of the stochastic Mathieu equation, ``p in {1, 2, 3}``.

    With ``W = 4 omega0^2 - gamma^2``::

        p = 1: (-gamma/2,  (S(sqrt W) - S(0)) / (2 W))
        p = 2: (-gamma,    2 S(sqrt W) / W)
        p = 3: (-3gamma/2, (7 S(sqrt W) - S(0)) / (2 W))
    """
    width = 4 * omega0 ** 2 - gamma ** 2
    if width <= 0:
        raise ValidationError(
            'Overdamped oscillator (4 omega0^2 <= gamma^2) is not supported',
            {'gamma': gamma, 'omega0': omega0},
        )
    S = psd(spec, np.sqrt(width))
    S0 = psd(spec, 0.0)
    if p == 1:
        return ClosedForm(1, -gamma / 2, (S - S0) / (2 * width))
    elif p == 2:
        return ClosedForm(2, -gamma, 2 * S / width)
    elif p == 3:
        return ClosedForm(3, -1.5 * gamma, (7 * S - S0) / (2 * width))
    raise ValueError('Expected p in (1, 2, 3); got {}'.format(p))


def critical_from_coefficients(lambda0, lambda2):
    if lambda0 < 0 < lambda2:
        return float(np.sqrt(-lambda0 / lambda2))
    return None


def perturbative_critical_epsilon(result):
    """``sqrt(-Re lambda0 / Re lambda2)`` when the expansion crosses zero, else ``None``."""
    return critical_from_coefficients(result.lambda0.real, result.lambda2.real)


def instability_order(gamma, omega0, spec, orders=(1, 2, 3)):
    """Moment orders sorted by their second-order critical amplitude.

    Returns:
        List of ``(p, eps_star)``; orders that never destabilize at second
        order carry ``None`` and come last.
    """
    ranked = []
    for p in orders:
        form = mathieu_closed_form(gamma, omega0, spec, p)
        ranked.append((p, critical_from_coefficients(form.lambda0, form.lambda2)))
    return sorted(ranked, key=lambda item: (item[1] is None, item[1] or 0.0, item[0]))


@system_operator()
def predict(sys, spec):
    """Second-order prediction for every dominant branch of ``Gamma0``.

    The selected branch maximizes ``Re(lambda0 + eps^2 lambda2)`` at
    ``sys.epsilon``; ties keep the lower branch index.
    """
    problem = _Problem(sys, spec)
    epsilon = sys.epsilon
    branches = []
    for b in problem.eigen.dominant:
        contributions = problem.contributions(b)
        valid = problem.validity(b)
        lambda0 = complex(problem.eigen.values[b])
        lambda2 = complex(np.sum(contributions))
        advisory = not bool(np.all(valid))
        if advisory:
            _warn_if_invalid(valid, 'branch {}'.format(lambda0))
        branches.append(
            PerturbationResult(
                branch=b,
                lambda0=lambda0,
                lambda1=0.0,
                lambda2=lambda2,
                contributions=contributions,
                valid=valid,
                advisory=advisory,
                epsilon=epsilon,
                predicted=lambda0 + epsilon ** 2 * lambda2,
            )
        )
    selected = max(range(len(branches)), key=lambda i: (branches[i].predicted.real, -i))
    logger.info(
        'predict: %d dominant branch(es), selected nu_1 = %s',
        len(branches),
        branches[selected].lambda0,
    )
    return Prediction(branches, selected, epsilon, branches[selected].predicted)


def fit_lambda4(epsilons, lambdas, lambda0, lambda2):
    """Least-squares fourth-order coefficient from residuals
    ``Re(lambda(eps) - lambda0 - eps^2 lambda2) ~ lambda4 eps^4``.

    Purely empirical: no closed form for the fourth-order term is used.
    """
    epsilons = np.asarray(epsilons, dtype=float)
    if epsilons.size == 0 or np.any(epsilons == 0):
        raise ValueError('Expected non-empty, non-zero epsilons; got {}'.format(epsilons))
    residuals = np.real(np.asarray(lambdas) - lambda0 - epsilons ** 2 * lambda2)
    e4 = epsilons ** 4
    lambda4 = float(np.sum(residuals * e4) / np.sum(e4 * e4))
    return Lambda4Fit(lambda4, epsilons, residuals, residuals / e4)


def write_branch_csv(prediction, stream, comments=()):
    rows = [
        (
            result.lambda0.real,
            result.lambda0.imag,
            result.lambda2.real,
            result.lambda2.imag,
            not result.advisory,
            result.predicted.real,
        )
        for result in prediction.branches
    ]
    write_csv(
        stream,
        ['branch_re', 'branch_im', 'lambda2_re', 'lambda2_im', 'valid', 'predicted_re'],
        rows,
        comments,
    )


__all__ = [
    'fit_lambda4',
    'instability_order',
    'lambda2_direct',
    'lambda2_spectral',
    'lambda2_tensor',
    'mathieu_closed_form',
    'perturbative_critical_epsilon',
    'predict',
    'write_branch_csv',
]
