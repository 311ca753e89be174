import numpy as np

from ._errors import ValidationError
from ._utils import as_matrix, as_vector, frozen, get_hash_int


def _is_of_types(obj, types):
    valid = False
    for spec_type in types:
        if isinstance(obj, spec_type):
            valid = True
            break
    return valid


def _get_types_str(types):
    return ', '.join(['{}.{}'.format(x.__module__, x.__name__) for x in types])


def check_spec_type(obj, types, name='spec'):
    if not _is_of_types(obj, types):
        raise TypeError(
            'Expected {} to be of one of the following type(s): {}; got {}'.format(
                name, _get_types_str(types), type(obj)
            )
        )
    return obj


class Spec(object):
    """Immutable value type; equality and hashing go through ``to_dict``."""

    def to_dict(self):
        raise NotImplementedError()

    def __hash__(self):
        return get_hash_int([type(self).__name__, self.to_dict()])

    def __eq__(self, other):
        return type(self) is type(other) and hash(self) == hash(other)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        args = ', '.join(
            '{}={!r}'.format(k, v) for k, v in sorted(self.to_dict().items())
        )
        return '{}({})'.format(type(self).__name__, args)


class FilterSpec(Spec):
    """Colored-noise filter ``ds = H s dt + dW`` with ``<dW dW^T> = B dt``, read
    out as ``f(t) = <a, s(t)>``.

    Only shapes and finiteness are checked here; the standing hypotheses
    (symmetric PSD ``B``, simple stable ``H``, controllability) are reported by
    :meth:`validate_basic_conditions` and enforced by every analysis routine.
    """

    def __init__(self, H, B, a):
        H = as_matrix(H, 'H')
        n = H.shape[0]
        if n < 1 or H.shape != (n, n):
            raise ValueError('Expected H to be a non-empty square matrix; got shape {}'.format(H.shape))
        self.H = frozen(H)
        self.B = frozen(as_matrix(B, 'B', shape=(n, n)))
        self.a = frozen(as_vector(a, 'a', length=n))

    @property
    def n(self):
        return self.H.shape[0]

    def to_dict(self):
        return {'H': self.H.tolist(), 'B': self.B.tolist(), 'a': self.a.tolist()}


class Filter2Spec(Spec):
    """Two-dimensional filter with ``H = [[-mu1, 0], [beta, -mu2]]`` and
    ``B = diag(1, 0)``; the class the truncation solver handles.
    """

    def __init__(self, mu1, mu2, beta, a1, a2):
        self.mu1 = float(mu1)
        self.mu2 = float(mu2)
        self.beta = float(beta)
        self.a1 = float(a1)
        self.a2 = float(a2)
        if not np.all(np.isfinite([self.mu1, self.mu2, self.beta, self.a1, self.a2])):
            raise ValueError('Expected finite filter2 parameters; got {}'.format(self.to_dict()))
        if self.mu1 <= 0 or self.mu2 <= 0:
            raise ValidationError(
                'Expected mu1, mu2 > 0; got {}, {}'.format(self.mu1, self.mu2),
                {'clause': 'simple_stable_drift'},
            )
        if abs(self.mu1 - self.mu2) <= 1e-8 * max(self.mu1, self.mu2):
            raise ValidationError(
                'Expected mu1 != mu2 (simple eigenvalues); got {}'.format(self.mu1),
                {'clause': 'simple_stable_drift'},
            )
        if self.beta == 0:
            raise ValidationError(
                'Expected beta != 0; the pair (H, B) is not controllable',
                {'clause': 'controllable'},
            )

    def to_dict(self):
        return {
            'mu1': self.mu1,
            'mu2': self.mu2,
            'beta': self.beta,
            'a1': self.a1,
            'a2': self.a2,
        }

    def to_filter_spec(self):
        return FilterSpec(
            H=[[-self.mu1, 0.0], [self.beta, -self.mu2]],
            B=[[1.0, 0.0], [0.0, 0.0]],
            a=[self.a1, self.a2],
        )


class SystemSpec(Spec):
    """Forced system ``dx/dt = (A0 + eps f(t) A1) x`` observed through its
    ``p``-th marginal moments.
    """

    def __init__(self, A0, A1, p=2, epsilon=0.0, x0=None):
        A0 = as_matrix(A0, 'A0')
        N = A0.shape[0]
        if N < 1 or A0.shape != (N, N):
            raise ValueError('Expected A0 to be a non-empty square matrix; got shape {}'.format(A0.shape))
        self.A0 = frozen(A0)
        self.A1 = frozen(as_matrix(A1, 'A1', shape=(N, N)))
        if isinstance(p, bool) or int(p) != p:
            raise TypeError('Expected integer moment order p; got {!r}'.format(p))
        if p < 1:
            raise ValidationError('Expected moment order p >= 1; got {}'.format(p))
        self.p = int(p)
        self.epsilon = float(epsilon)
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValidationError('Expected epsilon >= 0; got {}'.format(epsilon))
        if x0 is None:
            x0 = np.eye(N)[0]
        self.x0 = frozen(as_vector(x0, 'x0', length=N))

    @property
    def N(self):
        return self.A0.shape[0]

    def to_dict(self):
        return {
            'A0': self.A0.tolist(),
            'A1': self.A1.tolist(),
            'p': self.p,
            'epsilon': self.epsilon,
            'x0': self.x0.tolist(),
        }

    def with_epsilon(self, epsilon):
        return SystemSpec(self.A0, self.A1, self.p, epsilon, self.x0)

    def with_order(self, p):
        return SystemSpec(self.A0, self.A1, p, self.epsilon, self.x0)


def spec_operator(spec_classes={FilterSpec}, name=None):
    def decorator(func):
        func_name = name or func.__name__
        [setattr(spec_class, func_name, func) for spec_class in spec_classes]
        return func

    return decorator


def filter_operator(name=None):
    return spec_operator(spec_classes={FilterSpec}, name=name)


def system_operator(name=None):
    return spec_operator(spec_classes={SystemSpec}, name=name)


__all__ = ['Filter2Spec', 'FilterSpec', 'SystemSpec']
