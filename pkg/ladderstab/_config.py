import collections
import json
import logging
import numbers

from ._errors import ConfigError, ValidationError
from ._moments import mathieu_system
from ._montecarlo import SimConfig
from ._truncation import TruncationConfig
from ._utils import get_hash
from .specs import Filter2Spec, FilterSpec, SystemSpec


logger = logging.getLogger(__name__)

_SECTIONS = {'filter', 'system', 'truncation', 'simulate', 'output'}
_FILTER_KEYS = {'H', 'B', 'a'}
_FILTER2_KEYS = {'mu1', 'mu2', 'beta', 'a1', 'a2'}
_SYSTEM_KEYS = {'A0', 'A1', 'mathieu', 'p', 'epsilon', 'x0'}
_MATHIEU_KEYS = {'omega0', 'gamma'}
_TRUNCATION_KEYS = {'Nm', 'Nh', 'tol'}
_SIMULATE_KEYS = {'dt', 'T', 'paths', 'seed', 'burn_in', 'chunk_size', 'record_every', 'workers'}
_OUTPUT_KEYS = {'directory', 'formats'}
_FORMATS = {'csv'}


RunConfig = collections.namedtuple(
    'RunConfig',
    ['filter', 'filter2', 'system', 'mathieu', 'truncation', 'simulate', 'output', 'digest'],
)
RunConfig.__doc__ = """Validated run configuration.

``filter2`` is set only for the two-dimensional shorthand and ``mathieu``
(``{'omega0', 'gamma'}``) only for the oscillator shorthand. ``digest`` is a
short hash of the raw document for traceability.
"""


def _check_keys(section, document, allowed, required=()):
    if not isinstance(document, dict):
        raise ConfigError('Expected section {!r} to be an object; got {!r}'.format(section, document))
    invalid = sorted(set(document) - set(allowed))
    if invalid:
        raise ConfigError('Invalid key(s) in {}: {}'.format(section, ', '.join(invalid)))
    missing = sorted(set(required) - set(document))
    if missing:
        raise ConfigError('Missing key(s) in {}: {}'.format(section, ', '.join(missing)))


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _number(section, key, value):
    if not _is_number(value):
        raise ConfigError('Expected {}.{} to be a number; got {!r}'.format(section, key, value))
    return value


def _vector(section, key, value):
    if not isinstance(value, list) or not all(_is_number(x) for x in value):
        raise ConfigError('Expected {}.{} to be a list of numbers; got {!r}'.format(section, key, value))
    return value


def _matrix(section, key, value):
    if not isinstance(value, list) or not value:
        raise ConfigError('Expected {}.{} to be a non-empty list of rows'.format(section, key))
    rows = [_vector(section, key, row) for row in value]
    if len(set(len(row) for row in rows)) != 1:
        raise ConfigError('Expected {}.{} to have rows of equal length'.format(section, key))
    return rows


def _build(section, factory, **kwargs):
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError('Invalid {} section: {}'.format(section, e))


def _parse_filter(document):
    keys = set(document) if isinstance(document, dict) else set()
    if keys & _FILTER2_KEYS:
        _check_keys('filter', document, _FILTER2_KEYS, _FILTER2_KEYS)
        values = {k: _number('filter', k, document[k]) for k in _FILTER2_KEYS}
        filter2 = _build('filter', Filter2Spec, **values)
        return filter2.to_filter_spec(), filter2
    _check_keys('filter', document, _FILTER_KEYS, _FILTER_KEYS)
    H = _matrix('filter', 'H', document['H'])
    B = _matrix('filter', 'B', document['B'])
    a = _vector('filter', 'a', document['a'])
    n = len(H)
    if len(H[0]) != n or len(B) != n or len(B[0]) != n or len(a) != n:
        raise ConfigError(
            'Inconsistent filter dimensions: H {}x{}, B {}x{}, a {}'.format(
                n, len(H[0]), len(B), len(B[0]), len(a)
            )
        )
    return _build('filter', FilterSpec, H=H, B=B, a=a), None


def _parse_system(document):
    _check_keys('system', document, _SYSTEM_KEYS)
    p = document.get('p', 2)
    if not isinstance(p, int) or isinstance(p, bool):
        raise ConfigError('Expected system.p to be an integer; got {!r}'.format(p))
    epsilon = _number('system', 'epsilon', document.get('epsilon', 0.0))
    x0 = document.get('x0')
    if x0 is not None:
        x0 = _vector('system', 'x0', x0)
    if 'mathieu' in document:
        if 'A0' in document or 'A1' in document:
            raise ConfigError('system takes either mathieu or A0/A1, not both')
        mathieu = document['mathieu']
        _check_keys('system.mathieu', mathieu, _MATHIEU_KEYS, _MATHIEU_KEYS)
        omega0 = _number('system.mathieu', 'omega0', mathieu['omega0'])
        gamma = _number('system.mathieu', 'gamma', mathieu['gamma'])
        system = _build(
            'system', mathieu_system, omega0=omega0, gamma=gamma, p=p, epsilon=epsilon, x0=x0
        )
        return system, {'omega0': float(omega0), 'gamma': float(gamma)}
    _check_keys('system', document, _SYSTEM_KEYS, {'A0', 'A1'})
    A0 = _matrix('system', 'A0', document['A0'])
    A1 = _matrix('system', 'A1', document['A1'])
    N = len(A0)
    if len(A0[0]) != N or len(A1) != N or len(A1[0]) != N:
        raise ConfigError('Expected A0 and A1 to be square with matching sizes')
    if x0 is not None and len(x0) != N:
        raise ConfigError('Expected system.x0 to have length {}; got {}'.format(N, len(x0)))
    return _build('system', SystemSpec, A0=A0, A1=A1, p=p, epsilon=epsilon, x0=x0), None


def _parse_simple(section, document, allowed, factory):
    document = document or {}
    _check_keys(section, document, allowed)
    for key, value in document.items():
        if value is not None:
            _number(section, key, value)
    try:
        return _build(section, factory, **document)
    except ValidationError as e:
        raise ConfigError('Invalid {} section: {}'.format(section, e))


def _parse_output(document):
    document = document or {}
    _check_keys('output', document, _OUTPUT_KEYS)
    directory = document.get('directory')
    if directory is not None and not isinstance(directory, str):
        raise ConfigError('Expected output.directory to be a string; got {!r}'.format(directory))
    formats = document.get('formats', ['csv'])
    if not isinstance(formats, list) or set(formats) - _FORMATS:
        raise ConfigError(
            'Unsupported output format(s) {!r}; supported: {}'.format(formats, sorted(_FORMATS))
        )
    return {'directory': directory, 'formats': list(formats)}


def parse_config(document):
    """Validate a configuration document (already decoded from JSON).

    Raises:
        :class:`ladderstab.ConfigError`: schema violations, including unknown
            keys and malformed or mismatched matrices.
        :class:`ladderstab.ValidationError`: well-formed values that violate
            a filter or system invariant.
    """
    _check_keys('config', document, _SECTIONS, {'filter'})
    filter_spec, filter2 = _parse_filter(document['filter'])
    system, mathieu = (None, None)
    if document.get('system') is not None:
        system, mathieu = _parse_system(document['system'])
    truncation = _parse_simple(
        'truncation', document.get('truncation'), _TRUNCATION_KEYS, TruncationConfig
    )
    simulate = _parse_simple('simulate', document.get('simulate'), _SIMULATE_KEYS, SimConfig)
    output = _parse_output(document.get('output'))
    digest = get_hash(document)[:12]
    logger.debug('parse_config: digest %s', digest)
    return RunConfig(filter_spec, filter2, system, mathieu, truncation, simulate, output, digest)


def load_config(path):
    try:
        with open(path) as f:
            document = json.load(f)
    except (IOError, OSError) as e:
        raise ConfigError('Cannot read config {}: {}'.format(path, e))
    except ValueError as e:
        raise ConfigError('Config {} is not valid JSON: {}'.format(path, e))
    return parse_config(document)


def require_system(config, command):
    if config.system is None:
        raise ConfigError('{} requires a system section'.format(command))
    return config.system


def require_filter2(config, command):
    if config.filter2 is None:
        raise ConfigError('{} requires the filter2 shorthand (mu1, mu2, beta, a1, a2)'.format(command))
    return config.filter2


__all__ = ['load_config', 'parse_config', 'RunConfig']
