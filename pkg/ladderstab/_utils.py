import csv
import hashlib

import numpy as np


def _recursive_repr(item):
    """Hack around python `repr` to deterministically represent dictionaries.

    This is able to represent more things than json.dumps, since it does not require
    things to be JSON serializable (e.g. numpy arrays).
    """
    if isinstance(item, str):
        result = item
    elif isinstance(item, np.ndarray):
        result = _recursive_repr(item.tolist())
    elif isinstance(item, (list, tuple)):
        result = '[{}]'.format(', '.join([_recursive_repr(x) for x in item]))
    elif isinstance(item, dict):
        kv_pairs = [
            '{}: {}'.format(_recursive_repr(k), _recursive_repr(item[k]))
            for k in sorted(item)
        ]
        result = '{' + ', '.join(kv_pairs) + '}'
    else:
        result = repr(item)
    return result


def get_hash(item):
    repr_ = _recursive_repr(item).encode('utf-8')
    return hashlib.md5(repr_).hexdigest()


def get_hash_int(item):
    return int(get_hash(item), base=16)


def inner(x, y):
    """Standard inner product on C^n, conjugate-linear in the first argument."""
    return np.vdot(x, y)


def as_matrix(value, name, shape=None):
    """Convert ``value`` to a finite 2-d float array, optionally checking its shape."""
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ValueError('Expected {} to be a numeric matrix; got {!r}'.format(name, value))
    if matrix.ndim != 2:
        raise ValueError(
            'Expected {} to be a 2-d matrix; got {} dimension(s)'.format(name, matrix.ndim)
        )
    if shape is not None and matrix.shape != tuple(shape):
        raise ValueError(
            'Expected {} to have shape {}; got {}'.format(name, tuple(shape), matrix.shape)
        )
    if not np.all(np.isfinite(matrix)):
        raise ValueError('Expected {} to have finite entries'.format(name))
    return matrix


def as_vector(value, name, length=None):
    try:
        vector = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ValueError('Expected {} to be a numeric vector; got {!r}'.format(name, value))
    if vector.ndim != 1:
        raise ValueError(
            'Expected {} to be a 1-d vector; got {} dimension(s)'.format(name, vector.ndim)
        )
    if length is not None and vector.shape[0] != length:
        raise ValueError(
            'Expected {} to have length {}; got {}'.format(name, length, vector.shape[0])
        )
    if not np.all(np.isfinite(vector)):
        raise ValueError('Expected {} to have finite entries'.format(name))
    return vector


def frozen(array):
    array = np.array(array)
    array.setflags(write=False)
    return array


def format_value(value):
    """Render a CSV cell; floats keep full double precision."""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(stream, header, rows, comments=()):
    """Write ``rows`` to ``stream`` with '#'-prefixed comment lines above the header."""
    for comment in comments:
        stream.write('# {}\n'.format(comment))
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(x) for x in row])
