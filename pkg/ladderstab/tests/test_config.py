import copy
import json
import os

import ladderstab
import numpy as np
import pytest


TEST_DIR = os.path.dirname(__file__)
CONFIG_DIR = os.path.join(TEST_DIR, '..', '..', 'configs')

DOCUMENT = {
    'filter': {'mu1': 1.8, 'mu2': 0.9, 'beta': 1.0, 'a1': 1.0, 'a2': 0.9},
    'system': {'mathieu': {'omega0': 0.5, 'gamma': 0.01}, 'p': 2, 'epsilon': 0.05},
    'truncation': {'Nm': 7, 'Nh': 5, 'tol': 1e-6},
}


def _document(**sections):
    document = copy.deepcopy(DOCUMENT)
    document.update(sections)
    return document


def test_parse_config():
    config = ladderstab.parse_config(DOCUMENT)
    assert isinstance(config.filter, ladderstab.FilterSpec)
    assert config.filter2 == ladderstab.Filter2Spec(mu1=1.8, mu2=0.9, beta=1.0, a1=1.0, a2=0.9)
    assert config.filter == config.filter2.to_filter_spec()
    assert config.system == ladderstab.mathieu_system(0.5, 0.01, p=2, epsilon=0.05)
    assert config.mathieu == {'omega0': 0.5, 'gamma': 0.01}
    assert config.truncation == ladderstab.TruncationConfig(7, 5, 1e-6)
    assert config.simulate == ladderstab.SimConfig()
    assert config.output == {'directory': None, 'formats': ['csv']}
    assert len(config.digest) == 12
    assert config.digest == ladderstab.parse_config(copy.deepcopy(DOCUMENT)).digest


def test_parse_config__general_form():
    config = ladderstab.parse_config(
        {
            'filter': {'H': [[-1.0, 2.0], [-2.0, -1.0]], 'B': [[1.0, 0.0], [0.0, 1.0]], 'a': [1.0, 0.0]},
            'system': {'A0': [[-0.1]], 'A1': [[1.0]], 'p': 1},
        }
    )
    assert config.filter2 is None
    assert config.mathieu is None
    assert np.array_equal(config.filter.H, [[-1.0, 2.0], [-2.0, -1.0]])
    assert config.system.p == 1
    assert config.system.epsilon == 0.0


def test_parse_config__filter_only():
    config = ladderstab.parse_config({'filter': DOCUMENT['filter']})
    assert config.system is None
    assert config.truncation == ladderstab.TruncationConfig()


@pytest.mark.parametrize(
    'document, message',
    [
        ({}, 'Missing key(s) in config: filter'),
        (_document(bogus={}), 'Invalid key(s) in config: bogus'),
        (
            _document(filter=dict(DOCUMENT['filter'], bogus=1)),
            'Invalid key(s) in filter: bogus',
        ),
        ({'filter': {'mu1': 1.8}}, 'Missing key(s) in filter: a1, a2, beta, mu2'),
        (
            {'filter': {'H': [[-1.0, 0.0], [0.0]], 'B': [[1.0]], 'a': [1.0]}},
            'Expected filter.H to have rows of equal length',
        ),
        (
            {'filter': {'H': [[-1.0]], 'B': [[1.0, 0.0], [0.0, 1.0]], 'a': [1.0]}},
            'Inconsistent filter dimensions',
        ),
        (
            {'filter': {'H': [[-1.0]], 'B': [[1.0]], 'a': ['x']}},
            'Expected filter.a to be a list of numbers',
        ),
        (
            _document(filter=dict(DOCUMENT['filter'], mu1='fast')),
            'Expected filter.mu1 to be a number',
        ),
        (
            _document(system={'mathieu': {'omega0': 0.5, 'gamma': 0.01}, 'A0': [[1.0]]}),
            'system takes either mathieu or A0/A1, not both',
        ),
        (_document(system={'A0': [[1.0]]}), 'Missing key(s) in system: A1'),
        (
            _document(system={'A0': [[0.0, 1.0], [1.0, 0.0]], 'A1': [[1.0]]}),
            'Expected A0 and A1 to be square with matching sizes',
        ),
        (
            _document(system={'mathieu': {'omega0': 0.5, 'gamma': 0.01}, 'p': 2.0}),
            'Expected system.p to be an integer',
        ),
        (_document(truncation={'Nm': 1}), 'Invalid truncation section'),
        (_document(truncation={'Nm': 'seven'}), 'Expected truncation.Nm to be a number'),
        (_document(simulate={'paths': 1}), 'Invalid simulate section'),
        (_document(simulate={'paths': 10.7}), 'Expected integer paths; got 10.7'),
        (_document(simulate={'workers': 0}), 'Invalid simulate section'),
        (_document(simulate={'steps': 10}), 'Invalid key(s) in simulate: steps'),
        (_document(output={'formats': ['xml']}), 'Unsupported output format(s)'),
        (_document(output={'directory': 3}), 'Expected output.directory to be a string'),
        ([], 'Expected section \'config\' to be an object'),
    ],
)
def test_parse_config__invalid(document, message):
    with pytest.raises(ladderstab.ConfigError) as excinfo:
        ladderstab.parse_config(document)
    assert message in str(excinfo.value)
    assert excinfo.value.exit_code == 3


@pytest.mark.parametrize(
    'document',
    [
        _document(filter=dict(DOCUMENT['filter'], beta=0.0)),
        _document(system={'mathieu': {'omega0': 0.5, 'gamma': 0.01}, 'epsilon': -1.0}),
        _document(system={'mathieu': {'omega0': 0.5, 'gamma': 0.01}, 'p': 0}),
    ],
)
def test_parse_config__invariant(document):
    with pytest.raises(ladderstab.ValidationError) as excinfo:
        ladderstab.parse_config(document)
    assert excinfo.value.exit_code == 1


def test_load_config(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps(DOCUMENT))
    assert ladderstab.load_config(str(path)) == ladderstab.parse_config(DOCUMENT)


def test_load_config__missing(tmp_path):
    with pytest.raises(ladderstab.ConfigError) as excinfo:
        ladderstab.load_config(str(tmp_path / 'missing.json'))
    assert 'Cannot read config' in str(excinfo.value)


def test_load_config__bad_json(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text('{"filter": ')
    with pytest.raises(ladderstab.ConfigError) as excinfo:
        ladderstab.load_config(str(path))
    assert 'is not valid JSON' in str(excinfo.value)


@pytest.mark.parametrize('name', ['table1.json', 'scalar.json'])
def test_load_config__shipped(name):
    config = ladderstab.load_config(os.path.join(CONFIG_DIR, name))
    assert config.system.epsilon == 0.05
    assert ladderstab.validate_basic_conditions(config.filter).passed
