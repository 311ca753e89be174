from setuptools import setup
from textwrap import dedent

version = '0.1.0'

long_description = dedent(
    '''\
    ladderstab: moment stability of linear systems under colored noise
    ==================================================================

    Spectral perturbation theory and ladder-operator truncations for the
    moment Lyapunov exponents of linear ODEs forced by Ornstein-Uhlenbeck
    colored noise, with a Monte Carlo cross-check.
'''
)


misc_keywords = [
    'colored noise',
    'eigenvalues',
    'Euler-Maruyama',
    'ladder operators',
    'Lyapunov',
    'Mathieu',
    'moment stability',
    'Ornstein-Uhlenbeck',
    'parametric resonance',
    'perturbation theory',
    'power spectral density',
    'stochastic',
]

keywords = misc_keywords

setup(
    name='ladderstab',
    packages=['ladderstab'],
    version=version,
    description='Moment stability of linear ODEs under Ornstein-Uhlenbeck colored noise',
    keywords=keywords,
    long_description=long_description,
    install_requires=['numpy', 'scipy'],
    extras_require={
        'dev': [
            'black==22.3.0',
            'numpy==1.22.4',
            'pytest-mock==3.7.0',
            'pytest==7.1.2',
            'scipy==1.8.1',
            'Sphinx==4.5.0',
            'tox==3.25.0',
        ]
    },
    entry_points={'console_scripts': ['ladderstab=ladderstab._cli:main']},
    classifiers=[
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
