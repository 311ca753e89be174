import ladderstab
import numpy as np
import pytest


def _random_drift(rng, n):
    """Stable drift with well-separated eigenvalues, optionally one complex pair."""
    mu = 0.5 + np.cumsum(rng.uniform(0.3, 1.0, n))
    M = np.diag(-mu)
    pair = n >= 2 and rng.random() < 0.5
    if pair:
        w = rng.uniform(0.5, 2.0)
        M[1, 1] = M[0, 0]
        M[0, 1], M[1, 0] = w, -w
    N = np.triu(rng.normal(scale=0.3, size=(n, n)), k=1)
    if pair:
        N[0, 1] = 0.0
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    return Q @ (M + N) @ Q.T


@pytest.fixture
def random_filter():
    def make(seed, n=None):
        rng = np.random.default_rng(seed)
        n = n or int(rng.integers(1, 4))
        G = rng.normal(size=(n, n))
        return ladderstab.FilterSpec(
            H=_random_drift(rng, n), B=G @ G.T + 0.1 * np.eye(n), a=rng.normal(size=n)
        )

    return make


@pytest.fixture
def random_system():
    """Second-moment system with dominant pair ``(0, 0)`` (real spectrum) or
    ``(0, 1)`` (complex pair), returned together with that pair.
    """

    def make(seed):
        rng = np.random.default_rng(seed + 1000)
        if rng.random() < 0.5:
            sigma0 = -rng.uniform(0.1, 0.5)
            sigma = np.array([sigma0, sigma0 - rng.uniform(0.5, 2.0)])
            theta, shear = rng.uniform(0.0, np.pi), rng.uniform(-1.0, 1.0)
            rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
            Q = np.array([[1.0, shear], [0.0, 1.0]]) @ rotation
            A0 = Q @ np.diag(sigma) @ np.linalg.inv(Q)
            pair = (0, 0)
        else:
            omega0, gamma = rng.uniform(0.3, 1.5), rng.uniform(0.01, 0.3)
            A0 = np.array([[0.0, 1.0], [-omega0 ** 2, -gamma]])
            pair = (0, 1)
        A1 = rng.normal(size=(2, 2))
        return ladderstab.SystemSpec(A0=A0, A1=A1, p=2), pair

    return make
