import ladderstab
import numpy as np
import pytest


def test__eig_dense__biorthonormal():
    M = np.array([[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [1.0, 0.0, -1.0]])
    decomposition = ladderstab.eig_dense(M, normalize=True)
    values, right, left = decomposition.values, decomposition.right, decomposition.left
    assert np.allclose(M @ right, right * values[np.newaxis, :], atol=1e-10)
    assert np.allclose(left.conj().T @ M, values[:, np.newaxis] * left.conj().T, atol=1e-10)
    assert np.allclose(left.conj().T @ right, np.eye(3), atol=1e-10)
    assert np.allclose(np.linalg.norm(right, axis=0), 1.0)
    assert decomposition.repeated == []


def test__eig_dense__phase_fixed():
    decomposition = ladderstab.eig_dense(np.array([[1.0, 2.0], [-3.0, 1.0]]))
    for column in decomposition.right.T:
        pivot = column[np.argmax(np.abs(column))]
        assert abs(pivot.imag) < 1e-12
        assert pivot.real > 0


@pytest.mark.parametrize('M', [np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]])])
def test__eig_dense__repeated(M):
    decomposition = ladderstab.eig_dense(M)
    assert decomposition.repeated == [(0, 1)]
    with pytest.raises(ladderstab.NumericalError) as excinfo:
        ladderstab.eig_dense(M, normalize=True)
    assert 'repeated' in str(excinfo.value)
    assert excinfo.value.diagnostics['repeated'] == [(0, 1)]


def test__eig_dense__not_square():
    with pytest.raises(ValueError) as excinfo:
        ladderstab.eig_dense(np.zeros((2, 3)))
    assert str(excinfo.value) == 'Expected M to be a square matrix; got shape (2, 3)'


def test__eig_dense__solver_failure(mocker):
    mocker.patch.object(
        ladderstab._numerics.scipy.linalg, 'eig', side_effect=np.linalg.LinAlgError('no convergence')
    )
    with pytest.raises(ladderstab.NumericalError) as excinfo:
        ladderstab.eig_dense(np.eye(2))
    assert str(excinfo.value) == 'Eigensolver failed: no convergence'
    assert excinfo.value.diagnostics == {'shape': (2, 2)}


def test__biorthonormalize__defective():
    with pytest.raises(ladderstab.NumericalError) as excinfo:
        ladderstab.biorthonormalize(np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert excinfo.value.diagnostics['defective'] == [1]


def test__spectral_order():
    values = np.array([-1 + 1j, -1, -1 - 1j, 0.5])
    assert ladderstab._numerics.spectral_order(values) == [3, 1, 2, 0]


def test__eigvals_dense():
    values = ladderstab.eigvals_dense(np.diag([3.0, -1.0]))
    assert sorted(values.real) == [-1.0, 3.0]


@pytest.mark.parametrize(
    'H, B',
    [
        ([[-2.0]], [[4.0]]),
        ([[-1.8, 0.0], [1.0, -0.9]], [[1.0, 0.0], [0.0, 0.0]]),
        ([[-1.0, 2.0], [-2.0, -1.0]], [[1.0, 0.0], [0.0, 1.0]]),
    ],
)
def test__lyapunov_solve(H, B):
    H, B = np.array(H), np.array(B)
    X = ladderstab.lyapunov_solve(H, B)
    assert np.allclose(H @ X + X @ H.T, -B, atol=1e-12)
    assert np.allclose(X, X.T)


def test__lyapunov_solve__scalar():
    assert ladderstab.lyapunov_solve([[-2.0]], [[4.0]]) == pytest.approx(np.array([[1.0]]))


def test__lyapunov_solve__kronecker_fallback(mocker):
    H = np.array([[-1.8, 0.0], [1.0, -0.9]])
    B = np.diag([1.0, 0.0])
    expected = ladderstab.lyapunov_solve(H, B)
    mocker.patch.object(
        ladderstab._numerics.scipy.linalg,
        'solve_continuous_lyapunov',
        side_effect=np.linalg.LinAlgError('schur failed'),
    )
    kronecker = mocker.spy(ladderstab._numerics, '_lyapunov_kronecker')
    X = ladderstab.lyapunov_solve(H, B)
    assert kronecker.call_count == 1
    assert np.allclose(X, expected, atol=1e-12)


def test__lyapunov_solve__unstable():
    with pytest.raises(ladderstab.NumericalError) as excinfo:
        ladderstab.lyapunov_solve([[1.0, 0.0], [0.0, -1.0]], np.eye(2))
    assert 'not stable' in str(excinfo.value)
    assert excinfo.value.exit_code == 2


def test__expm():
    t = np.pi / 2
    assert np.allclose(
        ladderstab.expm([[0.0, 1.0], [-1.0, 0.0]], t), [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12
    )
    assert np.allclose(ladderstab.expm(np.zeros((3, 3))), np.eye(3))


def test__expm__semigroup():
    M = np.array([[-0.3, 1.2, 0.0], [-0.8, -0.1, 0.4], [0.2, 0.0, -0.5]])
    s, t = 0.7, 1.9
    assert np.allclose(
        ladderstab.expm(M, s + t), ladderstab.expm(M, s) @ ladderstab.expm(M, t), atol=1e-12
    )


def test__expm__taylor_series():
    M = np.array([[0.1, -0.2], [0.3, 0.05]])
    t = 0.5
    expected = np.eye(2)
    term = np.eye(2)
    for k in range(1, 30):
        term = term @ M * t / k
        expected = expected + term
    assert np.allclose(ladderstab.expm(M, t), expected, atol=1e-14)


def test__eig_dense__reconstruction():
    M = np.array([[0.0, 1.0, 0.0], [-2.0, -0.3, 0.5], [0.1, 0.0, -1.5]])
    decomposition = ladderstab.eig_dense(M, normalize=True)
    reconstructed = (
        decomposition.right @ np.diag(decomposition.values) @ decomposition.left.conj().T
    )
    assert np.allclose(reconstructed, M, atol=1e-10)


@pytest.mark.parametrize('seed', range(20))
def test__lyapunov_solve__positive_semidefinite(seed):
    rng = np.random.default_rng(seed)
    n = 3
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    H = Q @ (np.diag(-rng.uniform(0.2, 2.0, n)) + np.triu(rng.normal(size=(n, n)), k=1)) @ Q.T
    G = rng.normal(size=(n, 2))
    X = ladderstab.lyapunov_solve(H, G @ G.T)
    assert np.allclose(X, X.T)
    assert np.linalg.eigvalsh(X).min() >= -1e-10 * max(1.0, np.abs(X).max())


def test__inner__conjugates_first_argument():
    assert ladderstab._utils.inner([1j, 0.0], [1.0, 0.0]) == -1j
    assert ladderstab._utils.inner([1.0, 2.0], [3.0, 4.0]) == 11.0
