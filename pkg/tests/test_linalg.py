import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqergo import linalg
from conftest import I2, SX, SY, SZ, proj, random_hermitian

DIMS = [2, 4, 8, 16, 32]


def test_kron_identity():
    np.testing.assert_array_equal(linalg.kron(I2, I2), np.eye(4))


def test_kron_sigma_x_on_qubit_0():
    out = linalg.kron(SX, I2)
    # |00> -> |10>, |01> -> |11>
    expected = np.zeros((4, 4))
    expected[2, 0] = expected[0, 2] = expected[3, 1] = expected[1, 3] = 1
    np.testing.assert_array_equal(out, expected)


def test_kron_zz_diagonal():
    np.testing.assert_array_equal(linalg.kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_rejects_oversized():
    with pytest.raises(linalg.DimensionError):
        linalg.kron(np.eye(8), np.eye(8))


def test_eig_pauli_z():
    w, _ = linalg.hermitian_eig(SZ)
    np.testing.assert_allclose(w, [-1, 1])


def test_eig_pauli_x_vectors():
    w, v = linalg.hermitian_eig(SX)
    np.testing.assert_allclose(w, [-1, 1])
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(abs(np.vdot(minus, v[:, 0])) - 1) < 1e-12
    assert abs(abs(np.vdot(plus, v[:, 1])) - 1) < 1e-12


def test_eig_single_qubit_h0():
    w, _ = linalg.hermitian_eig((I2 - SZ) / 2)
    np.testing.assert_allclose(w, [0, 1], atol=1e-15)


def test_eig_rejects_non_hermitian():
    with pytest.raises(linalg.NotHermitianError) as err:
        linalg.hermitian_eig(np.array([[0, 1], [0.5, 0]]))
    assert err.value.asymmetry == pytest.approx(0.5)


@pytest.mark.parametrize("d", DIMS)
def test_eig_reconstruction_random(d):
    rng = np.random.default_rng(d)
    for _ in range(100):
        h = random_hermitian(d, rng)
        w, v = linalg.hermitian_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-10 * max(1, np.abs(h).max())
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-10


def test_unitary_zero_exponent(rng):
    h = random_hermitian(4, rng)
    np.testing.assert_allclose(linalg.unitary_from_generator(h, 0.0), np.eye(4), atol=1e-14)


def test_unitary_pauli_x_half_pi():
    np.testing.assert_allclose(linalg.unitary_from_generator(SX, np.pi / 2), -1j * SX, atol=1e-14)


def test_unitary_diagonal_generator():
    expected = np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)])
    np.testing.assert_allclose(linalg.unitary_from_generator(SZ, np.pi / 4), expected, atol=1e-14)


def test_unitary_rejects_non_hermitian():
    with pytest.raises(linalg.NotHermitianError):
        linalg.unitary_from_generator(np.array([[0, 1], [0, 0]]), 1.0)


def test_adjoint_identity(rng):
    rho = proj([0.6, 0.8j])
    np.testing.assert_allclose(linalg.adjoint_action(np.eye(2), rho), rho)


def test_adjoint_bit_flip():
    np.testing.assert_allclose(linalg.adjoint_action(SX, proj([1, 0])), proj([0, 1]))


def test_adjoint_y_quarter_turn_makes_plus():
    # exp(-i sigma_y pi/4) = cos(pi/4) I - i sin(pi/4) sigma_y = [[c, -s], [s, c]]
    c = s = np.sqrt(0.5)
    u = np.array([[c, -s], [s, c]])
    np.testing.assert_allclose(linalg.unitary_from_generator(SY, np.pi / 4), u, atol=1e-14)
    np.testing.assert_allclose(linalg.adjoint_action(u, proj([1, 0])), np.full((2, 2), 0.5), atol=1e-14)


def test_adjoint_dim_mismatch():
    with pytest.raises(linalg.DimensionError):
        linalg.adjoint_action(np.eye(4), np.eye(2) / 2)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.sampled_from(DIMS),
    s=st.floats(-5, 5),
    t=st.floats(-5, 5),
)
def test_exponential_group_property(seed, d, s, t):
    h = random_hermitian(d, np.random.default_rng(seed))
    lhs = linalg.unitary_from_generator(h, s) @ linalg.unitary_from_generator(h, t)
    rhs = linalg.unitary_from_generator(h, s + t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9
    assert linalg.is_unitary(rhs)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([2, 4, 8]))
def test_adjoint_preserves_trace_and_spectrum(seed, d):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    u = linalg.unitary_from_generator(random_hermitian(d, rng), 1.0)
    out = linalg.adjoint_action(u, rho)
    assert abs(np.trace(out) - 1) <= 1e-12
    np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-9)
