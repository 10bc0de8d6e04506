import numpy as np
import pytest

from fqergo import hamiltonians as hm
from fqergo.hamiltonians import (
    drive_set_global,
    drive_set_local,
    energy,
    pauli_op,
    single_qubit_h0,
    two_qubit_h0,
    z_delta,
)
from fqergo.states import bell_phi_plus
from conftest import I2, SX, SY, SZ, proj


def _hermitian(m, tol=1e-12):
    return np.max(np.abs(m - m.conj().T)) <= tol


def test_pauli_op_examples():
    np.testing.assert_array_equal(pauli_op("z", 0, 1), np.diag([1, -1]))
    np.testing.assert_array_equal(pauli_op("x", 1, 2), np.kron(I2, SX))
    for axis in "xyz":
        for t in range(3):
            p = pauli_op(axis, t, 3)
            np.testing.assert_allclose(p @ p, np.eye(8), atol=1e-15)


@pytest.mark.parametrize("args", [("x", 2, 2), ("x", -1, 2), ("w", 0, 1)])
def test_pauli_op_rejects(args):
    with pytest.raises(ValueError):
        pauli_op(*args)


def test_single_qubit_h0():
    h = single_qubit_h0(1.0)
    np.testing.assert_allclose(h.matrix, np.diag([0, 1]))
    assert energy(proj([1, 0]), h) == 0
    assert energy(proj([0, 1]), single_qubit_h0(2.5)) == pytest.approx(2.5)


@pytest.mark.parametrize("w", [0, -1])
def test_single_qubit_h0_rejects_nonpositive(w):
    with pytest.raises(ValueError):
        single_qubit_h0(w)


def test_two_qubit_h0_diagonal():
    np.testing.assert_allclose(two_qubit_h0(1, 0.01).matrix, np.diag([0.01, 0.99, 0.99, 2.01]), atol=1e-15)
    np.testing.assert_allclose(two_qubit_h0(1, 0).matrix, np.diag([0, 1, 1, 2]), atol=1e-15)
    m = two_qubit_h0(1.3, -0.02).matrix
    assert _hermitian(m) and np.all(np.isreal(m))


def test_two_qubit_h0_warns_on_large_coupling():
    with pytest.warns(UserWarning):
        h = two_qubit_h0(1, 1.5)
    assert h.matrix[0, 0] == pytest.approx(1.5)


def test_two_qubit_h0_commutes_with_magnetisation():
    h = two_qubit_h0(1, 0.01).matrix
    mz = pauli_op("z", 0, 2) + pauli_op("z", 1, 2)
    assert np.max(np.abs(h @ mz - mz @ h)) <= 1e-12


def test_energy_examples():
    assert energy(proj([0, 1]), single_qubit_h0(1)) == pytest.approx(1)
    assert energy(np.eye(4) / 4, two_qubit_h0(1, 0.01)) == pytest.approx(1.0, abs=1e-12)
    assert energy(bell_phi_plus(), two_qubit_h0(1, 0.01)) == pytest.approx(1.01, abs=1e-12)


def test_energy_dim_mismatch():
    with pytest.raises(ValueError):
        energy(np.eye(2) / 2, two_qubit_h0())


# -- drive sets ---------------------------------------------------------

def test_local_drive_set_pauli_collective_matches_written_form():
    one = drive_set_local(1, per_qubit=False, units="pauli")
    np.testing.assert_array_equal(one.terms[0].generator, SX)
    np.testing.assert_array_equal(one.terms[1].generator, SY)
    two = drive_set_local(2, per_qubit=False, units="pauli")
    np.testing.assert_array_equal(two.terms[0].generator, np.kron(SX, I2) + np.kron(I2, SX))
    np.testing.assert_array_equal(two.terms[1].generator, np.kron(SY, I2) + np.kron(I2, SY))
    assert two.labels == ["X-local", "Y-local"]


def test_local_drive_set_default_spin_per_qubit():
    ds = drive_set_local(2)
    assert ds.labels == ["X0", "Y0", "X1", "Y1"]
    np.testing.assert_array_equal(ds.terms[0].generator, 0.5 * np.kron(SX, I2))
    np.testing.assert_array_equal(ds.terms[3].generator, 0.5 * np.kron(I2, SY))
    assert drive_set_local(1).labels == ["X-local", "Y-local"]


@pytest.mark.parametrize("kw", [{}, {"per_qubit": False}, {"units": "pauli"}])
def test_drive_terms_hermitian_traceless(kw):
    for ds in (drive_set_local(1, **kw), drive_set_local(2, **kw), drive_set_global(2, **kw)):
        for t in ds.terms:
            assert _hermitian(t.generator)
            assert abs(np.trace(t.generator)) < 1e-15


def test_global_drive_set_structure():
    ds = drive_set_global(2, units="pauli", per_qubit=False)
    xy = ds.terms[-1]
    assert xy.label == "XY-global" and xy.active_phase == "global"
    np.testing.assert_array_equal(xy.generator, np.kron(SX, SY) + np.kron(SY, SX))
    labels = [e.label for e in ds.sequence]
    # local channels, then Z_delta, then XY
    assert labels == ["X-local", "Y-local", "Z_delta", "XY-global"]
    assert [e.label for e in ds.active("local")] == ["X-local", "Y-local"]


@pytest.mark.parametrize("kw", [{}, {"per_qubit": False, "units": "pauli"}])
def test_global_restricted_to_local_equals_local_set(kw):
    g = drive_set_global(2, **kw).restricted("local")
    loc = drive_set_local(2, **kw)
    assert g.labels == loc.labels
    for a, b in zip(g.terms, loc.terms):
        np.testing.assert_array_equal(a.generator, b.generator)
    assert not g.gates


def test_global_drive_set_rejects_other_sizes():
    with pytest.raises(ValueError):
        drive_set_global(3)


def test_spin_units_scale_xy_by_quarter():
    np.testing.assert_array_equal(hm.xy_generator("spin"), 0.25 * hm.xy_generator("pauli"))
    with pytest.raises(ValueError):
        drive_set_local(1, units="hbar")


def test_drive_term_unitary_and_commutator():
    t = hm.DriveTerm("x", SX)
    np.testing.assert_allclose(t.unitary(np.pi / 2), -1j * SX, atol=1e-14)
    # i [sigma_y, H0] with H0 = (I - sigma_z)/2 is sigma_x
    c = hm.DriveTerm("y", SY).commutator_observable(single_qubit_h0(1))
    np.testing.assert_allclose(c, SX, atol=1e-15)


def test_drive_set_rejects_empty():
    with pytest.raises(ValueError):
        hm.DriveSet(())


# -- tilted phase gate --------------------------------------------------

def test_z_delta_zero():
    np.testing.assert_allclose(z_delta(0), np.diag([1, 1, -1j, 1j]), atol=1e-15)


@pytest.mark.parametrize("delta", [0.0, 0.1, 0.7, -2.0])
def test_z_delta_unitary(delta):
    z = z_delta(delta)
    np.testing.assert_allclose(z @ z.conj().T, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(np.linalg.svd(z, compute_uv=False), np.ones(4), atol=1e-12)


def test_z_delta_closed_form():
    # exp(-i d sigma_y) = cos d I - i sin d sigma_y, written out by hand
    d = 0.1
    r = np.cos(d) * I2 - 1j * np.sin(d) * SY
    core = np.diag([1, 1, -1j, 1j])
    expected = np.kron(I2, r) @ core @ np.kron(I2, r.conj().T)
    np.testing.assert_allclose(z_delta(d), expected, atol=1e-14)


def test_build_system_names():
    for name in hm.SYSTEMS:
        h0, ds = hm.build_system(name)
        assert ds.n_qubits == h0.n_qubits
    with pytest.raises(ValueError):
        hm.build_system("3q")
