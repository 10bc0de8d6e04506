import itertools
import warnings

import numpy as np
import pytest
from scipy.stats import unitary_group

from fqergo.hamiltonians import energy, single_qubit_h0, two_qubit_h0
from fqergo.oracle import (
    exact_ergotropy,
    exact_ergotropy_gap,
    exact_local_ergotropy_opt,
    exact_local_ergotropy_sum,
    oracle_report,
    passive_energy,
    passive_state,
    u2_from_angles,
)
from fqergo.states import basis_state, bell_phi_plus, density_from_bloch, random_density, random_pure
from conftest import SX, proj

H1 = single_qubit_h0(1.0)
H2 = two_qubit_h0(1.0, 0.01)


def brute_passive_energy(rho, h):
    """Independent oracle: for diagonal h, the best population permutation."""
    lam = np.sort(np.linalg.eigvalsh(rho))
    e = np.diag(h).real
    return min(float(np.dot(lam, e[list(p)])) for p in itertools.permutations(range(len(e))))


def test_passive_excited_qubit():
    rho_p, u = passive_state(proj([0, 1]), H1)
    np.testing.assert_allclose(rho_p.matrix, proj([1, 0]), atol=1e-14)
    # sigma_x up to phases: |entries| match
    np.testing.assert_allclose(np.abs(u), np.abs(SX), atol=1e-14)


def test_passive_maximally_mixed():
    rho_p, u = passive_state(np.eye(2) / 2, H1)
    np.testing.assert_allclose(rho_p.matrix, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-14)


def test_passive_bloch_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(20):
        th, ph, eps, w = rng.uniform(0, np.pi), rng.uniform(0, 6), rng.uniform(0, 1), rng.uniform(0.5, 2)
        rho_p, _ = passive_state(density_from_bloch(th, ph, eps), single_qubit_h0(w))
        expected = (1 - eps) * np.eye(2) / 2 + eps * proj([1, 0])
        np.testing.assert_allclose(rho_p.matrix, expected, atol=1e-12)


def test_passive_unitary_maps_state():
    rho = random_density(2, 4)
    rho_p, u = passive_state(rho, H2)
    np.testing.assert_allclose(u @ rho.matrix @ u.conj().T, rho_p.matrix, atol=1e-12)


def test_passive_dim_mismatch():
    with pytest.raises(ValueError):
        passive_state(np.eye(4) / 4, H1)


def test_ergotropy_examples():
    assert exact_ergotropy(proj([0, 1]), H1) == pytest.approx(1.0, abs=1e-12)
    assert exact_ergotropy(density_from_bloch(np.pi / 2, 0, 0.5), H1) == pytest.approx(0.25, abs=1e-12)
    assert exact_ergotropy(bell_phi_plus(), H2) == pytest.approx(1.0, abs=1e-12)


def test_ergotropy_bloch_formula():
    # omega0 * eps * (1 - cos theta) / 2
    rng = np.random.default_rng(5)
    for _ in range(30):
        th, eps = rng.uniform(0, np.pi), rng.uniform(0, 1)
        got = exact_ergotropy(density_from_bloch(th, 0.3, eps), H1)
        assert got == pytest.approx(eps * (1 - np.cos(th)) / 2, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_passive_energy_matches_permutation_oracle(n):
    d = 2**n
    h = np.diag(np.random.default_rng(n).uniform(0, 3, d))
    for seed in range(10):
        rho = random_density(n, seed).matrix
        assert passive_energy(rho, h) == pytest.approx(brute_passive_energy(rho, h), abs=1e-12)
        assert energy(passive_state(rho, h)[0], h) == pytest.approx(brute_passive_energy(rho, h), abs=1e-12)


def test_spectrum_preservation_and_idempotence():
    for seed in range(20):
        rho = random_density(2, seed)
        rho_p, _ = passive_state(rho, H2)
        np.testing.assert_allclose(np.sort(rho_p.eigenvalues()), np.sort(rho.eigenvalues()), atol=1e-9)
        assert exact_ergotropy(rho_p, H2) <= 1e-9
        assert exact_ergotropy(rho, H2) >= -1e-9


def test_local_sum_examples():
    assert exact_local_ergotropy_sum(bell_phi_plus(), 1.0) == pytest.approx(0, abs=1e-12)
    assert exact_local_ergotropy_sum(basis_state("11"), 1.0) == pytest.approx(2.0, abs=1e-12)
    assert exact_local_ergotropy_sum(np.kron(proj([0, 1]), np.eye(2) / 2), 1.0) == pytest.approx(1.0, abs=1e-12)


def test_u2_parameterisation_is_unitary():
    rng = np.random.default_rng(0)
    for _ in range(20):
        u = u2_from_angles(*rng.uniform(-4, 4, 4))
        np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-14)


def test_local_opt_excited_product():
    assert exact_local_ergotropy_opt(basis_state("11"), H2) == pytest.approx(2.0, abs=1e-6)


def test_local_opt_bell_brute_force():
    """Local flips trade <ZZ> = +1 for -1, so 2J is extractable locally.

    Independent check: sample 10^4 random product unitaries and compare the
    best energy found with the optimizer's minimum.
    """
    bell = bell_phi_plus().matrix
    h = H2.matrix
    rng = np.random.default_rng(1)
    u1 = unitary_group.rvs(2, size=10_000, random_state=rng)
    u2 = unitary_group.rvs(2, size=10_000, random_state=rng)
    us = np.einsum("nab,ncd->nacbd", u1, u2).reshape(-1, 4, 4)
    rhos = us @ bell @ us.conj().transpose(0, 2, 1)
    es = np.real(np.einsum("ij,nji->n", h, rhos))
    # the marginals stay maximally mixed, so only the ZZ term can move: E >= 1 - J
    assert es.min() >= 0.99 - 1e-9
    flip = np.kron(SX, np.eye(2))
    assert energy(flip @ bell @ flip, h) == pytest.approx(0.99, abs=1e-12)
    assert exact_local_ergotropy_opt(bell, H2) == pytest.approx(0.02, abs=1e-6)


def test_local_opt_uncoupled_equals_sum():
    h = two_qubit_h0(1.0, 0.0)
    for seed in range(3):
        rho = random_density(2, seed)
        assert exact_local_ergotropy_opt(rho, h) == pytest.approx(exact_local_ergotropy_sum(rho, 1.0), abs=1e-6)


def test_gap_examples():
    assert exact_ergotropy_gap(bell_phi_plus(), 1, 0.01) == pytest.approx(1.0, abs=1e-9)
    assert exact_ergotropy_gap(np.kron(random_pure(1, 1).matrix, random_pure(1, 2).matrix), 1, 0) == pytest.approx(
        0, abs=1e-12
    )
    assert exact_ergotropy_gap(basis_state("11"), 1, 0.01) == pytest.approx(0.0, abs=1e-12)


def test_gap_never_below_coupling_slack():
    # global >= local-opt >= local-sum - 2|J|, so the guard should stay quiet
    for j in (0.01, 0.3):
        for seed in range(20):
            rho = random_density(2, seed, rank=1 + seed % 4)
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                assert exact_ergotropy_gap(rho, 1.0, j) >= -2 * j - 1e-12


def test_oracle_report_fields():
    rep = oracle_report(bell_phi_plus(), H2)
    assert rep.ergotropy == pytest.approx(1.0, abs=1e-12)
    assert rep.gap == pytest.approx(1.0, abs=1e-9)
    assert rep.local_sum_ergotropy == pytest.approx(0, abs=1e-12)
    assert rep.local_opt_ergotropy == pytest.approx(0.02, abs=1e-6)
    assert rep.local_opt_converged
    d = rep.to_dict()
    assert set(d) >= {"ergotropy", "passive_energy", "gap", "local_opt_ergotropy"}
    one = oracle_report(proj([1, 0]), H1)
    assert one.ergotropy == 0 and one.gap is None and "gap" not in one.to_dict()


def test_oracle_report_can_skip_search():
    rep = oracle_report(bell_phi_plus(), H2, restarts=0)
    assert rep.local_opt_ergotropy is None and rep.gap == pytest.approx(1.0)


def test_hierarchy_random_states():
    j = H2.coupling
    for seed in range(6):
        rho = random_density(2, seed, rank=1 + seed % 4)
        rep = oracle_report(rho, H2, restarts=16, seed=seed)
        assert rep.local_sum_ergotropy - 2 * abs(j) <= rep.local_opt_ergotropy + 1e-9
        assert rep.local_opt_ergotropy <= rep.ergotropy + 1e-9
        assert rep.local_sum_ergotropy >= -1e-12


def test_minimality_small_certificate():
    rng = np.random.default_rng(2)
    for d, h in ((2, H1.matrix), (4, H2.matrix)):
        rho = random_density(int(np.log2(d)), 8).matrix
        ep = passive_energy(rho, h)
        vs = unitary_group.rvs(d, size=200, random_state=rng)
        es = np.real(np.einsum("ij,nji->n", h, vs @ rho @ vs.conj().transpose(0, 2, 1)))
        assert np.all(ep <= es + 1e-9)
