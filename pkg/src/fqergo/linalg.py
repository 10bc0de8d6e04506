"""Dense complex matrix kernel.

Everything here operates on plain ``numpy`` arrays of dtype complex128.
Dimensions are restricted to powers of two between 2 and 32, which is all
a desk-scale qubit register needs.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

MAX_DIM = 32
HERMITIAN_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when operand shapes are incompatible or exceed ``MAX_DIM``."""


class NotHermitianError(ValueError):
    """Raised for a matrix that should be Hermitian but is not.

    ``asymmetry`` holds the measured max |h - h^dagger| entry.
    """

    def __init__(self, asymmetry: float, tol: float = HERMITIAN_TOL):
        self.asymmetry = float(asymmetry)
        super().__init__(f"matrix is not Hermitian: max|h - h^dag| = {asymmetry:.3e} > {tol:.1e}")


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM or a.shape[1] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape} exceeds artifact limit {MAX_DIM}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def hermitian_asymmetry(h) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected a square matrix, got {h.shape}")
    asym = hermitian_asymmetry(h)
    if asym > tol:
        raise NotHermitianError(asym, tol)
    return h


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b`` with ``a`` as the leftmost factor."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"kron result {rows}x{cols} exceeds artifact limit {MAX_DIM}")
    return np.kron(a, b)


def kron_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def hermitian_eig(h) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrised before being handed to LAPACK so that the
    returned eigenvectors form an exactly unitary set even when ``h``
    carries round-off asymmetry below the tolerance.
    """
    h = check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    return HermitianEig(w, v)


def unitary_from_generator(h, s: float) -> np.ndarray:
    """Return ``exp(-i s h)`` for Hermitian ``h``."""
    w, v = hermitian_eig(h)
    return exp_from_eig(w, v, s)


def exp_from_eig(w: np.ndarray, v: np.ndarray, s: float) -> np.ndarray:
    # (v * phases) scales columns; avoids building diag()
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def adjoint_action(u, rho) -> np.ndarray:
    """Conjugate ``rho`` by ``u``: returns ``u rho u^dagger``."""
    u = np.asarray(u)
    rho = np.asarray(rho)
    if u.shape[1] != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"cannot conjugate {rho.shape} by {u.shape}")
    return u @ rho @ u.conj().T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


def expect(op, rho) -> float:
    """Real part of ``Tr(op rho)``."""
    # sum(A * B.T) == Tr(A B) without forming the product
    return float(np.real(np.sum(np.asarray(op) * np.asarray(rho).T)))
