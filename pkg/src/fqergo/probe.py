"""Ancilla-probe interferometry.

A probe qubit prepared in |+> controls a unitary on the system; its
transverse polarisation then encodes ``<U>``:

    <sigma_x>_probe = Re Tr(U rho),    <sigma_y>_probe = Im Tr(U rho).

For a Hermitian observable ``A`` we use ``U = exp(-i alpha A)`` so that
``<sigma_y>_probe = -<sin(alpha A)>``, which approaches ``-alpha <A>`` as
``alpha -> 0``.  The probe is the leftmost tensor factor.  Readings never
touch the stored system state (each reading consumes a fresh copy).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

ALPHA_MAX = 0.2

_PLUS = np.full((2, 2), 0.5, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)


@dataclass(frozen=True)
class ProbeReading:
    observable: str  # "sigma_x" | "sigma_y"
    value: float
    n_shots: int | None = None


def controlled_gate(u) -> np.ndarray:
    """``|0><0| (x) I + |1><1| (x) u`` with the probe as control."""
    u = linalg.as_matrix(u)
    if not linalg.is_unitary(u):
        raise ValueError("controlled_gate needs a unitary target")
    d = u.shape[0]
    if 2 * d > linalg.MAX_DIM:
        raise linalg.DimensionError(f"controlled gate on dimension {d} exceeds artifact limit")
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = u
    return out


def probe_state(rho, u) -> np.ndarray:
    """Reduced probe state after controlled-``u`` on ``|+><+| (x) rho``."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    cu = controlled_gate(u)
    joint = cu @ np.kron(_PLUS, rho) @ cu.conj().T
    return np.trace(joint.reshape(2, d, 2, d), axis1=1, axis2=3)


def probe_signal(rho, u, observable: str = "sigma_x") -> float:
    p = probe_state(rho, u)
    op = {"sigma_x": _SX, "sigma_y": _SY}[observable]
    return linalg.expect(op, p)


def probe_expect_unitary(rho, u) -> float:
    """``<sigma_x>_probe``; equals ``Tr(u rho)`` for Hermitian unitary ``u``."""
    return probe_signal(rho, u, "sigma_x")


def check_alpha(alpha: float) -> None:
    if not 0 < alpha <= ALPHA_MAX:
        raise ValueError(f"alpha must lie in (0, {ALPHA_MAX}], got {alpha}")


def probe_expect_hermitian(rho, a, alpha: float) -> float:
    """Estimate ``<A>`` as ``-<sigma_y>_probe / alpha``.

    The exact value returned is ``<sin(alpha A)> / alpha``; the bias
    relative to ``<A>`` is O(alpha^2).
    """
    check_alpha(alpha)
    u = linalg.unitary_from_generator(a, alpha)
    return -probe_signal(rho, u, "sigma_y") / alpha


def shot_sample(expectation: float, n_shots: int, rng: np.random.Generator) -> float:
    """Mean of ``n_shots`` +/-1 outcomes with ``P(+1) = (1 + expectation)/2``."""
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    p = min(1.0, max(0.0, (1.0 + expectation) / 2.0))
    k = rng.binomial(n_shots, p)
    return (2.0 * k - n_shots) / n_shots


def reading(rho, u, observable: str, n_shots: int | None = None, rng=None) -> ProbeReading:
    value = probe_signal(rho, u, observable)
    if n_shots is not None:
        value = shot_sample(value, n_shots, rng)
    return ProbeReading(observable, value, n_shots)
