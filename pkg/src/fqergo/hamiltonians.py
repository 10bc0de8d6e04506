"""System Hamiltonians, drive channels, the tilted phase gate and energy.

Drive generators default to NMR spin-operator units, ``I_a = sigma_a / 2``,
so that a two-body term ``I_x I_y`` carries a factor 1/4.  Pass
``units="pauli"`` to get bare Pauli strings instead.  The choice rescales
the effective step ``w * tau`` per channel, which is why the time steps
quoted for the protocol (``omega0 * tau`` of order 1) are meaningful only
together with the unit choice.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PHASES = ("local", "global")
UNIT_SCALE = {"spin": 0.5, "pauli": 1.0}


def pauli_op(axis: str, target: int, n_qubits: int) -> np.ndarray:
    """``I (x) ... (x) sigma_axis (x) ... (x) I`` with sigma on qubit ``target``."""
    axis = axis.lower()
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    if not 0 <= target < n_qubits:
        raise ValueError(f"target {target} out of range for {n_qubits} qubits")
    return linalg.kron_all(*[PAULI[axis] if q == target else PAULI["i"] for q in range(n_qubits)])


def pauli_string(label: str) -> np.ndarray:
    """Tensor product for a label such as ``"xy"`` or ``"iz"``."""
    return linalg.kron_all(*[PAULI[c] for c in label.lower()])


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    matrix: np.ndarray = field(repr=False)
    n_qubits: int
    name: str = ""
    omega0: float = 1.0
    coupling: float = 0.0

    def __post_init__(self):
        m = linalg.check_hermitian(self.matrix, tol=1e-12)
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def single_qubit_h0(omega0: float = 1.0) -> Hamiltonian:
    """``omega0 (I - sigma_z) / 2`` = diag(0, omega0)."""
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    m = omega0 * (PAULI["i"] - PAULI["z"]) / 2
    return Hamiltonian(m, 1, name="1q", omega0=omega0)


def two_qubit_h0(omega0: float = 1.0, j: float = 0.01) -> Hamiltonian:
    """``omega0 (II - (ZI + IZ)/2) + J ZZ``; diagonal (J, w-J, w-J, 2w+J)."""
    if omega0 <= 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if abs(j) >= abs(omega0):
        warnings.warn(f"two-qubit model assumes |J| << |omega0|; got J={j}, omega0={omega0}", stacklevel=2)
    ii = pauli_string("ii")
    m = omega0 * (ii - (pauli_string("zi") + pauli_string("iz")) / 2) + j * pauli_string("zz")
    return Hamiltonian(m, 2, name="2q", omega0=omega0, coupling=j)


def local_hamiltonian(omega0: float = 1.0) -> Hamiltonian:
    """Per-qubit Hamiltonian used for the reduced-state ergotropies."""
    return single_qubit_h0(omega0)


@dataclass(frozen=True, eq=False)
class DriveTerm:
    """One feedback channel: a Hermitian generator with its own beta."""

    label: str
    generator: np.ndarray = field(repr=False)
    active_phase: str = "both"  # "local" | "global" | "both"

    def __post_init__(self):
        g = linalg.check_hermitian(self.generator).copy()
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        if self.active_phase not in ("local", "global", "both"):
            raise ValueError(f"bad active_phase {self.active_phase!r}")

    def active_in(self, phase: str) -> bool:
        return self.active_phase in (phase, "both")

    @cached_property
    def _eig(self):
        return linalg.hermitian_eig(self.generator)

    def unitary(self, beta_tau: float) -> np.ndarray:
        """``exp(-i beta tau H_d)`` from the cached eigendecomposition."""
        w, v = self._eig
        return linalg.exp_from_eig(w, v, beta_tau)

    def commutator_observable(self, h0) -> np.ndarray:
        """``C_d = i [H_d, H_0]``."""
        return 1j * linalg.commutator(self.generator, np.asarray(h0))


@dataclass(frozen=True, eq=False)
class FixedGate:
    """A gate applied once per iteration without feedback (e.g. Z_delta)."""

    label: str
    unitary: np.ndarray = field(repr=False)
    active_phase: str = "global"

    def active_in(self, phase: str) -> bool:
        return self.active_phase in (phase, "both")


@dataclass(frozen=True)
class DriveSet:
    """Ordered per-iteration sequence of drive channels and fixed gates."""

    sequence: tuple
    name: str = ""

    def __post_init__(self):
        if not self.sequence:
            raise ValueError("a drive set needs at least one element")
        if not any(isinstance(e, DriveTerm) for e in self.sequence):
            raise ValueError("a drive set needs at least one DriveTerm")

    @property
    def terms(self) -> list[DriveTerm]:
        return [e for e in self.sequence if isinstance(e, DriveTerm)]

    @property
    def gates(self) -> list[FixedGate]:
        return [e for e in self.sequence if isinstance(e, FixedGate)]

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.terms]

    def active(self, phase: str) -> list:
        return [e for e in self.sequence if e.active_in(phase)]

    def restricted(self, phase: str) -> "DriveSet":
        return DriveSet(tuple(self.active(phase)), name=f"{self.name}[{phase}]")

    @property
    def n_qubits(self) -> int:
        return int(round(np.log2(self.terms[0].generator.shape[0])))


def _local_terms(n_qubits: int, per_qubit: bool, units: str, phase: str) -> list[DriveTerm]:
    s = UNIT_SCALE[units]
    if per_qubit and n_qubits > 1:
        return [
            DriveTerm(f"{a.upper()}{q}", s * pauli_op(a, q, n_qubits), phase)
            for q in range(n_qubits)
            for a in ("x", "y")
        ]
    return [
        DriveTerm(f"{a.upper()}-local", s * sum(pauli_op(a, q, n_qubits) for q in range(n_qubits)), phase)
        for a in ("x", "y")
    ]


def drive_set_local(n_qubits: int, per_qubit: bool = True, units: str = "spin") -> DriveSet:
    """X and Y drives on every qubit.

    With ``per_qubit=False`` the X drive is the collective ``sum_i sigma_x^i``
    (one beta shared by all qubits), likewise for Y.  The default gives each
    qubit its own X and Y channel; a shared beta restricts the reachable
    unitaries to ``U (x) U`` and cannot reach the local passive state in
    general.
    """
    if n_qubits not in (1, 2, 3):
        raise ValueError(f"local drive sets support 1-3 qubits, got {n_qubits}")
    _check_units(units)
    return DriveSet(tuple(_local_terms(n_qubits, per_qubit, units, "both")), name="local")


def xy_generator(units: str = "spin") -> np.ndarray:
    s = UNIT_SCALE[units]
    return s * s * (pauli_string("xy") + pauli_string("yx"))


def drive_set_global(
    n_qubits: int = 2, delta: float = 0.1, per_qubit: bool = True, units: str = "spin"
) -> DriveSet:
    """Local channels (both phases), then Z_delta and the XY channel (global phase only)."""
    if n_qubits != 2:
        raise ValueError("global drive sets are only defined for two qubits")
    _check_units(units)
    seq = _local_terms(2, per_qubit, units, "both")
    seq.append(FixedGate("Z_delta", z_delta(delta), "global"))
    seq.append(DriveTerm("XY-global", xy_generator(units), "global"))
    return DriveSet(tuple(seq), name="global")


def _check_units(units):
    if units not in UNIT_SCALE:
        raise ValueError(f"units must be one of {sorted(UNIT_SCALE)}, got {units!r}")


def z_delta(delta: float) -> np.ndarray:
    """Tilted phase gate: a controlled ``exp(-i sigma_z pi/2)`` on qubit 1,
    conjugated by ``exp(-i delta I (x) sigma_y)``."""
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    core = linalg.kron(p0, PAULI["i"]) + linalg.kron(p1, linalg.unitary_from_generator(PAULI["z"], np.pi / 2))
    r = linalg.unitary_from_generator(pauli_string("iy"), delta)
    return r @ core @ r.conj().T


def energy(rho, h0) -> float:
    """``Tr(H_0 rho)``."""
    rho = np.asarray(rho)
    h = np.asarray(h0)
    if rho.shape != h.shape:
        raise linalg.DimensionError(f"state {rho.shape} and Hamiltonian {h.shape} differ in shape")
    return linalg.expect(h, rho)


# Names addressable from config files and the CLI.
SYSTEMS = {
    "1q-default": lambda omega0=1.0, j=0.0, delta=0.1, per_qubit=True, units="spin": (
        single_qubit_h0(omega0),
        drive_set_local(1, per_qubit, units),
    ),
    "2q-default": lambda omega0=1.0, j=0.01, delta=0.1, per_qubit=True, units="spin": (
        two_qubit_h0(omega0, j),
        drive_set_local(2, per_qubit, units),
    ),
    "2q-global": lambda omega0=1.0, j=0.01, delta=0.1, per_qubit=True, units="spin": (
        two_qubit_h0(omega0, j),
        drive_set_global(2, delta, per_qubit, units),
    ),
}


def build_system(name: str, **params) -> tuple[Hamiltonian, DriveSet]:
    try:
        factory = SYSTEMS[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}") from None
    return factory(**params)
