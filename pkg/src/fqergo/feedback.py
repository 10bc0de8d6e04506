"""Feedback (Lyapunov-control) iteration that drives a state towards its
passive state.

Each iteration, for every active drive channel ``H_d``:

    beta = -w <C_d>,   C_d = i [H_d, H_0]
    rho  <- exp(-i beta tau H_d) rho exp(+i beta tau H_d)

With ``beta`` chosen this way the instantaneous energy derivative
``beta <C_d>`` is never positive, so for small enough ``tau`` the energy
``Tr(H_0 rho)`` decreases until every channel's ``<C_d>`` vanishes.  The
energy drop from the initial to the final state estimates the ergotropy.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg, probe
from .hamiltonians import (
    PAULI,
    DriveSet,
    DriveTerm,
    FixedGate,
    Hamiltonian,
    drive_set_global,
    drive_set_local,
    energy,
)
from .oracle import passive_state
from .states import DensityMatrix, make_rng, overlap_fidelity

MEASUREMENT_MODES = ("exact", "probe", "probe_shots")


@dataclass(frozen=True)
class ErrorModel:
    """Unitary error applied once at the end of every iteration.

    ``random_rotation``: rotation by ``angle_deg`` about a fresh uniformly
    random Bloch axis, independently on each qubit.
    ``random_hamiltonian``: ``exp(-i H_err eta)`` with ``H_err`` a fresh
    random Hermitian matrix of unit operator norm and ``eta = angle_deg``.
    """

    kind: str = "none"
    angle_deg: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "random_rotation", "random_hamiltonian"):
            raise ValueError(f"unknown error model {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "ErrorModel":
        """Parse ``"none"``, ``"random_rotation:5deg"`` or ``"random_hamiltonian:2deg"``."""
        text = text.strip()
        if text in ("", "none"):
            return cls()
        m = re.fullmatch(r"(\w+):([0-9.eE+-]+)\s*(deg|rad)?", text)
        if not m:
            raise ValueError(f"cannot parse error model {text!r}")
        angle = float(m.group(2))
        if m.group(3) == "rad":
            angle = math.degrees(angle)
        return cls(m.group(1), angle)

    def __str__(self):
        return "none" if self.kind == "none" else f"{self.kind}:{self.angle_deg:g}deg"

    @property
    def active(self) -> bool:
        return self.kind != "none"


@dataclass(frozen=True)
class FQErgoConfig:
    w: float = 1.0
    tau: float = 0.8
    phases: tuple = (("local", 30),)
    drive_set: DriveSet | None = None
    delta: float = 0.1
    measurement: str = "exact"
    n_shots: int | None = None
    alpha: float = 0.01
    error: ErrorModel = field(default_factory=ErrorModel)
    tol: float = 1e-3
    window: int = 3
    seed: int = 0
    drive_mode: str = "sequential"  # or "combined": one beta for the summed generator
    beta_timing: str = "sequential"  # or "upfront": all betas from the pre-iteration state
    kick: float = 0.5
    kick_threshold: float = 1e-6

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError(f"w must be positive, got {self.w}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.phases:
            raise ValueError("at least one phase is required")
        phases = tuple((str(p), int(n)) for p, n in self.phases)
        for p, n in phases:
            if p not in ("local", "global"):
                raise ValueError(f"phase must be 'local' or 'global', got {p!r}")
            if n < 1:
                raise ValueError(f"iteration count must be >= 1, got {n}")
        object.__setattr__(self, "phases", phases)
        if self.measurement not in MEASUREMENT_MODES:
            raise ValueError(f"measurement must be one of {MEASUREMENT_MODES}")
        if self.measurement == "probe_shots" and not self.n_shots:
            raise ValueError("probe_shots measurement needs n_shots")
        probe.check_alpha(self.alpha)
        if isinstance(self.error, str):
            object.__setattr__(self, "error", ErrorModel.parse(self.error))
        if self.drive_mode not in ("sequential", "combined"):
            raise ValueError(f"bad drive_mode {self.drive_mode!r}")
        if self.beta_timing not in ("sequential", "upfront"):
            raise ValueError(f"bad beta_timing {self.beta_timing!r}")
        if self.tol <= 0 or self.window < 1:
            raise ValueError("convergence needs tol > 0 and window >= 1")

    @property
    def n_iterations(self) -> int:
        return sum(n for _, n in self.phases)

    def with_(self, **changes) -> "FQErgoConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class IterationRecord:
    index: int
    phase: str
    betas: tuple  # ((label, beta), ...)
    energy_after: float
    fidelity_to_initial: float
    fidelity_to_passive: float
    energy_exact: float = float("nan")


@dataclass(eq=False)
class Trajectory:
    initial_state: DensityMatrix
    initial_energy: float
    passive_energy: float
    records: list = field(default_factory=list)
    final_state: DensityMatrix | None = None
    local_end: int | None = None  # iteration index at which the local phase ended
    estimated_ergotropy_local: float | None = None
    estimated_ergotropy_global: float | None = None
    labels: tuple = ()
    h0: Hamiltonian | None = None
    passive_state: DensityMatrix | None = None

    @property
    def energies(self) -> np.ndarray:
        """Recorded energies, initial state first (index = iteration number)."""
        return np.array([self.initial_energy] + [r.energy_after for r in self.records])

    @property
    def exact_energies(self) -> np.ndarray:
        """True energies of the simulated states, whatever the measurement mode."""
        e0 = energy(self.initial_state, self.h0) if self.h0 is not None else self.initial_energy
        return np.array([e0] + [r.energy_exact for r in self.records])

    @property
    def estimated_gap(self) -> float | None:
        if self.estimated_ergotropy_global is None or self.estimated_ergotropy_local is None:
            return None
        return self.estimated_ergotropy_global - self.estimated_ergotropy_local


def lyapunov_coefficient(rho, h0, hd, w: float = 1.0) -> float:
    """``beta = -w Tr(i [H_d, H_0] rho)``.  ``hd`` may be a DriveTerm or a matrix."""
    g = hd.generator if isinstance(hd, DriveTerm) else np.asarray(hd)
    h = np.asarray(h0)
    rho = np.asarray(rho)
    if not (g.shape == h.shape == rho.shape):
        raise linalg.DimensionError(f"shape mismatch: rho {rho.shape}, H0 {h.shape}, H_d {g.shape}")
    c = 1j * linalg.commutator(g, h)
    return -w * linalg.expect(c, rho)


# -- measurement --------------------------------------------------------


class _Meter:
    """Reads <C_d> and <H_0> according to the configured measurement mode.

    Probe unitaries ``exp(-i alpha A)`` are cached per observable.
    """

    def __init__(self, h0, config: FQErgoConfig, rng):
        self.h0 = np.asarray(h0)
        self.config = config
        self.rng = rng
        self._c = {}
        self._probe_u = {}

    def commutator(self, term: DriveTerm) -> np.ndarray:
        key = id(term)
        if key not in self._c:
            self._c[key] = (term, term.commutator_observable(self.h0))
        return self._c[key][1]

    def _expect(self, key, op, rho) -> float:
        cfg = self.config
        if cfg.measurement == "exact":
            return linalg.expect(op, rho)
        if key not in self._probe_u:
            self._probe_u[key] = linalg.unitary_from_generator(op, cfg.alpha)
        sig = probe.probe_signal(rho, self._probe_u[key], "sigma_y")
        if cfg.measurement == "probe_shots":
            sig = probe.shot_sample(sig, cfg.n_shots, self.rng)
        return -sig / cfg.alpha

    def beta(self, rho, term: DriveTerm) -> float:
        c = self.commutator(term)
        return -self.config.w * self._expect(("c", id(term)), c, rho)

    def combined(self, terms) -> DriveTerm:
        key = ("combined",) + tuple(t.label for t in terms)
        if key not in self._c:
            gen = sum(t.generator for t in terms)
            self._c[key] = DriveTerm("+".join(t.label for t in terms), gen)
        return self._c[key]

    def energy(self, rho) -> float:
        return self._expect("h0", self.h0, rho)


# -- error injection ----------------------------------------------------


def random_axis(rng) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def rotation_error_unitary(n_qubits: int, angle_deg: float, rng) -> np.ndarray:
    theta = math.radians(angle_deg)
    u = np.eye(1, dtype=complex)
    for _ in range(n_qubits):
        nx, ny, nz = random_axis(rng)
        gen = nx * PAULI["x"] + ny * PAULI["y"] + nz * PAULI["z"]
        u = np.kron(u, linalg.unitary_from_generator(gen, theta / 2))
    return u


def random_unit_hamiltonian(d: int, rng) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2
    return h / np.linalg.norm(h, 2)


def error_unitary(model: ErrorModel, n_qubits: int, rng) -> np.ndarray:
    if model.kind == "random_rotation":
        return rotation_error_unitary(n_qubits, model.angle_deg, rng)
    if model.kind == "random_hamiltonian":
        h = random_unit_hamiltonian(2**n_qubits, rng)
        return linalg.unitary_from_generator(h, math.radians(model.angle_deg))
    return np.eye(2**n_qubits, dtype=complex)


def inject_unitary_error(rho, model: ErrorModel, rng) -> np.ndarray:
    """Conjugate ``rho`` by one freshly drawn error unitary."""
    if isinstance(model, str):
        model = ErrorModel.parse(model)
    m = np.asarray(rho)
    n = int(round(np.log2(m.shape[0])))
    return linalg.adjoint_action(error_unitary(model, n, make_rng(rng)), m)


# -- iteration ----------------------------------------------------------


def default_drive_set(h0: Hamiltonian, config: FQErgoConfig) -> DriveSet:
    if config.drive_set is not None:
        return config.drive_set
    if any(p == "global" for p, _ in config.phases):
        return drive_set_global(h0.n_qubits, config.delta)
    return drive_set_local(h0.n_qubits)


def _apply_channel(rho, term, beta, tau):
    return linalg.adjoint_action(term.unitary(beta * tau), rho)


def _kick(rho, term, meter, config, rng):
    """Escape a critical point of one channel.

    When the measured beta vanishes the feedback law cannot move the state
    (energy eigenstates are fixed points).  A trial rotation of strength
    ``config.kick`` with a random sign is applied and kept only if the
    measured energy drops; otherwise it is undone exactly.
    """
    beta = config.kick * (1.0 if rng.random() < 0.5 else -1.0)
    e_before = meter.energy(rho)
    trial = _apply_channel(rho, term, beta, config.tau)
    if meter.energy(trial) < e_before - 1e-12:
        return trial, beta
    return rho, 0.0


def fqergo_step(
    rho,
    h0,
    drive_set: DriveSet,
    phase: str,
    config: FQErgoConfig,
    rng,
    *,
    index: int = 0,
    rho0=None,
    rho_passive=None,
    meter: _Meter | None = None,
) -> tuple[np.ndarray, IterationRecord]:
    """Advance one iteration.  Returns the new state and its record.

    Within the iteration the active elements of ``drive_set`` are applied in
    order.  Each channel's beta is measured on the current state
    (``beta_timing="sequential"``) or on the pre-iteration state
    (``"upfront"``).  Fixed gates are applied as they appear in the
    sequence.  An error unitary, if configured, comes last.
    """
    rng = make_rng(rng)
    meter = meter or _Meter(h0, config, rng)
    rho = np.asarray(rho, dtype=complex)
    active = drive_set.active(phase)
    betas = []
    if config.drive_mode == "combined":
        for g in (e for e in active if isinstance(e, FixedGate)):
            rho = linalg.adjoint_action(g.unitary, rho)
        terms = [e for e in active if isinstance(e, DriveTerm)]
        combined = meter.combined(terms)
        beta = meter.beta(rho, combined)
        rho = _apply_channel(rho, combined, beta, config.tau)
        betas.append((combined.label, beta))
    else:
        start = rho
        for elem in active:
            if isinstance(elem, FixedGate):
                rho = linalg.adjoint_action(elem.unitary, rho)
                continue
            beta = meter.beta(start if config.beta_timing == "upfront" else rho, elem)
            if abs(beta) < config.kick_threshold and config.kick > 0:
                rho, beta = _kick(rho, elem, meter, config, rng)
            else:
                rho = _apply_channel(rho, elem, beta, config.tau)
            betas.append((elem.label, beta))
    if config.error.active:
        rho = linalg.adjoint_action(error_unitary(config.error, drive_set.n_qubits, rng), rho)
    rho = 0.5 * (rho + rho.conj().T)
    nan = float("nan")
    record = IterationRecord(
        index=index,
        phase=phase,
        betas=tuple(betas),
        energy_after=meter.energy(rho),
        fidelity_to_initial=overlap_fidelity(rho0, rho) if rho0 is not None else nan,
        fidelity_to_passive=overlap_fidelity(rho_passive, rho) if rho_passive is not None else nan,
        energy_exact=energy(rho, h0),
    )
    return rho, record


def run_fqergo(rho0, h0: Hamiltonian, config: FQErgoConfig, *, rng=None, stop_when_converged: bool = False) -> Trajectory:
    """Run every configured phase in order and record each iteration.

    ``stop_when_converged`` ends the run as soon as
    :func:`detect_convergence` succeeds against the exact passive energy;
    otherwise every configured iteration is executed.
    """
    rng = make_rng(config.seed if rng is None else rng)
    drive_set = default_drive_set(h0, config)
    if drive_set.n_qubits != h0.n_qubits:
        raise ValueError(f"drive set acts on {drive_set.n_qubits} qubits, Hamiltonian on {h0.n_qubits}")
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    if rho0.dim != 2**h0.n_qubits:
        raise linalg.DimensionError("initial state and Hamiltonian dimensions differ")
    rho_p, _ = passive_state(rho0, h0)
    meter = _Meter(h0, config, rng)
    traj = Trajectory(
        initial_state=rho0,
        initial_energy=meter.energy(rho0.matrix),
        passive_energy=energy(rho_p, h0),
        labels=tuple(drive_set.labels),
        h0=h0,
        passive_state=rho_p,
    )
    rho = rho0.matrix
    k = 0
    done = False
    # incremental form of detect_convergence for early stopping
    streak = int(abs(traj.initial_energy - traj.passive_energy) <= config.tol)
    for phase, count in config.phases:
        for _ in range(count):
            k += 1
            rho, rec = fqergo_step(
                rho, h0, drive_set, phase, config, rng, index=k, rho0=rho0.matrix, rho_passive=rho_p.matrix, meter=meter
            )
            traj.records.append(rec)
            streak = streak + 1 if abs(rec.energy_after - traj.passive_energy) <= config.tol else 0
            if stop_when_converged and streak >= config.window:
                done = True
                break
        if phase == "local":
            traj.local_end = k
            traj.estimated_ergotropy_local = traj.initial_energy - traj.records[-1].energy_after
        else:
            traj.estimated_ergotropy_global = traj.initial_energy - traj.records[-1].energy_after
        if done:
            break
    traj.final_state = DensityMatrix(rho)
    return traj


def estimate_ergotropy(traj: Trajectory, h0=None) -> float:
    """Initial minus final energy.  With ``h0`` the energies are recomputed
    exactly from the stored states instead of using recorded readings."""
    if not traj.records:
        raise ValueError("trajectory has no iterations")
    if h0 is not None:
        return energy(traj.initial_state, h0) - energy(traj.final_state, h0)
    return traj.initial_energy - traj.records[-1].energy_after


def min_energy_estimate(traj: Trajectory) -> float:
    """Initial energy minus the lowest recorded energy (diagnostic)."""
    if not traj.records:
        raise ValueError("trajectory has no iterations")
    return traj.initial_energy - float(np.min(traj.energies))


def detect_convergence(traj, tol: float = 1e-3, window: int = 3, target: float | None = None) -> int | None:
    """Smallest iteration ``k`` with ``|E_j - target| <= tol`` for
    ``j = k .. k+window-1``; ``None`` if never reached.

    ``traj`` may be a Trajectory (target defaults to its passive energy) or
    a plain energy sequence with index 0 being the initial state.
    """
    if tol <= 0 or window < 1:
        raise ValueError("need tol > 0 and window >= 1")
    if isinstance(traj, Trajectory):
        energies = traj.energies
        target = traj.passive_energy if target is None else target
    else:
        energies = np.asarray(traj, dtype=float)
        if target is None:
            raise ValueError("target energy required for a bare energy sequence")
    ok = np.abs(energies - target) <= tol
    run = 0
    for j, flag in enumerate(ok):
        run = run + 1 if flag else 0
        if run == window:
            return j - window + 1
    return None


def detect_saturation(energies, tol: float = 1e-3, window: int = 3) -> int | None:
    """Smallest ``k`` such that the next ``window`` energy steps all change
    by at most ``tol``; a plateau detector that needs no target."""
    steps = np.abs(np.diff(np.asarray(energies, dtype=float))) <= tol
    run = 0
    for j, flag in enumerate(steps):
        run = run + 1 if flag else 0
        if run == window:
            return j - window + 1
    return None
