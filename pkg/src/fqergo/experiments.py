"""Scripted numerical experiments: random-state suites for one and two
qubits, the entangled initial-state family and the time-step sweep.

Every randomised quantity is drawn from a generator seeded by a tuple
``(seed, index, stream)``, so results do not depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .feedback import ErrorModel, FQErgoConfig, Trajectory, detect_convergence, run_fqergo
from .hamiltonians import PAULI, drive_set_global, drive_set_local, single_qubit_h0, two_qubit_h0
from .oracle import OracleReport, oracle_report
from .states import DensityMatrix, entanglement_entropy, partial_trace, random_density, random_pure

ONE_QUBIT_ERROR = ErrorModel("random_rotation", 5.0)
TWO_QUBIT_ERROR = ErrorModel("random_hamiltonian", 2.0)

# stream ids inside a seed tuple
_STATE, _RUN, _ORACLE = 0, 1, 2


def random_initial_state(n_qubits: int, seed, kind: str = "pure") -> DensityMatrix:
    if kind == "pure":
        return random_pure(n_qubits, seed)
    if kind == "mixed":
        return random_density(n_qubits, seed)
    raise ValueError(f"state kind must be 'pure' or 'mixed', got {kind!r}")


@dataclass(eq=False)
class SuiteRow:
    index: int
    trajectory: Trajectory
    oracle: OracleReport

    @property
    def estimate(self) -> float:
        t = self.trajectory
        return t.estimated_ergotropy_global if t.estimated_ergotropy_global is not None else t.estimated_ergotropy_local


@dataclass(eq=False)
class SuiteResult:
    system: str
    config: FQErgoConfig
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def deviations(self, what: str = "ergotropy") -> np.ndarray:
        """Estimated minus exact, per row.  ``what`` is ``ergotropy``,
        ``local`` (vs the reduced-state sum) or ``gap``."""
        out = []
        for r in self.rows:
            t, o = r.trajectory, r.oracle
            if what == "ergotropy":
                out.append(r.estimate - o.ergotropy)
            elif what == "local":
                out.append(t.estimated_ergotropy_local - o.local_sum_ergotropy)
            elif what == "gap":
                out.append(t.estimated_gap - o.gap)
            else:
                raise ValueError(what)
        return np.array(out)

    def rms(self, what: str = "ergotropy") -> float:
        d = self.deviations(what)
        return float(np.sqrt(np.mean(d**2)))

    def summary(self) -> dict:
        out = {
            "system": self.system,
            "n_states": len(self.rows),
            "tau": self.config.tau,
            "w": self.config.w,
            "phases": [list(p) for p in self.config.phases],
            "error": str(self.config.error),
            "measurement": self.config.measurement,
            "seed": self.config.seed,
            "rms_ergotropy": self.rms("ergotropy"),
            "max_abs_ergotropy": float(np.max(np.abs(self.deviations("ergotropy")))),
            "max_overestimate": float(np.max(self.deviations("ergotropy"))),
        }
        if self.system == "2q":
            out["rms_local"] = self.rms("local")
            out["rms_gap"] = self.rms("gap")
        return out


def single_qubit_suite(
    n_states: int = 20,
    error_on: bool = False,
    seed: int = 0,
    config: FQErgoConfig | None = None,
    state_kind: str = "pure",
    states=None,
) -> SuiteResult:
    """Run FQErgo on random single-qubit states and pair each run with
    its oracle report.  ``states`` overrides the random draw."""
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    h0 = single_qubit_h0(1.0)
    cfg = config or FQErgoConfig(phases=(("local", 30),))
    cfg = cfg.with_(seed=seed, error=ONE_QUBIT_ERROR if error_on else cfg.error)
    if cfg.drive_set is None:
        cfg = cfg.with_(drive_set=drive_set_local(1))
    result = SuiteResult("1q", cfg)
    for i in range(n_states):
        rho = states[i] if states is not None else random_initial_state(1, (seed, i, _STATE), state_kind)
        traj = run_fqergo(rho, h0, cfg, rng=(seed, i, _RUN))
        result.rows.append(SuiteRow(i, traj, oracle_report(rho, h0)))
    return result


def two_qubit_suite(
    n_states: int = 20,
    error_on: bool = False,
    seed: int = 0,
    config: FQErgoConfig | None = None,
    j: float = 0.01,
    state_kind: str = "pure",
    local_opt: bool = True,
    states=None,
) -> SuiteResult:
    """Local phase then global phase (30 + 30 iterations by default);
    reports local, global and gap estimates against the oracle."""
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    h0 = two_qubit_h0(1.0, j)
    cfg = config or FQErgoConfig(phases=(("local", 30), ("global", 30)))
    cfg = cfg.with_(seed=seed, error=TWO_QUBIT_ERROR if error_on else cfg.error)
    if cfg.drive_set is None:
        cfg = cfg.with_(drive_set=drive_set_global(2, cfg.delta))
    result = SuiteResult("2q", cfg)
    for i in range(n_states):
        rho = states[i] if states is not None else random_initial_state(2, (seed, i, _STATE), state_kind)
        traj = run_fqergo(rho, h0, cfg, rng=(seed, i, _RUN))
        rep = oracle_report(rho, h0, local=True, restarts=32 if local_opt else 0, seed=(seed, i, _ORACLE))
        result.rows.append(SuiteRow(i, traj, rep))
    return result


def entangled_initial_state(nu: float) -> DensityMatrix:
    """``U_G |00>`` with ``U_G`` = controlled-``exp(-i nu sigma_x / 2)``
    after a Hadamard on qubit 0.  ``nu = 0`` is a product state and
    ``nu = pi`` a maximally entangled one."""
    had = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    rx = linalg.unitary_from_generator(PAULI["x"], nu / 2)
    cu = np.zeros((4, 4), dtype=complex)
    cu[:2, :2] = np.eye(2)
    cu[2:, 2:] = rx
    psi = cu @ np.kron(had, np.eye(2)) @ np.array([1, 0, 0, 0], dtype=complex)
    return DensityMatrix(np.outer(psi, psi.conj()))


def entangled_family(nus, config: FQErgoConfig | None = None, j: float = 0.01) -> list[dict]:
    """Local/global estimates for the entangled family (one dict per nu)."""
    h0 = two_qubit_h0(1.0, j)
    cfg = config or FQErgoConfig(phases=(("local", 30), ("global", 30)))
    out = []
    for i, nu in enumerate(nus):
        rho = entangled_initial_state(nu)
        traj = run_fqergo(rho, h0, cfg, rng=(cfg.seed, i, _RUN))
        rep = oracle_report(rho, h0, local=True)
        out.append(
            {
                "nu": float(nu),
                "entropy_bits": entanglement_entropy(partial_trace(rho, [0])),
                "trajectory": traj,
                "oracle": rep,
            }
        )
    return out


@dataclass(eq=False)
class SweepResult:
    system: str
    grid: np.ndarray
    counts: list  # counts[t][s]: iterations to converge or None
    seed: int = 0
    cap: int = 500

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size > 1 and not np.all(np.diff(g) > 0):
            raise ValueError("tau grid must be strictly increasing")
        self.grid = g

    def summary(self) -> list[dict]:
        rows = []
        for tau, ns in zip(self.grid, self.counts):
            got = [n for n in ns if n is not None]
            rows.append(
                {
                    "omega0_tau": float(tau),
                    "converged": len(got),
                    "min": min(got) if got else None,
                    "median": float(np.median(got)) if got else None,
                    "max": max(got) if got else None,
                }
            )
        return rows

    def fraction_in(self, lo: int, hi: int, tau_lo: float, tau_hi: float) -> dict:
        """Per grid point inside ``[tau_lo, tau_hi]``: share of states whose
        ``n`` lies in ``[lo, hi]``."""
        out = {}
        for tau, ns in zip(self.grid, self.counts):
            if tau_lo - 1e-12 <= tau <= tau_hi + 1e-12:
                out[float(tau)] = sum(1 for n in ns if n is not None and lo <= n <= hi) / len(ns)
        return out


def speed_sweep(system: str, tau_grid, n_states: int = 10, seed: int = 0, cap: int = 500, j: float = 0.01) -> SweepResult:
    """Iterations needed to reach the passive energy, for each time step.

    One qubit uses the local drives; two qubits run the global sequence
    from the first iteration since the target is the global passive state.
    """
    grid = np.asarray(tau_grid, dtype=float)
    if np.any(grid <= 0):
        raise ValueError("tau values must be positive")
    if system == "1q":
        h0, ds, phase = single_qubit_h0(1.0), drive_set_local(1), "local"
    elif system == "2q":
        h0, ds, phase = two_qubit_h0(1.0, j), drive_set_global(2), "global"
    else:
        raise ValueError(f"system must be '1q' or '2q', got {system!r}")
    states = [random_initial_state(h0.n_qubits, (seed, i, _STATE)) for i in range(n_states)]
    base = FQErgoConfig(phases=((phase, cap),), drive_set=ds, seed=seed)
    counts = []
    for t_idx, tau in enumerate(grid):
        cfg = base.with_(tau=float(tau))
        row = []
        for i, rho in enumerate(states):
            traj = run_fqergo(rho, h0, cfg, rng=(seed, i, _RUN), stop_when_converged=True)
            row.append(detect_convergence(traj, cfg.tol, cfg.window))
        counts.append(row)
    return SweepResult(system, grid, counts, seed, cap)


def parse_tau_range(text: str) -> np.ndarray:
    """``"0.1:4.0:40"`` -> 40 evenly spaced values from 0.1 to 4.0."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ValueError(f"tau range must look like 'start:stop:count', got {text!r}") from None
    if n < 1 or lo <= 0 or (n > 1 and hi <= lo):
        raise ValueError(f"invalid tau range {text!r}")
    return np.linspace(lo, hi, n)
