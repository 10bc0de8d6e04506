"""Density matrices: construction, validation, random sampling and
simple information-theoretic quantities.

Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
the computational-basis index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import linalg

STATE_TOL = 1e-10


@dataclass(frozen=True)
class Violation:
    invariant: str  # "hermitian" | "trace" | "psd" | "shape"
    magnitude: float
    detail: str = ""

    def __str__(self):
        return f"{self.invariant} violated by {self.magnitude:.3e}" + (f" ({self.detail})" if self.detail else "")


class InvalidStateError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("invalid density matrix: " + "; ".join(str(v) for v in self.violations))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated state of ``n_qubits`` qubits.

    Instances are immutable; ``matrix`` is a read-only view.
    """

    matrix: np.ndarray = field(repr=False)
    n_qubits: int = 0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not self.n_qubits:
            object.__setattr__(self, "n_qubits", int(round(np.log2(m.shape[0]))))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return purity(self.matrix)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits}, purity={self.purity:.6f})"


def _n_qubits_for(dim: int) -> int | None:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    return n if n >= 1 and 2**n == dim else None


def check_density(m, tol: float = STATE_TOL) -> list[Violation]:
    """Return every violated DensityMatrix invariant (empty list if valid)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or _n_qubits_for(a.shape[0]) is None:
        return [Violation("shape", float("nan"), f"need a square power-of-two matrix, got {a.shape}")]
    if a.shape[0] > linalg.MAX_DIM:
        return [Violation("shape", float("nan"), f"dimension {a.shape[0]} exceeds {linalg.MAX_DIM}")]
    out = []
    asym = linalg.hermitian_asymmetry(a)
    if asym > tol:
        out.append(Violation("hermitian", asym))
    tr = np.trace(a)
    if abs(tr - 1) > tol:
        out.append(Violation("trace", float(abs(tr - 1)), f"trace = {tr.real:.12g}"))
    lam_min = float(np.min(np.linalg.eigvalsh(0.5 * (a + a.conj().T))))
    if lam_min < -tol:
        out.append(Violation("psd", -lam_min, f"smallest eigenvalue {lam_min:.6g}"))
    return out


def validate_density(m, tol: float = STATE_TOL) -> DensityMatrix:
    """Wrap ``m`` as a :class:`DensityMatrix` or raise :class:`InvalidStateError`."""
    violations = check_density(m, tol)
    if violations:
        raise InvalidStateError(violations)
    return DensityMatrix(np.asarray(m, dtype=complex))


def pure_state(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def basis_state(bits: str) -> DensityMatrix:
    """Computational basis projector, e.g. ``basis_state("01")``."""
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return pure_state(psi)


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    d = 2**n_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def bell_phi_plus() -> DensityMatrix:
    return pure_state(np.array([1, 0, 0, 1]) / np.sqrt(2))


def density_from_bloch(theta: float, phi: float, epsilon: float) -> DensityMatrix:
    """Single-qubit state ``(1-eps) I/2 + eps |psi><psi|`` with
    ``|psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    m = (1 - epsilon) * np.eye(2) / 2 + epsilon * np.outer(psi, psi.conj())
    return DensityMatrix(m)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator. ``seed`` may be an int or a tuple of ints
    (hashed through ``SeedSequence``, e.g. ``(master_seed, run_index)``)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_pure(n_qubits: int, seed) -> DensityMatrix:
    """Haar-random pure state (normalised complex Gaussian vector)."""
    rng = make_rng(seed)
    psi = _ginibre(rng, 2**n_qubits, 1)[:, 0]
    return pure_state(psi)


def random_density(n_qubits: int, seed, rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^dag / Tr(G G^dag)`` with ``G`` a
    ``d x rank`` Ginibre matrix; ``rank=d`` gives the Hilbert-Schmidt measure."""
    d = 2**n_qubits
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    g = _ginibre(make_rng(seed), d, rank)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def partial_trace(rho, keep: Iterable[int], n_qubits: int | None = None) -> DensityMatrix:
    """Reduced state on the qubits in ``keep`` (ordering of ``keep`` is
    normalised to ascending)."""
    m = np.asarray(rho, dtype=complex)
    n = n_qubits or _n_qubits_for(m.shape[0])
    keep = sorted(set(keep))
    if not keep or len(keep) >= n:
        raise ValueError(f"keep must be a nonempty strict subset of range({n}), got {keep}")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"qubit index out of range for {n} qubits: {keep}")
    traced = [q for q in range(n) if q not in keep]
    t = m.reshape([2] * (2 * n))
    # trace out from the highest index down so axis numbers stay valid
    for q in sorted(traced, reverse=True):
        nq = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + nq)
    dk = 2 ** len(keep)
    return DensityMatrix(t.reshape(dk, dk))


def overlap_fidelity(a, b) -> float:
    """``Tr(rho_a rho_b)``; the overlap, not the Uhlmann fidelity."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise linalg.DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return linalg.expect(a, b)


def purity(rho) -> float:
    return overlap_fidelity(rho, rho)


def entanglement_entropy(rho_reduced) -> float:
    """Von Neumann entropy in bits; eigenvalues below 1e-12 are skipped."""
    lam = np.linalg.eigvalsh(np.asarray(rho_reduced))
    lam = lam[lam > 1e-12]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


# -- text format --------------------------------------------------------
#
#   # optional comment lines
#   dim 4
#   re,im re,im re,im re,im
#   ...            (one line per row)


def format_density(rho) -> str:
    m = np.asarray(rho, dtype=complex)
    lines = [f"dim {m.shape[0]}"]
    for row in m:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_density_text(text: str) -> np.ndarray:
    """Parse the density-matrix text format into a raw complex array.

    Validation of the physical invariants is left to :func:`validate_density`.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("dim"):
        raise ValueError("density file must start with a 'dim <d>' header")
    try:
        d = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ValueError(f"bad header line: {lines[0]!r}") from None
    rows = lines[1:]
    if len(rows) != d:
        raise ValueError(f"expected {d} rows, found {len(rows)}")
    m = np.empty((d, d), dtype=complex)
    for i, row in enumerate(rows):
        cells = row.split()
        if len(cells) != d:
            raise ValueError(f"row {i}: expected {d} entries, found {len(cells)}")
        for j, cell in enumerate(cells):
            re, _, im = cell.partition(",")
            try:
                m[i, j] = complex(float(re), float(im or 0.0))
            except ValueError:
                raise ValueError(f"row {i}, col {j}: cannot parse {cell!r}") from None
    return m


def load_density(path) -> DensityMatrix:
    return validate_density(parse_density_text(Path(path).read_text()))


def save_density(rho, path) -> None:
    Path(path).write_text(format_density(rho))
