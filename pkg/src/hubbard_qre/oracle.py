"""Dense exact-diagonalization ground truth for desk-scale instances.

Basis ordering: qubit 0 is the most significant bit of the basis index, so a
single ``Z`` on qubit 0 of two qubits realizes ``diag(1, 1, -1, -1)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from hubbard_qre.errors import ContractViolation, ResourceLimitError, SpecificationError
from hubbard_qre.model import (
    HubbardSpec,
    ObservableSpec,
    PauliOperatorSum,
    encode_hamiltonian,
    encode_observable,
    lesser_green_pair,
)

MAX_MODES = 14
HERMITIAN_TOL = 1e-10
DEGENERACY_TOL = 1e-9


class DenseOperator:
    """Dense ``2^n x 2^n`` matrix realization of a Pauli sum."""

    def __init__(self, matrix: np.ndarray, n_qubits: int, label: str = ""):
        if matrix.shape != (2**n_qubits, 2**n_qubits):
            raise SpecificationError(f"matrix shape {matrix.shape} does not match {n_qubits} qubits")
        self.matrix = matrix
        self.n_qubits = n_qubits
        self.label = label

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0))

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Full eigendecomposition, computed once."""
        return np.linalg.eigh(self.matrix)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, ord=2))


def _pauli_masks(letters: str) -> tuple[int, int, int]:
    n = len(letters)
    x_mask = z_mask = 0
    n_y = 0
    for q, c in enumerate(letters):
        bit = 1 << (n - 1 - q)
        if c in "XY":
            x_mask |= bit
        if c in "ZY":
            z_mask |= bit
        n_y += c == "Y"
    return x_mask, z_mask, n_y


def _popcount_parity(values: np.ndarray) -> np.ndarray:
    parity = np.zeros_like(values)
    v = values.copy()
    while np.any(v):
        parity ^= v & 1
        v >>= 1
    return parity


def realize_dense(op: PauliOperatorSum, max_modes: int = MAX_MODES) -> DenseOperator:
    """Sum of Kronecker products of Pauli letters times coefficients."""
    n = op.n_qubits
    if n > max_modes:
        raise ResourceLimitError(f"{n} modes exceeds the dense oracle limit of {max_modes}")
    dim = 2**n
    cols = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim), dtype=complex)
    for letters, coeff in op.terms.items():
        x_mask, z_mask, n_y = _pauli_masks(letters)
        # P|r> = i^{nY} (-1)^{popcount(r & z)} |r ^ x>
        signs = 1 - 2 * _popcount_parity(cols & z_mask)
        mat[cols ^ x_mask, cols] += coeff * (1j**n_y) * signs
    return DenseOperator(mat, n)


def occupation_numbers(n_qubits: int) -> np.ndarray:
    """Particle number of every computational basis state."""
    idx = np.arange(2**n_qubits, dtype=np.int64)
    counts = np.zeros_like(idx)
    for q in range(n_qubits):
        counts += (idx >> q) & 1
    return counts


@dataclass
class GroundStateResult:
    energy: float
    state: np.ndarray
    degenerate: bool
    gap: float
    hamiltonian: DenseOperator
    particle_sector: int | None = None

    def particle_number(self) -> float:
        occ = occupation_numbers(self.hamiltonian.n_qubits)
        return float(np.sum(occ * np.abs(self.state) ** 2))

    def residual(self) -> float:
        h = self.hamiltonian.matrix
        return float(np.linalg.norm(h @ self.state - self.energy * self.state))


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > np.max(np.abs(vec)) - 1e-9))
    return vec * (abs(vec[k]) / vec[k])


def ground_state(H: DenseOperator, particle_sector: int | None = None) -> GroundStateResult:
    """Lowest eigenpair, optionally within a fixed particle-number sector.

    The sector is taken by restricting to basis states of the right occupation,
    which is exact when ``H`` conserves particle number. ``gap`` is the distance
    to the next distinct level of the same (sector-restricted) spectrum. For a
    degenerate ground level the first eigenvector returned by the solver is kept,
    with its phase fixed so the first dominant component is real and positive.
    """
    err = H.hermiticity_error()
    if err > HERMITIAN_TOL:
        raise ContractViolation(f"Hamiltonian is not Hermitian (max deviation {err:.3g})")
    if particle_sector is None:
        evals, evecs = H.eigensystem
        vec = evecs[:, 0]
    else:
        if not 0 <= particle_sector <= H.n_qubits:
            raise SpecificationError(f"particle sector {particle_sector} outside [0, {H.n_qubits}]")
        basis = np.flatnonzero(occupation_numbers(H.n_qubits) == particle_sector)
        block = H.matrix[np.ix_(basis, basis)]
        evals, sub = np.linalg.eigh(block)
        vec = np.zeros(H.dim, dtype=complex)
        vec[basis] = sub[:, 0]
    e0 = float(evals[0])
    higher = evals[evals > e0 + DEGENERACY_TOL]
    gap = float(higher[0] - e0) if higher.size else 0.0
    degenerate = bool(evals.size > 1 and evals[1] - e0 <= DEGENERACY_TOL)
    vec = _fix_phase(vec / np.linalg.norm(vec))
    return GroundStateResult(e0, vec, degenerate, gap, H, particle_sector)


def _as_dense(op, n_qubits: int) -> DenseOperator:
    if isinstance(op, DenseOperator):
        return op
    if isinstance(op, PauliOperatorSum):
        if op.n_qubits != n_qubits:
            raise SpecificationError(f"operator acts on {op.n_qubits} qubits, state on {n_qubits}")
        return realize_dense(op)
    raise TypeError(f"cannot realize {type(op).__name__}")


def static_expectation(obs, gs: GroundStateResult, spec: HubbardSpec | None = None) -> float:
    """``<psi|O|psi>`` for a Pauli sum, dense operator, or observable spec (needs ``spec``)."""
    if isinstance(obs, ObservableSpec):
        if spec is None:
            raise SpecificationError("encoding an ObservableSpec requires the HubbardSpec")
        obs = encode_observable(obs, spec)
    op = _as_dense(obs, gs.hamiltonian.n_qubits)
    value = np.vdot(gs.state, op.matrix @ gs.state)
    if abs(value.imag) > 1e-10:
        raise ContractViolation(f"expectation value has imaginary part {value.imag:.3g}; operator not Hermitian?")
    return float(value.real)


@dataclass
class CorrelationTrace:
    times: np.ndarray
    values: np.ndarray
    dt: float

    def to_csv(self, path: str | Path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "re_chi", "im_chi"])
            for t, v in zip(self.times, self.values):
                writer.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def time_grid(dt: float, T_max: float) -> np.ndarray:
    if dt <= 0 or T_max < dt:
        raise SpecificationError(f"need dt > 0 and T_max >= dt, got dt={dt}, T_max={T_max}")
    n = int(np.floor(T_max / dt + 1e-9)) + 1
    return np.arange(n) * dt


def correlation_spectrum(A, B, gs: GroundStateResult, weight_tol: float = 1e-12):
    """Exact line spectrum of ``chi(t) = <psi| e^{iHt} A e^{-iHt} B |psi>``.

    Returns ``(frequencies, weights)`` with ``chi(t) = sum_k w_k exp(i f_k t)``,
    where each frequency is an eigenvalue difference ``E_m - E_n``.
    """
    n = gs.hamiltonian.n_qubits
    a, b = _as_dense(A, n).matrix, _as_dense(B, n).matrix
    evals, evecs = gs.hamiltonian.eigensystem
    left = evecs.conj().T @ gs.state
    right = evecs.conj().T @ (b @ gs.state)
    core = evecs.conj().T @ a @ evecs
    w = left.conj()[:, None] * core * right[None, :]
    freqs = evals[:, None] - evals[None, :]
    mask = np.abs(w) > weight_tol
    f, wt = freqs[mask], w[mask]
    # merge lines whose frequencies coincide within the degeneracy tolerance
    order = np.argsort(f, kind="stable")
    f, wt = f[order], wt[order]
    out_f, out_w = [], []
    for fk, wk in zip(f, wt):
        if out_f and abs(fk - out_f[-1]) <= DEGENERACY_TOL:
            out_w[-1] += wk
        else:
            out_f.append(fk)
            out_w.append(wk)
    out_f, out_w = np.array(out_f), np.array(out_w, dtype=complex)
    keep = np.abs(out_w) > weight_tol
    return out_f[keep], out_w[keep]


def dynamic_correlation(A, B, gs: GroundStateResult, dt: float, T_max: float) -> CorrelationTrace:
    """``chi(t) = <psi| A(t) B |psi>`` with ``A(t) = e^{iHt} A e^{-iHt}`` on ``t = 0, dt, ...``."""
    times = time_grid(dt, T_max)
    n = gs.hamiltonian.n_qubits
    a, b = _as_dense(A, n).matrix, _as_dense(B, n).matrix
    evals, evecs = gs.hamiltonian.eigensystem
    left = evecs.conj().T @ gs.state
    right = evecs.conj().T @ (b @ gs.state)
    core = evecs.conj().T @ a @ evecs
    # each time point is independent: rows of the phase matrices
    bra = left.conj()[None, :] * np.exp(1j * np.outer(times, evals))
    ket = right[None, :] * np.exp(-1j * np.outer(times, evals))
    values = np.einsum("tm,mn,tn->t", bra, core, ket)
    return CorrelationTrace(times, values, dt)


def solve_spec(spec: HubbardSpec, particle_sector: int | None = None) -> GroundStateResult:
    return ground_state(realize_dense(encode_hamiltonian(spec)), particle_sector)


def lesser_green(
    spec: HubbardSpec, gs: GroundStateResult, momentum=(0, 0), spin: int = 0, dt: float = 0.5, T_max: float = 100.0
) -> CorrelationTrace:
    """``G^<_k(t) = i <psi| c^dag_k(t) c_k |psi>`` sampled on the time grid."""
    obs = ObservableSpec("lesser_green", momentum=momentum, spin=spin)
    a, b = lesser_green_pair(obs, spec)
    trace = dynamic_correlation(a, b, gs, dt, T_max)
    return CorrelationTrace(trace.times, 1j * trace.values, dt)


def sector_energies(H: DenseOperator, particle_sector: int) -> np.ndarray:
    """All eigenvalues of ``H`` restricted to one particle-number sector."""
    basis = np.flatnonzero(occupation_numbers(H.n_qubits) == particle_sector)
    return np.linalg.eigvalsh(H.matrix[np.ix_(basis, basis)])


def noninteracting_overlap(spec: HubbardSpec, gs: GroundStateResult) -> float:
    """``|<phi_0|psi>|`` with ``phi_0`` the ground state of the same lattice at ``U = 0``.

    The trial state is taken in the particle sector of ``gs`` (or unrestricted
    when ``gs`` has none); it serves as the initial state whose overlap bounds
    the cost of ground-state preparation.
    """
    free = replace(spec, U=0.0, U_prime=0.0, J=0.0, J_prime=0.0)
    trial = solve_spec(free, gs.particle_sector)
    if trial.degenerate:
        raise ContractViolation("non-interacting ground state is degenerate; overlap is not well defined")
    return float(abs(np.vdot(trial.state, gs.state)))
