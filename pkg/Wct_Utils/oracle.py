"""
Brute-force reference in the full 2^n Hilbert space of all branch and wire qubits.

Qubit q is the canonical site position q, big-endian: |1_j> is basis index 2^(n-1-j).
|1> is the σz = -1 state. The Hamiltonian is
    Σ_bonds J (XX + YY) + Σ_bonds Δ ZZ + Σ_sites h (1 - Z)
stored as a scipy.sparse matrix; evolution uses expm_multiply.
"""

from typing import Sequence
import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .model import ChainSpec, NoiseField
from .metrics import BobDensityMatrix
from .errors import OracleSizeError

PAULI_X = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
PAULI_Y = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))
PAULI_Z = sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex))
SIGMA_YY = np.kron(PAULI_Y.toarray(), PAULI_Y.toarray())
RANK_TOL = 1e-14


def _check_size(n: int, max_qubits: int | None):
    if max_qubits is None:
        from . import config

        max_qubits = config.oracle_max_qubits
    if n > max_qubits:
        raise OracleSizeError(f"{n} qubits exceed the oracle limit of {max_qubits} (state dimension {2 ** n})")


def site_operator(op: sp.spmatrix, q: int, n: int) -> sp.csr_matrix:
    left = sp.identity(2**q, dtype=complex, format="csr")
    right = sp.identity(2 ** (n - q - 1), dtype=complex, format="csr")
    return sp.kron(sp.kron(left, op, format="csr"), right, format="csr")


def full_hamiltonian(spec: ChainSpec, noise: NoiseField | None = None, max_qubits: int | None = None) -> sp.csr_matrix:
    n = spec.dim
    _check_size(n, max_qubits)
    x = [site_operator(PAULI_X, q, n) for q in range(n)]
    y = [site_operator(PAULI_Y, q, n) for q in range(n)]
    z = [site_operator(PAULI_Z, q, n) for q in range(n)]
    rows, cols = spec.bond_positions
    delta, h = (np.zeros(spec.n_bonds), np.zeros(n)) if noise is None else noise.to_arrays(spec)
    identity = sp.identity(2**n, dtype=complex, format="csr")
    hamiltonian = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for a, b, j, d in zip(rows, cols, spec.couplings, delta):
        hamiltonian = hamiltonian + j * (x[a] @ x[b] + y[a] @ y[b])
        if d != 0.0:
            hamiltonian = hamiltonian + d * (z[a] @ z[b])
    for q in range(n):
        if h[q] != 0.0:
            hamiltonian = hamiltonian + h[q] * (identity - z[q])
    return hamiltonian.tocsr()


def single_excitation_indices(n: int) -> np.ndarray:
    return 2 ** (n - 1 - np.arange(n))


def single_excitation_block(hamiltonian: sp.spmatrix, n: int) -> np.ndarray:
    """<1_k|H|1_j> read off the full matrix, real part (the block is real symmetric)."""
    idx = single_excitation_indices(n)
    block = hamiltonian[idx][:, idx].toarray()
    return block.real


def full_initial_state(spec: ChainSpec, max_qubits: int | None = None) -> np.ndarray:
    """|W_M> on Alice's branches, every other qubit in |0>."""
    n = spec.dim
    _check_size(n, max_qubits)
    psi = np.zeros(2**n, dtype=complex)
    psi[single_excitation_indices(n)[spec.alice_slice]] = 1.0 / np.sqrt(spec.m_alice)
    return psi


def embed_single_excitation(c, n: int) -> np.ndarray:
    values = np.asarray(getattr(c, "values", c), dtype=complex)
    psi = np.zeros(2**n, dtype=complex)
    psi[single_excitation_indices(n)] = values
    return psi


def single_excitation_amplitudes(psi: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(psi)[single_excitation_indices(n)]


def excitation_numbers(n: int) -> np.ndarray:
    index = np.arange(2**n)
    return sum((index >> b) & 1 for b in range(n))


def leakage(psi: np.ndarray, n: int, excitations: int = 1) -> float:
    """Weight outside the sector with the given number of excitations."""
    outside = excitation_numbers(n) != excitations
    return float(np.sum(np.abs(np.asarray(psi)[outside]) ** 2))


def full_evolve(
    spec: ChainSpec,
    noise: NoiseField | None,
    t: float,
    psi0: np.ndarray | None = None,
    max_qubits: int | None = None,
) -> np.ndarray:
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    hamiltonian = full_hamiltonian(spec, noise, max_qubits)
    psi = full_initial_state(spec, max_qubits) if psi0 is None else np.asarray(psi0, dtype=complex)
    if t == 0:
        return psi.copy()
    return expm_multiply(-1j * t * hamiltonian, psi)


def full_evolve_schedule(
    segments: Sequence[tuple[ChainSpec, NoiseField | None, float]],
    psi0: np.ndarray | None = None,
    max_qubits: int | None = None,
) -> np.ndarray:
    """Piecewise-constant evolution; each segment gives its own couplings, noise and duration."""
    if not segments:
        raise ValueError("no segments")
    psi = full_initial_state(segments[0][0], max_qubits) if psi0 is None else np.asarray(psi0, dtype=complex)
    for spec, noise, duration in segments:
        psi = full_evolve(spec, noise, duration, psi, max_qubits)
    return psi


def partial_trace(state: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """
    Reduced density matrix of the qubits in `keep` (ordered as given).
    state is a ket of length 2^n or a 2^n x 2^n density matrix.
    """
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"invalid qubits to keep: {keep}")
    traced = [q for q in range(n) if q not in keep]
    k = len(keep)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        psi = state.reshape((2,) * n).transpose(keep + traced).reshape(2**k, -1)
        return psi @ psi.conj().T
    rho = state.reshape((2,) * (2 * n))
    rho = rho.transpose(keep + traced + [n + q for q in keep] + [n + q for q in traced])
    rho = rho.reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    return np.trace(rho, axis1=1, axis2=3)


def partial_trace_bob(psi: np.ndarray, spec: ChainSpec, max_qubits: int | None = None) -> BobDensityMatrix:
    """
    Bob's reduced state projected onto {|0̂>, |1_B1>, ..., |1_BM~>}.
    For single-excitation inputs the projection discards nothing.
    """
    n = spec.dim
    _check_size(n, max_qubits)
    bob = list(range(spec.bob_slice.start, spec.bob_slice.stop))
    rho = partial_trace(psi, bob, n)
    basis = np.concatenate([[0], 2 ** (spec.m_bob - 1 - np.arange(spec.m_bob))])
    return BobDensityMatrix(rho[np.ix_(basis, basis)])


def _concurrence_from_decomposition(phi: np.ndarray) -> float:
    """
    phi is any 4 x r matrix with rho = phi phi^†. The λ of the Wootters formula are the
    singular values of phi^T (σy⊗σy) phi, which keeps round-off at machine level instead
    of the square root of it.
    """
    tau = phi.T @ SIGMA_YY @ phi
    lam = np.zeros(4)
    values = scipy.linalg.svdvals(tau) if tau.size else np.zeros(0)
    lam[: min(4, values.size)] = np.sort(values)[::-1][:4]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def wootters_concurrence(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"Wootters concurrence needs a 4x4 density matrix, got {rho.shape}")
    evals, evecs = scipy.linalg.eigh(rho)
    keep = evals > RANK_TOL * max(float(evals[-1]), 1.0)
    return _concurrence_from_decomposition(evecs[:, keep] * np.sqrt(evals[keep]))


def pair_concurrence(psi: np.ndarray, spec: ChainSpec, i: int, j: int) -> float:
    """Wootters concurrence of Bob qubits i and j (0-based) traced from the full state."""
    offset = spec.bob_slice.start
    n = spec.dim
    keep = [offset + i, offset + j]
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        return wootters_concurrence(partial_trace(psi, keep, n))
    traced = [q for q in range(n) if q not in keep]
    phi = psi.reshape((2,) * n).transpose(keep + traced).reshape(4, -1)
    u, s, _ = scipy.linalg.svd(phi, full_matrices=False)
    return _concurrence_from_decomposition(u * s)
