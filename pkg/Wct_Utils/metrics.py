"""
Bob's reduced state, W-state fidelities and pairwise concurrences.

Every function takes an AmplitudeVector or a plain complex array. Fidelities also accept
a (T, D) array of amplitudes and then return one value per row.
Bob indices are 0-based: pair (0, 1) is (B_1, B_2).
"""

from dataclasses import dataclass
from itertools import combinations
import numpy as np

from .model import ChainSpec
from .errors import MetricError


@dataclass(frozen=True)
class BobDensityMatrix:
    """Reduced state of Bob's branches in the basis {|0̂_B>, |1̂_B1>, ..., |1̂_BM~>}."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=atol, rtol=0))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())


def _amplitudes(c, spec: ChainSpec) -> np.ndarray:
    values = np.asarray(getattr(c, "values", c))
    if values.shape[-1] != spec.dim:
        raise MetricError(f"amplitude dimension {values.shape[-1]} does not match spec dimension {spec.dim}")
    return values


def _scalar_or_array(x: np.ndarray):
    x = np.clip(x, 0.0, 1.0)
    return float(x) if np.ndim(x) == 0 else x


def reduce_to_bob(c, spec: ChainSpec) -> BobDensityMatrix:
    bob = _amplitudes(c, spec)[spec.bob_slice]
    matrix = np.empty((spec.m_bob + 1, spec.m_bob + 1), dtype=complex)
    matrix[0, 0] = 1.0 - np.sum(np.abs(bob) ** 2)
    matrix[0, 1:] = 0.0
    matrix[1:, 0] = 0.0
    matrix[1:, 1:] = np.outer(bob, bob.conj())
    return BobDensityMatrix(matrix)


def fidelity_w(c, spec: ChainSpec):
    """(1/M~)|Σ_q c_Bq|², Bob's overlap with the phase-aligned W state."""
    values = _amplitudes(c, spec)
    return _scalar_or_array(np.abs(values[..., spec.bob_slice].sum(axis=-1)) ** 2 / spec.m_bob)


def fidelity_alice(c, spec: ChainSpec):
    values = _amplitudes(c, spec)
    return _scalar_or_array(np.abs(values[..., spec.alice_slice].sum(axis=-1)) ** 2 / spec.m_alice)


def _check_pairs(spec: ChainSpec):
    if spec.m_bob < 2:
        raise MetricError(f"pairwise concurrence needs at least two Bob branches, got M~={spec.m_bob}")


def concurrence_pair(c, spec: ChainSpec, i: int, j: int) -> float:
    _check_pairs(spec)
    if i == j:
        raise MetricError(f"concurrence needs two different Bob qubits, got i = j = {i}")
    for k in (i, j):
        if not 0 <= k < spec.m_bob:
            raise MetricError(f"Bob index {k} out of range 0..{spec.m_bob - 1}")
    bob = _amplitudes(c, spec)[spec.bob_slice]
    return float(2.0 * abs(bob[i]) * abs(bob[j]))


def _pair_values(c, spec: ChainSpec) -> np.ndarray:
    _check_pairs(spec)
    mod = np.abs(_amplitudes(c, spec)[spec.bob_slice])
    i, j = np.triu_indices(spec.m_bob, k=1)
    return 2.0 * mod[i] * mod[j]


def concurrence_w(c, spec: ChainSpec) -> float:
    """
    Geometric mean of all C_ij, evaluated in log space; 0 as soon as one pair vanishes.
    Clamped to the smallest pair so rounding in log space never puts it below concurrence_min.
    """
    pairs = _pair_values(c, spec)
    if np.any(pairs == 0.0):
        return 0.0
    geometric = float(np.exp(np.mean(np.log(pairs))))
    return max(geometric, float(pairs.min()))


def concurrence_min(c, spec: ChainSpec) -> float:
    return float(np.min(_pair_values(c, spec)))


def summary(c, spec: ChainSpec) -> dict[str, float]:
    """F, F_A, C_W and C_min of one state; the concurrences are NaN when Bob has a single branch."""
    result = {
        "fidelity": fidelity_w(c, spec),
        "fidelity_alice": fidelity_alice(c, spec),
        "cw": float("nan"),
        "cmin": float("nan"),
    }
    if spec.m_bob >= 2:
        result["cw"] = concurrence_w(c, spec)
        result["cmin"] = concurrence_min(c, spec)
    return result


def bob_pairs(spec: ChainSpec) -> list[tuple[int, int]]:
    return list(combinations(range(spec.m_bob), 2))
