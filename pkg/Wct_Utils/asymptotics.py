"""
Closed forms for the effective linear chain when the wire coupling dominates the end couplings (J_m >> J).

The chain has N + 2 sites: A (site 0), the wire (sites 1..N) and B (site N+1), end couplings J and
wire couplings J_m. In that regime the low-energy physics is carried by two edge modes for even N
and by three modes (two edges hybridized with the wire zero mode) for odd N.
"""

from dataclasses import dataclass
from typing import Literal
import numpy as np

from . import logger
from .model import ChainSpec, build_hamiltonian, to_effective_linear, uniform_chain
from .errors import MappingError, SingularParameterError

SINGULAR_GUARD = 1e-12


@dataclass(frozen=True)
class AsymptoticRegime:
    n_wire: int
    j_end: float = 1.0
    j_wire: float = 100.0
    warn_ratio: float | None = None

    def __post_init__(self):
        if int(self.n_wire) != self.n_wire or self.n_wire < 1:
            raise ValueError(f"n_wire must be a positive integer, got {self.n_wire}")
        object.__setattr__(self, "n_wire", int(self.n_wire))
        if self.j_end <= 0 or self.j_wire <= 0:
            raise ValueError(f"couplings must be positive, got J={self.j_end}, J_m={self.j_wire}")
        if self.ratio < 1:
            raise ValueError(f"the closed forms need J_m/J >= 1, got {self.ratio:.6g}")
        threshold = self.warn_ratio
        if threshold is None:
            from . import config

            threshold = config.asymptotic_warn_ratio
        if self.ratio < threshold:
            logger.warning(f"J_m/J = {self.ratio:.6g} is below {threshold:g}; asymptotic formulas are only indicative here")

    @property
    def ratio(self) -> float:
        return self.j_wire / self.j_end

    @property
    def parity(self) -> Literal["even", "odd"]:
        return "even" if self.n_wire % 2 == 0 else "odd"

    @classmethod
    def from_spec(cls, spec: ChainSpec, warn_ratio: float | None = None):
        """Regime of a uniform chain; branched specs are mapped to their effective linear image first."""
        linear = to_effective_linear(spec)
        j_a, j_b = linear.j_alice[0], linear.j_bob[0]
        if not np.isclose(j_a, j_b, rtol=1e-12, atol=0):
            raise MappingError(f"effective end couplings differ ({j_a:.6g} vs {j_b:.6g}); the closed forms assume equal ends")
        wire = np.asarray(linear.j_wire)
        if not np.allclose(wire, wire[0], rtol=1e-12, atol=0):
            raise MappingError("wire couplings are not uniform")
        return cls(linear.n_chain, j_a, float(wire[0]), warn_ratio)

    def linear_spec(self) -> ChainSpec:
        return uniform_chain(self.n_wire, 1, 1, self.j_end, self.j_wire)


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _edge_rate(r: AsymptoticRegime) -> float:
    if r.parity == "even":
        return 2.0 * r.j_end**2 / r.j_wire
    return 2.0 * r.j_end / np.sqrt(r.n_wire + 1)


def asymptotic_fidelity(r: AsymptoticRegime, t):
    """sin²(2(J/J_m)Jt) for even N, sin⁴(2Jt/√(N+1)) for odd N."""
    phase = _edge_rate(r) * _times(t)
    if r.parity == "even":
        return _out(np.sin(phase) ** 2)
    return _out(np.sin(phase) ** 4)


def alice_asymptotic_fidelity(r: AsymptoticRegime, t):
    phase = _edge_rate(r) * _times(t)
    if r.parity == "even":
        return _out(np.cos(phase) ** 2)
    return _out(np.cos(phase) ** 4)


def optimal_time(r: AsymptoticRegime) -> float:
    """First time the closed form reaches 1."""
    return float(np.pi / (2.0 * _edge_rate(r)))


def optimal_wire_coupling(n: int, j_end: float, t: float) -> float:
    """J_m for which an even-N chain delivers the state exactly at time t (inverse of optimal_time)."""
    if n % 2:
        raise ValueError("for odd N the transfer time does not depend on J_m")
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    return float(4.0 * j_end**2 * t / np.pi)


def _d_n(n: int, theta: float, j_wire: float) -> float:
    if n < 0:
        return 0.0
    return (2.0 * j_wire) ** n * np.sin((n + 1) * theta) / np.sin(theta)


def _check_theta(theta: float):
    if abs(np.sin(theta)) <= SINGULAR_GUARD:
        raise SingularParameterError(f"sin(theta) vanishes at theta = {theta}; use the bulk eigenvalues directly")


def characteristic_poly_wire(n: int, theta: float, j_wire: float) -> float:
    """
    D_N = det(H_wire - E) for the uniform N-site wire, E = -4 J_m cos(theta).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _check_theta(theta)
    return float(_d_n(n, theta, j_wire))


def characteristic_poly_effective(n: int, theta: float, j_end: float, j_wire: float) -> float:
    """Determinant of the full (N+2)-site effective chain at E = -4 J_m cos(theta), by cofactor expansion over both ends."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_theta(theta)
    c = np.cos(theta)
    return float(
        16.0
        * (
            j_wire**2 * c**2 * _d_n(n, theta, j_wire)
            - 2.0 * j_end**2 * j_wire * c * _d_n(n - 1, theta, j_wire)
            + j_end**4 * _d_n(n - 2, theta, j_wire)
        )
    )


def bulk_eigenvalues(r: AsymptoticRegime) -> np.ndarray:
    k = np.arange(2, r.n_wire + 2)
    return -4.0 * r.j_wire * np.cos((k - 1) * np.pi / (r.n_wire + 1))


def edge_eigenvalues(r: AsymptoticRegime) -> np.ndarray:
    """Edge values in ascending order: (E_1, E_N+2) for even N, (E_1, 0, E_N+2) for odd N."""
    if r.parity == "even":
        e = 2.0 * r.j_end**2 / r.j_wire
        return np.array([-e, e])
    e = 4.0 * r.j_end / np.sqrt(r.n_wire + 1)
    return np.array([-e, 0.0, e])


def approx_eigenvalues(r: AsymptoticRegime) -> np.ndarray:
    bulk = bulk_eigenvalues(r)
    if r.parity == "odd":
        # the wire zero mode is absorbed into the three hybridized edge modes
        bulk = np.delete(bulk, (r.n_wire - 1) // 2)
    return np.sort(np.concatenate([bulk, edge_eigenvalues(r)]))


def _wire_zero_mode(n: int) -> np.ndarray:
    w = np.arange(1, n + 1)
    return np.sqrt(2.0 / (n + 1)) * np.sin(w * np.pi / 2)


def approx_edge_eigenvectors(r: AsymptoticRegime) -> list[tuple[float, np.ndarray]]:
    """
    Leading-order (energy, eigenvector) pairs of the edge modes, ascending in energy.
    Vectors live on the N+2 sites of the effective chain.
    """
    n = r.n_wire
    dim = n + 2
    a = np.zeros(dim)
    a[0] = 1.0
    b = np.zeros(dim)
    b[-1] = 1.0
    energies = edge_eigenvalues(r)
    if r.parity == "even":
        sigma = (-1.0) ** (n // 2 + 1)
        vectors = [(a + sigma * b) / np.sqrt(2), (a - sigma * b) / np.sqrt(2)]
    else:
        s = (-1.0) ** ((n - 1) // 2)
        z = np.zeros(dim)
        z[1:-1] = _wire_zero_mode(n)
        vectors = [
            0.5 * (a - np.sqrt(2) * z + s * b),
            (a - s * b) / np.sqrt(2),
            0.5 * (a + np.sqrt(2) * z + s * b),
        ]
    return [(float(e), v) for e, v in zip(energies, vectors)]


def _edge_amplitudes(r: AsymptoticRegime, t, site: int) -> np.ndarray:
    t = _times(t)
    modes = approx_edge_eigenvectors(r)
    amp = np.zeros(np.shape(t), dtype=complex)
    for e, v in modes:
        amp = amp + np.exp(-1j * e * t) * v[site] * v[0]
    return amp


def edge_mode_fidelity(r: AsymptoticRegime, t):
    """Bob's fidelity rebuilt from the edge modes only; equals asymptotic_fidelity."""
    return _out(np.abs(_edge_amplitudes(r, t, -1)) ** 2)


def edge_mode_alice_fidelity(r: AsymptoticRegime, t):
    return _out(np.abs(_edge_amplitudes(r, t, 0)) ** 2)


def dense_eigenvalues(r: AsymptoticRegime) -> np.ndarray:
    return np.array(build_hamiltonian(r.linear_spec()).eigh[0])
