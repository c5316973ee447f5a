"""
Chain geometry, the single-excitation Hamiltonian and the branched <-> linear mapping.

Sites follow one canonical ordering everywhere in the package:
Alice branches at positions 0..M-1, wire qubits at M..M+N-1, Bob branches after that.
Bonds follow the same idea: Alice bonds (A_p, wire 1), then the wire bonds, then Bob bonds (wire N, B_q).
"""

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Literal, Mapping, Sequence
import numpy as np
import scipy.linalg

from . import logger
from .errors import ChainSpecError, NoiseFieldError, MappingError, NumericError

SiteTag = Literal["alice", "wire", "bob"]
_TAG_RANK = {"alice": 0, "wire": 1, "bob": 2}


@dataclass(frozen=True)
class SiteIndex:
    """A site named by its role; index is 1-based inside its group."""

    tag: SiteTag
    index: int

    def __post_init__(self):
        if self.tag not in _TAG_RANK:
            raise ChainSpecError(f"Unknown site tag: {self.tag!r}")
        if int(self.index) < 1:
            raise ChainSpecError(f"Site indices are 1-based, got {self.tag}({self.index})")

    @classmethod
    def alice(cls, p: int):
        return cls("alice", p)

    @classmethod
    def wire(cls, j: int):
        return cls("wire", j)

    @classmethod
    def bob(cls, q: int):
        return cls("bob", q)

    def sort_key(self):
        return (_TAG_RANK[self.tag], self.index)

    def __str__(self):
        return f"{self.tag}({self.index})"


Bond = tuple[SiteIndex, SiteIndex]


def bond_key(a: SiteIndex, b: SiteIndex) -> Bond:
    """Bonds are unordered; store them in canonical order."""
    return (a, b) if a.sort_key() <= b.sort_key() else (b, a)


def _as_tuple(values, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in values)
    except TypeError:
        raise ChainSpecError(f"{name} must be a sequence of numbers")


@dataclass(frozen=True)
class ChainSpec:
    n_chain: int
    m_alice: int
    m_bob: int
    j_alice: tuple[float, ...]
    j_bob: tuple[float, ...]
    j_wire: tuple[float, ...]

    def __post_init__(self):
        for name in ("n_chain", "m_alice", "m_bob"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ChainSpecError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_chain < 2:
            raise ChainSpecError(f"n_chain must be >= 2, got {self.n_chain}")
        if self.m_alice < 1 or self.m_bob < 1:
            raise ChainSpecError(f"m_alice and m_bob must be >= 1, got {self.m_alice}, {self.m_bob}")
        for name in ("j_alice", "j_bob", "j_wire"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name), name))
        expected = {"j_alice": self.m_alice, "j_bob": self.m_bob, "j_wire": self.n_chain - 1}
        for name, length in expected.items():
            if len(getattr(self, name)) != length:
                raise ChainSpecError(f"{name} has {len(getattr(self, name))} entries, expected {length}")

    @property
    def dim(self) -> int:
        return self.n_chain + self.m_alice + self.m_bob

    @property
    def is_linear(self) -> bool:
        return self.m_alice == 1 and self.m_bob == 1

    @property
    def alice_slice(self) -> slice:
        return slice(0, self.m_alice)

    @property
    def wire_slice(self) -> slice:
        return slice(self.m_alice, self.m_alice + self.n_chain)

    @property
    def bob_slice(self) -> slice:
        return slice(self.m_alice + self.n_chain, self.dim)

    @property
    def n_bonds(self) -> int:
        return self.m_alice + self.n_chain - 1 + self.m_bob

    def position(self, site: SiteIndex) -> int:
        limit = {"alice": self.m_alice, "wire": self.n_chain, "bob": self.m_bob}[site.tag]
        if site.index > limit:
            raise NoiseFieldError(f"{site} does not exist in a chain with M={self.m_alice}, N={self.n_chain}, M~={self.m_bob}")
        offset = {"alice": 0, "wire": self.m_alice, "bob": self.m_alice + self.n_chain}[site.tag]
        return offset + site.index - 1

    def site_at(self, position: int) -> SiteIndex:
        if not 0 <= position < self.dim:
            raise IndexError(f"position {position} out of range for dimension {self.dim}")
        if position < self.m_alice:
            return SiteIndex.alice(position + 1)
        position -= self.m_alice
        if position < self.n_chain:
            return SiteIndex.wire(position + 1)
        return SiteIndex.bob(position - self.n_chain + 1)

    @cached_property
    def sites(self) -> tuple[SiteIndex, ...]:
        return tuple(self.site_at(i) for i in range(self.dim))

    @cached_property
    def bonds(self) -> tuple[Bond, ...]:
        first, last = SiteIndex.wire(1), SiteIndex.wire(self.n_chain)
        alice = [(SiteIndex.alice(p), first) for p in range(1, self.m_alice + 1)]
        wire = [(SiteIndex.wire(j), SiteIndex.wire(j + 1)) for j in range(1, self.n_chain)]
        bob = [(last, SiteIndex.bob(q)) for q in range(1, self.m_bob + 1)]
        return tuple(alice + wire + bob)

    @cached_property
    def bond_positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column positions of every bond, in canonical bond order."""
        rows = np.array([self.position(a) for a, _ in self.bonds], dtype=int)
        cols = np.array([self.position(b) for _, b in self.bonds], dtype=int)
        rows.setflags(write=False)
        cols.setflags(write=False)
        return rows, cols

    @property
    def couplings(self) -> np.ndarray:
        return np.array(self.j_alice + self.j_wire + self.j_bob, dtype=float)

    def with_couplings(self, couplings: Sequence[float]) -> "ChainSpec":
        """Copy with all couplings replaced, given in canonical bond order."""
        couplings = list(couplings)
        if len(couplings) != self.n_bonds:
            raise ChainSpecError(f"expected {self.n_bonds} couplings, got {len(couplings)}")
        a, w = self.m_alice, self.n_chain - 1
        return ChainSpec(
            self.n_chain,
            self.m_alice,
            self.m_bob,
            couplings[:a],
            couplings[a + w :],
            couplings[a : a + w],
        )


@dataclass(frozen=True)
class NoiseField:
    """
    σzσz strengths on bonds (delta_bonds) and local fields on sites (h_sites), in units of J.
    Missing entries are zero.
    """

    delta_bonds: Mapping[Bond, float] = field(default_factory=dict)
    h_sites: Mapping[SiteIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        bonds = {bond_key(*k): float(v) for k, v in dict(self.delta_bonds).items()}
        sites = {k: float(v) for k, v in dict(self.h_sites).items()}
        object.__setattr__(self, "delta_bonds", MappingProxyType(bonds))
        object.__setattr__(self, "h_sites", MappingProxyType(sites))

    @property
    def is_zero(self) -> bool:
        return not any(self.delta_bonds.values()) and not any(self.h_sites.values())

    def validate(self, spec: ChainSpec):
        valid = {bond_key(*b) for b in spec.bonds}
        for key in self.delta_bonds:
            if key not in valid:
                raise NoiseFieldError(f"Noise bond {key[0]}-{key[1]} is not a bond of the chain")
        for site in self.h_sites:
            spec.position(site)

    def to_arrays(self, spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
        """(Δ per bond in canonical bond order, h per site in canonical site order)"""
        self.validate(spec)
        delta = np.array([self.delta_bonds.get(bond_key(*b), 0.0) for b in spec.bonds], dtype=float)
        h = np.zeros(spec.dim)
        for site, value in self.h_sites.items():
            h[spec.position(site)] = value
        return delta, h

    @classmethod
    def from_arrays(cls, spec: ChainSpec, delta: Sequence[float] | None = None, h: Sequence[float] | None = None):
        delta_bonds, h_sites = dict(), dict()
        if delta is not None:
            delta = np.asarray(delta, dtype=float)
            if delta.shape != (spec.n_bonds,):
                raise NoiseFieldError(f"expected {spec.n_bonds} bond values, got shape {delta.shape}")
            delta_bonds = {b: float(v) for b, v in zip(spec.bonds, delta) if v != 0.0}
        if h is not None:
            h = np.asarray(h, dtype=float)
            if h.shape != (spec.dim,):
                raise NoiseFieldError(f"expected {spec.dim} site values, got shape {h.shape}")
            h_sites = {s: float(v) for s, v in zip(spec.sites, h) if v != 0.0}
        return cls(delta_bonds, h_sites)


class SingleExcitationHamiltonian:
    """
    Real symmetric matrix <1_k|H|1_j> over the canonical site ordering (hbar = 1).
    The matrix is read-only; its eigendecomposition is computed on first use and kept.
    """

    def __init__(self, matrix: np.ndarray, spec: ChainSpec | None = None):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ChainSpecError(f"Hamiltonian must be square, got shape {matrix.shape}")
        if spec is not None and matrix.shape[0] != spec.dim:
            raise ChainSpecError(f"matrix dimension {matrix.shape[0]} does not match spec dimension {spec.dim}")
        matrix.setflags(write=False)
        self.matrix = matrix
        self.spec = spec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        if not np.all(np.isfinite(self.matrix)):
            raise NumericError("Hamiltonian has non-finite entries")
        try:
            evals, evecs = scipy.linalg.eigh(self.matrix)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise NumericError(f"Eigendecomposition failed: {e}") from e
        evals.setflags(write=False)
        evecs.setflags(write=False)
        return evals, evecs

    def __repr__(self):
        return f"SingleExcitationHamiltonian(dim={self.dim})"


def noise_diagonal(spec: ChainSpec, noise: NoiseField | None) -> np.ndarray:
    """
    Diagonal of H_zz + H_z in the single-excitation sector.
    <1_j|Δ σz_i σz_k|1_j> is -Δ when j is on the bond and +Δ otherwise; <1_j|h_i (1 - σz_i)|1_j> is 2h_j.
    """
    diag = np.zeros(spec.dim)
    if noise is None:
        return diag
    delta, h = noise.to_arrays(spec)
    rows, cols = spec.bond_positions
    diag += 2.0 * h + delta.sum()
    np.add.at(diag, rows, -2.0 * delta)
    np.add.at(diag, cols, -2.0 * delta)
    return diag


def build_hamiltonian(spec: ChainSpec, noise: NoiseField | None = None) -> SingleExcitationHamiltonian:
    couplings = spec.couplings
    if not np.all(np.isfinite(couplings)):
        raise NumericError("Chain couplings contain non-finite values")
    matrix = np.zeros((spec.dim, spec.dim))
    rows, cols = spec.bond_positions
    matrix[rows, cols] = 2.0 * couplings
    matrix[cols, rows] = 2.0 * couplings
    diag = noise_diagonal(spec, noise)
    if not np.all(np.isfinite(diag)):
        raise NumericError("Noise field contains non-finite values")
    matrix[np.diag_indices(spec.dim)] = diag
    return SingleExcitationHamiltonian(matrix, spec)


def _uniform_value(values: tuple[float, ...], name: str) -> float:
    first = values[0]
    if not np.allclose(values, first, rtol=1e-12, atol=0.0):
        raise MappingError(f"{name} couplings are not uniform, the branched model has no effective linear image")
    return first


def to_effective_linear(spec: ChainSpec) -> ChainSpec:
    j_a = _uniform_value(spec.j_alice, "Alice")
    j_b = _uniform_value(spec.j_bob, "Bob")
    if spec.is_linear:
        return spec
    return ChainSpec(
        spec.n_chain,
        1,
        1,
        (np.sqrt(spec.m_alice) * j_a,),
        (np.sqrt(spec.m_bob) * j_b,),
        spec.j_wire,
    )


def from_effective_linear(linear: ChainSpec, m_alice: int, m_bob: int) -> ChainSpec:
    if not linear.is_linear:
        raise MappingError(f"input is not a strictly linear chain (M={linear.m_alice}, M~={linear.m_bob})")
    if m_alice < 1 or m_bob < 1:
        raise ChainSpecError(f"branch counts must be >= 1, got {m_alice}, {m_bob}")
    if m_alice == 1 and m_bob == 1:
        return linear
    j_a = linear.j_alice[0] / np.sqrt(m_alice)
    j_b = linear.j_bob[0] / np.sqrt(m_bob)
    return ChainSpec(linear.n_chain, m_alice, m_bob, [j_a] * m_alice, [j_b] * m_bob, linear.j_wire)


def uniform_chain(n: int, m_alice: int = 1, m_bob: int = 1, j_end: float = 1.0, j_wire: float = 1.0) -> ChainSpec:
    """
    Unmodulated chain whose effective linear image has end couplings j_end and wire couplings j_wire,
    so j_wire / j_end is the sqrt(M) J_m / J ratio used on every plot axis.
    """
    return ChainSpec(
        n,
        m_alice,
        m_bob,
        [j_end / np.sqrt(m_alice)] * m_alice,
        [j_end / np.sqrt(m_bob)] * m_bob,
        [j_wire] * (n - 1),
    )


def effective_amplitudes(c, spec: ChainSpec) -> np.ndarray:
    """
    Amplitudes of the permutation-symmetric sector: (C_100, wire amplitudes, C_001),
    the state vector of the effective linear chain. Works on a single vector or a (T, D) array.
    """
    c = np.asarray(getattr(c, "values", c))
    if c.shape[-1] != spec.dim:
        raise ChainSpecError(f"amplitude dimension {c.shape[-1]} does not match spec dimension {spec.dim}")
    a = c[..., spec.alice_slice].sum(axis=-1, keepdims=True) / np.sqrt(spec.m_alice)
    b = c[..., spec.bob_slice].sum(axis=-1, keepdims=True) / np.sqrt(spec.m_bob)
    return np.concatenate([a, c[..., spec.wire_slice], b], axis=-1)


def check_branch_ratio(spec: ChainSpec, limit: float = 0.1) -> bool:
    """Logs a warning when a branch star is large relative to the wire; returns False in that case."""
    if max(spec.m_alice, spec.m_bob) > limit * spec.n_chain:
        logger.warning(
            f"Branch count (M={spec.m_alice}, M~={spec.m_bob}) exceeds {limit:.0%} of the wire length N={spec.n_chain}; "
            "results remain exact but the protocol was designed for small branch stars"
        )
        return False
    return True
