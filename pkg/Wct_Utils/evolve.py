from dataclasses import dataclass
from typing import Sequence
import numpy as np

from .model import ChainSpec, SingleExcitationHamiltonian
from .errors import ScheduleError

NORM_TOLERANCE = 1e-10


class AmplitudeVector:
    """Unit-norm complex amplitudes c_j over the canonical site ordering."""

    def __init__(self, values, check: bool = True):
        values = np.array(values, dtype=complex)
        if values.ndim != 1:
            raise ValueError(f"amplitudes must be one-dimensional, got shape {values.shape}")
        if check and abs(np.vdot(values, values).real - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"amplitudes are not normalized: |c|^2 = {np.vdot(values, values).real:.15g}")
        values.setflags(write=False)
        self.values = values

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def norm2(self) -> float:
        return float(np.vdot(self.values, self.values).real)

    def __len__(self):
        return self.dim

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"AmplitudeVector(dim={self.dim})"


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant evolution: (hamiltonian, duration) segments applied in order."""

    segments: tuple[tuple[SingleExcitationHamiltonian, float], ...]

    def __post_init__(self):
        segments = tuple((h, float(d)) for h, d in self.segments)
        if not segments:
            raise ScheduleError("schedule has no segments")
        dim = segments[0][0].dim
        for k, (h, duration) in enumerate(segments):
            if h.dim != dim:
                raise ScheduleError(f"segment {k}: dimension {h.dim} differs from segment 0 dimension {dim}")
            if not duration >= 0:
                raise ScheduleError(f"segment {k}: duration must be >= 0, got {duration}")
        object.__setattr__(self, "segments", segments)

    @property
    def dim(self) -> int:
        return self.segments[0][0].dim

    @property
    def total_duration(self) -> float:
        return float(sum(d for _, d in self.segments))

    def __len__(self):
        return len(self.segments)


def w_initial_state(spec: ChainSpec) -> AmplitudeVector:
    values = np.zeros(spec.dim, dtype=complex)
    values[spec.alice_slice] = 1.0 / np.sqrt(spec.m_alice)
    return AmplitudeVector(values)


def _values(c0, dim: int) -> np.ndarray:
    values = np.asarray(getattr(c0, "values", c0), dtype=complex)
    if values.shape != (dim,):
        raise ValueError(f"amplitude dimension {values.shape} does not match Hamiltonian dimension {dim}")
    return values


def propagate(h: SingleExcitationHamiltonian, c0, t: float, reverse: bool = False) -> AmplitudeVector:
    """
    c(t) = V exp(-iΛt) Vᵀ c0. reverse=True flips the sign in the exponent,
    which undoes a forward propagation of the same duration.
    """
    if not t >= 0:
        raise ValueError(f"t must be >= 0, got {t}")
    values = _values(c0, h.dim)
    if t == 0:
        return AmplitudeVector(values.copy(), check=False)
    evals, evecs = h.eigh
    sign = 1.0 if reverse else -1.0
    out = evecs @ (np.exp(sign * 1j * evals * t) * (evecs.T @ values))
    return AmplitudeVector(out, check=False)


def propagate_curve(h: SingleExcitationHamiltonian, c0, times: Sequence[float]) -> np.ndarray:
    """Amplitudes at every time of the grid, shape (len(times), D); one decomposition for the whole curve."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if np.any(times < 0):
        raise ValueError("times must be >= 0")
    values = _values(c0, h.dim)
    evals, evecs = h.eigh
    coeffs = evecs.T @ values
    phases = np.exp(-1j * np.outer(times, evals))
    out = (phases * coeffs) @ evecs.T
    out[times == 0] = values
    return out


def propagate_schedule(s: Schedule, c0) -> AmplitudeVector:
    values = np.asarray(getattr(c0, "values", c0), dtype=complex)
    for k, (h, duration) in enumerate(s.segments):
        if values.shape != (h.dim,):
            raise ScheduleError(f"segment {k}: dimension {h.dim} does not match state dimension {values.shape[0]}")
        values = propagate(h, values, duration).values
    return AmplitudeVector(values, check=False)


def propagate_schedule_curve(s: Schedule, c0, times: Sequence[float]) -> np.ndarray:
    """
    Amplitudes of a piecewise evolution at arbitrary times within [0, total duration].
    A time on a segment boundary is taken from the earlier segment.
    """
    times = np.asarray(times, dtype=float)
    total = s.total_duration
    if np.any(times < 0) or np.any(times > total * (1 + 1e-12)):
        raise ValueError(f"times must lie within [0, {total}]")
    values = np.asarray(getattr(c0, "values", c0), dtype=complex)
    out = np.empty((times.shape[0], s.dim), dtype=complex)
    filled = np.zeros(times.shape[0], dtype=bool)
    start = 0.0
    for k, (h, duration) in enumerate(s.segments):
        if values.shape != (h.dim,):
            raise ScheduleError(f"segment {k}: dimension {h.dim} does not match state dimension {values.shape[0]}")
        end = start + duration
        last = k == len(s.segments) - 1
        mask = ~filled & (times <= end if not last else np.ones_like(filled))
        if np.any(mask):
            out[mask] = propagate_curve(h, values, np.clip(times[mask] - start, 0.0, None))
            filled |= mask
        values = propagate(h, values, duration).values
        start = end
    return out
