"""
Disorder on the couplings and noise on the σzσz / field terms, sampled per time segment.

Disorder is multiplicative, J -> J(1 + δ); noise is additive, Δ -> Δ + δ and h -> h + δ, in units of J.
δ is uniform on [-p, p]. In dynamic and fluctuating runs each segment shifts the values of the one before it.
Each (realization, segment) pair owns two counter-based Philox streams,
one for the couplings and one for the noise terms, so results never depend on thread scheduling.
Every stream draws a full vector in canonical order whatever the targets are, which keeps the
draws identical across p values (common random numbers) and makes p = 0 exact.
"""

import time
import concurrent.futures
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence
import numpy as np
from tqdm import tqdm

from . import logger
from .model import ChainSpec, NoiseField, build_hamiltonian, check_branch_ratio
from .evolve import Schedule, w_initial_state, propagate_schedule, propagate_schedule_curve
from . import metrics
from .utils import Flag

TemporalKind = Literal["static", "dynamic", "fluctuating"]
TEMPORAL_KINDS = ("static", "dynamic", "fluctuating")
COUPLING_TARGETS = ("alice_bonds", "bob_bonds", "wire_bonds")
NOISE_TARGETS = ("zz", "field")

COUPLING_STREAM = 0
NOISE_STREAM = 1


@dataclass(frozen=True)
class PerturbationSpec:
    temporal_kind: TemporalKind = "fluctuating"
    strength_p: float = 0.0
    coupling_targets: frozenset[str] = frozenset(COUPLING_TARGETS)
    noise_targets: frozenset[str] = frozenset()
    n_segments: int = 10
    seed: int = 20240501

    def __post_init__(self):
        if self.temporal_kind not in TEMPORAL_KINDS:
            raise ValueError(f"temporal_kind must be one of {TEMPORAL_KINDS}, got {self.temporal_kind!r}")
        if not 0.0 <= float(self.strength_p) <= 1.0:
            raise ValueError(f"strength_p must lie in [0, 1], got {self.strength_p}")
        object.__setattr__(self, "strength_p", float(self.strength_p))
        coupling, noise = frozenset(self.coupling_targets), frozenset(self.noise_targets)
        if not coupling <= set(COUPLING_TARGETS):
            raise ValueError(f"unknown coupling targets: {sorted(coupling - set(COUPLING_TARGETS))}")
        if not noise <= set(NOISE_TARGETS):
            raise ValueError(f"unknown noise targets: {sorted(noise - set(NOISE_TARGETS))}")
        if not coupling and not noise:
            raise ValueError("at least one coupling or noise target must be selected")
        object.__setattr__(self, "coupling_targets", coupling)
        object.__setattr__(self, "noise_targets", noise)
        if int(self.n_segments) < 1:
            raise ValueError(f"n_segments must be >= 1, got {self.n_segments}")
        object.__setattr__(self, "n_segments", int(self.n_segments))
        object.__setattr__(self, "seed", int(self.seed) & 0xFFFFFFFFFFFFFFFF)

    @property
    def segment_count(self) -> int:
        return 1 if self.temporal_kind == "static" else self.n_segments

    def with_strength(self, p: float) -> "PerturbationSpec":
        return replace(self, strength_p=p)


def segment_rng(seed: int, realization: int, segment: int, stream: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(realization), int(segment), int(stream)))
    return np.random.Generator(np.random.Philox(sequence))


def coupling_mask(spec: ChainSpec, targets) -> np.ndarray:
    a, w, b = spec.m_alice, spec.n_chain - 1, spec.m_bob
    return np.concatenate(
        [
            np.full(a, "alice_bonds" in targets),
            np.full(w, "wire_bonds" in targets),
            np.full(b, "bob_bonds" in targets),
        ]
    )


def _deltas(u: np.ndarray, mask: np.ndarray, pert: PerturbationSpec) -> np.ndarray:
    delta = np.zeros_like(u)
    if not np.any(mask):
        return delta
    if pert.temporal_kind == "dynamic":
        delta[mask] = pert.strength_p * u[np.flatnonzero(mask)[0]]
    else:
        delta[mask] = pert.strength_p * u[mask]
    return delta


def perturb_couplings(spec: ChainSpec, pert: PerturbationSpec, rng: np.random.Generator) -> ChainSpec:
    u = rng.uniform(-1.0, 1.0, size=spec.n_bonds)
    if pert.strength_p == 0.0 or not pert.coupling_targets:
        return spec
    delta = _deltas(u, coupling_mask(spec, pert.coupling_targets), pert)
    return spec.with_couplings(spec.couplings * (1.0 + delta))


def perturb_noise(noise: NoiseField | None, spec: ChainSpec, pert: PerturbationSpec, rng: np.random.Generator) -> NoiseField:
    noise = noise if noise is not None else NoiseField()
    u_bonds = rng.uniform(-1.0, 1.0, size=spec.n_bonds)
    u_sites = rng.uniform(-1.0, 1.0, size=spec.dim)
    if pert.strength_p == 0.0 or not pert.noise_targets:
        return noise
    delta, h = noise.to_arrays(spec)
    if pert.temporal_kind == "dynamic":
        # one shift for every noise term of the segment
        shared = pert.strength_p * u_bonds[0]
        if "zz" in pert.noise_targets:
            delta = delta + shared
        if "field" in pert.noise_targets:
            h = h + shared
    else:
        if "zz" in pert.noise_targets:
            delta = delta + pert.strength_p * u_bonds
        if "field" in pert.noise_targets:
            h = h + pert.strength_p * u_sites
    return NoiseField.from_arrays(spec, delta, h)


def build_perturbed_schedule(
    spec: ChainSpec,
    noise_baseline: NoiseField | None,
    pert: PerturbationSpec,
    t_total: float,
    realization: int = 0,
) -> Schedule:
    """
    static: one segment of the full duration; dynamic / fluctuating: n_segments equal segments.
    The first segment is drawn from the baseline and every later one from the segment before it,
    so couplings and noise terms accumulate their shifts over time.
    Disorder and noise share the segment boundaries.
    """
    if not t_total > 0:
        raise ValueError(f"t_total must be > 0, got {t_total}")
    count = pert.segment_count
    duration = t_total / count
    perturbed, noise = spec, noise_baseline
    segments = []
    for k in range(count):
        perturbed = perturb_couplings(perturbed, pert, segment_rng(pert.seed, realization, k, COUPLING_STREAM))
        noise = perturb_noise(noise, spec, pert, segment_rng(pert.seed, realization, k, NOISE_STREAM))
        segments.append((build_hamiltonian(perturbed, noise), duration))
    return Schedule(tuple(segments))


@dataclass(frozen=True)
class EnsembleStats:
    p: float
    mean_fidelity: float
    std_fidelity: float
    sem_fidelity: float
    mean_cw: float
    mean_cmin: float
    realizations: int
    curve_mean_fidelity: tuple[float, ...] | None = None


@dataclass(frozen=True)
class EnsembleResult:
    p_values: tuple[float, ...]
    stats: tuple[EnsembleStats, ...]
    curve_times: tuple[float, ...] | None = None
    kind: str = field(default="")

    @property
    def mean_fidelity(self) -> np.ndarray:
        return np.array([s.mean_fidelity for s in self.stats])

    @property
    def std_fidelity(self) -> np.ndarray:
        return np.array([s.std_fidelity for s in self.stats])

    @property
    def sem_fidelity(self) -> np.ndarray:
        return np.array([s.sem_fidelity for s in self.stats])

    @property
    def mean_cw(self) -> np.ndarray:
        return np.array([s.mean_cw for s in self.stats])

    @property
    def mean_cmin(self) -> np.ndarray:
        return np.array([s.mean_cmin for s in self.stats])

    def rows(self):
        for s in self.stats:
            yield (s.p, s.mean_fidelity, s.std_fidelity, s.mean_cw, s.mean_cmin, s.realizations)


def _realization(spec, noise, pert, t_max, index, curve_times):
    schedule = build_perturbed_schedule(spec, noise, pert, t_max, realization=index)
    c0 = w_initial_state(spec)
    final = propagate_schedule(schedule, c0)
    result = metrics.summary(final, spec)
    curve = None
    if curve_times is not None:
        curve = metrics.fidelity_w(propagate_schedule_curve(schedule, c0, curve_times), spec)
    return result["fidelity"], result["cw"], result["cmin"], curve


def _stats(p: float, fidelity: np.ndarray, cw: np.ndarray, cmin: np.ndarray, curves: np.ndarray | None) -> EnsembleStats:
    n = fidelity.shape[0]
    std = float(np.std(fidelity, ddof=1)) if n > 1 else 0.0
    return EnsembleStats(
        p=float(p),
        mean_fidelity=float(np.mean(fidelity)),
        std_fidelity=std,
        sem_fidelity=std / np.sqrt(n) if n > 1 else 0.0,
        mean_cw=float(np.mean(cw)),
        mean_cmin=float(np.mean(cmin)),
        realizations=n,
        curve_mean_fidelity=None if curves is None else tuple(float(x) for x in np.mean(curves, axis=0)),
    )


def run_ensemble(
    spec: ChainSpec,
    pert: PerturbationSpec,
    t_max: float,
    n_realizations: int,
    p_grid: Sequence[float],
    noise_baseline: NoiseField | None = None,
    max_workers: int | None = None,
    curve_points: int | None = None,
    interrupt_event: Flag | None = None,
    show_progress: bool | None = None,
) -> EnsembleResult:
    """
    Statistics of F, C_W and C_min at t_max for every p of the grid.
    Realization r uses the same random streams for every p; results are stored by index,
    so neither the worker count nor the completion order changes the output.
    """
    from . import config

    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    p_grid = [float(p) for p in p_grid]
    if not p_grid:
        raise ValueError("p_grid is empty")
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    if curve_points is not None and curve_points < 2:
        raise ValueError(f"curve_points must be >= 2, got {curve_points}")
    max_workers = max_workers or config.concurrency_count
    show_progress = config.show_progress if show_progress is None else show_progress
    interrupt_event = interrupt_event if interrupt_event is not None else Flag()
    check_branch_ratio(spec)
    curve_times = None if curve_points is None else np.linspace(0.0, t_max, curve_points)

    n_p = len(p_grid)
    fidelity = np.empty((n_p, n_realizations))
    cw = np.empty((n_p, n_realizations))
    cmin = np.empty((n_p, n_realizations))
    curves = None if curve_times is None else np.empty((n_p, n_realizations, curve_points))
    perts = [pert.with_strength(p) for p in p_grid]

    t1 = time.time()
    logger.info(f"Ensemble started: kind={pert.temporal_kind}, {n_p} p values x {n_realizations} realizations, N={spec.n_chain}, M={spec.m_alice}, M~={spec.m_bob}")
    with interrupt_event:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {
                executor.submit(_realization, spec, noise_baseline, perts[i], t_max, r, curve_times): (i, r)
                for i in range(n_p)
                for r in range(n_realizations)
            }
            for future in tqdm(
                concurrent.futures.as_completed(futures),
                total=len(futures),
                desc=f"Ensemble ({pert.temporal_kind})",
                disable=not show_progress,
            ):
                if interrupt_event.is_set():
                    executor.shutdown(wait=True, cancel_futures=True)
                    logger.warning("Ensemble interrupted, no result is produced")
                    raise InterruptedError("ensemble run interrupted")
                i, r = futures[future]
                fidelity[i, r], cw[i, r], cmin[i, r], curve = future.result()
                if curves is not None:
                    curves[i, r] = curve
    m, s = divmod(time.time() - t1, 60)
    logger.info(f"Ensemble done! Time used: {int(m):02d}:{s:05.2f}")
    stats = tuple(
        _stats(p, fidelity[i], cw[i], cmin[i], None if curves is None else curves[i])
        for i, p in enumerate(p_grid)
    )
    return EnsembleResult(
        p_values=tuple(p_grid),
        stats=stats,
        curve_times=None if curve_times is None else tuple(float(t) for t in curve_times),
        kind=pert.temporal_kind,
    )
