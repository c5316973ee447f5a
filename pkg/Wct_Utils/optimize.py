"""
Grid search for the wire coupling J_m and measurement time of the ordered effective chain.

For every J_m on the grid the fidelity |c_N+2(t)|² is evaluated on a time window (0, t_max_bound]
and the first prominent peak is kept: the top of the first lobe reaching peak_fraction of the
window maximum. The best (J_m, t) over the grid is then refined on a finer grid around it.
"""

import time
import concurrent.futures
from dataclasses import dataclass
import numpy as np
from tqdm import tqdm

from . import logger
from .model import build_hamiltonian, uniform_chain
from .errors import ScanError


@dataclass(frozen=True)
class ScanResult:
    best_jm: float
    best_t: float
    best_fidelity: float
    samples: np.ndarray  # (jm, t of the kept peak, F) per grid point, coarse grid then refinement
    refined: bool = False

    def rows(self):
        for jm, t, f in self.samples:
            yield (jm, t, f)


def end_to_end_fidelity(n_wire: int, jm: float, times: np.ndarray, j_end: float = 1.0) -> np.ndarray:
    """|c_N+2(t)|² of the effective chain started on its first site."""
    evals, evecs = build_hamiltonian(uniform_chain(n_wire, 1, 1, j_end, jm)).eigh
    weights = evecs[-1] * evecs[0]
    amplitude = weights @ np.exp(-1j * np.outer(evals, times))
    return np.abs(amplitude) ** 2


def first_peak(fidelity: np.ndarray, peak_fraction: float = 0.5) -> int:
    """
    Index of the maximum of the first lobe: the lobe opens where the fidelity first reaches
    peak_fraction of the window maximum and closes once it falls below half of that level.
    The lower closing level keeps fast ripples on the rising edge from splitting the lobe.
    """
    fidelity = np.asarray(fidelity)
    threshold = peak_fraction * np.max(fidelity)
    start = int(np.argmax(fidelity >= threshold))
    below = np.flatnonzero(fidelity[start:] < 0.5 * threshold)
    end = start + int(below[0]) if below.size else fidelity.shape[0]
    return start + int(np.argmax(fidelity[start:end]))


def _best(samples: np.ndarray) -> np.ndarray:
    # total order: F descending, then jm ascending, then t ascending
    order = np.lexsort((samples[:, 1], samples[:, 0], -samples[:, 2]))
    return samples[order[0]]


def _evaluate(n_wire, jms, times, j_end, peak_fraction, max_workers, show_progress, desc):
    samples = np.empty((len(jms), 3))

    def task(k):
        f = end_to_end_fidelity(n_wire, jms[k], times, j_end)
        i = first_peak(f, peak_fraction)
        return k, times[i], f[i]

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(task, k) for k in range(len(jms))]
        for future in tqdm(concurrent.futures.as_completed(futures), total=len(futures), desc=desc, disable=not show_progress):
            k, t, f = future.result()
            samples[k] = (jms[k], t, f)
    return samples


def scan_optimal(
    n_wire: int,
    jm_max: float,
    jm_steps: int,
    t_max_bound: float,
    t_steps: int,
    j_end: float = 1.0,
    jm_min: float = 0.0,
    peak_fraction: float | None = None,
    refine: bool = True,
    refine_factor: int | None = None,
    max_workers: int | None = None,
    show_progress: bool | None = None,
) -> ScanResult:
    """
    jm grid: jm_max * k / jm_steps for k = 1..jm_steps, keeping jm > jm_min.
    t grid: t_max_bound * i / t_steps for i = 1..t_steps.
    """
    from . import config

    if n_wire < 2:
        raise ValueError(f"n_wire must be >= 2, got {n_wire}")
    if not (jm_max > 0 and t_max_bound > 0 and j_end > 0):
        raise ValueError("jm_max, t_max_bound and j_end must be positive")
    if jm_steps < 1 or t_steps < 1:
        raise ValueError(f"jm_steps and t_steps must be >= 1, got {jm_steps}, {t_steps}")
    peak_fraction = config.peak_fraction if peak_fraction is None else peak_fraction
    refine_factor = config.refine_factor if refine_factor is None else refine_factor
    max_workers = max_workers or config.concurrency_count
    show_progress = config.show_progress if show_progress is None else show_progress

    jms = jm_max * np.arange(1, jm_steps + 1) / jm_steps
    jms = jms[jms > jm_min]
    if jms.size == 0:
        raise ScanError(f"no wire coupling in ({jm_min}, {jm_max}] on a grid of {jm_steps} steps")
    times = t_max_bound * np.arange(1, t_steps + 1) / t_steps

    t1 = time.time()
    logger.info(f"Scan started: N={n_wire}, {jms.size} couplings up to {jm_max:g}, {t_steps} times up to {t_max_bound:g}")
    samples = _evaluate(n_wire, jms, times, j_end, peak_fraction, max_workers, show_progress, "Scanning J_m")
    if not np.all(np.isfinite(samples[:, 2])):
        raise ScanError("scan produced non-finite fidelities")
    best = _best(samples)
    refined = False

    if refine and refine_factor > 1 and (jm_steps > 1 or t_steps > 1):
        jm_step, t_step = jm_max / jm_steps, t_max_bound / t_steps
        fine_jms = best[0] + jm_step * np.arange(-refine_factor, refine_factor + 1) / refine_factor
        fine_jms = fine_jms[(fine_jms > max(jm_min, 0.0)) & (fine_jms <= jm_max)]
        # peak times drift with jm; a window of two coarse steps each side holds the same peak
        fine_times = best[1] + t_step * np.arange(-2 * refine_factor, 2 * refine_factor + 1) / refine_factor
        fine_times = fine_times[(fine_times > 0) & (fine_times <= t_max_bound)]
        if fine_jms.size and fine_times.size:
            fine = np.empty((fine_jms.size, 3))
            for k, jm in enumerate(fine_jms):
                f = end_to_end_fidelity(n_wire, jm, fine_times, j_end)
                i = int(np.argmax(f))
                fine[k] = (jm, fine_times[i], f[i])
            candidate = _best(fine)
            samples = np.vstack([samples, fine])
            if candidate[2] > best[2]:
                best = candidate
                refined = True

    m, s = divmod(time.time() - t1, 60)
    logger.info(f"Scan done! best J_m={best[0]:.6g}, t={best[1]:.6g}, F={best[2]:.6g}. Time used: {int(m):02d}:{s:05.2f}")
    return ScanResult(float(best[0]), float(best[1]), float(best[2]), samples, refined)
