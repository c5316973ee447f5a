"""
Self-check: the fast single-excitation path against the full Hilbert space oracle,
plus the structural invariants, on small built-in configurations.
"""

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Callable
import numpy as np

from ..base_component import Base_Component
from .. import logger
from ..model import ChainSpec, NoiseField, build_hamiltonian, uniform_chain, to_effective_linear, effective_amplitudes
from ..evolve import Schedule, w_initial_state, propagate, propagate_schedule
from .. import metrics, oracle, asymptotics

TOLERANCE = 1e-9
CASES = [(2, 2, 1), (1, 3, 2), (2, 3, 2), (3, 2, 3), (2, 4, 2), (1, 5, 3)]

Builder = Callable[[ChainSpec, NoiseField | None], object]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def random_case(rng: np.random.Generator, m: int, n: int, mb: int, noisy: bool = True) -> tuple[ChainSpec, NoiseField | None]:
    spec = ChainSpec(n, m, mb, rng.uniform(0.5, 1.5, m), rng.uniform(0.5, 1.5, mb), rng.uniform(0.5, 1.5, n - 1))
    if not noisy:
        return spec, None
    return spec, NoiseField.from_arrays(spec, rng.uniform(-0.5, 0.5, spec.n_bonds), rng.uniform(-0.5, 0.5, spec.dim))


def _cases(seed: int = 7, noisy: bool = True):
    rng = np.random.default_rng(seed)
    return [random_case(rng, m, n, mb, noisy) for m, n, mb in CASES]


def _report(error: float, tol: float = TOLERANCE) -> tuple[bool, str]:
    return bool(error <= tol), f"max deviation {error:.3e} (tolerance {tol:.0e})"


def check_hamiltonian_symmetry(builder: Builder):
    worst = 0.0
    for spec, noise in _cases():
        h = np.asarray(builder(spec, noise).matrix)
        worst = max(worst, float(np.max(np.abs(h - h.T))))
    return _report(worst, 0.0)


def check_noise_diagonal(builder: Builder):
    worst = 0.0
    for spec, noise in _cases():
        fast = np.asarray(builder(spec, noise).matrix)
        full = oracle.single_excitation_block(oracle.full_hamiltonian(spec, noise), spec.dim)
        worst = max(worst, float(np.max(np.abs(np.diag(fast) - np.diag(full)))))
    return _report(worst)


def check_hopping_matrix(builder: Builder):
    worst = 0.0
    for spec, noise in _cases(noisy=False):
        fast = np.asarray(builder(spec, noise).matrix)
        full = oracle.single_excitation_block(oracle.full_hamiltonian(spec, noise), spec.dim)
        worst = max(worst, float(np.max(np.abs(fast - full))))
    return _report(worst)


def check_single_excitation_evolution(builder: Builder):
    worst = 0.0
    for k, (spec, noise) in enumerate(_cases()):
        t = 0.7 + 0.4 * k
        fast = propagate(builder(spec, noise), w_initial_state(spec), t).values
        full = oracle.single_excitation_amplitudes(oracle.full_evolve(spec, noise, t), spec.dim)
        worst = max(worst, float(np.max(np.abs(fast - full))))
    return _report(worst)


def check_piecewise_evolution(builder: Builder):
    rng = np.random.default_rng(11)
    worst = 0.0
    for m, n, mb in [(1, 3, 2), (2, 2, 2)]:
        segments = [random_case(rng, m, n, mb) for _ in range(10)]
        durations = rng.uniform(0.05, 0.3, 10)
        schedule = Schedule(tuple((builder(s, z), d) for (s, z), d in zip(segments, durations)))
        fast = propagate_schedule(schedule, w_initial_state(segments[0][0])).values
        full = oracle.full_evolve_schedule([(s, z, d) for (s, z), d in zip(segments, durations)])
        worst = max(worst, float(np.max(np.abs(fast - oracle.single_excitation_amplitudes(full, segments[0][0].dim)))))
    return _report(worst)


def check_excitation_conservation(builder: Builder):
    worst = 0.0
    for spec, noise in _cases()[:3]:
        worst = max(worst, oracle.leakage(oracle.full_evolve(spec, noise, 1.9), spec.dim))
    return _report(worst, 1e-12)


def check_bob_density_matrix(builder: Builder):
    worst = 0.0
    for spec, noise in _cases():
        psi = oracle.full_evolve(spec, noise, 1.3)
        c = propagate(builder(spec, noise), w_initial_state(spec), 1.3)
        fast = metrics.reduce_to_bob(c, spec).matrix
        full = oracle.partial_trace_bob(psi, spec).matrix
        worst = max(worst, float(np.max(np.abs(fast - full))))
    return _report(worst)


def check_concurrence(builder: Builder):
    worst = 0.0
    for spec, noise in _cases():
        if spec.m_bob < 2:
            continue
        psi = oracle.full_evolve(spec, noise, 2.1)
        c = propagate(builder(spec, noise), w_initial_state(spec), 2.1)
        pairs = metrics.bob_pairs(spec)
        full = np.array([oracle.pair_concurrence(psi, spec, i, j) for i, j in pairs])
        fast = np.array([metrics.concurrence_pair(c, spec, i, j) for i, j in pairs])
        worst = max(worst, float(np.max(np.abs(fast - full))))
        cw = 0.0 if np.any(full == 0) else float(np.prod(full) ** (1.0 / len(full)))
        worst = max(worst, abs(metrics.concurrence_w(c, spec) - cw), abs(metrics.concurrence_min(c, spec) - full.min()))
    return _report(worst)


def check_norm_conservation(builder: Builder):
    rng = np.random.default_rng(3)
    spec, _ = random_case(rng, 3, 40, 2, noisy=False)
    segments = []
    for _ in range(100):
        s, z = random_case(rng, 3, 40, 2)
        segments.append((builder(s, z), 0.37))
    c = propagate_schedule(Schedule(tuple(segments)), w_initial_state(spec))
    return _report(abs(c.norm2() - 1.0), 1e-10)


def check_permutation_symmetry(builder: Builder):
    worst = 0.0
    for m, mb in [(3, 2), (4, 4)]:
        spec = uniform_chain(12, m, mb, 1.0, 1.7)
        h = builder(spec, None)
        for t in (0.9, 3.3, 7.1):
            c = propagate(h, w_initial_state(spec), t).values
            worst = max(worst, float(np.ptp(c[spec.alice_slice].real) + np.ptp(c[spec.alice_slice].imag)))
            worst = max(worst, float(np.ptp(c[spec.bob_slice].real) + np.ptp(c[spec.bob_slice].imag)))
    return _report(worst, 1e-12)


def check_mapping_equivalence(builder: Builder):
    worst = 0.0
    for m, mb in [(2, 3), (4, 1), (3, 3)]:
        spec = uniform_chain(10, m, mb, 1.0, 2.2)
        linear = to_effective_linear(spec)
        for t in (1.1, 4.0, 6.5):
            branched = propagate(builder(spec, None), w_initial_state(spec), t)
            mapped = propagate(builder(linear, None), w_initial_state(linear), t)
            worst = max(worst, abs(metrics.fidelity_w(branched, spec) - metrics.fidelity_w(mapped, linear)))
            worst = max(worst, float(np.max(np.abs(effective_amplitudes(branched, spec) - mapped.values))))
    return _report(worst, 1e-10)


def check_spectrum_pairing(builder: Builder):
    worst = 0.0
    for n in (20, 21):
        for ratio in (1.0, 10.0, 100.0):
            evals = np.linalg.eigvalsh(np.asarray(builder(uniform_chain(n, 1, 1, 1.0, ratio), None).matrix))
            worst = max(worst, float(np.max(np.abs(evals + evals[::-1]))) / ratio)
    return _report(worst, 1e-10)


def check_edge_mode_reconstruction(builder: Builder):
    worst = 0.0
    t = np.linspace(0.0, 50.0, 101)
    for n in (20, 21):
        regime = asymptotics.AsymptoticRegime(n, 1.0, 100.0)
        worst = max(worst, float(np.max(np.abs(asymptotics.edge_mode_fidelity(regime, t) - asymptotics.asymptotic_fidelity(regime, t)))))
    return _report(worst, 1e-12)


CHECKS: dict[str, Callable[[Builder], tuple[bool, str]]] = {
    "hamiltonian_symmetry": check_hamiltonian_symmetry,
    "noise_diagonal": check_noise_diagonal,
    "hopping_matrix": check_hopping_matrix,
    "single_excitation_evolution": check_single_excitation_evolution,
    "piecewise_evolution": check_piecewise_evolution,
    "excitation_conservation": check_excitation_conservation,
    "bob_density_matrix": check_bob_density_matrix,
    "concurrence": check_concurrence,
    "norm_conservation": check_norm_conservation,
    "permutation_symmetry": check_permutation_symmetry,
    "mapping_equivalence": check_mapping_equivalence,
    "spectrum_pairing": check_spectrum_pairing,
    "edge_mode_reconstruction": check_edge_mode_reconstruction,
}


def run_checks(builder: Builder = build_hamiltonian, names: list[str] | None = None) -> list[CheckResult]:
    results = []
    for name, check in CHECKS.items():
        if names and name not in names:
            continue
        try:
            passed, detail = check(builder)
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        if passed:
            logger.debug(f"{name}: ok, {detail}")
        else:
            logger.error(f"Check failed: {name}: {detail}")
        results.append(CheckResult(name, passed, detail))
    return results


class Verify(Base_Component):
    def __init__(self, config=None):
        super().__init__("verify", "Cross-check the fast path against the full Hilbert space oracle", config)

    def _arguments(self, parser: argparse.ArgumentParser):
        parser.add_argument("--check", action="append", choices=sorted(CHECKS), default=None, help="run only the named check (repeatable)")

    def run(self, args) -> int:
        t1 = time.time()
        logger.info("Verification started")
        results = run_checks(names=args.check)
        failed = [r.name for r in results if not r.passed]
        logger.info(f"Verification done! Time used: {time.time() - t1:.1f}s")
        if failed:
            sys.stdout.write(f"FAIL ({len(failed)} of {len(results)} checks): {', '.join(failed)}\n")
            return 1
        sys.stdout.write(f"PASS ({len(results)} checks)\n")
        return 0
