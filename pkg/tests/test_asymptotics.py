import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from Wct_Utils.asymptotics import (
    AsymptoticRegime,
    asymptotic_fidelity,
    alice_asymptotic_fidelity,
    edge_mode_fidelity,
    edge_mode_alice_fidelity,
    characteristic_poly_wire,
    characteristic_poly_effective,
    approx_eigenvalues,
    edge_eigenvalues,
    approx_edge_eigenvectors,
    dense_eigenvalues,
    optimal_time,
    optimal_wire_coupling,
)
from Wct_Utils.model import build_hamiltonian, uniform_chain
from Wct_Utils.evolve import w_initial_state, propagate_curve
from Wct_Utils.metrics import fidelity_w
from Wct_Utils.errors import SingularParameterError, MappingError


def wire_matrix(n, j_wire):
    return np.diag(np.full(n - 1, 2.0 * j_wire), 1) + np.diag(np.full(n - 1, 2.0 * j_wire), -1)


def dense_edge_modes(regime: AsymptoticRegime, count: int):
    evals, evecs = build_hamiltonian(regime.linear_spec()).eigh
    idx = np.sort(np.argsort(np.abs(evals))[:count])
    return evals[idx], evecs[:, idx]


def numeric_fidelity(regime: AsymptoticRegime, times):
    spec = regime.linear_spec()
    return fidelity_w(propagate_curve(build_hamiltonian(spec), w_initial_state(spec), times), spec)


class TestClosedForms:
    def test_even_reaches_one(self):
        r = AsymptoticRegime(100, 1.0, 150.0)
        assert asymptotic_fidelity(r, np.pi * 150.0 / 4) == pytest.approx(1.0, abs=1e-15)
        assert optimal_time(r) == pytest.approx(np.pi * 150.0 / 4)

    def test_odd_reaches_one(self):
        r = AsymptoticRegime(99, 0.5, 60.0)
        assert optimal_time(r) == pytest.approx(np.pi * 10 / 2)
        assert asymptotic_fidelity(r, optimal_time(r)) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("n", [10, 11])
    def test_zero_time(self, n):
        r = AsymptoticRegime(n, 1.0, 50.0)
        assert asymptotic_fidelity(r, 0.0) == 0.0
        assert alice_asymptotic_fidelity(r, 0.0) == 1.0

    def test_negative_time(self):
        with pytest.raises(ValueError):
            asymptotic_fidelity(AsymptoticRegime(10, 1.0, 50.0), -1.0)

    def test_even_alice_and_bob_sum_to_one(self, rng):
        r = AsymptoticRegime(40, 1.0, 70.0)
        t = rng.uniform(0, 200, 100)
        assert_allclose(asymptotic_fidelity(r, t) + alice_asymptotic_fidelity(r, t), 1.0, atol=1e-14)

    def test_odd_alice_and_bob_bounded(self, rng):
        r = AsymptoticRegime(41, 1.0, 70.0)
        t = rng.uniform(0, 200, 100)
        f_b, f_a = asymptotic_fidelity(r, t), alice_asymptotic_fidelity(r, t)
        assert np.all((0 <= f_b) & (f_b <= 1) & (0 <= f_a) & (f_a <= 1))
        # sin⁴ + cos⁴ = 1 - sin²(2x)/2
        phase = 2 * t / np.sqrt(42)
        assert_allclose(f_b + f_a, 1 - np.sin(2 * phase) ** 2 / 2, atol=1e-14)

    @pytest.mark.parametrize("n", [30, 31])
    def test_edge_modes_rebuild_closed_forms(self, rng, n):
        r = AsymptoticRegime(n, 1.0, 80.0)
        t = rng.uniform(0, 300, 100)
        assert_allclose(edge_mode_fidelity(r, t), asymptotic_fidelity(r, t), atol=1e-12)
        assert_allclose(edge_mode_alice_fidelity(r, t), alice_asymptotic_fidelity(r, t), atol=1e-12)

    def test_optimal_wire_coupling(self):
        assert optimal_wire_coupling(100, 1.0, np.pi * 150.0 / 4) == pytest.approx(150.0)
        with pytest.raises(ValueError):
            optimal_wire_coupling(101, 1.0, 10.0)

    def test_matches_numeric_curve(self):
        r = AsymptoticRegime(100, 1.0, 150.0)
        times = np.linspace(0, 2 * optimal_time(r), 801)
        deviation = np.max(np.abs(numeric_fidelity(r, times) - asymptotic_fidelity(r, times)))
        assert deviation < 0.05

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [50, 100, 150, 51, 101, 151])
    def test_rms_deviation_shrinks_with_coupling(self, n):
        rms = []
        for ratio in (50.0, 100.0, 150.0):
            r = AsymptoticRegime(n, 1.0, ratio)
            times = np.linspace(0, 1.5 * optimal_time(r), 1501)
            diff = numeric_fidelity(r, times) - asymptotic_fidelity(r, times)
            rms.append(np.sqrt(np.mean(diff**2)))
        assert rms[0] > rms[1] > rms[2]
        assert rms[2] < 0.02


class TestRegime:
    def test_parity(self):
        assert AsymptoticRegime(10, 1, 20).parity == "even"
        assert AsymptoticRegime(11, 1, 20).parity == "odd"

    def test_below_one_rejected(self):
        with pytest.raises(ValueError):
            AsymptoticRegime(10, 1.0, 0.5)

    def test_warning_below_threshold(self, caplog):
        with caplog.at_level(logging.WARNING, logger="WCT"):
            AsymptoticRegime(10, 1.0, 5.0, warn_ratio=10.0)
        assert "asymptotic formulas" in caplog.text

    def test_from_branched_spec(self):
        r = AsymptoticRegime.from_spec(uniform_chain(100, 3, 2, 1.0, 150.0))
        assert (r.n_wire, r.j_end, r.j_wire) == (100, pytest.approx(1.0), 150.0)

    def test_from_unequal_ends(self):
        spec = uniform_chain(10, 1, 1, 1.0, 50.0).with_couplings([1.0] + [50.0] * 9 + [2.0])
        with pytest.raises(MappingError):
            AsymptoticRegime.from_spec(spec)


class TestCharacteristicPolynomial:
    def test_single_site(self):
        theta = 0.7
        assert characteristic_poly_wire(1, theta, 1.3) == pytest.approx(4 * 1.3 * np.cos(theta))

    def test_three_sites_against_determinant(self):
        theta = np.pi / 5
        energy = -4 * np.cos(theta)
        expected = np.linalg.det(wire_matrix(3, 1.0) - energy * np.eye(3))
        assert characteristic_poly_wire(3, theta, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_zeros_are_bulk_spectrum(self):
        n = 12
        for k in range(1, n + 1):
            assert abs(characteristic_poly_wire(n, k * np.pi / (n + 1), 1.0)) < 1e-6 * 2.0**n
        bulk = np.sort(-4 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1)))
        assert_allclose(np.linalg.eigvalsh(wire_matrix(n, 1.0)), bulk, atol=1e-12)

    @pytest.mark.parametrize("theta", [0.0, np.pi, 2 * np.pi])
    def test_singular(self, theta):
        with pytest.raises(SingularParameterError):
            characteristic_poly_wire(4, theta, 1.0)

    @pytest.mark.parametrize("n", [1, 2, 5, 8])
    def test_effective_chain_against_determinant(self, n):
        j, jm, theta = 0.4, 1.7, 1.1
        energy = -4 * jm * np.cos(theta)
        h = build_hamiltonian(uniform_chain(n, 1, 1, j, jm)).matrix if n >= 2 else None
        if h is None:
            h = np.array([[0, 2 * j, 0], [2 * j, 0, 2 * j], [0, 2 * j, 0]])
        expected = np.linalg.det(h - energy * np.eye(n + 2))
        assert characteristic_poly_effective(n, theta, j, jm) == pytest.approx(expected, rel=1e-9)


class TestSpectrum:
    def test_even_edge_value(self):
        assert edge_eigenvalues(AsymptoticRegime(100, 1.0, 100.0))[0] == pytest.approx(-0.02)

    def test_odd_edge_value(self):
        assert edge_eigenvalues(AsymptoticRegime(99, 1.0, 100.0))[0] == pytest.approx(-0.4)

    @pytest.mark.parametrize("n", [20, 21])
    def test_approx_list_shape(self, n):
        values = approx_eigenvalues(AsymptoticRegime(n, 1.0, 50.0))
        assert values.shape == (n + 2,)
        assert np.all(np.diff(values) >= 0)
        assert_allclose(values, -values[::-1], atol=1e-12)

    @pytest.mark.parametrize("n", [20, 21])
    @pytest.mark.parametrize("ratio", [1.0, 10.0, 100.0])
    def test_dense_pairing(self, n, ratio):
        evals = dense_eigenvalues(AsymptoticRegime(n, 1.0, ratio, warn_ratio=0.0))
        assert np.max(np.abs(evals + evals[::-1])) <= 1e-10
        assert np.min(np.diff(evals)) > 1e-8

    def test_edge_error_shrinks(self):
        errors = []
        for ratio in (50.0, 100.0, 200.0):
            r = AsymptoticRegime(50, 1.0, ratio)
            dense, _ = dense_edge_modes(r, 2)
            errors.append(np.max(np.abs(dense - edge_eigenvalues(r))))
        assert errors[0] > errors[1] > errors[2]

    @pytest.mark.parametrize("n", [50, 99])
    def test_relative_error_of_lowest_edge(self, n):
        r = AsymptoticRegime(n, 1.0, 100.0)
        count = 2 if r.parity == "even" else 3
        dense, _ = dense_edge_modes(r, count)
        approx = edge_eigenvalues(r)
        assert abs(dense[0] - approx[0]) / abs(approx[0]) <= 0.05
        if r.parity == "odd":
            assert abs(dense[1]) <= 1e-10

    def test_bulk_values_close_to_dense(self):
        r = AsymptoticRegime(30, 1.0, 100.0)
        assert_allclose(dense_eigenvalues(r), approx_eigenvalues(r), atol=0.1)


class TestEdgeEigenvectors:
    @pytest.mark.parametrize("n", [50, 51])
    def test_overlap_with_dense(self, n):
        r = AsymptoticRegime(n, 1.0, 150.0)
        modes = approx_edge_eigenvectors(r)
        _, dense = dense_edge_modes(r, len(modes))
        for k, (_, v) in enumerate(modes):
            assert abs(v @ dense[:, k]) > 0.99

    @pytest.mark.parametrize("n", [8, 9])
    def test_unit_norm(self, n):
        for _, v in approx_edge_eigenvectors(AsymptoticRegime(n, 1.0, 30.0)):
            assert abs(np.linalg.norm(v) - 1) <= 1e-12

    def test_overlap_grows_with_coupling(self):
        overlaps = []
        for ratio in (10.0, 40.0, 160.0):
            r = AsymptoticRegime(20, 1.0, ratio)
            (_, v), _ = approx_edge_eigenvectors(r)
            _, dense = dense_edge_modes(r, 2)
            overlaps.append(abs(v @ dense[:, 0]))
        assert overlaps[0] < overlaps[1] < overlaps[2]

    def test_central_mode_skips_alternate_wire_sites(self):
        r = AsymptoticRegime(9, 1.0, 30.0)
        _, central = approx_edge_eigenvectors(r)[1]
        assert_allclose(central[1:-1], 0.0)
        evals, evecs = build_hamiltonian(r.linear_spec()).eigh
        zero_mode = evecs[:, np.argmin(np.abs(evals))]
        # exact zero mode: nothing on wire sites 1, 3, ..., 9
        assert np.max(np.abs(zero_mode[1:-1:2])) <= 1e-12
        assert abs(abs(central @ zero_mode) - 1) < 0.01
