"""
Acceptance Tests
End-to-end experiment runs against their closed forms, plus a seeded
invariant suite.
"""
import pytest
import sys
from pathlib import Path

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ddsim.constants import DEFAULT_SEED
from ddsim.experiments.runner import create_runner
from ddsim.physics.decoupling import PAULI, pauli_group, pauli_set, verify_decoupling_set
from ddsim.physics.models import ModelKind, check_unitary, create_model, initial_state, step
from ddsim.physics.numerics import (
    EnvVector,
    apply_diagonal_phase,
    gaussian_state,
    make_grid,
    to_momentum,
    to_position,
)
from ddsim.physics.observables import reduce
from ddsim.physics.oracles import f_q2p2
from ddsim.utils.config_loader import load_config


def run(tmp_path, preset, overrides=None):
    runner = create_runner(str(tmp_path), jobs=None)
    return runner.run(load_config(preset, overrides or []))


def checks_by_name(report):
    return {c.name: c for c in report.checks}


class TestQP2DecouplingError:
    """q (+) p^2 error against 1 - cos(t^3/8n) e^{-t^2/4n}."""

    def test_error_table(self, tmp_path):
        """Max deviation below 1e-3 over t in {0.5..4} and n in {1..32}."""
        report = run(tmp_path, "fig2", [
            "grid.L=512.0",
            "grid.N=262144",
            "schedule.t_values=[0.5, 1.0, 2.0, 3.0, 4.0]",
            "schedule.n_values=[1, 2, 4, 8, 16, 32]",
        ])
        assert report.passed
        assert report.row_count == 30
        assert report.max_abs_dev < 1e-3


class TestShallowPocket:
    """Free decay, perfect pulsed decoupling and the cut-off onset."""

    @pytest.fixture(scope="class")
    def report(self, tmp_path_factory):
        return run(tmp_path_factory.mktemp("fig1"), "fig1", ["schedule.t_max=10.0"])

    def test_pulsed_identity(self, report):
        """p_+(t)/p_+(0) = 1 at every cycle boundary up to t = 10."""
        check = checks_by_name(report)["pulsed_identity_at_cycle_boundaries"]
        assert check.passed
        assert report.summary["boundary_deviation"] <= 1e-12

    def test_free_matches_oracle(self, report):
        """Free decay follows the quadrature oracle to 1e-4 and is monotone."""
        assert report.max_abs_dev < 1e-4
        assert checks_by_name(report)["free_decay_monotone"].passed

    def test_onsets(self, report):
        """Cut-off slope at 0 vanishes; the uncut one does not."""
        assert abs(report.summary["slope_at_zero_cutoff"]) < 1e-4
        assert abs(report.summary["slope_at_zero_uncut"]) >= 1e-4
        assert report.passed

    def test_cutoff_matches_oracle(self, report):
        """Cut-off free decay follows its quadrature oracle to 1e-4 on the fine grid."""
        checks = checks_by_name(report)
        assert checks["max_abs_dev_cutoff"].passed
        assert checks["max_abs_dev"].passed
        assert report.summary["cutoff_deviation"] < 1e-4
        assert report.summary["cutoff_grid_step"] < 1e-3

    def test_cutoff_columns(self, report):
        """The table carries the cut-off oracle next to its deviation."""
        header = Path(report.csv_path).read_text().splitlines()[0].split(",")
        assert header[-2:] == ["p_plus_cutoff_oracle", "abs_dev_cutoff"]


class TestQPClosedForm:
    """q (+) p error scales as t^2/(8n)."""

    def test_fit(self, tmp_path):
        """Exponent 1 +- 0.05 and constant 1/8 within 5% at t = 1."""
        report = run(tmp_path, "qp_error")
        assert report.passed
        fit = report.summary["t=1.0"]
        assert abs(fit["exponent"] - 1.0) <= 0.05
        assert fit["constant"] == pytest.approx(0.125, rel=0.05)
        assert report.max_abs_dev < 1e-6


class TestQ2P2Limit:
    """q^2 (+) p^2 generator and oscillator limit."""

    def test_generator_and_limit(self, tmp_path):
        """Pulsed states match e^{iG} to 1e-6; the oscillator limit is approached."""
        report = run(tmp_path, "q2p2_limit")
        assert report.passed
        assert report.max_abs_dev < 1e-6
        assert checks_by_name(report)["oscillator_limit_t=1.0"].passed

    @pytest.mark.parametrize("t", [0.0, 0.05, 0.1, 0.15, 0.2])
    def test_f_small_t(self, t):
        """f(t) = 1 + t^2/6 to 1e-4 for t <= 0.2."""
        assert abs(f_q2p2(t) - (1.0 + t ** 2 / 6.0)) < 1e-4


class TestSpinBoson:
    """Pauli-cycle convergence of the spin-boson model."""

    def test_convergence(self, tmp_path):
        """1.8x per doubling, within 1e-2 of the averaged generator, no leakage."""
        report = run(tmp_path, "spin_boson_convergence")
        assert report.passed
        checks = checks_by_name(report)
        assert checks["self_distance_rate_t=2.0"].passed
        assert checks["averaged_generator_t=2.0"].passed
        assert checks["fock_leakage"].passed
        assert report.summary["fock_dim"] == 64
        assert report.summary["averaged_generator_residual"] < 1e-12


class TestFriedrichsLee:
    """Pulsed decoupling fails for the Friedrichs-Lee model."""

    def test_verdict(self, tmp_path):
        """Amplitude and excitation norm persist; the excitation converges only weakly."""
        report = run(tmp_path, "fl_verdict")
        assert report.passed
        assert report.summary["decoupling_fails"] is True
        assert report.summary["weak_probe"]["40"] < 0.05
        assert report.summary["witness_observed_xi1_norm_sq"] < 1e-20

    def test_fig3_comb(self, tmp_path):
        """Simulated phi_{20,6} equals the closed-form comb."""
        report = run(tmp_path, "fig3")
        assert report.passed
        assert report.max_abs_dev <= 1e-12


class TestInvariantSuite:
    """Seeded randomized invariants of the numerical core."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(DEFAULT_SEED)

    @pytest.fixture
    def grid(self):
        return make_grid(16.0, 512)

    def _random_packet(self, rng, grid):
        return gaussian_state(
            grid,
            center=rng.uniform(-3.0, 3.0),
            width=rng.uniform(0.6, 1.4),
            momentum=rng.uniform(-3.0, 3.0),
        )

    def _random_qubit(self, rng):
        qubit = rng.normal(size=2) + 1j * rng.normal(size=2)
        return qubit / np.linalg.norm(qubit)

    def _random_unitary(self, rng):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    def test_transform_round_trip(self, rng, grid):
        """to_position(to_momentum(v)) = v to 1e-12 on random vectors."""
        for _ in range(20):
            data = rng.normal(size=grid.points) + 1j * rng.normal(size=grid.points)
            v = EnvVector(grid, data).normalized()
            back = to_position(to_momentum(v))
            assert np.max(np.abs(back.amplitudes - v.amplitudes)) < 1e-12
            assert to_momentum(v).norm() == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_phase_multiplicative(self, rng, grid):
        """e^{i a f} e^{i b f} = e^{i (a+b) f}."""
        v = self._random_packet(rng, grid)
        for _ in range(10):
            a, b = rng.uniform(-1.0, 1.0, size=2)
            twice = apply_diagonal_phase(apply_diagonal_phase(v, np.square, a), np.square, b)
            once = apply_diagonal_phase(v, np.square, a + b)
            assert np.max(np.abs(twice.amplitudes - once.amplitudes)) < 1e-12

    @pytest.mark.parametrize("kind", [ModelKind.SHALLOW_POCKET, ModelKind.QP, ModelKind.QP2, ModelKind.Q2P2])
    def test_step_unitary_and_additive(self, rng, grid, kind):
        """Steps keep the norm and compose additively in theta for fixed v."""
        model = create_model(kind, grid)
        for _ in range(5):
            psi = initial_state(model, self._random_qubit(rng), self._random_packet(rng, grid))
            v = self._random_unitary(rng)
            check_unitary(v)
            a, b = rng.uniform(0.0, 0.2, size=2)
            composed = step(model, v, a, step(model, v, b, psi))
            direct = step(model, v, a + b, psi)
            assert composed.norm() == pytest.approx(1.0, abs=1e-12)
            assert np.sqrt(np.sum(np.abs(composed.data - direct.data) ** 2) * grid.dx) < 1e-12

    def test_reduced_states_valid(self, rng, grid):
        """Trace one, Hermitian and positive after random evolutions."""
        model = create_model(ModelKind.QP2, grid)
        for _ in range(10):
            psi = initial_state(model, self._random_qubit(rng), self._random_packet(rng, grid))
            for _ in range(3):
                label = rng.choice(list(PAULI))
                psi = step(model, PAULI[label], rng.uniform(0.0, 0.5), psi)
            assert reduce(psi).violations() == []

    def test_decoupling_set_residuals(self):
        """Pauli set and Pauli group average to the trace part to 1e-12."""
        for group in (pauli_set(), pauli_group()):
            holds, residual = verify_decoupling_set(group)
            assert holds
            assert residual < 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
