"""
Tests for Qubit-Environment Models
"""
import pytest
import sys
from pathlib import Path

import numpy as np
from scipy import linalg

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from ddsim.exceptions import BackendMismatchError, NormalizationError, ParameterError, UnitarityError
from ddsim.physics.decoupling import PAULI
from ddsim.physics.models import (
    Backend,
    GridModel,
    ModelKind,
    SpinBosonModel,
    check_unitary,
    create_model,
    fock_leakage,
    initial_state,
    spin_boson_hamiltonian,
    state_distance,
    step,
)
from ddsim.physics.numerics import Representation, cauchy_state, gaussian_state, make_grid

PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)


@pytest.fixture
def grid():
    return make_grid(16.0, 512)


class TestInitialState:
    """Tests for product initial states."""

    def test_grid_product(self, grid):
        """qubit (x) environment on a grid model."""
        model = create_model(ModelKind.QP, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid))
        assert psi.backend == Backend.GRID
        assert psi.data.shape == (2, grid.points)
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)

    def test_momentum_environment_converted(self, grid):
        """A momentum-space environment is stored in position samples."""
        model = create_model(ModelKind.QP2, grid)
        psi = initial_state(model, PLUS, cauchy_state(grid, 1.0, rep=Representation.MOMENTUM))
        assert psi.norm() == pytest.approx(1.0, abs=1e-10)

    def test_unnormalised_qubit(self, grid):
        """Qubit vectors must be normalised."""
        model = create_model(ModelKind.QP, grid)
        with pytest.raises(NormalizationError):
            initial_state(model, np.array([1.0, 1.0]), gaussian_state(grid))

    def test_backend_mismatch(self, grid):
        """Spin-boson states need Fock amplitudes."""
        model = create_model(ModelKind.SPIN_BOSON, fock_dim=8)
        with pytest.raises(BackendMismatchError):
            initial_state(model, PLUS, gaussian_state(grid))

    def test_vacuum(self):
        """'vacuum' is |0> in the Fock basis."""
        model = create_model(ModelKind.SPIN_BOSON, fock_dim=8)
        psi = initial_state(model, PLUS, "vacuum")
        assert psi.backend == Backend.FOCK
        assert np.allclose(psi.data[:, 0], PLUS)
        assert fock_leakage(psi) == 0.0


class TestStep:
    """Tests for the exact per-step propagator."""

    def test_unitary_on_grid(self, grid):
        """Every grid model step preserves the norm."""
        env = gaussian_state(grid, center=0.5, width=0.9, momentum=1.0)
        for kind in (ModelKind.SHALLOW_POCKET, ModelKind.QP, ModelKind.QP2, ModelKind.Q2P2):
            model = create_model(kind, grid)
            psi = initial_state(model, PLUS, env)
            out = step(model, PAULI["X"], 0.37, psi)
            assert out.norm() == pytest.approx(1.0, abs=1e-12), kind

    def test_identity_conjugation(self, grid):
        """v = 1 gives e^{i theta H} blockwise: for the shallow pocket, phases e^{+-i theta x}."""
        model = create_model(ModelKind.SHALLOW_POCKET, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid))
        out = step(model, PAULI["I"], 0.5, psi)
        assert np.allclose(out.data[0], np.exp(0.5j * grid.x) * psi.data[0])
        assert np.allclose(out.data[1], np.exp(-0.5j * grid.x) * psi.data[1])

    def test_x_conjugation_swaps_blocks(self, grid):
        """X H X exchanges the blocks of the shallow pocket."""
        model = create_model(ModelKind.SHALLOW_POCKET, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid))
        out = step(model, PAULI["X"], 0.5, psi)
        assert np.allclose(out.data[0], np.exp(-0.5j * grid.x) * psi.data[0])

    def test_non_unitary_refused(self, grid):
        """Non-unitary system operators are rejected."""
        model = create_model(ModelKind.QP, grid)
        psi = initial_state(model, PLUS, gaussian_state(grid))
        with pytest.raises(UnitarityError):
            step(model, np.array([[1.0, 0.0], [0.0, 2.0]]), 0.1, psi)

    def test_spin_boson_matches_expm(self):
        """Fock step equals dense expm of the conjugated Hamiltonian."""
        model = SpinBosonModel(1.0, 1.0, 0.2, 12)
        psi = initial_state(model, PLUS, "vacuum")
        v = PAULI["Y"]
        lifted = np.kron(v, np.eye(12))
        expected = linalg.expm(0.3j * lifted @ model.hamiltonian @ lifted.conj().T) @ psi.data.reshape(-1)
        out = step(model, v, 0.3, psi)
        assert np.max(np.abs(out.data.reshape(-1) - expected)) < 1e-10


class TestSpinBoson:
    """Tests for the truncated spin-boson Hamiltonian."""

    def test_hermitian(self):
        """H is Hermitian."""
        h = spin_boson_hamiltonian(1.0, 0.7, 0.3, 10)
        assert np.max(np.abs(h - h.conj().T)) == 0.0

    def test_structure(self):
        """Diagonal is w_c m +- w_a/2; coupling links |0,m> and |1,m+1>."""
        h = spin_boson_hamiltonian(1.0, 1.0, 0.2, 4)
        assert h[0, 0] == pytest.approx(0.5)
        assert h[4, 4] == pytest.approx(-0.5)
        assert h[1, 1] == pytest.approx(1.5)
        # sigma_+ (x) a: <0,m| ... |1,m+1> = (Omega/2) sqrt(m+1)
        assert h[0, 5] == pytest.approx(0.1)
        assert h[1, 6] == pytest.approx(0.1 * np.sqrt(2.0))

    def test_rejects_small_truncation(self):
        """At least two Fock levels."""
        with pytest.raises(ParameterError):
            spin_boson_hamiltonian(1.0, 1.0, 0.2, 1)

    def test_decoupled_oscillator_spectrum(self):
        """w_a = Omega = 0 leaves the oscillator: eigenvalues {0, 1}, each twice, at M = 2."""
        h = spin_boson_hamiltonian(1.0, 0.0, 0.0, 2)
        assert np.allclose(np.linalg.eigvalsh(h), [0.0, 0.0, 1.0, 1.0], atol=1e-14)

    @pytest.mark.parametrize("fock_dim", [2, 5, 16])
    def test_bare_qubit_spectrum(self, fock_dim):
        """w_c = Omega = 0 leaves the qubit: +-1/2, each M-fold."""
        h = spin_boson_hamiltonian(0.0, 1.0, 0.0, fock_dim)
        expected = np.array([-0.5] * fock_dim + [0.5] * fock_dim)
        assert np.allclose(np.linalg.eigvalsh(h), expected, atol=1e-14)

    def test_ground_energy_stable_under_truncation(self):
        """Lowest eigenvalue at M = 64 agrees with the dense M = 256 reference."""
        low = np.linalg.eigvalsh(spin_boson_hamiltonian(1.0, 1.0, 0.2, 64))[0]
        reference = np.linalg.eigvalsh(spin_boson_hamiltonian(1.0, 1.0, 0.2, 256))[0]
        assert low == pytest.approx(reference, abs=1e-10)

    def test_propagator_matches_expm(self):
        """e^{i theta H} from the eigendecomposition equals expm at M = 32."""
        model = SpinBosonModel(1.0, 1.0, 0.2, 32)
        for theta in (0.1, 1.3, -2.7):
            expected = linalg.expm(1j * theta * model.hamiltonian)
            assert np.max(np.abs(model.propagator(theta) - expected)) < 1e-10, theta


class TestHelpers:
    """Tests for model helpers."""

    def test_check_unitary_paulis(self):
        """Pauli matrices are unitary."""
        for v in PAULI.values():
            check_unitary(v)

    def test_state_distance(self, grid):
        """Orthogonal qubit sectors are sqrt(2) apart."""
        model = create_model(ModelKind.QP, grid)
        env = gaussian_state(grid)
        a = initial_state(model, np.array([1.0, 0.0]), env)
        b = initial_state(model, np.array([0.0, 1.0]), env)
        assert state_distance(a, b) == pytest.approx(np.sqrt(2.0))

    def test_grid_model_rejects_spin_boson(self, grid):
        """The spin-boson kind is not a grid model."""
        with pytest.raises(ParameterError):
            GridModel(ModelKind.SPIN_BOSON, grid)

    def test_create_model_needs_grid(self):
        """Grid models need a grid."""
        with pytest.raises(ParameterError):
            create_model("qp")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
