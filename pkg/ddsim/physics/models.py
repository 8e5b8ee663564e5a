"""
Qubit-Environment Models
Block Hamiltonians diag(A, B) on a spectral grid and the truncated
single-mode spin-boson model, each with an exact per-step propagator.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from ddsim.constants import (
    NORM_TOLERANCE,
    QUBIT_NORM_TOLERANCE,
    SPIN_BOSON_COUPLING,
    SPIN_BOSON_FOCK_DIM,
    SPIN_BOSON_OMEGA_A,
    SPIN_BOSON_OMEGA_C,
    UNITARITY_TOLERANCE,
)
from ddsim.exceptions import (
    BackendMismatchError,
    NormalizationError,
    ParameterError,
    UnitarityError,
)
from ddsim.physics.numerics import EnvVector, Grid, Representation, to_position


class ModelKind(str, Enum):
    """Supported qubit-environment models."""
    SHALLOW_POCKET = "shallow_pocket"   # diag(q, -q)
    QP = "qp"                           # diag(q, p)
    QP2 = "qp2"                         # diag(q, p^2)
    Q2P2 = "q2p2"                       # diag(q^2, p^2)
    SPIN_BOSON = "spin_boson"


class Backend(str, Enum):
    """Storage of the environment factor of a state."""
    GRID = "grid"
    FOCK = "fock"


def _identity(coords: np.ndarray) -> np.ndarray:
    return coords


@dataclass(frozen=True)
class Block:
    """One diagonal block of a grid Hamiltonian: f(coord) in its diagonal representation."""
    representation: Representation
    symbol: Callable[[np.ndarray], np.ndarray]
    label: str


Q = Block(Representation.POSITION, _identity, "q")
MINUS_Q = Block(Representation.POSITION, np.negative, "-q")
P = Block(Representation.MOMENTUM, _identity, "p")
Q_SQUARED = Block(Representation.POSITION, np.square, "q^2")
P_SQUARED = Block(Representation.MOMENTUM, np.square, "p^2")

GRID_BLOCKS = {
    ModelKind.SHALLOW_POCKET: (Q, MINUS_Q),
    ModelKind.QP: (Q, P),
    ModelKind.QP2: (Q, P_SQUARED),
    ModelKind.Q2P2: (Q_SQUARED, P_SQUARED),
}


@dataclass(frozen=True)
class GridModel:
    """Block-diagonal model H = |0><0| (x) A + |1><1| (x) B on a grid."""
    kind: ModelKind
    grid: Grid

    def __post_init__(self):
        if self.kind not in GRID_BLOCKS:
            raise ParameterError(f"{self.kind.value} is not a grid model")

    @property
    def backend(self) -> Backend:
        return Backend.GRID

    @property
    def blocks(self) -> Tuple[Block, Block]:
        return GRID_BLOCKS[self.kind]


@dataclass(frozen=True)
class SpinBosonModel:
    """
    Single-mode spin-boson model truncated to M Fock levels.

    The Hamiltonian is diagonalised once at construction; every step
    reuses the eigendecomposition.
    """
    omega_c: float = SPIN_BOSON_OMEGA_C
    omega_a: float = SPIN_BOSON_OMEGA_A
    coupling: float = SPIN_BOSON_COUPLING
    fock_dim: int = SPIN_BOSON_FOCK_DIM
    hamiltonian: np.ndarray = field(init=False, repr=False, compare=False)
    eigenvalues: np.ndarray = field(init=False, repr=False, compare=False)
    eigenvectors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = spin_boson_hamiltonian(self.omega_c, self.omega_a, self.coupling, self.fock_dim)
        energies, vectors = linalg.eigh(h)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "eigenvalues", energies)
        object.__setattr__(self, "eigenvectors", vectors)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.SPIN_BOSON

    @property
    def backend(self) -> Backend:
        return Backend.FOCK

    def propagator(self, theta: float) -> np.ndarray:
        """Dense e^{i theta H} from the stored eigendecomposition."""
        w = self.eigenvectors
        return (w * np.exp(1j * theta * self.eigenvalues)) @ w.conj().T


Model = Union[GridModel, SpinBosonModel]


@dataclass(frozen=True)
class SystemState:
    """
    Pure qubit (x) environment state stored as a 2 x N array.

    Row index is the qubit basis index. Grid states hold position-space
    samples and carry the grid for the dx weight; Fock states hold
    amplitudes over |0>..|M-1>.
    """
    backend: Backend
    data: np.ndarray
    grid: Optional[Grid] = None

    @property
    def weight(self) -> float:
        return self.grid.dx if self.backend == Backend.GRID else 1.0

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2) * self.weight))

    def with_data(self, data: np.ndarray) -> "SystemState":
        return SystemState(self.backend, data, self.grid)


def spin_boson_hamiltonian(omega_c: float, omega_a: float, coupling: float, M: int) -> np.ndarray:
    """
    H = w_c 1(x)a^dag a + (w_a/2) Z(x)1 + (Omega/2)(s+ (x) a + s- (x) a^dag).

    Qubit factor first in the Kronecker ordering, Z = diag(1, -1),
    a|m> = sqrt(m)|m-1> truncated to M levels.
    """
    if int(M) != M or M < 2:
        raise ParameterError(f"Fock truncation must be an integer >= 2, got M={M}")
    M = int(M)
    a = np.diag(np.sqrt(np.arange(1, M, dtype=float)), k=1).astype(complex)
    number = a.conj().T @ a
    sigma_plus = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)

    h = omega_c * np.kron(np.eye(2), number)
    h = h + 0.5 * omega_a * np.kron(z, np.eye(M))
    h = h + 0.5 * coupling * (np.kron(sigma_plus, a) + np.kron(sigma_plus.conj().T, a.conj().T))
    # exact Hermitian part; removes rounding asymmetry
    return 0.5 * (h + h.conj().T)


def check_unitary(v: np.ndarray, tolerance: float = UNITARITY_TOLERANCE) -> None:
    """Raise UnitarityError if ||v v* - 1|| exceeds tolerance."""
    v = np.asarray(v)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise UnitarityError(f"System operator must be square, got shape {v.shape}")
    residual = np.linalg.norm(v @ v.conj().T - np.eye(v.shape[0]), 2)
    if residual > tolerance:
        raise UnitarityError(f"System operator is not unitary: ||v v* - 1|| = {residual:.3e}")


def _check_backend(model: Model, psi: SystemState) -> None:
    if psi.backend != model.backend:
        raise BackendMismatchError(
            f"{model.kind.value} model needs a {model.backend.value} state, got {psi.backend.value}"
        )
    if isinstance(model, GridModel):
        if psi.grid != model.grid:
            raise BackendMismatchError("State and model live on different grids")
        expected = (2, model.grid.points)
    else:
        expected = (2, model.fock_dim)
    if psi.data.shape != expected:
        raise BackendMismatchError(f"State shape {psi.data.shape} does not match model shape {expected}")


def _apply_block(grid: Grid, block: Block, theta: float, row: np.ndarray) -> np.ndarray:
    if block.representation == Representation.POSITION:
        return np.exp(1j * theta * block.symbol(grid.x)) * row
    spectrum = grid.forward(row)
    return grid.inverse(np.exp(1j * theta * block.symbol(grid.k)) * spectrum)


def step(model: Model, v: np.ndarray, theta: float, psi: SystemState) -> SystemState:
    """
    Apply e^{i theta (v(x)1) H (v(x)1)*} exactly.

    Args:
        model: Grid or spin-boson model
        v: 2x2 unitary acting on the qubit
        theta: Step angle
        psi: State on the model's backend

    Returns:
        The propagated state
    """
    _check_backend(model, psi)
    v = np.asarray(v, dtype=complex)
    check_unitary(v)
    if theta == 0:
        return psi

    rotated = v.conj().T @ psi.data
    if isinstance(model, GridModel):
        upper, lower = model.blocks
        rotated = np.stack([
            _apply_block(model.grid, upper, theta, rotated[0]),
            _apply_block(model.grid, lower, theta, rotated[1]),
        ])
    else:
        flat = model.propagator(theta) @ rotated.reshape(-1)
        rotated = flat.reshape(2, model.fock_dim)
    return psi.with_data(v @ rotated)


def initial_state(
    model: Model,
    qubit: np.ndarray,
    environment: Union[EnvVector, np.ndarray, str]
) -> SystemState:
    """
    Product state qubit (x) environment.

    Args:
        model: Model the state is built for
        qubit: Normalised 2-vector
        environment: EnvVector for grid models (either representation),
            Fock amplitudes or "vacuum" for the spin-boson model

    Returns:
        Normalised SystemState
    """
    qubit = np.asarray(qubit, dtype=complex)
    if qubit.shape != (2,):
        raise ParameterError(f"Qubit vector must have two components, got shape {qubit.shape}")
    qubit_norm = np.linalg.norm(qubit)
    if abs(qubit_norm - 1.0) > QUBIT_NORM_TOLERANCE:
        raise NormalizationError(f"Qubit vector is not normalised: |q| = {qubit_norm:.12g}")

    if isinstance(model, GridModel):
        if not isinstance(environment, EnvVector):
            raise BackendMismatchError("Grid models need an EnvVector environment state")
        if environment.grid != model.grid:
            raise BackendMismatchError("Environment vector lives on a different grid")
        env = environment if environment.representation == Representation.POSITION else to_position(environment)
        if not env.is_normalized():
            raise NormalizationError(f"Environment vector is not normalised: |xi| = {env.norm():.12g}")
        return SystemState(Backend.GRID, np.outer(qubit, env.amplitudes), model.grid)

    if isinstance(environment, str):
        if environment != "vacuum":
            raise ParameterError(f"Unknown Fock environment state '{environment}'")
        env = np.zeros(model.fock_dim, dtype=complex)
        env[0] = 1.0
    elif isinstance(environment, EnvVector):
        raise BackendMismatchError("Spin-boson model needs Fock amplitudes, got a grid vector")
    else:
        env = np.asarray(environment, dtype=complex)
        if env.shape != (model.fock_dim,):
            raise BackendMismatchError(f"Fock vector must have {model.fock_dim} components")
        if abs(np.linalg.norm(env) - 1.0) > NORM_TOLERANCE:
            raise NormalizationError("Fock environment vector is not normalised")
    return SystemState(Backend.FOCK, np.outer(qubit, env))


def state_distance(a: SystemState, b: SystemState) -> float:
    """Hilbert-space distance ||a - b|| with the backend's weight."""
    if a.backend != b.backend or a.data.shape != b.data.shape:
        raise BackendMismatchError("Cannot compare states on different backends")
    return float(np.sqrt(np.sum(np.abs(a.data - b.data) ** 2) * a.weight))


def fock_leakage(psi: SystemState) -> float:
    """Population of the two highest Fock levels."""
    if psi.backend != Backend.FOCK:
        raise BackendMismatchError("Fock leakage is only defined for Fock states")
    return float(np.sum(np.abs(psi.data[:, -2:]) ** 2))


def create_model(
    kind: Union[ModelKind, str],
    grid: Optional[Grid] = None,
    omega_c: float = SPIN_BOSON_OMEGA_C,
    omega_a: float = SPIN_BOSON_OMEGA_A,
    coupling: float = SPIN_BOSON_COUPLING,
    fock_dim: int = SPIN_BOSON_FOCK_DIM
) -> Model:
    """Factory function to create a model."""
    kind = ModelKind(kind)
    if kind == ModelKind.SPIN_BOSON:
        return SpinBosonModel(omega_c, omega_a, coupling, fock_dim)
    if grid is None:
        raise ParameterError(f"{kind.value} model needs a grid")
    return GridModel(kind, grid)
