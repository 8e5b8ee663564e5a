"""
Decoupling Engine
Decoupling sets, cycles and the pulsed product evolution
(prod_k e^{i theta v_k H v_k*})^n with theta = t/(nN).
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ddsim.constants import AVERAGING_TOLERANCE, NORM_DRIFT_GUARD, NORM_TOLERANCE
from ddsim.exceptions import NormalizationError, NumericalGuardError, ParameterError
from ddsim.physics.models import Model, SystemState, check_unitary, state_distance, step


PAULI: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# "1" is accepted as an alias of the identity in cycle specs
_LABEL_ALIASES = {"1": "I", "ID": "I"}

CycleObserver = Callable[[int, SystemState], None]


@dataclass(frozen=True)
class DecouplingSet:
    """Finite set of d x d unitaries whose conjugation average is the trace projection."""
    elements: Tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def pauli_set() -> DecouplingSet:
    """The qubit decoupling set {1, X, Y, Z} with global phases quotiented out."""
    return DecouplingSet(tuple(PAULI[label] for label in ("I", "X", "Y", "Z")))


def pauli_group() -> DecouplingSet:
    """The full 16-element Pauli group {+-1, +-i} x {1, X, Y, Z}."""
    phases = (1, -1, 1j, -1j)
    return DecouplingSet(tuple(phase * PAULI[label] for phase in phases for label in ("I", "X", "Y", "Z")))


def verify_decoupling_set(V: DecouplingSet) -> Tuple[bool, float]:
    """
    Check the averaging identity (1/|V|) sum_v v x v* = tr(x)/d 1.

    The identity is tested on every matrix unit E_ij, which spans all
    d x d matrices.

    Returns:
        (holds, worst residual)
    """
    if len(V) == 0:
        raise ParameterError("Decoupling set is empty")
    for element in V.elements:
        check_unitary(element)

    d = V.d
    residual = 0.0
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            averaged = sum(v @ unit @ v.conj().T for v in V.elements) / len(V)
            target = np.trace(unit) / d * np.eye(d)
            residual = max(residual, float(np.linalg.norm(averaged - target, 2)))
    return residual < AVERAGING_TOLERANCE, residual


def _same_up_to_phase(a: np.ndarray, b: np.ndarray) -> bool:
    overlap = np.vdot(a, b) / a.shape[0]
    return abs(abs(overlap) - 1.0) < 1e-10


@dataclass(frozen=True)
class DecouplingCycle:
    """Ordered sequence (v_1, ..., v_N) of system unitaries; v_1 acts first."""
    unitaries: Tuple[np.ndarray, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.unitaries:
            raise ParameterError("Decoupling cycle is empty")
        for v in self.unitaries:
            check_unitary(v)

    def __len__(self) -> int:
        return len(self.unitaries)

    def is_balanced(self, V: DecouplingSet) -> bool:
        """True if every element of V (up to phase) appears equally often."""
        counts = [sum(_same_up_to_phase(v, u) for u in self.unitaries) for v in V.elements]
        covered = sum(counts) == len(self.unitaries)
        return covered and len(set(counts)) == 1 and counts[0] > 0

    def __str__(self) -> str:
        return ",".join(self.labels) if self.labels else f"<{len(self)} unitaries>"


def parse_cycle(text: Union[str, Sequence[str]]) -> DecouplingCycle:
    """
    Build a cycle from Pauli labels, e.g. "1,X" or ["I", "X", "Y", "Z"].
    """
    labels = text.split(",") if isinstance(text, str) else list(text)
    normalized = []
    for label in labels:
        key = label.strip().upper()
        key = _LABEL_ALIASES.get(key, key)
        if key not in PAULI:
            raise ParameterError(f"Unknown cycle element '{label}'; expected one of 1, X, Y, Z")
        normalized.append(key)
    if not normalized:
        raise ParameterError("Cycle is empty")
    return DecouplingCycle(
        tuple(PAULI[key] for key in normalized),
        tuple("1" if key == "I" else key for key in normalized),
    )


@dataclass(frozen=True)
class PulseSchedule:
    """n repetitions of a cycle over total time t."""
    cycle: DecouplingCycle
    t: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"Cycle count must be a positive integer, got n={self.n}")
        if not np.isfinite(self.t) or self.t < 0:
            raise ParameterError(f"Total time must be non-negative, got t={self.t}")

    @property
    def theta(self) -> float:
        return self.t / (self.n * len(self.cycle))


def _check_normalized(psi: SystemState) -> None:
    norm = psi.norm()
    if abs(norm ** 2 - 1.0) > NORM_TOLERANCE:
        raise NormalizationError(f"Initial state is not normalised: |psi|^2 = {norm ** 2:.12g}")


def _guard_drift(psi: SystemState) -> None:
    drift = abs(psi.norm() - 1.0)
    if drift > NORM_DRIFT_GUARD:
        raise NumericalGuardError(f"Norm drift {drift:.3e} exceeds guard {NORM_DRIFT_GUARD:.0e}")


def evolve_pulsed(
    model: Model,
    schedule: PulseSchedule,
    psi0: SystemState,
    observer: Optional[CycleObserver] = None
) -> SystemState:
    """
    Apply (e^{i theta v_N H v_N*} ... e^{i theta v_1 H v_1*})^n to psi0.

    Args:
        model: Model to evolve under
        schedule: Cycle, total time and repetition count
        psi0: Normalised initial state
        observer: Called as observer(k, psi) after the k-th completed cycle

    Returns:
        The state at time t
    """
    _check_normalized(psi0)
    theta = schedule.theta
    psi = psi0
    for k in range(1, schedule.n + 1):
        for v in schedule.cycle.unitaries:
            psi = step(model, v, theta, psi)
        if observer is not None:
            observer(k, psi)
    _guard_drift(psi)
    return psi


def evolve_free(model: Model, t: float, psi0: SystemState) -> SystemState:
    """Free evolution e^{itH} psi0 as a single exact step."""
    if not np.isfinite(t):
        raise ParameterError(f"Evolution time must be finite, got t={t}")
    _check_normalized(psi0)
    psi = step(model, PAULI["I"], t, psi0)
    _guard_drift(psi)
    return psi


def evolve_pulse_train(
    model: Model,
    cycle: DecouplingCycle,
    dt: float,
    t: float,
    psi0: SystemState
) -> SystemState:
    """
    Kicks of width dt in cycle order up to time t.

    A time t that is not a multiple of dt ends with a partial kick of
    the next cycle element, so states between pulses can be sampled.
    """
    if not dt > 0:
        raise ParameterError(f"Pulse interval must be positive, got dt={dt}")
    if t < 0:
        raise ParameterError(f"Total time must be non-negative, got t={t}")
    _check_normalized(psi0)

    full_kicks = int(np.floor(t / dt + 1e-9))
    remainder = t - full_kicks * dt
    psi = psi0
    for index in range(full_kicks):
        psi = step(model, cycle.unitaries[index % len(cycle)], dt, psi)
    if remainder > 1e-12 * max(1.0, t):
        psi = step(model, cycle.unitaries[full_kicks % len(cycle)], remainder, psi)
    _guard_drift(psi)
    return psi


def convergence_scan(
    model: Model,
    cycle: DecouplingCycle,
    t: float,
    n_list: Sequence[int],
    psi0: SystemState,
    reference: Union[SystemState, str] = "self"
) -> List[Tuple[int, float]]:
    """
    Distance of the pulsed state to a reference for each n.

    Args:
        reference: A target state, or "self" for ||psi_{2n} - psi_n||

    Returns:
        List of (n, distance) in n_list order
    """
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ParameterError(f"n_list must be strictly increasing, got {n_list}")

    results = []
    for n in n_list:
        psi_n = evolve_pulsed(model, PulseSchedule(cycle, t, n), psi0)
        if isinstance(reference, str):
            if reference != "self":
                raise ParameterError(f"Unknown reference '{reference}'")
            target = evolve_pulsed(model, PulseSchedule(cycle, t, 2 * n), psi0)
        else:
            target = reference
        results.append((n, state_distance(psi_n, target)))
    return results


def averaged_generator(H: np.ndarray, V: DecouplingSet) -> np.ndarray:
    """
    (1/|V|) sum_v (v (x) 1) H (v (x) 1)* for a finite-dimensional H.

    H is indexed with the system factor first.
    """
    d = V.d
    if H.shape[0] % d != 0:
        raise ParameterError(f"Hamiltonian dimension {H.shape[0]} is not a multiple of d={d}")
    identity = np.eye(H.shape[0] // d)
    total = np.zeros_like(H, dtype=complex)
    for v in V.elements:
        lifted = np.kron(v, identity)
        total += lifted @ H @ lifted.conj().T
    return total / len(V)
