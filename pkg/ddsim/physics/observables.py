"""
Reduced Dynamics
Partial trace over the environment, coherence and decoupling-error
observables, and a reference integrator for dephasing generators.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ddsim.constants import DENSITY_TOLERANCE
from ddsim.exceptions import NumericalGuardError, ParameterError
from ddsim.physics.models import SystemState


PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class QubitDensity:
    """2x2 reduced density matrix."""
    matrix: np.ndarray

    def violations(self, tolerance: float = DENSITY_TOLERANCE) -> List[str]:
        """Names of the density-matrix invariants this matrix breaks."""
        rho = self.matrix
        problems = []
        if np.max(np.abs(rho - rho.conj().T)) > tolerance:
            problems.append("hermiticity")
        if abs(np.trace(rho) - 1.0) > tolerance:
            problems.append("trace")
        hermitian = 0.5 * (rho + rho.conj().T)
        if np.min(np.linalg.eigvalsh(hermitian)) < -tolerance:
            problems.append("positivity")
        return problems

    def is_valid(self, tolerance: float = DENSITY_TOLERANCE) -> bool:
        return not self.violations(tolerance)

    @classmethod
    def pure(cls, qubit: np.ndarray) -> "QubitDensity":
        qubit = np.asarray(qubit, dtype=complex)
        return cls(np.outer(qubit, qubit.conj()))


def reduce(psi: SystemState) -> QubitDensity:
    """Partial trace over the environment: rho_ab = <psi_b, psi_a>."""
    data = psi.data
    return QubitDensity(data @ data.conj().T * psi.weight)


def coherence_plus(rho: QubitDensity) -> float:
    """<+|rho|+>."""
    return float(np.real(np.vdot(PLUS, rho.matrix @ PLUS)))


def decoupling_error(rho_t: QubitDensity, rho_0: QubitDensity) -> float:
    """Squared Hilbert-Schmidt distance ||rho_t - rho_0||_2^2."""
    diff = rho_t.matrix - rho_0.matrix
    return float(np.real(np.sum(np.abs(diff) ** 2)))


def coherence_error(rho_t: QubitDensity) -> float:
    """2(1 - <+|rho_t|+>); equals decoupling_error from |+><+| when rho_t is pure."""
    return 2.0 * (1.0 - coherence_plus(rho_t))


def is_pure(rho: QubitDensity, tolerance: float = DENSITY_TOLERANCE) -> bool:
    purity = float(np.real(np.trace(rho.matrix @ rho.matrix)))
    return abs(purity - 1.0) <= tolerance


def integrate_dephasing(
    rho0: QubitDensity,
    times: Sequence[float],
    rate: float,
    drift: Optional[Callable[[float], float]] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12
) -> List[QubitDensity]:
    """
    Integrate rho' = -rate [Z,[Z,rho]] - i drift(t) [Z,rho].

    Args:
        rho0: State at t = 0
        times: Increasing output times, starting at or after 0
        rate: Dephasing rate
        drift: Time-dependent Z rotation frequency (default 0)

    Returns:
        Density matrices at the requested times
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return []
    if times[0] < 0 or np.any(np.diff(times) < 0):
        raise ParameterError("Output times must be non-negative and increasing")
    if times[-1] == 0:
        return [rho0 for _ in times]

    def rhs(t, y):
        rho = y.reshape(2, 2)
        commutator = PAULI_Z @ rho - rho @ PAULI_Z
        double = PAULI_Z @ commutator - commutator @ PAULI_Z
        omega = drift(t) if drift is not None else 0.0
        return (-rate * double - 1j * omega * commutator).reshape(-1)

    solution = solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        rho0.matrix.astype(complex).reshape(-1),
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise NumericalGuardError(f"Dephasing integration failed: {solution.message}")
    return [QubitDensity(solution.y[:, i].reshape(2, 2)) for i in range(len(times))]
