"""
Friedrichs-Lee Decay Model
Exact evolution maps of the flat-coupling Friedrichs-Lee model on a
cell-centred time grid, the pulsed (1, X, Y, Z) cycle, and the checks
showing that decoupling fails for it.

A state is stored by qubit sector: x = (x1, x2) are the no-photon
amplitudes and xi = (xi1, xi2) the one-photon wave functions, sector 0
being the excited qubit level. The free map couples x1 to xi2 only.
"""
from dataclasses import dataclass, field
from functools import cached_property, reduce as fold
from math import gcd
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ddsim.constants import FL_CELLS_PER_WINDOW, GRID_MULTIPLE_TOLERANCE, NORM_TOLERANCE
from ddsim.exceptions import GridError, ParameterError, SubspaceError, SupportOverflowError
from ddsim.physics.decoupling import PAULI
from ddsim.physics.models import check_unitary
from ddsim.physics.observables import QubitDensity


# Kick order of one pulsed cycle; the identity acts first
FL_CYCLE = ("I", "X", "Y", "Z")

# Cell count above which a time grid is refused
MAX_TIME_CELLS = 20_000_000


@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform cells of width ds on [-t_max - ds, ds).

    Samples sit at cell centres; 0 is a cell face, so every half-open
    window [-a, 0) with a a multiple of ds is a whole number of cells.
    """
    ds: float
    t_max: float

    @property
    def s_min(self) -> float:
        return -self.t_max - self.ds

    @property
    def s_max(self) -> float:
        return self.ds

    @cached_property
    def cells(self) -> int:
        return int(round(self.t_max / self.ds)) + 2

    @cached_property
    def zero_face(self) -> int:
        """Index of the first cell with non-negative centre."""
        return self.cells - 1

    @cached_property
    def centers(self) -> np.ndarray:
        return self.s_min + (np.arange(self.cells) + 0.5) * self.ds

    def cells_in(self, duration: float) -> int:
        """Number of cells spanned by duration; raises if not a whole number."""
        ratio = duration / self.ds
        whole = int(round(ratio))
        if abs(ratio - whole) > GRID_MULTIPLE_TOLERANCE * max(1.0, ratio):
            raise GridError(f"Duration {duration} is not a multiple of ds={self.ds}")
        return whole


def make_time_grid(t_max: float, ds: float) -> TimeGrid:
    """Build the time grid for evolutions up to t_max."""
    if not (np.isfinite(ds) and ds > 0):
        raise GridError(f"Time step must be positive, got ds={ds}")
    if not (np.isfinite(t_max) and t_max > 0):
        raise GridError(f"Time window must be positive, got t_max={t_max}")
    grid = TimeGrid(ds=float(ds), t_max=float(t_max))
    grid.cells_in(t_max)
    if grid.cells > MAX_TIME_CELLS:
        raise GridError(f"Time grid needs {grid.cells} cells, limit is {MAX_TIME_CELLS}")
    return grid


def cycle_time_step(t: float, n_values: Sequence[int], cells_per_window: int = FL_CELLS_PER_WINDOW) -> float:
    """
    Largest ds that resolves every quarter-cycle window t/(4n) with at
    least cells_per_window cells for all n in n_values.
    """
    n_values = [int(n) for n in n_values]
    if not n_values or min(n_values) < 1:
        raise ParameterError(f"Cycle counts must be positive integers, got {n_values}")
    common = fold(lambda a, b: a * b // gcd(a, b), n_values)
    return t / (4.0 * cells_per_window * common)


@dataclass(frozen=True)
class FLState:
    """Friedrichs-Lee vector (x1, xi1, x2, xi2) on a time grid."""
    grid: TimeGrid
    x: np.ndarray
    xi: np.ndarray

    @property
    def x1(self) -> complex:
        return complex(self.x[0])

    @property
    def x2(self) -> complex:
        return complex(self.x[1])

    @property
    def xi1(self) -> np.ndarray:
        return self.xi[0]

    @property
    def xi2(self) -> np.ndarray:
        return self.xi[1]

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.x) ** 2) + np.sum(np.abs(self.xi) ** 2) * self.grid.ds)

    def in_subspace(self, tolerance: float = NORM_TOLERANCE) -> bool:
        """True if xi1 and x2 vanish, i.e. the state has the form (x1, 0, 0, xi2)."""
        leak = abs(self.x2) ** 2 + np.sum(np.abs(self.xi1) ** 2) * self.grid.ds
        return leak <= tolerance


@dataclass(frozen=True)
class FLSchedule:
    """n pulsed cycles of kick width tau; tau must be a whole number of cells."""
    tau: float
    n: int
    grid: TimeGrid = field(repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"Cycle count must be a positive integer, got n={self.n}")
        if not self.tau > 0:
            raise ParameterError(f"Kick width must be positive, got tau={self.tau}")
        self.grid.cells_in(self.tau)

    @property
    def total_time(self) -> float:
        return 4.0 * self.tau * self.n


def vacuum_state(grid: TimeGrid, x1: complex = 1.0) -> FLState:
    """(x1, 0, 0, 0): excited qubit, empty field."""
    return FLState(grid, np.array([x1, 0.0], dtype=complex), np.zeros((2, grid.cells), dtype=complex))


def _shift_left(values: np.ndarray, m: int) -> np.ndarray:
    """new(s) = old(s + m ds); refuses to drop amplitude off the left edge."""
    if m == 0:
        return values.copy()
    if np.any(values[:m] != 0):
        raise SupportOverflowError(f"Shift by {m} cells pushes amplitude out of the time window")
    shifted = np.zeros_like(values)
    shifted[:-m] = values[m:]
    return shifted


def _absorption(grid: TimeGrid, xi2: np.ndarray, m: int) -> Tuple[np.ndarray, complex]:
    """
    I(r) = int_0^r e^{u/2} xi2(u) du at the centres r of the cells of [0, m ds),
    and the full integral I(m ds).

    Only the cells with centres in [0, ds) exist on the grid; beyond them
    the incoming field is zero.
    """
    incoming = np.zeros(m, dtype=complex)
    available = min(m, grid.cells - grid.zero_face)
    incoming[:available] = xi2[grid.zero_face:grid.zero_face + available]
    u = (np.arange(m) + 0.5) * grid.ds
    weighted = np.exp(0.5 * u) * incoming * grid.ds
    return np.cumsum(weighted) - 0.5 * weighted, complex(np.sum(weighted))


def _free_core(grid: TimeGrid, x1: complex, xi2: np.ndarray, t: float) -> Tuple[complex, np.ndarray]:
    m = grid.cells_in(t)
    if m == 0:
        return x1, xi2.copy()
    if m > grid.zero_face:
        raise SupportOverflowError(f"Evolution time {t} exceeds the time window {grid.t_max}")

    absorbed, total_absorbed = _absorption(grid, xi2, m)
    decay = np.exp(-0.5 * t)
    new_x1 = decay * x1 - 1j * decay * total_absorbed

    shifted = _shift_left(xi2, m)
    window = slice(grid.zero_face - m, grid.zero_face)
    s = grid.centers[window]
    envelope = np.exp(-0.5 * (t + s))
    # t + s runs over the centres of [0, t), matching the absorption samples
    shifted[window] += -1j * envelope * x1 - envelope * absorbed
    return complex(new_x1), shifted


def fl_free_evolve(psi: FLState, t: float) -> FLState:
    """
    Free evolution for time t:

        x1   -> e^{-t/2} x1 - i e^{-t/2} int_0^t e^{s/2} xi2(s) ds
        xi2  -> xi2(t + .) - i chi[-t,0) e^{-(t+.)/2} x1
                           - chi[-t,0) e^{-(t+.)/2} int_0^{t+.} e^{u/2} xi2(u) du

    with xi1 and x2 unchanged.
    """
    x1, xi2 = _free_core(psi.grid, psi.x1, psi.xi2, t)
    x = psi.x.copy()
    x[0] = x1
    xi = psi.xi.copy()
    xi[1] = xi2
    return FLState(psi.grid, x, xi)


def fl_kick(psi: FLState, v: np.ndarray, tau: float) -> FLState:
    """Free evolution for tau conjugated by a qubit unitary: v U(tau) v*."""
    v = np.asarray(v, dtype=complex)
    check_unitary(v)
    rotated = FLState(psi.grid, v.conj().T @ psi.x, v.conj().T @ psi.xi)
    evolved = fl_free_evolve(rotated, tau)
    return FLState(psi.grid, v @ evolved.x, v @ evolved.xi)


def fl_pulsed_cycle(psi: FLState, tau: float) -> FLState:
    """
    One cycle of kicks (1, X, Y, Z), each of width tau, on states (x1, 0, 0, xi2).

    Result: x1 -> e^{-tau} x1 and
    xi2 -> xi2(2 tau + .) - i chi[-2tau,-tau) e^{-(2tau+.)/2} x1
                          + i chi[-tau,0)    e^{-(2tau+.)/2} x1
    when xi2 has no incoming part.
    """
    if not psi.in_subspace():
        raise SubspaceError("Pulsed cycle is only implemented on states (x1, 0, 0, xi2)")
    for label in FL_CYCLE:
        psi = fl_kick(psi, PAULI[label], tau)
    return psi


def evolve_cycles(
    psi: FLState,
    schedule: FLSchedule,
    observer: Optional[Callable[[int, FLState], None]] = None
) -> FLState:
    """Apply schedule.n pulsed cycles."""
    for k in range(1, schedule.n + 1):
        psi = fl_pulsed_cycle(psi, schedule.tau)
        if observer is not None:
            observer(k, psi)
    return psi


def phi_from_state(psi: FLState) -> np.ndarray:
    """
    phi with xi2 = i phi.

    Raises:
        SubspaceError: xi2 has a real part, so phi would not be real
    """
    stray = float(np.max(np.abs(psi.xi2.real), initial=0.0))
    if stray > NORM_TOLERANCE:
        raise SubspaceError(f"xi2 is not purely imaginary: max |Re xi2| = {stray:.3e}")
    return psi.xi2.imag.copy()


def pumped_excitation(t: float, n: int, grid: TimeGrid) -> Tuple[FLState, np.ndarray]:
    """Evolve (1, 0, 0, 0) through n cycles over total time t; returns the state and phi."""
    schedule = FLSchedule(tau=t / (4.0 * n), n=n, grid=grid)
    state = evolve_cycles(vacuum_state(grid), schedule)
    return state, phi_from_state(state)


def _grid_for(t: float, n_values: Sequence[int], ds: Optional[float]) -> TimeGrid:
    if not t > 0:
        raise ParameterError(f"Total time must be positive, got t={t}")
    step_size = ds if ds is not None else cycle_time_step(t, n_values)
    return make_time_grid(t, step_size)


def fl_weak_convergence_probe(
    n_list: Sequence[int],
    t: float,
    g: Union[Callable[[np.ndarray], np.ndarray], np.ndarray],
    grid: Optional[TimeGrid] = None
) -> List[Tuple[int, float]]:
    """
    |<g, phi_{n,t}>| for each n, from simulated pumped excitations.

    Args:
        n_list: Cycle counts
        t: Total time
        g: Test function of s, or samples on grid
        grid: Time grid; built from n_list when omitted

    Returns:
        List of (n, |<g, phi>|)
    """
    grid = grid or _grid_for(t, n_list, None)
    samples = g(grid.centers) if callable(g) else np.asarray(g)
    if samples.shape != (grid.cells,):
        raise GridError(f"Test function has {samples.shape} samples, grid has {grid.cells} cells")

    results = []
    for n in n_list:
        _, phi = pumped_excitation(t, int(n), grid)
        results.append((int(n), float(abs(np.vdot(samples, phi) * grid.ds))))
    return results


@dataclass(frozen=True)
class FLVerdictRow:
    n: int
    amp_first: float
    norm_phi: float
    self_distance: float
    norm_drift: float


@dataclass(frozen=True)
class FLVerdict:
    """Evidence that the pulsed limit does not exist for the Friedrichs-Lee model."""
    t: float
    ds: float
    rows: List[FLVerdictRow]
    expected_amp: float
    expected_norm_phi_sq: float
    amp_persists: bool
    norm_bounded_below: bool
    self_distance_persists: bool
    # a decoupled limit |0> (x) v(t) would need this much weight in xi1
    witness_required_xi1: float
    witness_observed_xi1: float

    @property
    def decoupling_fails(self) -> bool:
        return self.amp_persists and self.norm_bounded_below and self.self_distance_persists


def fl_decoupling_verdict(
    t: float,
    n_list: Sequence[int],
    ds: Optional[float] = None,
    amp_tolerance: float = 1e-10,
    norm_tolerance: float = 1e-2,
    distance_floor: float = 0.1
) -> FLVerdict:
    """
    Run the pulsed cycle for every n and 2n in n_list and collect:
    first-component decay e^{-t/4}, ||phi_{n,t}||^2 = 1 - e^{-t/2}, and
    ||phi_{2n,t} - phi_{n,t}|| bounded away from zero.
    """
    n_list = [int(n) for n in n_list]
    grid = _grid_for(t, n_list + [2 * n for n in n_list], ds)
    expected_amp = float(np.exp(-0.25 * t))
    expected_norm_sq = float(1.0 - np.exp(-0.5 * t))

    rows = []
    observed_xi1 = 0.0
    for n in n_list:
        state, phi = pumped_excitation(t, n, grid)
        _, phi_double = pumped_excitation(t, 2 * n, grid)
        observed_xi1 = max(observed_xi1, float(np.sum(np.abs(state.xi1) ** 2) * grid.ds))
        rows.append(FLVerdictRow(
            n=n,
            amp_first=float(abs(state.x1)),
            norm_phi=float(np.sqrt(np.sum(phi ** 2) * grid.ds)),
            self_distance=float(np.sqrt(np.sum((phi_double - phi) ** 2) * grid.ds)),
            norm_drift=abs(state.norm_squared() - 1.0),
        ))

    return FLVerdict(
        t=t,
        ds=grid.ds,
        rows=rows,
        expected_amp=expected_amp,
        expected_norm_phi_sq=expected_norm_sq,
        amp_persists=all(abs(r.amp_first - expected_amp) <= amp_tolerance for r in rows),
        norm_bounded_below=all(abs(r.norm_phi ** 2 - expected_norm_sq) <= norm_tolerance for r in rows),
        self_distance_persists=all(r.self_distance > distance_floor for r in rows),
        witness_required_xi1=expected_norm_sq,
        witness_observed_xi1=observed_xi1,
    )


def fl_reduced_density(psi: FLState) -> QubitDensity:
    """Qubit state after tracing out the field; index 0 is the excited level."""
    ds = psi.grid.ds
    rho = np.outer(psi.x, psi.x.conj()) + (psi.xi @ psi.xi.conj().T) * ds
    return QubitDensity(rho)
