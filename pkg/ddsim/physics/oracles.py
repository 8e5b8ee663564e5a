"""
Closed-Form Oracles
Exact reference values for the solvable models: decoupling errors,
limit propagators, the q^2 (+) p^2 generator and the Friedrichs-Lee comb.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy import integrate, linalg

from ddsim.exceptions import OracleDomainError
from ddsim.physics.models import SystemState
from ddsim.physics.numerics import Grid, momentum_operator, position_operator


@dataclass(frozen=True)
class OracleResult:
    """Oracle value together with the domain it was checked against."""
    value: Any
    domain: str
    parameters: Dict[str, float] = field(default_factory=dict)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise OracleDomainError(message)


def _check_schedule(t: float, n: int) -> None:
    _require(np.isfinite(t) and t >= 0, f"t must be finite and >= 0, got t={t}")
    _require(int(n) == n and n >= 1, f"n must be a positive integer, got n={n}")


# ===========================================
# q (+) p^2 and q (+) p
# ===========================================

def eps_qp2(t: float, n: int, gamma: float) -> float:
    """
    Decoupling error of the pulsed q (+) p^2 model from |+> (x) momentum Cauchy.

    The relative phase between the two blocks after n cycles of (1, X) is
    t^3/(8n); the Cauchy characteristic function contributes e^{-gamma t^2/(4n)}.
    Returned in the coherence form 2(1 - <+|rho_t|+>).
    """
    _check_schedule(t, n)
    _require(gamma > 0, f"gamma must be positive, got gamma={gamma}")
    return float(1.0 - np.cos(t ** 3 / (8.0 * n)) * np.exp(-gamma * t ** 2 / (4.0 * n)))


def eps_qp2_printed(t: float, n: int, gamma: float) -> float:
    """The same error with the single-block phase t^3/(16n); kept for comparison."""
    _check_schedule(t, n)
    _require(gamma > 0, f"gamma must be positive, got gamma={gamma}")
    return float(1.0 - np.cos(t ** 3 / (16.0 * n)) * np.exp(-gamma * t ** 2 / (4.0 * n)))


def un_qp_error(t: float, n: int) -> float:
    """
    ||U_n(t) psi - (1 (x) e^{i(t/2)(q+p)}) psi|| for any normalised psi.

    U_n(t) = e^{i t^2/(8n) Z} (x) e^{i(t/2)(q+p)}, so the error is
    |e^{i t^2/(8n)} - 1| = 2|sin(t^2/(16n))|. Small-angle constant: t^2/(8n).
    """
    _check_schedule(t, n)
    return float(2.0 * abs(np.sin(t ** 2 / (16.0 * n))))


def qp_limit_apply(grid: Grid, t: float, psi: SystemState) -> SystemState:
    """
    Apply 1 (x) e^{i(t/2)(q+p)} on the grid.

    Uses e^{ia(q+p)} = e^{ia^2/2} e^{iaq} e^{iap} with a = t/2.
    """
    a = 0.5 * t
    spectrum = grid.forward(psi.data)
    rows = grid.inverse(np.exp(1j * a * grid.k) * spectrum)
    rows = np.exp(1j * a * grid.x) * rows * np.exp(0.5j * a ** 2)
    return psi.with_data(rows)


def qp_rotated_coherence(t: float, gamma: float) -> complex:
    """
    Off-diagonal element rho_01 of the free q (+) p evolution from
    |+> (x) e^{-i(pi/8)(q^2+p^2)} xi_C, with xi_C a position Cauchy state.
    """
    _require(t >= 0, f"t must be >= 0, got t={t}")
    _require(gamma > 0, f"gamma must be positive, got gamma={gamma}")
    return complex(0.5 * np.exp(-0.5j * t ** 2) * np.exp(-0.5 * gamma * np.sqrt(2.0) * t))


# ===========================================
# q^2 (+) p^2
# ===========================================

def f_q2p2(t: float) -> float:
    """
    f(t) = (2/(t sqrt(4-t^2))) arctan(t sqrt(4-t^2) / (2-t^2)), f(0) = 1.

    The arctangent is taken on its continuous branch through t^2 = 2,
    so the domain is 0 <= t < 2.
    """
    _require(np.isfinite(t) and 0 <= t < 2, f"f_q2p2 needs 0 <= t < 2, got t={t}")
    if t < 1e-4:
        return float(1.0 + t ** 2 / 6.0 + t ** 4 / 30.0)
    root = t * np.sqrt(4.0 - t ** 2)
    return float(2.0 / root * np.arctan2(root, 2.0 - t ** 2))


@dataclass(frozen=True)
class Q2P2Generator:
    """
    Generator G of the n-cycle propagator U_n(t) = e^{iG} for q^2 (+) p^2, where
    G = oscillator 1 (x) (q^2+p^2) + squeeze axis (x) (qp+pq).
    """
    t: float
    n: int
    oscillator: float
    squeeze: float
    axis: str = "Z"

    def matrix(self, grid: Grid) -> np.ndarray:
        """Dense 2N x 2N generator on a (small) grid, qubit factor first."""
        q = position_operator(grid)
        p = momentum_operator(grid)
        identity = np.eye(2)
        z = np.diag([1.0, -1.0])
        harmonic = q @ q + p @ p
        squeeze = q @ p + p @ q
        return self.oscillator * np.kron(identity, harmonic) + self.squeeze * np.kron(z, squeeze)


def un_q2p2_generator(t: float, n: int) -> Q2P2Generator:
    """
    Generator of n cycles of (1, X) for q^2 (+) p^2 over total time t.

    oscillator = (t/2) f(t/n), squeeze = oscillator * t/(2n). Valid while
    t/n lies inside the domain of f, i.e. n > t/2.
    """
    _check_schedule(t, n)
    _require(n > t / 2.0, f"q2p2 generator needs n > t/2, got t={t}, n={n}")
    oscillator = 0.5 * t * f_q2p2(t / n)
    return Q2P2Generator(t=t, n=int(n), oscillator=oscillator, squeeze=oscillator * t / (2.0 * n))


def q2p2_reference_propagator(grid: Grid, t: float, n: int) -> np.ndarray:
    """Dense e^{iG} for the n-cycle q^2 (+) p^2 generator."""
    return linalg.expm(1j * un_q2p2_generator(t, n).matrix(grid))


def harmonic_propagator(grid: Grid, t: float) -> np.ndarray:
    """Dense e^{i(t/2)(q^2+p^2)}: the n -> infinity limit of the pulsed q^2 (+) p^2 model."""
    q = position_operator(grid)
    p = momentum_operator(grid)
    return linalg.expm(0.5j * t * (q @ q + p @ p))


# ===========================================
# Shallow pocket
# ===========================================

def shallow_pocket_coherence(t: float, gamma: float, cutoff: Optional[float] = None) -> float:
    """
    p_+(t) = (1 + Re int rho(x) e^{-2itx} dx)/2 for a Cauchy density rho of scale gamma/2.

    With a cutoff the density is restricted to |x| <= cutoff and
    renormalised. Evaluated by cosine-weighted quadrature.
    """
    _require(t >= 0, f"t must be >= 0, got t={t}")
    _require(gamma > 0, f"gamma must be positive, got gamma={gamma}")
    _require(cutoff is None or cutoff > 0, f"cutoff must be positive, got {cutoff}")
    if t == 0:
        return 1.0

    def density(x: float) -> float:
        return (gamma / (2.0 * np.pi)) / (x ** 2 + gamma ** 2 / 4.0)

    if cutoff is None:
        half, _ = integrate.quad(density, 0.0, np.inf, weight="cos", wvar=2.0 * t)
        mass = 1.0
    else:
        half, _ = integrate.quad(density, 0.0, cutoff, weight="cos", wvar=2.0 * t)
        mass = (2.0 / np.pi) * np.arctan(2.0 * cutoff / gamma)
    return float(0.5 * (1.0 + 2.0 * half / mass))


# ===========================================
# Friedrichs-Lee comb
# ===========================================

def phi_nt(n: int, t: float, s):
    """
    Environment excitation pumped by n cycles of (1, X, Y, Z).

    phi(s) = e^{-(t/4 + s/2)} sum_k ( -chi[-tk/2n, -tk/2n + t/4n)
                                      + chi[-tk/2n + t/4n, -t(k-1)/2n) )

    Zero outside [-t/2, 0). Accepts scalars or arrays.
    """
    _require(int(n) == n and n >= 1, f"n must be a positive integer, got n={n}")
    _require(t > 0, f"t must be positive, got t={t}")
    s_arr = np.asarray(s, dtype=float)
    period = t / (2.0 * n)
    offset = np.mod(s_arr, period)
    sign = np.where(offset < 0.5 * period, -1.0, 1.0)
    inside = (s_arr >= -0.5 * t) & (s_arr < 0.0)
    values = np.where(inside, sign * np.exp(-(0.25 * t + 0.5 * s_arr)), 0.0)
    return float(values) if np.ndim(values) == 0 else values


ORACLE_DOMAINS: Dict[str, str] = {
    "eps_qp2": "t >= 0, n >= 1, gamma > 0",
    "un_qp_error": "t >= 0, n >= 1",
    "f_q2p2": "0 <= t < 2",
    "un_q2p2_generator": "t >= 0, n > t/2",
    "phi_nt": "n >= 1, t > 0",
    "shallow_pocket_coherence": "t >= 0, gamma > 0, cutoff > 0",
    "qp_rotated_coherence": "t >= 0, gamma > 0",
}

_ORACLES: Dict[str, Callable[..., Any]] = {
    "eps_qp2": eps_qp2,
    "un_qp_error": un_qp_error,
    "f_q2p2": f_q2p2,
    "un_q2p2_generator": un_q2p2_generator,
    "phi_nt": phi_nt,
    "shallow_pocket_coherence": shallow_pocket_coherence,
    "qp_rotated_coherence": qp_rotated_coherence,
}


def evaluate(name: str, **parameters) -> OracleResult:
    """Evaluate a named oracle, checking its domain first."""
    if name not in _ORACLES:
        raise OracleDomainError(f"Unknown oracle '{name}'")
    value = _ORACLES[name](**parameters)
    return OracleResult(value=value, domain=ORACLE_DOMAINS[name], parameters=dict(parameters))
