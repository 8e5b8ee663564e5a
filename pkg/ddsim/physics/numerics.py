"""
Spectral Grid Numerics
Discretisation of L^2(R) on a periodic grid with paired position and
momentum representations, and exact diagonal propagators in each.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from ddsim.constants import NORM_TOLERANCE
from ddsim.exceptions import GridError, ParameterError, RepresentationError


class Representation(str, Enum):
    """Basis in which an environment vector is sampled."""
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class Grid:
    """
    Uniform grid on [-L, L) with N points.

    Momentum samples follow the fast-transform frequency layout
    (0, dk, ..., -dk), so every momentum-diagonal operation indexes k directly.
    """
    half_width: float
    points: int

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def dk(self) -> float:
        return np.pi / self.half_width

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.dx)

    @cached_property
    def _offset_phase(self) -> np.ndarray:
        # x_0 = -L, so the transform picks up e^{ikL}
        return np.exp(1j * self.k * self.half_width)

    @cached_property
    def _transform_scale(self) -> float:
        return float(np.sqrt(self.dx / self.dk))

    def coordinates(self, representation: Representation) -> np.ndarray:
        """Sample points of the given representation."""
        return self.x if representation == Representation.POSITION else self.k

    def weight(self, representation: Representation) -> float:
        """Quadrature weight of the given representation."""
        return self.dx if representation == Representation.POSITION else self.dk

    def forward(self, amplitudes: np.ndarray) -> np.ndarray:
        """Position samples to momentum samples along the last axis."""
        spectrum = np.fft.fft(amplitudes, axis=-1, norm="ortho")
        return self._transform_scale * self._offset_phase * spectrum

    def inverse(self, amplitudes: np.ndarray) -> np.ndarray:
        """Momentum samples to position samples along the last axis."""
        spectrum = np.conj(self._offset_phase) * amplitudes / self._transform_scale
        return np.fft.ifft(spectrum, axis=-1, norm="ortho")


@dataclass(frozen=True)
class EnvVector:
    """Environment vector sampled on a grid in one representation."""
    grid: Grid
    amplitudes: np.ndarray
    representation: Representation = Representation.POSITION

    @property
    def coordinates(self) -> np.ndarray:
        return self.grid.coordinates(self.representation)

    def norm(self) -> float:
        weight = self.grid.weight(self.representation)
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * weight))

    def normalized(self) -> "EnvVector":
        norm = self.norm()
        if norm == 0.0:
            raise ParameterError("Cannot normalise the zero vector")
        return EnvVector(self.grid, self.amplitudes / norm, self.representation)

    def is_normalized(self, tolerance: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tolerance


def make_grid(L: float, N: int) -> Grid:
    """
    Build a grid on [-L, L) with N points.

    Args:
        L: Half-width, > 0
        N: Number of points, a power of two >= 2

    Returns:
        The Grid
    """
    if not np.isfinite(L) or L <= 0:
        raise GridError(f"Grid half-width must be positive, got L={L}")
    if int(N) != N or N < 2 or (int(N) & (int(N) - 1)) != 0:
        raise GridError(f"Grid size must be a power of two >= 2, got N={N}")
    return Grid(half_width=float(L), points=int(N))


def to_momentum(v: EnvVector) -> EnvVector:
    """Unitary transform from position to momentum samples."""
    if v.representation != Representation.POSITION:
        raise RepresentationError("to_momentum expects a position-space vector")
    return EnvVector(v.grid, v.grid.forward(v.amplitudes), Representation.MOMENTUM)


def to_position(v: EnvVector) -> EnvVector:
    """Unitary transform from momentum to position samples."""
    if v.representation != Representation.MOMENTUM:
        raise RepresentationError("to_position expects a momentum-space vector")
    return EnvVector(v.grid, v.grid.inverse(v.amplitudes), Representation.POSITION)


def apply_diagonal_phase(
    v: EnvVector,
    f: Callable[[np.ndarray], np.ndarray],
    theta: float,
    representation: Optional[Representation] = None
) -> EnvVector:
    """
    Multiply by e^{i theta f(coord)} in the vector's representation.

    Args:
        v: Vector to act on
        f: Real function of the active coordinate (x or k)
        theta: Angle
        representation: Representation in which f is diagonal; checked if given

    Returns:
        New vector, same representation
    """
    if representation is not None and representation != v.representation:
        raise RepresentationError(
            f"Operator is diagonal in {representation.value} space, "
            f"vector is in {v.representation.value} space"
        )
    phase = np.exp(1j * theta * np.asarray(f(v.coordinates), dtype=float))
    return EnvVector(v.grid, phase * v.amplitudes, v.representation)


def cauchy_state(
    grid: Grid,
    gamma: float,
    cutoff: Optional[float] = None,
    rep: Representation = Representation.POSITION
) -> EnvVector:
    """
    Square root of the Cauchy density with scale gamma/2.

    With gamma = 4 in position space this is xi_C(x) = (2/pi / (x^2+4))^{1/2}.
    A cutoff zeroes amplitudes with |coord| > cutoff before renormalising.
    """
    if not gamma > 0:
        raise ParameterError(f"Cauchy width gamma must be positive, got {gamma}")
    if cutoff is not None and not cutoff > 0:
        raise ParameterError(f"Cutoff must be positive, got {cutoff}")

    coords = grid.coordinates(rep)
    density = (gamma / (2.0 * np.pi)) / (coords ** 2 + gamma ** 2 / 4.0)
    amplitudes = np.sqrt(density).astype(complex)
    if cutoff is not None:
        amplitudes[np.abs(coords) > cutoff] = 0.0
        if not np.any(amplitudes):
            raise ParameterError(f"Cutoff {cutoff} leaves no grid points")
    return EnvVector(grid, amplitudes, rep).normalized()


def gaussian_state(
    grid: Grid,
    center: float = 0.0,
    width: float = 1.0,
    momentum: float = 0.0,
    rep: Representation = Representation.POSITION
) -> EnvVector:
    """Normalised Gaussian wave packet exp(-(c-c0)^2/(2w^2) + i p0 c)."""
    if not width > 0:
        raise ParameterError(f"Gaussian width must be positive, got {width}")
    coords = grid.coordinates(rep)
    amplitudes = np.exp(-((coords - center) ** 2) / (2.0 * width ** 2) + 1j * momentum * coords)
    return EnvVector(grid, amplitudes, rep).normalized()


def rotated_state(v: EnvVector, angle: float) -> EnvVector:
    """
    Apply e^{-i angle (q^2+p^2)} up to a global phase.

    Uses the exact factorisation chirp(a) . free(b) . chirp(a) with
    a = -tan(angle)/2 and b = -sin(2 angle)/2, each factor diagonal in
    its own representation. Requires cos(angle) != 0.
    """
    if abs(np.cos(angle)) < 1e-12:
        raise ParameterError(f"Rotation angle {angle} is a quarter turn; factorisation undefined")
    chirp = -np.tan(angle) / 2.0
    free = -np.sin(2.0 * angle) / 2.0

    position = v if v.representation == Representation.POSITION else to_position(v)
    position = apply_diagonal_phase(position, np.square, chirp, Representation.POSITION)
    momentum = apply_diagonal_phase(to_momentum(position), np.square, free, Representation.MOMENTUM)
    position = apply_diagonal_phase(to_position(momentum), np.square, chirp, Representation.POSITION)
    return position if v.representation == Representation.POSITION else to_momentum(position)


def inner_product(u: EnvVector, v: EnvVector) -> complex:
    """<u, v> with the representation's quadrature weight."""
    if u.representation != v.representation:
        raise RepresentationError("Inner product needs both vectors in the same representation")
    weight = u.grid.weight(u.representation)
    return complex(np.vdot(u.amplitudes, v.amplitudes) * weight)


def position_operator(grid: Grid) -> np.ndarray:
    """Dense matrix of q in the position basis (small grids only)."""
    return np.diag(grid.x).astype(complex)


def momentum_operator(grid: Grid) -> np.ndarray:
    """Dense matrix of p in the position basis (small grids only)."""
    transform = np.fft.fft(np.eye(grid.points), axis=0, norm="ortho")
    return transform.conj().T @ (grid.k[:, None] * transform)
