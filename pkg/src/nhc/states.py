"""Coherent-state wavefunctions on 1-D grids and Gaussian Wigner functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DimensionError, ResolutionError
from .geometry import as_shape, check_metric

MIN_POINTS_PER_STD = 8


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``linspace(x_min, x_max, points)``."""

    x_min: float
    x_max: float
    points: int

    def __post_init__(self):
        if self.points < 16:
            raise ValueError(f"grid needs at least 16 points, got {self.points}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    @classmethod
    def around(cls, centre: float, half_width: float, points: int = 512) -> "GridSpec":
        return cls(centre - half_width, centre + half_width, points)


@dataclass(frozen=True)
class WaveFunction:
    grid: GridSpec
    values: np.ndarray
    hbar: float = 1.0

    def norm_sq(self) -> float:
        return float(trapezoid(np.abs(self.values) ** 2, dx=self.grid.dx))


@dataclass(frozen=True)
class WignerGaussian:
    """``exp(-beta) / (pi hbar)^n * exp(-(z - Z).G(z - Z) / hbar)``."""

    Z: np.ndarray
    G: np.ndarray
    beta: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        G = check_metric(self.G)
        Z = np.asarray(self.Z, dtype=float)
        if Z.shape != (G.shape[0],):
            raise DimensionError(f"Z of shape {Z.shape} does not match G {G.shape}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "Z", Z)

    @property
    def n(self) -> int:
        return self.Z.size // 2


def position_std(B, hbar: float = 1.0) -> float:
    """Standard deviation of ``|psi|^2`` in x for a 1-D shape ``B``."""
    B = as_shape(B, 1)
    return float(np.sqrt(hbar / (2.0 * B[0, 0].imag)))


def evaluate_coherent_state(grid: GridSpec, z, B, alpha: complex = 0.0, hbar: float = 1.0) -> WaveFunction:
    """Sample ``exp(i alpha) psi_z^B`` on a 1-D grid; ``z = (p, q)`` may be complex."""
    B = as_shape(B, 1)
    z = np.asarray(z, dtype=complex)
    if z.shape != (2,):
        raise DimensionError("wavefunction sampling supports n = 1 only")
    std = position_std(B, hbar)
    if std / grid.dx < MIN_POINTS_PER_STD:
        raise ResolutionError(
            f"grid spacing {grid.dx:.3g} gives {std / grid.dx:.2f} points per standard deviation (< 8)"
        )
    b = B[0, 0]
    p, q = z
    x = grid.x
    prefactor = (b.imag / (np.pi * hbar)) ** 0.25
    phase = (1j / hbar) * (p * (x - q) + 0.5 * b * (x - q) ** 2)
    return WaveFunction(grid=grid, values=np.exp(1j * alpha) * prefactor * np.exp(phase), hbar=hbar)


def evaluate_wigner_gaussian(points, wg: WignerGaussian) -> np.ndarray:
    """Gaussian Wigner function at an ``(m, 2n)`` array of real phase points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != wg.Z.size:
        raise DimensionError(f"points have {pts.shape[1]} coordinates, expected {wg.Z.size}")
    d = pts - wg.Z
    quad = np.einsum("ij,jk,ik->i", d, wg.G, d)
    return np.exp(-wg.beta) / (np.pi * wg.hbar) ** wg.n * np.exp(-quad / wg.hbar)


def moments(wg: WignerGaussian):
    """``(norm_sq, mean, covariance)`` = ``(exp(-beta), Z, (hbar/2) G^{-1})``."""
    cov = 0.5 * wg.hbar * np.linalg.inv(wg.G)
    return float(np.exp(-wg.beta)), wg.Z.copy(), 0.5 * (cov + cov.T)


def norm_consistency(alpha: complex, sigma: complex, beta: float, hbar: float = 1.0) -> float:
    """``|beta - 2 Im alpha - 2 Im sigma / hbar|``; zero when the two routes agree on the norm."""
    return abs(beta - 2.0 * complex(alpha).imag - 2.0 * complex(sigma).imag / hbar)
