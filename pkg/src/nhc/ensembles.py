"""Random test systems for the property suites.

Every generator takes a ``numpy.random.Generator`` so that suites are
reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .phasespace import QuadraticHamiltonian


def random_shape(rng: np.random.Generator, n: int, min_imag: float = 0.3) -> np.ndarray:
    """Complex symmetric ``B`` with ``Im B >= min_imag`` (in the Loewner order)."""
    re = rng.normal(size=(n, n))
    a = rng.normal(size=(n, n))
    im = a @ a.T / n + min_imag * np.eye(n)
    return 0.5 * (re + re.T) + 1j * im


def random_centre(rng: np.random.Generator, n: int, imag_scale: float = 1.0) -> np.ndarray:
    return rng.normal(size=2 * n) + 1j * imag_scale * rng.normal(size=2 * n)


def random_hamiltonian(
    rng: np.random.Generator, n: int, scale: float = 1.0, damping: float = 0.5, linear: bool = False
) -> QuadraticHamiltonian:
    """Constant ``H`` with symmetric real part and ``Im H <= 0``."""
    dim = 2 * n
    re = rng.normal(size=(dim, dim))
    a = rng.normal(size=(dim, dim))
    H = scale * 0.5 * (re + re.T) - 1j * damping * (a @ a.T) / dim
    c = rng.normal(size=dim) + 1j * rng.normal(size=dim) if linear else None
    return QuadraticHamiltonian(n=n, H=H, c=c, label="random")


def lagrangian_vectors(rng: np.random.Generator, B: np.ndarray, count: int) -> np.ndarray:
    """``count`` random vectors ``(B q, q)`` of ``L_B`` as rows."""
    n = B.shape[0]
    q = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return np.hstack([q @ B.T, q])
