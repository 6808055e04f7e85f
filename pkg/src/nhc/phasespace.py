"""Phase-space conventions, quadratic Hamiltonians and elementary pairings.

Every vector is ordered ``(p_1..p_n, q_1..q_n)`` and every 2n x 2n matrix uses
the matching block layout ``((pp, pq), (qp, qq))``.  The symplectic form is
``Omega = ((0, -I), (I, 0))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DimensionError, ProviderError

SYMMETRY_WARN_TOL = 1e-12

CoefficientProvider = Callable[[float], Union[np.ndarray, tuple]]


def omega_matrix(n: int) -> np.ndarray:
    """Return the standard symplectic matrix ``((0, -I_n), (I_n, 0))``."""
    if n < 1:
        raise DimensionError(f"dimension must be >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def _half_dim(z: np.ndarray) -> int:
    if z.ndim != 1 or z.size % 2 or z.size == 0:
        raise DimensionError(f"phase-space vector must have even length, got shape {z.shape}")
    return z.size // 2


def symplectic_pairing(z, z2) -> complex:
    """Bilinear pairing ``z . Omega z2`` (no conjugation)."""
    z = np.asarray(z)
    z2 = np.asarray(z2)
    n = _half_dim(z)
    if z2.shape != z.shape:
        raise DimensionError(f"shape mismatch {z.shape} vs {z2.shape}")
    # z . Omega z2 = -p.q2 + q.p2
    return complex(-z[:n] @ z2[n:] + z[n:] @ z2[:n])


def positivity_form(z, z2) -> complex:
    """Sesquilinear form ``h(z, z2) = (i/2) z . Omega conj(z2)``.

    ``h(z, z)`` is real; it is positive exactly on positive Lagrangian
    directions such as ``(B q, q)`` with ``Im B > 0``.
    """
    return 0.5j * symplectic_pairing(z, np.conj(np.asarray(z2)))


def is_symplectic(M, tol: float = 1e-10) -> bool:
    """True iff ``max|M^T Omega M - Omega| <= tol``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise DimensionError(f"expected an even-sized square matrix, got {M.shape}")
    om = omega_matrix(M.shape[0] // 2)
    return bool(np.max(np.abs(M.T @ om @ M - om)) <= tol)


def split_blocks(M: np.ndarray):
    """Return the four n x n blocks ``(pp, pq, qp, qq)`` of a 2n x 2n matrix."""
    n = M.shape[0] // 2
    return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]


def _symmetrized(H: np.ndarray, where: str) -> np.ndarray:
    asym = float(np.max(np.abs(H - H.T))) if H.size else 0.0
    if asym > SYMMETRY_WARN_TOL:
        warnings.warn(
            f"Hamiltonian matrix {where} asymmetric by {asym:.3e}; symmetrizing",
            RuntimeWarning,
            stacklevel=3,
        )
    return 0.5 * (H + H.T)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Classical symbol ``1/2 z.H(t)z + c(t).z`` with complex symmetric ``H``.

    Either pass a constant matrix ``H`` or a ``provider`` callable
    ``t -> H`` (or ``t -> (H, c)``) that is queried at integrator stage times.
    Constant matrices are symmetrized once at construction; provider output is
    symmetrized on every query.
    """

    n: int
    H: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    provider: Optional[CoefficientProvider] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.n}")
        if (self.H is None) == (self.provider is None):
            raise ValueError("give exactly one of a constant H or a provider")
        dim = 2 * self.n
        if self.H is not None:
            H = np.array(self.H, dtype=complex)
            if H.shape != (dim, dim):
                raise DimensionError(f"H must be {dim}x{dim}, got {H.shape}")
            H = _symmetrized(H, "at construction")
            H.setflags(write=False)
            object.__setattr__(self, "H", H)
        c = np.zeros(dim, dtype=complex) if self.c is None else np.array(self.c, dtype=complex)
        if c.shape != (dim,):
            raise DimensionError(f"c must have length {dim}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def is_constant(self) -> bool:
        return self.provider is None

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients ``(H(t), c(t))``."""
        if self.provider is None:
            return self.H, self.c
        try:
            out = self.provider(t)
        except Exception as exc:
            raise ProviderError(f"coefficient provider failed at t={t}: {exc}") from exc
        if isinstance(out, tuple):
            H, c = out
            c = np.asarray(c, dtype=complex)
        else:
            H, c = out, self.c
        H = np.asarray(H, dtype=complex)
        dim = 2 * self.n
        if H.shape != (dim, dim) or c.shape != (dim,) or not (
            np.all(np.isfinite(H)) and np.all(np.isfinite(c))
        ):
            raise ProviderError(f"coefficient provider returned invalid data at t={t}")
        return _symmetrized(H, f"at t={t}"), c

    def imag_part_nonpositive(self, t: float = 0.0, tol: float = 1e-12) -> bool:
        """True if ``Im H(t)`` is negative semidefinite."""
        H, _ = self.at(t)
        return bool(np.max(np.linalg.eigvalsh(H.imag)) <= tol)


def hamiltonian_eval(ham: QuadraticHamiltonian, t: float, z) -> tuple[complex, np.ndarray]:
    """Value and gradient of the classical symbol at ``z``."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (2 * ham.n,):
        raise DimensionError(f"z must have length {2 * ham.n}, got {z.shape}")
    H, c = ham.at(t)
    Hz = H @ z
    return complex(0.5 * z @ Hz + c @ z), Hz + c
