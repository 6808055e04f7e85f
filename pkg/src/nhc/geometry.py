"""Shape matrices, metrics, complex structures and positive Lagrangian frames.

The four objects are in one-to-one correspondence:

* a complex symmetric ``B`` with ``Im B > 0`` (a point of the Siegel upper
  half space),
* the real symmetric positive symplectic metric ``G`` giving the Wigner
  covariance ``(hbar/2) G^{-1}``,
* the compatible complex structure ``J = -Omega G``,
* the positive Lagrangian subspace ``L_B = {(B q, q)}`` spanned by the frame
  ``F = (B; I)``, which is also ``ker P_J``.

``P_J(z) = Re z + J Im z`` maps a complex centre to the real centre of the
same Gaussian state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    DimensionError,
    IllConditionedShapeError,
    InvalidMetricError,
    InvalidShapeError,
    NotPositiveLagrangianError,
)
from .phasespace import omega_matrix, symplectic_pairing

SYMMETRY_TOL = 1e-12
SYMMETRY_REJECT_TOL = 1e-9
METRIC_TOL = 1e-9
MAX_COND = 1e12
PD_REL_THRESHOLD = 1e-10


def _pd_floor(A: np.ndarray) -> float:
    """Scale-aware positivity threshold: 1e-10 * trace / dim."""
    return PD_REL_THRESHOLD * abs(np.trace(A)) / A.shape[0]


def min_eig(A: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part of a real matrix."""
    return float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])


def as_shape(B, n: int | None = None) -> np.ndarray:
    """Validate and return ``B`` as a complex symmetric n x n array.

    Scalars are accepted for ``n = 1``.  Asymmetry up to 1e-9 is removed by
    symmetrizing; anything larger is rejected.
    """
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionError(f"B must be square, got shape {B.shape}")
    if n is not None and B.shape != (n, n):
        raise DimensionError(f"B must be {n}x{n}, got {B.shape}")
    if not np.all(np.isfinite(B)):
        raise InvalidShapeError("B has non-finite entries")
    asym = float(np.max(np.abs(B - B.T)))
    if asym > SYMMETRY_REJECT_TOL:
        raise InvalidShapeError(f"B is not symmetric (asymmetry {asym:.3e})")
    B = 0.5 * (B + B.T)
    imB = B.imag
    eigs = np.linalg.eigvalsh(imB)
    if eigs[0] > 0 and eigs[-1] / eigs[0] > MAX_COND:
        raise IllConditionedShapeError(f"Im B condition number {eigs[-1] / eigs[0]:.3e} exceeds 1e12")
    if eigs[0] <= _pd_floor(imB) or eigs[0] <= 0:
        raise InvalidShapeError(f"Im B is not positive definite (min eigenvalue {eigs[0]:.3e})")
    return B


def check_metric(G, tol: float = METRIC_TOL) -> np.ndarray:
    """Validate a metric: symmetric, positive definite and ``G Omega G = Omega``."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] % 2:
        raise DimensionError(f"metric must be an even-sized square matrix, got {G.shape}")
    if np.max(np.abs(G - G.T)) > SYMMETRY_REJECT_TOL:
        raise InvalidMetricError("metric is not symmetric")
    G = 0.5 * (G + G.T)
    if min_eig(G) <= _pd_floor(G):
        raise InvalidMetricError("metric is not positive definite")
    om = omega_matrix(G.shape[0] // 2)
    defect = float(np.max(np.abs(G @ om @ G - om)))
    if defect > tol:
        raise InvalidMetricError(f"metric fails G Omega G = Omega (defect {defect:.3e})")
    return G


def metric_from_shape(B) -> np.ndarray:
    """Metric ``G`` of the Wigner function of a coherent state with shape ``B``."""
    B = as_shape(B)
    n = B.shape[0]
    re, im = B.real, B.imag
    eye = np.eye(n)
    zero = np.zeros((n, n))
    lower = np.block([[eye, zero], [-re, eye]])
    middle = np.block([[np.linalg.inv(im), zero], [zero, im]])
    G = lower @ middle @ lower.T
    return 0.5 * (G + G.T)


def structure_from_metric(G) -> np.ndarray:
    """Complex structure ``J = -Omega G``."""
    G = check_metric(G)
    return -omega_matrix(G.shape[0] // 2) @ G


def metric_from_structure(J) -> np.ndarray:
    """Inverse of :func:`structure_from_metric`: ``G = Omega J``."""
    J = np.asarray(J, dtype=float)
    return omega_matrix(J.shape[0] // 2) @ J


def structure_from_shape(B) -> np.ndarray:
    """Complex structure induced by ``B``, from the closed block formula."""
    B = as_shape(B)
    re, im = B.real, B.imag
    im_inv_re = np.linalg.solve(im, re)
    re_im_inv = im_inv_re.T
    return np.block(
        [
            [-re_im_inv, im + re @ im_inv_re],
            [-np.linalg.inv(im), im_inv_re],
        ]
    )


def shape_from_structure(J) -> np.ndarray:
    """Recover ``B`` from the lower blocks of ``J``.

    ``J_qp = -(Im B)^{-1}`` and ``J_qq = (Im B)^{-1} Re B``.
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0] // 2
    im = -np.linalg.inv(J[n:, :n])
    re = im @ J[n:, n:]
    return as_shape(0.5 * (re + re.T) + 0.5j * (im + im.T))


def shape_from_metric(G) -> np.ndarray:
    return shape_from_structure(structure_from_metric(G))


def frame_from_shape(B) -> np.ndarray:
    """Canonical frame ``(B; I)`` spanning ``L_B``."""
    B = as_shape(B)
    return np.vstack([B, np.eye(B.shape[0], dtype=complex)])


def _frame(F) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    if F.ndim == 1:
        F = F[:, None]
    if F.ndim != 2 or F.shape[0] != 2 * F.shape[1]:
        raise DimensionError(f"frame must be 2n x n, got {F.shape}")
    if np.linalg.matrix_rank(F) < F.shape[1]:
        raise DimensionError("frame is rank deficient")
    return F


def positivity_matrix(F) -> np.ndarray:
    """Hermitian matrix ``M`` with ``h(F v, F v) = v^H M v``."""
    F = _frame(F)
    om = omega_matrix(F.shape[1])
    # h(Fv, Fv) = v^T M0 conj(v) with M0 = (i/2) F^T Omega conj(F); h is real,
    # so it also equals v^H conj(M0) v.
    M = np.conj(0.5j * F.T @ om @ np.conj(F))
    return 0.5 * (M + M.conj().T)


def is_positive_lagrangian(F, tol: float = 1e-9) -> bool:
    """Isotropic (``F^T Omega F = 0``) and positive on its span."""
    F = _frame(F)
    om = omega_matrix(F.shape[1])
    if np.max(np.abs(F.T @ om @ F)) > tol:
        return False
    scale = np.linalg.norm(F, 2) ** 2
    return bool(np.linalg.eigvalsh(positivity_matrix(F))[0] > tol * scale)


def shape_from_frame(F) -> np.ndarray:
    """``B = F_p F_q^{-1}`` for a positive Lagrangian frame."""
    F = _frame(F)
    if not is_positive_lagrangian(F):
        raise NotPositiveLagrangianError("frame does not span a positive Lagrangian subspace")
    n = F.shape[1]
    Fp, Fq = F[:n], F[n:]
    lu, piv = sla.lu_factor(Fq.T)
    if np.linalg.cond(Fq) > MAX_COND:
        raise IllConditionedShapeError("q-block of the frame is numerically singular")
    B = sla.lu_solve((lu, piv), Fp.T).T
    return as_shape(B)


def normalized_frame(F) -> np.ndarray:
    """Re-express a frame in the canonical ``(B; I)`` form."""
    return frame_from_shape(shape_from_frame(F))


def structure_from_frame(F) -> np.ndarray:
    """Compatible complex structure whose projection kernel is ``span F``."""
    return structure_from_shape(shape_from_frame(F))


def project_centre(z, J) -> np.ndarray:
    """Real centre ``P_J(z) = Re z + J Im z``."""
    z = np.asarray(z, dtype=complex)
    J = np.asarray(J, dtype=float)
    if J.shape != (z.size, z.size):
        raise DimensionError(f"J of shape {J.shape} does not match z of length {z.size}")
    return z.real + J @ z.imag


@dataclass(frozen=True)
class ProjectionResult:
    """Real centre ``Z`` and equivalence phase ``sigma`` with
    ``psi_z^B = exp(i sigma / hbar) psi_Z^B``."""

    Z: np.ndarray
    sigma: complex


def equivalence_phase(z, Z) -> complex:
    """``sigma(z, Z) = 1/2 (P + p).(Q - q)``."""
    z = np.asarray(z, dtype=complex)
    Z = np.asarray(Z)
    n = z.size // 2
    return complex(0.5 * (Z[:n] + z[:n]) @ (Z[n:] - z[n:]))


def reduce_state(z, B) -> ProjectionResult:
    """Replace a complex centre by the equivalent real centre and phase."""
    B = as_shape(B)
    z = np.asarray(z, dtype=complex)
    if z.shape != (2 * B.shape[0],):
        raise DimensionError(f"z must have length {2 * B.shape[0]}, got {z.shape}")
    Z = project_centre(z, structure_from_shape(B))
    return ProjectionResult(Z=Z, sigma=equivalence_phase(z, Z))


def hermitian_inner(z, z2, G) -> complex:
    """Kaehler inner product ``z.G conj(z2) - i z.Omega conj(z2)``."""
    z = np.asarray(z, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    G = np.asarray(G, dtype=float)
    if z.shape != z2.shape or G.shape != (z.size, z.size):
        raise DimensionError("dimension mismatch in hermitian_inner")
    z2c = np.conj(z2)
    return complex(z @ G @ z2c - 1j * symplectic_pairing(z, z2c))
