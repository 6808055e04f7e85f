"""Time evolution under complex quadratic Hamiltonians.

Two routes describe the same physical state:

* the complex route integrates the (complex) centre ``z``, the shape ``B``
  and the complex phase ``alpha`` of ``exp(i alpha) psi_z^B``;
* the real route integrates the Wigner centre ``Z``, the metric ``G`` and the
  log-norm ``beta`` of ``exp(-beta) / (pi hbar)^n exp(-(z-Z).G(z-Z)/hbar)``.

The nonlinear Riccati equations for ``B`` and ``G`` are also solved through
linear flows: ``B(t) = S(t)_* B0`` with ``S' = Omega H S`` and
``G(t) = Phi(t)_* G0`` with the doubled-phase-space flow ``Phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    DimensionError,
    InvalidMetricError,
    PositivityLossError,
    ProviderError,
    StepFailureError,
    TransportSingularityError,
)
from .geometry import (
    MAX_COND,
    as_shape,
    check_metric,
    equivalence_phase,
    metric_from_shape,
    min_eig,
    project_centre,
    structure_from_metric,
    structure_from_shape,
)
from .integrate import Failure, IntegratorOptions, integrate
from .phasespace import QuadraticHamiltonian, omega_matrix, split_blocks

BREAKDOWN_REL = 1e-8

ALPHA_CONVENTIONS = ("normalized", "literal", "ablated")
BETA_CONVENTIONS = ("literal", "norm")


class BreakdownReason(str, Enum):
    POSITIVITY_LOSS = "positivity-loss"
    STEP_FAILURE = "step-failure"
    PROVIDER_FAILURE = "provider-failure"


@dataclass(frozen=True)
class BreakdownReport:
    t_breakdown: float
    min_eig: float
    reason: BreakdownReason
    message: str = ""


@dataclass(frozen=True)
class FlowMatrix:
    S: np.ndarray
    t: float


@dataclass(frozen=True)
class DoubledFlow:
    Phi: np.ndarray
    t: float


@dataclass(frozen=True)
class ComplexTrajectory:
    """Samples of ``(t, z, B, alpha)``; arrays are indexed by sample first."""

    t: np.ndarray
    z: np.ndarray
    B: np.ndarray
    alpha: np.ndarray
    hbar: float = 1.0
    breakdown: Optional[BreakdownReport] = None

    @property
    def n(self) -> int:
        return self.B.shape[1]

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class RealTrajectory:
    """Samples of ``(t, Z, G, beta)``."""

    t: np.ndarray
    Z: np.ndarray
    G: np.ndarray
    beta: np.ndarray
    hbar: float = 1.0
    breakdown: Optional[BreakdownReport] = None

    @property
    def n(self) -> int:
        return self.Z.shape[1] // 2

    def __len__(self) -> int:
        return len(self.t)


def _report(failure: Optional[Failure]) -> Optional[BreakdownReport]:
    if failure is None:
        return None
    return BreakdownReport(
        t_breakdown=failure.t,
        min_eig=failure.value,
        reason=BreakdownReason(failure.reason),
        message=failure.message,
    )


def _matrix(M) -> np.ndarray:
    return M.S if isinstance(M, FlowMatrix) else M.Phi if isinstance(M, DoubledFlow) else np.asarray(M)


# -- linear flows ------------------------------------------------------------


def flow_path(ham: QuadraticHamiltonian, t0: float, t1: float, dt_sample=None, opts=None):
    """Samples ``(t, S(t))`` of ``S' = Omega H(t) S`` with ``S(t0) = I``."""
    dim = 2 * ham.n
    om = omega_matrix(ham.n)

    def rhs(t, y):
        H, _ = ham.at(t)
        return (om @ H @ y.reshape(dim, dim)).ravel()

    res = integrate(rhs, t0, np.eye(dim, dtype=complex).ravel(), t1, dt_sample=dt_sample, opts=opts)
    if res.failure is not None:
        raise _failure_error(res.failure)
    return res.t, res.y.reshape(-1, dim, dim)


def _failure_error(failure: Failure) -> Exception:
    if failure.reason == "provider-failure":
        return ProviderError(failure.message)
    return StepFailureError(f"integration failed at t={failure.t}: {failure.message}")


def integrate_flow(ham: QuadraticHamiltonian, t0: float, t1: float, opts=None) -> FlowMatrix:
    """Complex symplectic flow ``S(t1)`` of ``S' = Omega H S``, ``S(t0) = I``."""
    ts, Ss = flow_path(ham, t0, t1, dt_sample=t1 - t0 if t1 > t0 else None, opts=opts)
    return FlowMatrix(S=Ss[-1], t=float(ts[-1]))


def doubled_generator(H: np.ndarray) -> np.ndarray:
    """Generator of ``Phi``: the standard 4n form applied to the matrix of ``K``."""
    n = H.shape[0] // 2
    om = omega_matrix(n)
    R, I = H.real, H.imag
    K = np.block([[-om.T @ I @ om, om @ R], [-R @ om, I]])
    return omega_matrix(2 * n) @ K


def doubled_flow(ham: QuadraticHamiltonian, t0: float, t1: float, opts=None) -> DoubledFlow:
    """Real 4n x 4n flow ``Phi(t1)`` whose Moebius action propagates ``G``."""
    dim = 4 * ham.n

    def rhs(t, y):
        H, _ = ham.at(t)
        return (doubled_generator(H) @ y.reshape(dim, dim)).ravel()

    res = integrate(rhs, t0, np.eye(dim).ravel(), t1, dt_sample=t1 - t0 if t1 > t0 else None, opts=opts)
    if res.failure is not None:
        raise _failure_error(res.failure)
    return DoubledFlow(Phi=res.y[-1].reshape(dim, dim), t=float(res.t[-1]))


def doubled_from_flow(S) -> np.ndarray:
    """Assemble ``Phi = ((Om Re S Om^T, Om Im S), (-Im S Om^T, Re S))``."""
    S = _matrix(S)
    om = omega_matrix(S.shape[0] // 2)
    return np.block([[om @ S.real @ om.T, om @ S.imag], [-S.imag @ om.T, S.real]])


# -- fractional-linear transport ---------------------------------------------


def block_mobius(M, X) -> np.ndarray:
    """``(M11 X + M12)(M21 X + M22)^{-1}`` for a 2x2 block matrix ``M``."""
    M = _matrix(M)
    X = np.atleast_2d(np.asarray(X))
    k = X.shape[0]
    if M.shape != (2 * k, 2 * k):
        raise DimensionError(f"block matrix {M.shape} does not match X {X.shape}")
    num = M[:k, :k] @ X + M[:k, k:]
    den = M[k:, :k] @ X + M[k:, k:]
    if np.linalg.cond(den) > MAX_COND:
        raise TransportSingularityError("denominator of the fractional-linear action is singular")
    return np.linalg.solve(den.T, num.T).T


def mobius_shape(S, B) -> np.ndarray:
    """Transported shape ``S_* B``; raises if the image leaves the upper half space."""
    B = as_shape(B)
    out = block_mobius(S, B)
    out = 0.5 * (out + out.T)
    if min_eig(out.imag) <= 0:
        raise PositivityLossError("transported shape has Im B not positive definite")
    return out


def _transport_factor(S: np.ndarray, J: np.ndarray) -> np.ndarray:
    A = S.real - S.imag @ J
    if np.linalg.cond(A) > MAX_COND:
        raise TransportSingularityError("Re S - Im S J is singular")
    return A


def transport_structure(S, J) -> np.ndarray:
    """``J_SL = A J A^{-1}`` with ``A = Re S - Im S J``."""
    S = _matrix(S)
    J = np.asarray(J, dtype=float)
    A = _transport_factor(S, J)
    return np.linalg.solve(A.T, (A @ J).T).T


def transport_metric(S, G) -> np.ndarray:
    """``G_SL = Omega A Omega^T G A^{-1}``, i.e. ``Omega J_SL``."""
    S = _matrix(S)
    G = check_metric(G)
    J = structure_from_metric(G)
    A = _transport_factor(S, J)
    om = omega_matrix(G.shape[0] // 2)
    out = np.linalg.solve(A.T, (om @ A @ om.T @ G).T).T
    return _checked_metric(out)


def _checked_metric(G: np.ndarray) -> np.ndarray:
    G = 0.5 * (G + G.T)
    try:
        return check_metric(G, tol=1e-8)
    except InvalidMetricError as exc:
        raise PositivityLossError(str(exc)) from exc


def phi_star_metric(Phi, G) -> np.ndarray:
    """Metric transported by the doubled flow, ``Phi_* G``."""
    return _checked_metric(block_mobius(Phi, check_metric(G)))


# -- right-hand sides ----------------------------------------------------------


def riccati_shape_rhs(H: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``-H_qq - H_qp B - B H_pq - B H_pp B``."""
    Hpp, Hpq, Hqp, Hqq = split_blocks(H)
    return -Hqq - Hqp @ B - B @ Hpq - B @ Hpp @ B


def riccati_metric_rhs(H: np.ndarray, G: np.ndarray) -> np.ndarray:
    """``Re H Om G - G Om Re H - Im H + G Om^T Im H Om G``."""
    om = omega_matrix(H.shape[0] // 2)
    R, I = H.real, H.imag
    return R @ om @ G - G @ om @ R - I + G @ om.T @ I @ om @ G


def alpha_trace_term(H: np.ndarray, B: np.ndarray, Bdot: np.ndarray, convention: str) -> complex:
    """Order-hbar^0 part of ``alpha'``.

    ``"literal"`` is ``(i/4) tr[H_pp B - H_qq B^{-1}]``.  ``"normalized"`` keeps
    the prefactor ``(det Im B)^{1/4}`` of the ansatz normalized:
    ``(i/2) tr[H_pq + H_pp B] + (i/4) tr[(Im B)^{-1} Im B']``.  The two
    agree when ``B`` is stationary, or when ``H_pp = H_pq = 0`` with ``B``
    and ``H_qq`` purely imaginary.  ``"ablated"`` drops the term (negative
    control).
    """
    Hpp, Hpq, _, Hqq = split_blocks(H)
    if convention == "literal":
        return 0.25j * (np.trace(Hpp @ B) - np.trace(np.linalg.solve(B, Hqq)))
    if convention == "normalized":
        return (
            0.5j * (np.trace(Hpq) + np.trace(Hpp @ B))
            + 0.25j * np.trace(np.linalg.solve(B.imag, Bdot.imag))
        )
    if convention == "ablated":
        return 0.0
    raise ValueError(f"unknown alpha convention {convention!r}; expected one of {ALPHA_CONVENTIONS}")


def beta_rate(H, c, Z, G, hbar: float, convention: str) -> float:
    """``beta'`` for the Wigner log-norm.

    ``"literal"``: ``-(2/hbar) Z.Im H Z - (1/hbar) Im c.Z - 1/2 tr[Im H Om G Om^T]``
    (the default; its linear term reproduces the closed form of the shifted
    oscillator example).  ``"norm"``: ``-(2/hbar) Im[H](Z) - 1/2 tr[...]``,
    the rate of ``-log ||psi||^2`` obtained from ``d||psi||^2/dt = (2/hbar)
    <Im H^>``.
    """
    om = omega_matrix(H.shape[0] // 2)
    I = H.imag
    trace = 0.5 * np.trace(I @ om @ G @ om.T)
    quad = Z @ I @ Z
    lin = c.imag @ Z
    if convention == "literal":
        return float(-(2.0 / hbar) * quad - lin / hbar - trace)
    if convention == "norm":
        return float(-quad / hbar - (2.0 / hbar) * lin - trace)
    raise ValueError(f"unknown beta convention {convention!r}; expected one of {BETA_CONVENTIONS}")


# -- the two routes ------------------------------------------------------------


def integrate_complex_path(
    z0,
    B0,
    ham: QuadraticHamiltonian,
    t0: float,
    t1: float,
    opts: Optional[IntegratorOptions] = None,
    *,
    dt_sample: Optional[float] = None,
    hbar: float = 1.0,
    alpha_convention: str = "normalized",
) -> ComplexTrajectory:
    """Integrate ``z' = Omega(H z + c)``, the shape Riccati equation and ``alpha'``.

    Stops early, returning the samples collected so far plus a
    :class:`BreakdownReport`, when the smallest eigenvalue of ``Im B`` drops
    below ``1e-8 trace(Im B0) / n``.
    """
    if alpha_convention not in ALPHA_CONVENTIONS:
        raise ValueError(f"unknown alpha convention {alpha_convention!r}")
    n = ham.n
    B0 = as_shape(B0, n)
    z0 = np.asarray(z0, dtype=complex)
    if z0.shape != (2 * n,):
        raise DimensionError(f"z0 must have length {2 * n}, got {z0.shape}")
    nz, nb = 2 * n, n * n
    threshold = BREAKDOWN_REL * np.trace(B0.imag) / n

    def rhs(t, y):
        H, c = ham.at(t)
        z = y[:nz]
        B = y[nz : nz + nb].reshape(n, n)
        grad = H @ z + c
        zdot = np.concatenate([-grad[n:], grad[:n]])
        Bdot = riccati_shape_rhs(H, B)
        value = 0.5 * z @ H @ z + c @ z
        adot = (z[:n] @ zdot[n:] - value) / hbar + alpha_trace_term(H, B, Bdot, alpha_convention)
        return np.concatenate([zdot, Bdot.ravel(), [adot]])

    def post_step(y):
        B = y[nz : nz + nb].reshape(n, n)
        y[nz : nz + nb] = (0.5 * (B + B.T)).ravel()
        return y

    def monitor(t, y):
        value = min_eig(y[nz : nz + nb].reshape(n, n).imag)
        return value > threshold, value

    y0 = np.concatenate([z0, B0.ravel(), [0.0]])
    res = integrate(rhs, t0, y0, t1, dt_sample=dt_sample, opts=opts, post_step=post_step, monitor=monitor)
    y = res.y
    return ComplexTrajectory(
        t=res.t,
        z=y[:, :nz].copy(),
        B=y[:, nz : nz + nb].reshape(-1, n, n).copy(),
        alpha=y[:, -1].copy(),
        hbar=hbar,
        breakdown=_report(res.failure),
    )


def integrate_real_path(
    Z0,
    G0,
    ham: QuadraticHamiltonian,
    t0: float,
    t1: float,
    opts: Optional[IntegratorOptions] = None,
    *,
    dt_sample: Optional[float] = None,
    hbar: float = 1.0,
    beta_convention: str = "literal",
) -> RealTrajectory:
    """Integrate the Wigner-centre, metric and log-norm equations.

    ``Z' = Omega(Re H Z + Re c) + G^{-1}(Im H Z + Im c)`` and the metric
    Riccati equation; ``beta'`` follows :func:`beta_rate`.  Stops early when
    ``G`` loses positivity (``min eig <= 1e-8 trace(G0) / 2n``) or its
    condition number exceeds 1e12.
    """
    if beta_convention not in BETA_CONVENTIONS:
        raise ValueError(f"unknown beta convention {beta_convention!r}")
    n = ham.n
    dim = 2 * n
    G0 = check_metric(G0)
    if G0.shape != (dim, dim):
        raise DimensionError(f"G0 must be {dim}x{dim}, got {G0.shape}")
    Z0 = np.asarray(Z0, dtype=float)
    if Z0.shape != (dim,):
        raise DimensionError(f"Z0 must have length {dim}, got {Z0.shape}")
    om = omega_matrix(n)
    ng = dim * dim
    threshold = BREAKDOWN_REL * np.trace(G0) / dim

    def rhs(t, y):
        H, c = ham.at(t)
        Z = y[:dim]
        G = y[dim : dim + ng].reshape(dim, dim)
        Zdot = om @ (H.real @ Z + c.real) + np.linalg.solve(G, H.imag @ Z + c.imag)
        Gdot = riccati_metric_rhs(H, G)
        bdot = beta_rate(H, c, Z, G, hbar, beta_convention)
        return np.concatenate([Zdot, Gdot.ravel(), [bdot]])

    def post_step(y):
        G = y[dim : dim + ng].reshape(dim, dim)
        y[dim : dim + ng] = (0.5 * (G + G.T)).ravel()
        return y

    def monitor(t, y):
        eigs = np.linalg.eigvalsh(y[dim : dim + ng].reshape(dim, dim))
        ok = eigs[0] > threshold and eigs[-1] / eigs[0] <= MAX_COND
        return bool(ok), float(eigs[0])

    y0 = np.concatenate([Z0, G0.ravel(), [0.0]])
    res = integrate(rhs, t0, y0, t1, dt_sample=dt_sample, opts=opts, post_step=post_step, monitor=monitor)
    y = res.y
    return RealTrajectory(
        t=res.t,
        Z=y[:, :dim].copy(),
        G=y[:, dim : dim + ng].reshape(-1, dim, dim).copy(),
        beta=y[:, -1].copy(),
        hbar=hbar,
        breakdown=_report(res.failure),
    )


def project_trajectory(ct: ComplexTrajectory, hbar: Optional[float] = None) -> RealTrajectory:
    """Map each complex sample to ``Z = P_J(z)``, ``G = G(B)`` and
    ``beta = 2 Im alpha + 2 Im sigma(z, Z) / hbar``."""
    hbar = ct.hbar if hbar is None else hbar
    Zs, Gs, betas = [], [], []
    for z, B, alpha in zip(ct.z, ct.B, ct.alpha):
        Z = project_centre(z, structure_from_shape(B))
        sigma = equivalence_phase(z, Z)
        Zs.append(Z)
        Gs.append(metric_from_shape(B))
        betas.append(2.0 * alpha.imag + 2.0 * sigma.imag / hbar)
    dim = 2 * ct.n
    return RealTrajectory(
        t=ct.t.copy(),
        Z=np.array(Zs).reshape(-1, dim),
        G=np.array(Gs).reshape(-1, dim, dim),
        beta=np.array(betas),
        hbar=hbar,
        breakdown=ct.breakdown,
    )


def stationary_residual(ham: QuadraticHamiltonian, B=None, G=None, t: float = 0.0) -> float:
    """Max-norm of the shape (or metric) Riccati right-hand side."""
    if (B is None) == (G is None):
        raise ValueError("give exactly one of B or G")
    H, _ = ham.at(t)
    if B is not None:
        return float(np.max(np.abs(riccati_shape_rhs(H, as_shape(B, ham.n)))))
    return float(np.max(np.abs(riccati_metric_rhs(H, np.asarray(G, dtype=float)))))
