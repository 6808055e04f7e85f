"""Adaptive Dormand-Prince 5(4) integrator with PI step control.

Works on flat real or complex state vectors.  Two hooks make it suitable for
the Riccati systems here: ``post_step`` cleans an accepted state (e.g.
re-symmetrizes a matrix block) and ``monitor`` flags loss of positivity, in
which case the offending step is bisected until the breakdown time is
bracketed to ``opts.bracket``.

Sample times are hit exactly by shortening the step that would overshoot
them; internal steps are therefore never coarser than the sampling stride.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ProviderError

logger = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
TOL_ENV_VAR = "NHC_DEFAULT_TOL"

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

# PI controller exponents (Hairer & Wanner, DOPRI5)
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 5.0


def default_rtol() -> float:
    """Relative tolerance, overridable through ``NHC_DEFAULT_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return DEFAULT_RTOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = field(default_factory=default_rtol)
    atol: float = DEFAULT_ATOL
    first_step: Optional[float] = None
    max_step: float = math.inf
    min_step: float = 1e-14
    max_steps: int = 5_000_000
    bracket: float = 1e-3


@dataclass(frozen=True)
class Failure:
    """Why and where an integration stopped early."""

    t: float
    reason: str  # "positivity-loss" | "step-failure" | "provider-failure"
    value: float = float("nan")
    message: str = ""


@dataclass(frozen=True)
class ODEResult:
    t: np.ndarray
    y: np.ndarray
    failure: Optional[Failure] = None
    n_steps: int = 0


class _MonitorTrip(Exception):
    def __init__(self, t_good, y_good, t_bad, value):
        super().__init__()
        self.t_good, self.y_good, self.t_bad, self.value = t_good, y_good, t_bad, value


class _StepUnderflow(Exception):
    def __init__(self, t):
        super().__init__()
        self.t = t


def sample_grid(t0: float, t1: float, dt_sample: Optional[float]) -> np.ndarray:
    """Times ``t0, t0 + dt, ...`` closed by ``t1``."""
    if t1 < t0:
        raise ValueError(f"t1={t1} precedes t0={t0}")
    if t1 == t0:
        return np.array([t0])
    if dt_sample is None:
        dt_sample = (t1 - t0) / 100
    if dt_sample <= 0:
        raise ValueError("dt_sample must be positive")
    count = int(math.floor((t1 - t0) / dt_sample + 1e-9))
    times = t0 + dt_sample * np.arange(count + 1)
    if t1 - times[-1] > 1e-9 * dt_sample:
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


class _Stepper:
    def __init__(self, rhs, opts: IntegratorOptions, post_step, monitor, dim):
        self.rhs = rhs
        self.opts = opts
        self.post_step = post_step
        self.monitor = monitor
        self.h: Optional[float] = opts.first_step
        self.err_prev = 1e-4
        self.n_steps = 0
        self.dim = dim

    def _norm(self, err, y, y_new):
        scale = self.opts.atol + self.opts.rtol * np.maximum(np.abs(y), np.abs(y_new))
        return float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))

    def _initial_step(self, t, y, f, span):
        d0 = self._norm(y, y, y)
        d1 = self._norm(f, y, y)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(h, span, self.opts.max_step)

    def _try(self, t, y, f, h):
        k = [f]
        for s in range(1, 7):
            ys = y + h * sum(a * kk for a, kk in zip(_A[s], k))
            k.append(self.rhs(t + _C[s] * h, ys))
        y_new = y + h * sum(b * kk for b, kk in zip(_B5, k) if b)
        err = h * sum(e * kk for e, kk in zip(_E, k))
        return y_new, self._norm(err, y, y_new)

    def advance(self, t, y, t_target, check=True):
        """Integrate from ``t`` to exactly ``t_target``."""
        f = self.rhs(t, y)
        if self.h is None:
            self.h = self._initial_step(t, y, f, t_target - t)
        while t < t_target:
            remaining = t_target - t
            h = min(self.h, self.opts.max_step, remaining)
            landing = h >= remaining * (1 - 1e-12)
            if h < self.opts.min_step * max(1.0, abs(t)) and not landing:
                raise _StepUnderflow(t)
            try:
                y_new, err = self._try(t, y, f, h)
            except (np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError):
                y_new, err = None, math.inf
            if not math.isfinite(err) or (y_new is not None and not np.all(np.isfinite(y_new))):
                err = math.inf
            if err <= 1.0:
                t_new = t_target if landing else t + h
                if self.post_step is not None:
                    y_new = self.post_step(y_new)
                if check and self.monitor is not None:
                    ok, value = self.monitor(t_new, y_new)
                    if not ok:
                        raise _MonitorTrip(t, y, t_new, value)
                self.n_steps += 1
                if self.n_steps > self.opts.max_steps:
                    raise _StepUnderflow(t_new)
                fac = _SAFETY * max(err, 1e-10) ** (-_ALPHA) * self.err_prev**_BETA
                h_next = h * min(_FAC_MAX, max(_FAC_MIN, fac))
                # a step shortened only to land on a sample must not shrink the step size
                self.h = max(self.h, h_next) if landing and h < self.h else h_next
                self.err_prev = max(err, 1e-4)
                t, y = t_new, y_new
                if t < t_target:
                    f = self.rhs(t, y)
            else:
                fac = _FAC_MIN if not math.isfinite(err) else max(_FAC_MIN, _SAFETY * err ** (-0.2))
                self.h = h * fac
                if self.h < self.opts.min_step * max(1.0, abs(t)):
                    raise _StepUnderflow(t)
        return y

    def bisect(self, trip: _MonitorTrip) -> Failure:
        t_a, y_a, t_b, value = trip.t_good, trip.y_good, trip.t_bad, trip.value
        while t_b - t_a > self.opts.bracket:
            t_m = 0.5 * (t_a + t_b)
            self.h = None
            try:
                y_m = self.advance(t_a, y_a, t_m, check=False)
                ok, v = self.monitor(t_m, y_m)
            except (_StepUnderflow, np.linalg.LinAlgError, FloatingPointError):
                ok, v = False, float("nan")
            if ok:
                t_a, y_a = t_m, y_m
            else:
                t_b, value = t_m, v
        return Failure(t=0.5 * (t_a + t_b), reason="positivity-loss", value=value,
                       message=f"positivity lost in [{t_a:.10g}, {t_b:.10g}]")


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t1: float,
    *,
    dt_sample: Optional[float] = None,
    opts: Optional[IntegratorOptions] = None,
    post_step: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    monitor: Optional[Callable[[float, np.ndarray], tuple]] = None,
) -> ODEResult:
    """Solve ``y' = rhs(t, y)`` on ``[t0, t1]`` and record ``y`` at the sample grid.

    ``monitor(t, y)`` returns ``(ok, value)``.  When it reports ``ok=False``
    the run stops with a ``positivity-loss`` failure; samples recorded so far
    are returned.
    """
    opts = opts or IntegratorOptions()
    y = np.array(y0, copy=True)
    times = sample_grid(t0, t1, dt_sample)
    stepper = _Stepper(rhs, opts, post_step, monitor, y.size)
    out_t = [times[0]]
    out_y = [y.copy()]
    failure = None
    t = times[0]
    try:
        for t_next in times[1:]:
            y = stepper.advance(t, y, t_next)
            t = t_next
            out_t.append(t)
            out_y.append(y.copy())
    except _MonitorTrip as trip:
        failure = stepper.bisect(trip)
    except _StepUnderflow as exc:
        failure = Failure(t=exc.t, reason="step-failure", message="step size underflow")
    except ProviderError as exc:
        failure = Failure(t=t, reason="provider-failure", message=str(exc))
    if failure is not None:
        logger.info("integration stopped at t=%.6g (%s)", failure.t, failure.reason)
    return ODEResult(t=np.array(out_t), y=np.array(out_y), failure=failure, n_steps=stepper.n_steps)
