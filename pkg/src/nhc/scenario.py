"""JSON scenario files for the command line front-end.

A scenario is a UTF-8 JSON object::

    {
      "n": 1, "hbar": 1.0,
      "hamiltonian": {"H_re": [[1, 0], [0, 1]], "H_im": [[0, 0], [0, 0]],
                      "c_re": [0, 0], "c_im": [0, 0],
                      "time_dependence": {"preset": "cosine", "omega": 2.0, "amplitude": 0.1}},
      "initial": {"route": "both", "z_re": [0, 1], "z_im": [0, 0], "B_re": [[0]], "B_im": [[1]]},
      "time": {"t0": 0.0, "t1": 1.0, "dt_sample": 0.01},
      "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-12},
      "output": {"path": "run.csv", "format": "csv", "stride": 1}
    }

Complex arrays are split into ``_re``/``_im`` parts; a missing ``_im`` part
is zero.  The initial state is either ``z``/``B`` or a real centre ``Z``
with a metric ``G``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import ALPHA_CONVENTIONS, BETA_CONVENTIONS
from .errors import ConfigError, NHCError
from .geometry import as_shape, check_metric, metric_from_shape, reduce_state, shape_from_metric
from .integrate import DEFAULT_ATOL, default_rtol
from .phasespace import QuadraticHamiltonian

ASYMMETRY_TOL = 1e-6
ROUTES = ("complex", "real", "both")
FORMATS = ("csv", "jsonl")
PRESETS = ("constant", "cosine", "linear_ramp")


@dataclass(frozen=True)
class TimeDependence:
    """Scalar modulation ``H(t) = f(t) H``.

    ``constant``: ``f = 1``; ``cosine``: ``f = 1 + amplitude cos(omega t)``;
    ``linear_ramp``: ``f = 1 + rate t``.  The linear term is not modulated.
    """

    preset: str = "constant"
    omega: float = 1.0
    amplitude: float = 0.0
    rate: float = 0.0

    def factor(self, t: float) -> float:
        if self.preset == "cosine":
            return 1.0 + self.amplitude * math.cos(self.omega * t)
        if self.preset == "linear_ramp":
            return 1.0 + self.rate * t
        return 1.0


@dataclass(frozen=True)
class Scenario:
    n: int
    hbar: float
    H: np.ndarray
    c: np.ndarray
    time_dependence: TimeDependence
    route: str
    z0: Optional[np.ndarray]
    B0: Optional[np.ndarray]
    Z0: Optional[np.ndarray]
    G0: Optional[np.ndarray]
    t0: float
    t1: float
    dt_sample: Optional[float]
    rel_tol: float
    abs_tol: float
    output_path: Optional[str]
    output_format: str
    stride: int
    alpha_convention: str = "normalized"
    beta_convention: str = "literal"

    def hamiltonian(self) -> QuadraticHamiltonian:
        if self.time_dependence.preset == "constant":
            return QuadraticHamiltonian(n=self.n, H=self.H, c=self.c, label="scenario")
        H, td = self.H, self.time_dependence
        return QuadraticHamiltonian(n=self.n, provider=lambda t: td.factor(t) * H, c=self.c, label="scenario")

    def complex_start(self) -> tuple[np.ndarray, np.ndarray]:
        """``(z0, B0)``, derived from ``(Z0, G0)`` when only those were given."""
        if self.z0 is not None:
            return self.z0, self.B0
        return self.Z0.astype(complex), shape_from_metric(self.G0)

    def real_start(self) -> tuple[np.ndarray, np.ndarray, float]:
        """``(Z0, G0, beta0)``; a complex centre is projected and its norm carried in ``beta0``."""
        if self.Z0 is not None:
            return self.Z0, self.G0, 0.0
        proj = reduce_state(self.z0, self.B0)
        return proj.Z, metric_from_shape(self.B0), 2.0 * proj.sigma.imag / self.hbar


def _section(doc: dict, key: str, required: bool = True) -> dict:
    sec = doc.get(key)
    if sec is None:
        if required:
            raise ConfigError(f"missing section '{key}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{key}' must be an object")
    return sec


def _number(sec: dict, key: str, where: str, default=None, positive: bool = False) -> Optional[float]:
    if key not in sec or sec[key] is None:
        if default is None:
            return None
        return default
    val = sec[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key} must be a finite number, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(f"{where}.{key} must be positive, got {val!r}")
    return float(val)


def _array(sec: dict, key: str, shape: tuple, where: str, required: bool = False) -> Optional[np.ndarray]:
    if key not in sec or sec[key] is None:
        if required:
            raise ConfigError(f"missing {where}.{key}")
        return None
    try:
        arr = np.array(sec[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key} is not a numeric array: {exc}") from exc
    if arr.shape != shape:
        raise ConfigError(f"{where}.{key} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{where}.{key} has non-finite entries")
    return arr


def _complex(sec: dict, base: str, shape: tuple, where: str) -> Optional[np.ndarray]:
    re = _array(sec, base + "_re", shape, where)
    im = _array(sec, base + "_im", shape, where)
    if re is None and im is None:
        return None
    return (np.zeros(shape) if re is None else re) + 1j * (np.zeros(shape) if im is None else im)


def _check_symmetric(M: np.ndarray, name: str, tol: float = ASYMMETRY_TOL) -> None:
    bad = np.argwhere(np.triu(np.abs(M - M.T) > tol, k=1))
    if bad.size:
        entries = ", ".join(
            f"{name}[{i}][{j}]={float(M[i, j])!r} vs {name}[{j}][{i}]={float(M[j, i])!r}" for i, j in bad[:5]
        )
        more = f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""
        raise ConfigError(f"{name} is not symmetric beyond {tol:g}: {entries}{more}")


def _time_dependence(raw) -> TimeDependence:
    if raw is None:
        return TimeDependence()
    if isinstance(raw, str):
        raw = {"preset": raw}
    if not isinstance(raw, dict):
        raise ConfigError("hamiltonian.time_dependence must be a preset name or an object")
    preset = raw.get("preset", "constant")
    if preset not in PRESETS:
        raise ConfigError(f"unknown time_dependence preset {preset!r}; expected one of {PRESETS}")
    where = "hamiltonian.time_dependence"
    return TimeDependence(
        preset=preset,
        omega=_number(raw, "omega", where, 1.0),
        amplitude=_number(raw, "amplitude", where, 0.0),
        rate=_number(raw, "rate", where, 0.0),
    )


def parse_scenario(doc: dict) -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"n must be a positive integer, got {n!r}")
    hbar = _number(doc, "hbar", "scenario", 1.0, positive=True)
    dim = 2 * n

    ham = _section(doc, "hamiltonian")
    H_re = _array(ham, "H_re", (dim, dim), "hamiltonian", required=True)
    H_im = _array(ham, "H_im", (dim, dim), "hamiltonian")
    H_im = np.zeros((dim, dim)) if H_im is None else H_im
    _check_symmetric(H_re, "H_re")
    _check_symmetric(H_im, "H_im")
    H = 0.5 * (H_re + H_re.T) + 0.5j * (H_im + H_im.T)
    c = _complex(ham, "c", (dim,), "hamiltonian")
    c = np.zeros(dim, dtype=complex) if c is None else c
    td = _time_dependence(ham.get("time_dependence"))

    init = _section(doc, "initial")
    route = init.get("route", "complex")
    if route not in ROUTES:
        raise ConfigError(f"initial.route must be one of {ROUTES}, got {route!r}")
    z0 = _complex(init, "z", (dim,), "initial")
    B0 = _complex(init, "B", (n, n), "initial")
    Z0 = _array(init, "Z", (dim,), "initial")
    G0 = _array(init, "G", (dim, dim), "initial")
    try:
        if z0 is not None or B0 is not None:
            if z0 is None or B0 is None:
                raise ConfigError("initial state needs both z and B")
            if Z0 is not None or G0 is not None:
                raise ConfigError("give either z/B or Z/G in 'initial', not both")
            B0 = as_shape(B0, n)
        elif Z0 is not None and G0 is not None:
            G0 = check_metric(G0)
        else:
            raise ConfigError("initial state needs z and B, or Z and G")
    except NHCError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid initial state: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid initial state: {exc}") from exc

    tsec = _section(doc, "time")
    t0 = _number(tsec, "t0", "time", 0.0)
    t1 = _number(tsec, "t1", "time")
    if t1 is None:
        raise ConfigError("missing time.t1")
    if t1 < t0:
        raise ConfigError(f"time.t1={t1} precedes time.t0={t0}")
    dt_sample = _number(tsec, "dt_sample", "time", positive=True)

    isec = _section(doc, "integrator", required=False)
    rel_tol = _number(isec, "rel_tol", "integrator", positive=True) or default_rtol()
    abs_tol = _number(isec, "abs_tol", "integrator", DEFAULT_ATOL, positive=True)
    alpha_convention = isec.get("alpha_convention", "normalized")
    beta_convention = isec.get("beta_convention", "literal")
    if alpha_convention not in ALPHA_CONVENTIONS:
        raise ConfigError(f"integrator.alpha_convention must be one of {ALPHA_CONVENTIONS}")
    if beta_convention not in BETA_CONVENTIONS:
        raise ConfigError(f"integrator.beta_convention must be one of {BETA_CONVENTIONS}")

    osec = _section(doc, "output", required=False)
    fmt = osec.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}, got {fmt!r}")
    stride = osec.get("stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ConfigError(f"output.stride must be a positive integer, got {stride!r}")
    path = osec.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")

    return Scenario(
        n=n, hbar=hbar, H=H, c=c, time_dependence=td, route=route,
        z0=z0, B0=B0, Z0=Z0, G0=G0, t0=t0, t1=t1, dt_sample=dt_sample,
        rel_tol=rel_tol, abs_tol=abs_tol, output_path=path, output_format=fmt, stride=stride,
        alpha_convention=alpha_convention, beta_convention=beta_convention,
    )


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_scenario(doc)
