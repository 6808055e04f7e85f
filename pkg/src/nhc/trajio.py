"""CSV and JSON-lines trajectory files.

CSV columns are ``t, Re_z_1..Re_z_2n, Im_z_1..Im_z_2n, Re_B_i_j.., Im_B_i_j..,
Re_alpha, Im_alpha`` for complex trajectories and ``t, Z_1..Z_2n, G_i_j..,
beta`` for real ones, matrices in row-major order.  Floats are written with
``repr``, the shortest decimal that round-trips.  A run that stopped early
ends with the comment line ``# breakdown t=<value> reason=<reason>``.

JSON-lines files hold a header record, one record per sample and, after an
early stop, a breakdown record.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

import numpy as np

from .dynamics import BreakdownReason, BreakdownReport, ComplexTrajectory, RealTrajectory
from .errors import ConfigError

Trajectory = Union[ComplexTrajectory, RealTrajectory]


def _fmt(x) -> str:
    return repr(float(x))


def complex_columns(n: int) -> list[str]:
    dim = 2 * n
    cols = ["t"]
    cols += [f"Re_z_{i + 1}" for i in range(dim)]
    cols += [f"Im_z_{i + 1}" for i in range(dim)]
    cols += [f"Re_B_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    cols += [f"Im_B_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    return cols + ["Re_alpha", "Im_alpha"]


def real_columns(n: int) -> list[str]:
    dim = 2 * n
    cols = ["t"] + [f"Z_{i + 1}" for i in range(dim)]
    cols += [f"G_{i + 1}_{j + 1}" for i in range(dim) for j in range(dim)]
    return cols + ["beta"]


def _rows(traj: Trajectory):
    if isinstance(traj, ComplexTrajectory):
        for t, z, B, a in zip(traj.t, traj.z, traj.B, traj.alpha):
            yield np.concatenate([[t], z.real, z.imag, B.real.ravel(), B.imag.ravel(), [a.real, a.imag]])
    else:
        for t, Z, G, b in zip(traj.t, traj.Z, traj.G, traj.beta):
            yield np.concatenate([[t], Z, G.ravel(), [b]])


def _strided(traj: Trajectory, stride: int) -> Trajectory:
    if stride == 1:
        return traj
    idx = np.arange(0, len(traj), stride)
    if isinstance(traj, ComplexTrajectory):
        return ComplexTrajectory(t=traj.t[idx], z=traj.z[idx], B=traj.B[idx], alpha=traj.alpha[idx],
                                 hbar=traj.hbar, breakdown=traj.breakdown)
    return RealTrajectory(t=traj.t[idx], Z=traj.Z[idx], G=traj.G[idx], beta=traj.beta[idx],
                          hbar=traj.hbar, breakdown=traj.breakdown)


def format_csv(traj: Trajectory, stride: int = 1) -> str:
    traj = _strided(traj, stride)
    cols = complex_columns(traj.n) if isinstance(traj, ComplexTrajectory) else real_columns(traj.n)
    lines = [",".join(cols)]
    lines += [",".join(_fmt(v) for v in row) for row in _rows(traj)]
    if traj.breakdown is not None:
        lines.append(f"# breakdown t={_fmt(traj.breakdown.t_breakdown)} reason={traj.breakdown.reason.value}")
    return "\n".join(lines) + "\n"


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def format_jsonl(traj: Trajectory, stride: int = 1) -> str:
    traj = _strided(traj, stride)
    is_complex = isinstance(traj, ComplexTrajectory)
    records = [{"type": "header", "route": "complex" if is_complex else "real", "n": traj.n, "hbar": traj.hbar}]
    if is_complex:
        for t, z, B, a in zip(traj.t, traj.z, traj.B, traj.alpha):
            records.append({
                "type": "sample", "t": float(t),
                "z_re": z.real.tolist(), "z_im": z.imag.tolist(),
                "B_re": B.real.tolist(), "B_im": B.imag.tolist(),
                "alpha_re": float(a.real), "alpha_im": float(a.imag),
            })
    else:
        for t, Z, G, b in zip(traj.t, traj.Z, traj.G, traj.beta):
            records.append({"type": "sample", "t": float(t), "Z": Z.tolist(), "G": G.tolist(), "beta": float(b)})
    if traj.breakdown is not None:
        bd = traj.breakdown
        records.append({"type": "breakdown", "t": float(bd.t_breakdown), "reason": bd.reason.value,
                        "min_eig": _finite_or_none(bd.min_eig), "message": bd.message})
    return "".join(json.dumps(r, allow_nan=False) + "\n" for r in records)


def write_trajectory(traj: Trajectory, path, fmt: str = "csv", stride: int = 1) -> Path:
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"unknown output format {fmt!r}")
    text = format_csv(traj, stride) if fmt == "csv" else format_jsonl(traj, stride)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _breakdown(t: float, reason: str, min_eig=None, message: str = "") -> BreakdownReport:
    return BreakdownReport(t_breakdown=t, min_eig=float("nan") if min_eig is None else min_eig,
                           reason=BreakdownReason(reason), message=message)


def parse_csv(text: str, hbar: float = 1.0) -> Trajectory:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    breakdown = None
    rows = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            fields = dict(kv.split("=", 1) for kv in ln[1:].split()[1:])
            breakdown = _breakdown(float(fields["t"]), fields["reason"])
            continue
        rows.append([float(v) for v in ln.split(",")])
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    if header[1].startswith("Re_z"):
        n = _complex_n(len(header))
        dim = 2 * n
        z = data[:, 1 : 1 + dim] + 1j * data[:, 1 + dim : 1 + 2 * dim]
        o = 1 + 2 * dim
        B = (data[:, o : o + n * n] + 1j * data[:, o + n * n : o + 2 * n * n]).reshape(-1, n, n)
        alpha = data[:, -2] + 1j * data[:, -1]
        return ComplexTrajectory(t=data[:, 0], z=z, B=B, alpha=alpha, hbar=hbar, breakdown=breakdown)
    # ncols = 1 + dim + dim^2 + 1
    dim = int(round((-1 + math.sqrt(1 + 4 * (len(header) - 2))) / 2))
    G = data[:, 1 + dim : 1 + dim + dim * dim].reshape(-1, dim, dim)
    return RealTrajectory(t=data[:, 0], Z=data[:, 1 : 1 + dim], G=G, beta=data[:, -1], hbar=hbar, breakdown=breakdown)


def _complex_n(ncols: int) -> int:
    # ncols = 1 + 4n + 2n^2 + 2
    n = int(round((-4 + math.sqrt(16 + 8 * (ncols - 3))) / 4))
    if 1 + 4 * n + 2 * n * n + 2 != ncols:
        raise ValueError(f"{ncols} columns do not form a complex trajectory")
    return n


def parse_jsonl(text: str) -> Trajectory:
    records = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    head = records[0]
    samples = [r for r in records if r["type"] == "sample"]
    breakdown = None
    for r in records:
        if r["type"] == "breakdown":
            breakdown = _breakdown(r["t"], r["reason"], r.get("min_eig"), r.get("message", ""))
    n, hbar = head["n"], head["hbar"]
    t = np.array([r["t"] for r in samples], dtype=float)
    if head["route"] == "complex":
        z = np.array([np.array(r["z_re"]) + 1j * np.array(r["z_im"]) for r in samples]).reshape(-1, 2 * n)
        B = np.array([np.array(r["B_re"]) + 1j * np.array(r["B_im"]) for r in samples]).reshape(-1, n, n)
        alpha = np.array([r["alpha_re"] + 1j * r["alpha_im"] for r in samples], dtype=complex)
        return ComplexTrajectory(t=t, z=z, B=B, alpha=alpha, hbar=hbar, breakdown=breakdown)
    dim = 2 * n
    Z = np.array([r["Z"] for r in samples], dtype=float).reshape(-1, dim)
    G = np.array([r["G"] for r in samples], dtype=float).reshape(-1, dim, dim)
    beta = np.array([r["beta"] for r in samples], dtype=float)
    return RealTrajectory(t=t, Z=Z, G=G, beta=beta, hbar=hbar, breakdown=breakdown)


def read_trajectory(path, hbar: float = 1.0) -> Trajectory:
    """Read a file written by :func:`write_trajectory`; the format follows the suffix."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".jsonl":
        return parse_jsonl(text)
    return parse_csv(text, hbar=hbar)
