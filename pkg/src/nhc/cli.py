"""Command line front-end: ``nhc propagate|project|example|validate``.

Exit codes: 0 success, 2 configuration error, 3 breakdown (positivity lost
before ``t1``), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dynamics import BreakdownReason, ComplexTrajectory, RealTrajectory, integrate_complex_path, integrate_real_path
from .errors import ConfigError, NHCError
from .geometry import frame_from_shape, reduce_state
from .integrate import IntegratorOptions
from .oracles import EXAMPLE_IDS, ExampleSpec, run_reference_example
from .scenario import FORMATS, Scenario, load_scenario
from .trajio import write_trajectory
from .validate import LEVELS, all_passed, format_report, run_validation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREAKDOWN = 3
EXIT_NUMERICAL = 4

logger = logging.getLogger("nhc")

_NUMERICAL = (ArithmeticError, np.linalg.LinAlgError, FloatingPointError, NHCError)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _exit_for(traj) -> int:
    bd = traj.breakdown
    if bd is None:
        return EXIT_OK
    return EXIT_BREAKDOWN if bd.reason is BreakdownReason.POSITIVITY_LOSS else EXIT_NUMERICAL


def _output_paths(base: Path, fmt: str, route: str) -> dict:
    suffix = "." + fmt
    stem = base.with_suffix("") if base.suffix in (".csv", ".jsonl") else base
    if route == "both":
        return {r: stem.with_name(f"{stem.name}_{r}").with_suffix(suffix) for r in ("complex", "real")}
    return {route: stem.with_suffix(suffix)}


def propagate(sc: Scenario) -> dict:
    """Run the requested route(s); returns ``{"complex": ..., "real": ...}``."""
    ham = sc.hamiltonian()
    opts = IntegratorOptions(rtol=sc.rel_tol, atol=sc.abs_tol)
    out = {}
    if sc.route in ("complex", "both"):
        z0, B0 = sc.complex_start()
        out["complex"] = integrate_complex_path(z0, B0, ham, sc.t0, sc.t1, opts, dt_sample=sc.dt_sample,
                                                hbar=sc.hbar, alpha_convention=sc.alpha_convention)
    if sc.route in ("real", "both"):
        Z0, G0, beta0 = sc.real_start()
        rt = integrate_real_path(Z0, G0, ham, sc.t0, sc.t1, opts, dt_sample=sc.dt_sample, hbar=sc.hbar,
                                 beta_convention=sc.beta_convention)
        out["real"] = replace(rt, beta=rt.beta + beta0) if beta0 else rt
    return out


def cmd_propagate(config: str, out: Optional[str] = None, fmt: Optional[str] = None) -> int:
    try:
        sc = load_scenario(config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = fmt or sc.output_format
    base = Path(out or sc.output_path or Path(config).with_suffix("").name + "_trajectory")
    try:
        trajs = propagate(sc)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    code = EXIT_OK
    for route, path in _output_paths(base, fmt, sc.route).items():
        traj = trajs[route]
        write_trajectory(traj, path, fmt, sc.stride)
        status = _exit_for(traj)
        if traj.breakdown is not None:
            bd = traj.breakdown
            print(f"{route}: breakdown at t={float(bd.t_breakdown)!r} ({bd.reason.value}); wrote {path}", file=sys.stderr)
        else:
            print(f"{route}: wrote {len(traj)} samples to {path}", file=sys.stderr)
        code = max(code, status)
    return code


def cmd_project(config: str) -> int:
    """Print the real centre, equivalence phase and frame of ``L_B`` as JSON."""
    try:
        sc = load_scenario(config)
        z, B = sc.complex_start()
        proj = reduce_state(z, B)
        frame = frame_from_shape(B)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    doc = {
        "Z": proj.Z,
        "sigma": proj.sigma,
        "frame_re": frame.real,
        "frame_im": frame.imag,
    }
    print(json.dumps(_jsonable(doc), indent=2))
    return EXIT_OK


def _example_params(eid: str, args) -> dict:
    params = {}
    if args.hbar is not None:
        params["hbar"] = args.hbar
    if args.gamma is not None:
        if eid == "contraction":
            if len(args.gamma) != 1:
                raise ConfigError("contraction takes a scalar --gamma")
            params["gamma"] = args.gamma[0]
        elif eid == "pt_shifted":
            if len(args.gamma) != 2:
                raise ConfigError("pt_shifted takes --gamma P Q")
            params["gamma"] = np.array(args.gamma)
        else:
            raise ConfigError(f"--gamma does not apply to {eid}")
    for key in ("b", "Q0", "P0", "omega"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.delta is not None:
        params["delta"] = complex(args.delta[0], args.delta[1])
    if args.Z0 is not None:
        params["Z0"] = np.array(args.Z0)
    for key in ("G0", "S"):
        val = getattr(args, key)
        if val is not None:
            params[key] = np.array(val).reshape(2, 2)
    if args.beta_convention is not None:
        params["beta_convention"] = args.beta_convention
    return params


def _write_closed_form(closed: dict, path: Path) -> dict:
    """Write the sample-aligned closed-form arrays as CSV; returns the scalar entries."""
    t = np.asarray(closed["t"])
    cols, names, scalars = [t], ["t"], {}
    for key, val in closed.items():
        if key == "t":
            continue
        arr = np.asarray(val)
        if arr.ndim == 0 or arr.shape[0] != t.size:
            scalars[key] = val
            continue
        flat = arr.reshape(t.size, -1)
        parts = [("Re_", flat.real), ("Im_", flat.imag)] if np.iscomplexobj(flat) else [("", flat)]
        for prefix, block in parts:
            for j in range(block.shape[1]):
                names.append(f"{prefix}{key}_{j + 1}" if block.shape[1] > 1 else f"{prefix}{key}")
                cols.append(block[:, j])
    data = np.column_stack(cols)
    lines = [",".join(names)] + [",".join(repr(float(v)) for v in row) for row in data]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return scalars


def cmd_example(eid: str, args) -> int:
    if eid not in EXAMPLE_IDS:
        print(f"config error: unknown example {eid!r}; expected one of {', '.join(EXAMPLE_IDS)}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        spec = ExampleSpec(eid, _example_params(eid, args))
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        res = run_reference_example(spec, t1=args.t1, dt_sample=args.dt_sample)
    except _NUMERICAL as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    summary = {
        "example": eid,
        "t1": res.t1,
        "passed": res.passed,
        "deviations": res.deviations,
        "thresholds": res.thresholds,
        "info": res.info,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary["closed_form_scalars"] = _write_closed_form(res.closed_form, out / "closed_form.csv")
        for key, traj in res.numeric.items():
            if isinstance(traj, (ComplexTrajectory, RealTrajectory)):
                write_trajectory(traj, out / f"{key}.{args.format}", args.format)
        (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2) + "\n", encoding="utf-8")
    print(json.dumps(_jsonable(summary), indent=2))
    return EXIT_OK if res.passed else EXIT_NUMERICAL


def cmd_validate(level: str = "fast", seed: int = 0, inject_fault: bool = False, jobs: int = 1,
                 fmt: str = "tsv") -> int:
    rows = run_validation(level, seed=seed, inject_fault=inject_fault, jobs=jobs)
    if fmt == "jsonl":
        for r in rows:
            print(json.dumps(_jsonable(r.__dict__)))
    else:
        print(format_report(rows))
    return EXIT_OK if all_passed(rows) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhc", description="Complexified coherent states under non-Hermitian quadratic Hamiltonians."
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="integrate a scenario and write its trajectory")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", help="output path (route=both appends _complex/_real)")
    p.add_argument("--format", choices=FORMATS, help="override output.format")

    p = sub.add_parser("project", help="reduce a complex centre to its real centre")
    p.add_argument("--config", required=True, help="scenario JSON file with z and B")

    p = sub.add_parser("example", help="run a reference example against its closed form")
    p.add_argument("id", help=f"one of {', '.join(EXAMPLE_IDS)}")
    p.add_argument("--gamma", type=float, nargs="+", help="contraction rate, or the shift vector (P Q)")
    p.add_argument("--b", type=float, help="blowup: Im B0")
    p.add_argument("--Q0", type=float)
    p.add_argument("--P0", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--delta", type=float, nargs=2, metavar=("RE", "IM"))
    p.add_argument("--Z0", type=float, nargs=2, metavar=("P", "Q"))
    p.add_argument("--G0", type=float, nargs=4, help="2x2 metric, row-major")
    p.add_argument("--S", type=float, nargs=4, help="2x2 attractor metric, row-major")
    p.add_argument("--hbar", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--dt-sample", dest="dt_sample", type=float)
    p.add_argument("--beta-convention", dest="beta_convention", choices=("literal", "norm"))
    p.add_argument("--out", help="directory for closed-form/numeric trajectories and summary.json")
    p.add_argument("--format", choices=FORMATS, default="csv")

    p = sub.add_parser("validate", help="run invariant and oracle suites")
    p.add_argument("--level", choices=LEVELS, default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--inject-fault", dest="inject_fault", action="store_true",
                   help="perturb one metric off the symplectic group (negative control)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "propagate":
        return cmd_propagate(args.config, args.out, args.format)
    if args.command == "project":
        return cmd_project(args.config)
    if args.command == "example":
        return cmd_example(args.id, args)
    return cmd_validate(args.level, args.seed, args.inject_fault, args.jobs, args.format)


if __name__ == "__main__":
    sys.exit(main())
