"""Invariant and oracle suites behind ``nhc validate``.

Each suite item is a function ``rng -> list[CheckResult]``.  Items run
independently (optionally on a thread pool) and their rows are merged in
declaration order, so the report does not depend on scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import (
    doubled_flow,
    flow_path,
    integrate_complex_path,
    integrate_real_path,
    mobius_shape,
    phi_star_metric,
    project_trajectory,
)
from .ensembles import lagrangian_vectors, random_centre, random_hamiltonian, random_shape
from .geometry import (
    frame_from_shape,
    metric_from_shape,
    project_centre,
    reduce_state,
    shape_from_frame,
    shape_from_structure,
    structure_from_frame,
    structure_from_shape,
)
from .integrate import IntegratorOptions
from .oracles import (
    ExampleSpec,
    EXAMPLE_IDS,
    adjudicate_alpha,
    adjudicate_beta,
    beta_test_hamiltonian,
    blowup_hamiltonian,
    run_reference_example,
    schrodinger_residual,
    wigner_of_coherent_state,
    trajectory_grid,
)
from .phasespace import QuadraticHamiltonian, omega_matrix, positivity_form
from .states import GridSpec, evaluate_coherent_state, position_std

LEVELS = ("fast", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    invariant: str
    status: str  # "PASS" | "FAIL" | "INFO"
    value: float
    threshold: float
    detail: str = ""


def _check(name, invariant, value, threshold, detail="", lower=False) -> CheckResult:
    ok = value >= threshold if lower else value <= threshold
    return CheckResult(name, invariant, "PASS" if ok and np.isfinite(value) else "FAIL", float(value),
                       float(threshold), detail)


# -- suite items ---------------------------------------------------------------


def geometry_suite(rng: np.random.Generator, count: int = 30, inject_fault: bool = False) -> list[CheckResult]:
    """Round trips and the defining identities of ``G``, ``J`` and ``P_J``."""
    sympl = jsq = kern = trip = 0.0
    pos = np.inf
    for k in range(count):
        n = 1 + k % 3
        B = random_shape(rng, n)
        G = metric_from_shape(B)
        if inject_fault and k == 0:
            bump = np.zeros_like(G)
            bump[0, 0] = 1e-3
            G = G + bump
        om = omega_matrix(n)
        J = -om @ G
        sympl = max(sympl, np.max(np.abs(G @ om @ G - om)))
        jsq = max(jsq, np.max(np.abs(J @ J + np.eye(2 * n))))
        pos = min(pos, np.linalg.eigvalsh(0.5 * (om @ J + (om @ J).T))[0])
        q = rng.normal(size=n) + 1j * rng.normal(size=n)
        Js = structure_from_shape(B)
        kern = max(kern, np.linalg.norm(project_centre(np.concatenate([B @ q, q]), Js)) / np.linalg.norm(q))
        F = frame_from_shape(B)
        trip = max(
            trip,
            np.max(np.abs(shape_from_frame(F) - B)),
            np.max(np.abs(shape_from_structure(Js) - B)),
            np.max(np.abs(structure_from_frame(F) - Js)),
        )
    return [
        _check("geometry.metric_symplectic", "GΩG=Ω", sympl, 1e-9),
        _check("geometry.structure_square", "J²=−I", jsq, 1e-9),
        _check("geometry.structure_positive", "ΩJ≻0", pos, 0.0, lower=True),
        _check("geometry.kernel", "ker P_J = L_B", kern, 1e-9),
        _check("geometry.round_trip", "B ↔ frame ↔ J", trip, 1e-9),
    ]


def transport_suite(rng: np.random.Generator, count: int = 5, n: int = 1) -> list[CheckResult]:
    """Riccati solutions against the linear (Möbius and doubled-flow) transport."""
    opts = IntegratorOptions()
    dev_b = dev_g = 0.0
    for _ in range(count):
        ham = random_hamiltonian(rng, n)
        B0 = random_shape(rng, n)
        G0 = metric_from_shape(B0)
        ct = integrate_complex_path(np.zeros(2 * n), B0, ham, 0.0, 1.0, opts, dt_sample=0.1)
        rt = integrate_real_path(np.zeros(2 * n), G0, ham, 0.0, 1.0, opts, dt_sample=0.1)
        ts, Ss = flow_path(ham, 0.0, 1.0, 0.1, opts)
        dev_b = max(dev_b, max(np.max(np.abs(B - mobius_shape(S, B0))) for B, S in zip(ct.B, Ss)))
        dev_g = max(dev_g, np.max(np.abs(rt.G[-1] - phi_star_metric(doubled_flow(ham, 0.0, 1.0, opts), G0))))
    return [
        _check(f"dynamics.riccati_vs_mobius_n{n}", "B(t) = S(t)_*B0", dev_b, 1e-6),
        _check(f"dynamics.metric_vs_doubled_flow_n{n}", "G(t) = Φ(t)_*G0", dev_g, 1e-6),
    ]


def route_suite(rng: np.random.Generator, count: int = 5, n: int = 1) -> list[CheckResult]:
    """Projected complex route against the directly integrated real route."""
    opts = IntegratorOptions()
    dev_z = dev_g = 0.0
    for _ in range(count):
        ham = random_hamiltonian(rng, n)
        B0 = random_shape(rng, n)
        z0 = random_centre(rng, n)
        start = reduce_state(z0, B0)
        proj = project_trajectory(integrate_complex_path(z0, B0, ham, 0.0, 1.0, opts, dt_sample=0.05))
        rt = integrate_real_path(start.Z, metric_from_shape(B0), ham, 0.0, 1.0, opts, dt_sample=0.05)
        dev_z = max(dev_z, np.max(np.abs(proj.Z - rt.Z)))
        dev_g = max(dev_g, np.max(np.abs(proj.G - rt.G)))
    return [
        _check(f"dynamics.route_equivalence_Z_n{n}", "P_J(z(t)) = Z(t)", dev_z, 1e-5),
        _check(f"dynamics.route_equivalence_G_n{n}", "G(B(t)) = G(t)", dev_g, 1e-5),
    ]


def positivity_suite(rng: np.random.Generator, count: int = 5, n: int = 1) -> list[CheckResult]:
    """``h(S z, S z)`` never decreases along a flow with ``Im H <= 0``."""
    worst = 0.0
    for _ in range(count):
        ham = random_hamiltonian(rng, n)
        B = random_shape(rng, n)
        ts, Ss = flow_path(ham, 0.0, 1.0, 0.01)
        for z in lagrangian_vectors(rng, B, 5):
            h = np.array([positivity_form(S @ z, S @ z).real for S in Ss])
            worst = max(worst, np.max(-np.diff(h)) / np.max(np.abs(h)))
    return [_check(f"dynamics.positivity_monotone_n{n}", "h(S(t)z, S(t)z) non-decreasing", worst, 1e-10)]


def equivalence_suite(rng: np.random.Generator, count: int = 10) -> list[CheckResult]:
    """Complex-centre wavefunction against its real-centre representative and Wigner moments."""
    pointwise = centroid = mass = 0.0
    for _ in range(count):
        B = random_shape(rng, 1)
        z = random_centre(rng, 1, imag_scale=0.5)
        proj = reduce_state(z, B)
        std = position_std(B)
        grid = GridSpec.around(proj.Z[1], 10 * std, 512)
        psi = evaluate_coherent_state(grid, z, B)
        ref = np.exp(1j * proj.sigma) * evaluate_coherent_state(grid, proj.Z, B).values
        pointwise = max(pointwise, np.max(np.abs(psi.values - ref)) / np.max(np.abs(ref)))
        W = wigner_of_coherent_state(z, B)
        m, mean, _ = W.moments()
        cells = np.array([W.p[1] - W.p[0], W.q[1] - W.q[0]])
        centroid = max(centroid, np.max(np.abs(mean - proj.Z) / cells))
        mass = max(mass, abs(m - np.exp(-2 * proj.sigma.imag)) / np.exp(-2 * proj.sigma.imag))
    return [
        _check("states.complex_centre_equivalence", "ψ_z = e^{iσ/ħ} ψ_{P_J z}", pointwise, 1e-9),
        _check("oracles.wigner_centroid_cells", "Wigner centroid = P_J z", centroid, 1.0),
        _check("oracles.wigner_mass", "Wigner mass = e^{-2 Im σ/ħ}", mass, 1e-4),
    ]


def grid_oracle_suite(rng: np.random.Generator) -> list[CheckResult]:
    """Schrödinger residual on the grid, with the ablated phase as a negative control."""
    harmonic = QuadraticHamiltonian(n=1, H=np.eye(2), label="harmonic")
    blowup = blowup_hamiltonian()

    def residual(ham, z0, B0, t1, convention="normalized"):
        ct = integrate_complex_path(z0, B0, ham, 0.0, t1, dt_sample=1e-3, alpha_convention=convention)
        return schrodinger_residual(ct, ham, trajectory_grid(ct)).max_residual

    return [
        _check("oracles.schrodinger_harmonic", "iħ∂ψ = Ĥψ", residual(harmonic, [0.5, 1.0], 1j, 1.0), 1e-4),
        _check("oracles.schrodinger_blowup", "iħ∂ψ = Ĥψ", residual(blowup, [0.0, 1.0], 1j, 0.5), 1e-4),
        _check("oracles.ablated_phase_control", "ablated α is rejected",
               residual(harmonic, [0.5, 1.0], 2j, 1.0, "ablated"), 0.1, lower=True),
    ]


def adjudication_suite(rng: np.random.Generator) -> list[CheckResult]:
    """Convention verdicts; informational only."""
    free = QuadraticHamiltonian(n=1, H=np.diag([1.0, 0.0]), label="free")
    alpha = adjudicate_alpha(free, [0.5, 0.0], 1j, 1.0)
    beta = adjudicate_beta(beta_test_hamiltonian(), [0.3 + 0.2j, -0.5 + 0.1j], 0.4 + 1.2j, 1.0)
    return [
        CheckResult("adjudication.alpha", "phase convention", "INFO", alpha[alpha["winner"]], float("nan"),
                    f"winner={alpha['winner']} normalized={alpha['normalized']:.3e} literal={alpha['literal']:.3e}"),
        CheckResult("adjudication.beta", "log-norm convention", "INFO", beta[beta["winner"]], float("nan"),
                    f"winner={beta['winner']} literal={beta['literal']:.3e} norm={beta['norm']:.3e}"),
    ]


def examples_suite(rng: np.random.Generator) -> list[CheckResult]:
    rows = []
    for eid in EXAMPLE_IDS:
        res = run_reference_example(ExampleSpec(eid))
        worst = max(res.deviations[k] / res.thresholds[k] for k in res.thresholds)
        failing = [k for k in res.thresholds if res.deviations[k] > res.thresholds[k]]
        rows.append(CheckResult(f"examples.{eid}", "closed form", "PASS" if res.passed else "FAIL", worst, 1.0,
                                "deviation/threshold" + (f"; failing {failing}" if failing else "")))
    return rows


# -- driver --------------------------------------------------------------------


def suite_items(level: str, inject_fault: bool = False) -> list[tuple[str, Callable]]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    items = [
        ("geometry", lambda rng: geometry_suite(rng, inject_fault=inject_fault)),
        ("transport", transport_suite),
        ("routes", route_suite),
        ("positivity", positivity_suite),
    ]
    if level == "full":
        items += [
            ("transport_n2", lambda rng: transport_suite(rng, n=2)),
            ("routes_n2", lambda rng: route_suite(rng, n=2)),
            ("equivalence", equivalence_suite),
            ("grid_oracle", grid_oracle_suite),
            ("examples", examples_suite),
            ("adjudication", adjudication_suite),
        ]
    return items


def run_validation(level: str = "fast", seed: int = 0, inject_fault: bool = False, jobs: int = 1) -> list[CheckResult]:
    """Run all items of a level; each item gets its own child generator of ``seed``."""
    items = suite_items(level, inject_fault)
    seeds = np.random.SeedSequence(seed).spawn(len(items))

    def run(i):
        name, fn = items[i]
        rng = np.random.default_rng(seeds[i])
        try:
            return fn(rng)
        except Exception as exc:  # a crashing item is a failing item
            return [CheckResult(f"{name}.error", "suite ran", "FAIL", float("nan"), float("nan"),
                                f"{type(exc).__name__}: {exc}")]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(run, range(len(items))))
    else:
        chunks = [run(i) for i in range(len(items))]
    return [row for chunk in chunks for row in chunk]


def format_report(rows: list[CheckResult]) -> str:
    """Tab-separated table: status, check, invariant, value, threshold, detail."""
    lines = ["status\tcheck\tinvariant\tvalue\tthreshold\tdetail"]
    for r in rows:
        lines.append(f"{r.status}\t{r.name}\t{r.invariant}\t{r.value:.3e}\t{r.threshold:.3e}\t{r.detail}")
    return "\n".join(lines)


def all_passed(rows: list[CheckResult]) -> bool:
    return all(r.status != "FAIL" for r in rows)
