"""Benchmark, operation-count verification and convergence studies.

The benchmark protocol builds, for each problem size N, one twelve-layer
(K = 11 by default) conduction system per solver family:

* pentadiagonal path: assembled matrix A plus its dominance shift P, solved
  by NPDM / MNPDM / SPDM;
* tridiagonal path: A reduced band-preservingly to a tridiagonal matrix,
  then shifted, solved by NTDM / STDM.

A constructed solution is used throughout: a smooth low-degree profile
y_bar over the mesh is chosen (seeded, rational-friendly), the right-hand
side is set to b = A_DD * y_bar, and each solver's error is the sup norm of
its recovered solution against y_bar.  No PDE ground truth is needed and
exact solvers must reproduce y_bar exactly (error 0).

Wall-clock entries are medians over `repetitions` runs after one discarded
warm-up.  Operation counts come from the solvers' own tallies; the
reference operation laws are 19N - 29 (NPDM), 13N + 7K - 14 (MNPDM) and
9N + 2 (NTDM).  This implementation's counts match the N and K slopes of
those laws exactly; its constants are -29, -8 and -8 and are reported next
to the references.
"""

from __future__ import annotations

import json
import math
import platform
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import median
from time import perf_counter

import numpy as np

from .assembly import (LinearSystem, PentaMatrix, TriMatrix, assemble_system,
                       contact_conductivities)
from .band_solvers import (BreakdownError, SOLVER_IDS, solve_pd_lu,
                           solve_pd_modified, solve_td_thomas)
from .conditioning import build_pd_shift, build_td_shift, pd_to_td
from .exact_solvers import exact_solve_pd, exact_solve_td
from .materials import MaterialModel, Polynomial
from .mesh import LayerSpec, RadialMesh, build_mesh
from .time_stepper import StepConfig, TemperatureField, run

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # gmpy2 is optional; Fraction is the fallback
    _mpq = None

NUMERICAL_SOLVERS = ("NPDM", "MNPDM", "NTDM")
EXACT_SOLVERS = ("SPDM", "STDM")
PD_PATH = ("NPDM", "MNPDM", "SPDM")

#: Default problem sizes, mirroring the published experiment tiers.
DEFAULT_N_TIERS = (10**3, 10**4, 10**5)

#: Sizes above this need allow_huge=True (five diagonals at 1e8 nodes are
#: several GB of memory).
HUGE_N = 10**7

#: Reference complexity laws: (N slope, K slope, constant).
REFERENCE_LAWS = {"NPDM": (19, 0, -29), "MNPDM": (13, 7, -14), "NTDM": (9, 0, 2)}

#: Alternating-conductivity material pair used by the default benchmark.
#: Integer coefficients serve the float and the exact assembly paths alike.
DEFAULT_MATERIALS = {
    "a": MaterialModel(Polynomial((1,)), Polynomial((1,)), Polynomial((1,))),
    "b": MaterialModel(Polynomial((1,)), Polynomial((1,)), Polynomial((3,))),
}


class ScenarioError(ValueError):
    """Invalid benchmark scenario."""


@dataclass(frozen=True)
class BenchScenario:
    """One benchmark campaign: sizes, contact count, solvers, repetitions.

    Exact solvers are only scheduled for n <= exact_cap (their cost grows
    superlinearly); larger sizes produce a skipped row instead.  Sizes above
    HUGE_N additionally require allow_huge.
    """

    n_values: tuple[int, ...] = DEFAULT_N_TIERS
    k: int = 11
    solvers: tuple[str, ...] = SOLVER_IDS
    repetitions: int = 5
    seed: int = 0
    exact_cap: int = 2 * 10**4
    allow_huge: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        for s in self.solvers:
            if s not in SOLVER_IDS:
                raise ScenarioError(f"unknown solver {s!r}")
        if self.repetitions < 1:
            raise ScenarioError("repetitions must be >= 1")
        if self.k < 0:
            raise ScenarioError("k must be >= 0")
        for n in self.n_values:
            if n - 1 < 4 * (self.k + 1):
                raise ScenarioError(
                    f"n={n} too small for k={self.k} (needs >= 4 cells/layer)")
            if n > HUGE_N and not self.allow_huge:
                raise ScenarioError(
                    f"n={n} exceeds {HUGE_N}; pass allow_huge (several GB of "
                    f"memory) to schedule it")


@dataclass
class BenchRow:
    """One (N, solver) cell of the result table."""

    n: int
    solver: str
    wall_s: float
    op_count: int | None
    err_inf: object
    path: str
    note: str = ""


# ---------------------------------------------------------------------------
# benchmark system construction
# ---------------------------------------------------------------------------

def default_layers(n: int, k: int, exact: bool = False) -> list[LayerSpec]:
    """K+1 equal-width layers on [1, 2] with alternating materials, cells
    distributed so the mesh has exactly n nodes."""
    segments = k + 1
    total_cells = n - 1
    base, rem = divmod(total_cells, segments)
    if base < 4:
        raise ScenarioError(f"n={n} gives fewer than 4 cells per layer at k={k}")
    layers = []
    for j in range(segments):
        r0 = 1 + Fraction(j, segments)
        r1 = 1 + Fraction(j + 1, segments)
        if not exact:
            r0, r1 = float(r0), float(r1)
        layers.append(LayerSpec(
            r_start=r0, r_end=r1,
            material_id="a" if j % 2 == 0 else "b",
            cells=base + (1 if j < rem else 0),
        ))
    return layers


def constructed_profile(mesh: RadialMesh, seed: int) -> np.ndarray:
    """Seeded smooth quadratic profile y_bar over the mesh, values near 1."""
    rng = np.random.default_rng(seed)
    c1 = Fraction(int(rng.integers(1, 8)), 16)
    c2 = Fraction(int(rng.integers(1, 8)), 16)
    r_min = mesh.r_min
    if not mesh.is_exact:
        c1, c2 = float(c1), float(c2)
    values = []
    for r in mesh.nodes.tolist():
        s = r - r_min
        values.append(1 + c1 * s + c2 * s * s)
    if mesh.is_exact:
        return np.array(values, dtype=object)
    return np.asarray(values, dtype=np.float64)


def _bench_tau(mesh: RadialMesh):
    """Stiff implicit step: tau = h_min^2 / 100 keeps the shifted systems
    extremely well conditioned, reproducing near-machine accuracy."""
    h_min = min(mesh.steps.tolist())
    return h_min * h_min / 100 if not mesh.is_exact else h_min * h_min * Fraction(1, 100)


def _to_mpq_system(system: LinearSystem) -> LinearSystem:
    if _mpq is None:
        return system
    def conv(arr):
        return np.array([_mpq(v) for v in arr.tolist()], dtype=object)
    m = system.matrix
    if isinstance(m, PentaMatrix):
        matrix = PentaMatrix(conv(m.d2m), conv(m.d1m), conv(m.d0),
                             conv(m.d1p), conv(m.d2p), m.full_rows)
    else:
        matrix = TriMatrix(conv(m.sub), conv(m.diag), conv(m.sup), m.contact_rows)
    return LinearSystem(matrix, conv(system.rhs))


@dataclass(eq=False)
class BenchCase:
    """Shifted systems for one (n, k): a pentadiagonal and a tridiagonal
    route sharing the constructed solution y_bar."""

    pd_system: LinearSystem
    td_system: LinearSystem
    y_bar: np.ndarray
    mesh: RadialMesh


def build_bench_case(n: int, k: int, seed: int, exact: bool = False,
                     use_mpq: bool = True) -> BenchCase:
    mesh = build_mesh(default_layers(n, k, exact))
    y_bar = constructed_profile(mesh, seed)
    tau = _bench_tau(mesh)
    y_list = y_bar.tolist()
    system = assemble_system(mesh, DEFAULT_MATERIALS, y_list, y_list, tau)

    pd_shift = build_pd_shift(
        mesh, contact_conductivities(mesh, DEFAULT_MATERIALS, y_list))
    shifted_pd = pd_shift.apply(system.matrix)
    pd_system = LinearSystem(shifted_pd, shifted_pd.matvec(y_bar))

    reduced = pd_to_td(system)
    td_shift = build_td_shift(reduced.matrix)
    shifted_td = td_shift.apply(reduced.matrix)
    td_system = LinearSystem(shifted_td, shifted_td.matvec(y_bar))

    if exact and use_mpq and _mpq is not None:
        pd_system = _to_mpq_system(pd_system)
        td_system = _to_mpq_system(td_system)
        y_bar = np.array([_mpq(v) for v in y_bar.tolist()], dtype=object)
    return BenchCase(pd_system, td_system, y_bar, mesh)


# ---------------------------------------------------------------------------
# random banded systems (shared with the test suite)
# ---------------------------------------------------------------------------

def spread_contacts(n: int, k: int) -> tuple[int, ...]:
    """k contact row indices in [2, n-3], pairwise distance >= 2."""
    if k == 0:
        return ()
    last = n - 3
    if k > (last - 2) // 2 + 1:
        raise ValueError(f"cannot place {k} contacts in [2, {last}]")
    step = max(2, (last - 2) // k)
    contacts = tuple(2 + j * step for j in range(k))
    if contacts[-1] > last:
        raise ValueError(f"cannot place {k} contacts in [2, {last}]")
    return contacts


def make_random_system(n: int, k: int, rng, exact: bool = False,
                       kind: str = "pd") -> LinearSystem:
    """Seeded random weakly (in fact strictly) diagonally dominant system.

    kind="pd": pentadiagonal with full rows {0, n-1} plus k contact rows;
    kind="td": plain dominant tridiagonal.  Off-diagonal magnitudes stay in
    [0.2, 1] so band-elimination multipliers remain tame; exact=True draws
    small nonzero integers instead.
    """

    def draw(size):
        if exact:
            mags = rng.integers(1, 9, size)
            signs = rng.choice((-1, 1), size)
            return [Fraction(int(m * s)) for m, s in zip(mags, signs)]
        mags = rng.uniform(0.2, 1.0, size)
        signs = rng.choice((-1.0, 1.0), size)
        return list(mags * signs)

    def margin(size):
        if exact:
            return [Fraction(int(v)) for v in rng.integers(1, 5, size)]
        return list(rng.uniform(0.1, 1.0, size))

    if kind == "td":
        sub = [0] * n
        sup = [0] * n
        vals_sub = draw(n - 1)
        vals_sup = draw(n - 1)
        for i in range(1, n):
            sub[i] = vals_sub[i - 1]
        for i in range(n - 1):
            sup[i] = vals_sup[i]
        diag = [abs(sub[i]) + abs(sup[i]) + m for i, m in enumerate(margin(n))]
        rhs = draw(n)
        arr = (lambda v: np.array(v, dtype=object) if exact
               else np.asarray(v, dtype=np.float64))
        return LinearSystem(TriMatrix(arr(sub), arr(diag), arr(sup)), arr(rhs))

    contacts = spread_contacts(n, k)
    full_rows = (0, *contacts, n - 1)
    d2m = [0] * n
    d1m = [0] * n
    d1p = [0] * n
    d2p = [0] * n
    vals_sub = draw(n - 1)
    vals_sup = draw(n - 1)
    for i in range(1, n):
        d1m[i] = vals_sub[i - 1]
    for i in range(n - 1):
        d1p[i] = vals_sup[i]
    outer = draw(2 + 2 * len(contacts))
    d2p[0] = outer[0]
    d2m[n - 1] = outer[1]
    for j, i_star in enumerate(contacts):
        d2m[i_star] = outer[2 + 2 * j]
        d2p[i_star] = outer[3 + 2 * j]
    diag = [
        abs(d2m[i]) + abs(d1m[i]) + abs(d1p[i]) + abs(d2p[i]) + m
        for i, m in enumerate(margin(n))
    ]
    rhs = draw(n)
    arr = (lambda v: np.array(v, dtype=object) if exact
           else np.asarray(v, dtype=np.float64))
    matrix = PentaMatrix(arr(d2m), arr(d1m), arr(diag), arr(d1p), arr(d2p),
                         full_rows)
    return LinearSystem(matrix, arr(rhs))


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

_NUMERICAL_FN = {
    "NPDM": solve_pd_lu,
    "MNPDM": solve_pd_modified,
    "NTDM": solve_td_thomas,
}
_EXACT_FN = {"SPDM": exact_solve_pd, "STDM": exact_solve_td}


def _err_inf(x, y):
    diff = np.asarray(x) - np.asarray(y)
    if diff.dtype == object:
        return max(abs(v) for v in diff.tolist())
    return float(np.max(np.abs(diff)))


def bench(scenario: BenchScenario) -> list[BenchRow]:
    """Run the benchmark campaign; one row per (N, solver).

    Solver breakdowns are recorded in the row's note, not raised.  Rows are
    deterministic for a fixed seed except for the wall-clock column.
    """
    rows = []
    need_exact = any(s in EXACT_SOLVERS for s in scenario.solvers)
    for n in scenario.n_values:
        float_case = build_bench_case(n, scenario.k, scenario.seed, exact=False)
        exact_case = None
        if need_exact and n <= scenario.exact_cap:
            exact_case = build_bench_case(n, scenario.k, scenario.seed, exact=True)
        for solver in scenario.solvers:
            path = "pd-shift" if solver in PD_PATH else "td-shift"
            if solver in EXACT_SOLVERS:
                if exact_case is None:
                    rows.append(BenchRow(n, solver, float("nan"), None,
                                         float("nan"), path,
                                         f"skipped: n > exact cap {scenario.exact_cap}"))
                    continue
                system = (exact_case.pd_system if solver == "SPDM"
                          else exact_case.td_system)
                fn = _EXACT_FN[solver]
                walls = []
                x = None
                for _ in range(scenario.repetitions + 1):
                    t0 = perf_counter()
                    x = fn(system)
                    walls.append(perf_counter() - t0)
                err = _err_inf(x, exact_case.y_bar)
                rows.append(BenchRow(n, solver, median(walls[1:]), None, err, path))
            else:
                system = (float_case.pd_system if solver in PD_PATH
                          else float_case.td_system)
                fn = _NUMERICAL_FN[solver]
                try:
                    reports = [fn(system) for _ in range(scenario.repetitions + 1)]
                except BreakdownError as exc:
                    rows.append(BenchRow(n, solver, float("nan"), None,
                                         float("nan"), path,
                                         f"breakdown at row {exc.row}"))
                    continue
                walls = [r.wall_time for r in reports[1:]]
                err = _err_inf(reports[-1].solution, float_case.y_bar)
                rows.append(BenchRow(n, solver, median(walls), reports[-1].op_count,
                                     err, path))
    return rows


# ---------------------------------------------------------------------------
# operation-count verification
# ---------------------------------------------------------------------------

@dataclass
class OpCountCheck:
    solver: str
    quantity: str
    expected: object
    measured: object
    passed: bool


@dataclass
class OpCountReport:
    checks: list[OpCountCheck]
    constants: dict  # solver -> (measured constant, reference constant)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "ok  " if c.passed else "FAIL"
            out.append(f"{status} {c.solver:6s} {c.quantity}: expected "
                       f"{c.expected}, measured {c.measured}")
        for solver, (measured, reference) in self.constants.items():
            out.append(f"note {solver}: measured constant {measured:+d} "
                       f"(reference law constant {reference:+d}; slopes are "
                       f"the pass condition)")
        return out


def verify_op_counts(n_values=(1000, 2000, 4000), k_values=(0, 5, 12),
                     seed: int = 0) -> OpCountReport:
    """Check that counted operations follow the reference N and K slopes.

    NPDM must gain exactly 19 operations per node (and be K-independent),
    MNPDM 13 per node plus 7 per contact row, NTDM 9 per node.  Measured
    affine constants are reported for comparison against the reference laws.
    """
    rng = np.random.default_rng(seed)
    n_values = tuple(sorted(n_values))
    k_values = tuple(sorted(k_values))
    k_fix = k_values[-1]
    checks = []

    counts_pd = {}
    for n in n_values:
        sys_pd = make_random_system(n, k_fix, rng)
        counts_pd[n] = {
            "NPDM": solve_pd_lu(sys_pd).op_count,
            "MNPDM": solve_pd_modified(sys_pd).op_count,
        }
    counts_td = {n: solve_td_thomas(make_random_system(n, 0, rng, kind="td")).op_count
                 for n in n_values}

    for solver, slope in (("NPDM", 19), ("MNPDM", 13)):
        for n1, n2 in zip(n_values, n_values[1:]):
            measured = (counts_pd[n2][solver] - counts_pd[n1][solver]) / (n2 - n1)
            checks.append(OpCountCheck(
                solver, f"N-slope over ({n1},{n2}) at K={k_fix}",
                slope, measured, measured == slope))
    for n1, n2 in zip(n_values, n_values[1:]):
        measured = (counts_td[n2] - counts_td[n1]) / (n2 - n1)
        checks.append(OpCountCheck("NTDM", f"N-slope over ({n1},{n2})",
                                   9, measured, measured == 9))

    n_fix = n_values[-1]
    by_k = {k: {s: fn(make_random_system(n_fix, k, rng)).op_count
                for s, fn in (("NPDM", solve_pd_lu), ("MNPDM", solve_pd_modified))}
            for k in k_values}
    for k1, k2 in zip(k_values, k_values[1:]):
        measured = by_k[k2]["MNPDM"] - by_k[k1]["MNPDM"]
        expected = 7 * (k2 - k1)
        checks.append(OpCountCheck(
            "MNPDM", f"K-step over ({k1},{k2}) at N={n_fix}",
            expected, measured, measured == expected))
        same = by_k[k2]["NPDM"] == by_k[k1]["NPDM"]
        checks.append(OpCountCheck(
            "NPDM", f"K-independence over ({k1},{k2}) at N={n_fix}",
            0, by_k[k2]["NPDM"] - by_k[k1]["NPDM"], same))

    constants = {
        "NPDM": (counts_pd[n_fix]["NPDM"] - 19 * n_fix, REFERENCE_LAWS["NPDM"][2]),
        "MNPDM": (counts_pd[n_fix]["MNPDM"] - 13 * n_fix - 7 * k_fix,
                  REFERENCE_LAWS["MNPDM"][2]),
        "NTDM": (counts_td[n_fix] - 9 * n_fix, REFERENCE_LAWS["NTDM"][2]),
    }
    return OpCountReport(checks, constants)


# ---------------------------------------------------------------------------
# manufactured-solution convergence study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form reference solution u(r, t) and the matching volumetric
    source obtained by substituting u into the governing balance."""

    u: object          # callable (r, t) -> temperature
    source: object     # callable (r, t) -> source density
    description: str = ""


def manufactured_single_layer(lam=2.0, rho_c=1.0, r_min=1.0, r_max=2.0,
                              rate=3.0, u0=1.0):
    """Single-layer case: u = u0 + rate*t*(r-A)^2*(B-r)^2.

    The radial derivative vanishes at both walls, so the homogeneous
    Neumann rows are satisfied exactly; u is linear in time, so backward
    differencing is exact and the measured error is purely spatial.
    Returns (layers, materials, ManufacturedSolution); scale the layer cell
    counts for refinement.
    """
    A, B = r_min, r_max

    def g(r):
        return (r - A) ** 2 * (B - r) ** 2

    def gp(r):
        return 2 * (r - A) * (B - r) ** 2 - 2 * (r - A) ** 2 * (B - r)

    def gpp(r):
        return 2 * (B - r) ** 2 - 8 * (r - A) * (B - r) + 2 * (r - A) ** 2

    def u(r, t):
        return u0 + rate * t * g(r)

    def source(r, t):
        return rho_c * rate * g(r) - lam * rate * t * (gpp(r) + gp(r) / r)

    layers = [LayerSpec(A, B, "m", 8)]
    materials = {"m": MaterialModel(Polynomial((rho_c,)), Polynomial((1,)),
                                    Polynomial((lam,)))}
    return layers, materials, ManufacturedSolution(
        u, source, "single layer, constant conductivity, quartic profile")


def manufactured_two_layer(lam1=1.0, lam2=4.0, rho_c1=1.0, rho_c2=2.0,
                           r_min=1.0, r_mid=1.5, r_max=2.0, slope=2.0, u0=1.0):
    """Two-layer case with a nonzero interface flux.

    Per-layer cubic profiles u = u0 + t*q_m(r) with q1'(A) = 0, q2'(B) = 0,
    continuous temperature at the interface and lam1*q1' = lam2*q2' there,
    so the ideal-contact rows are consistent.  Returns (layers, materials,
    ManufacturedSolution).
    """
    A, M, B = r_min, r_mid, r_max
    s1 = slope
    s2 = lam1 * s1 / lam2

    def q1(r):
        return s1 * (r - A) ** 3 / (3 * (M - A) ** 2)

    def q2(r):
        return (q1(M) + s2 * (B - M) / 3
                - s2 * (B - r) ** 3 / (3 * (B - M) ** 2))

    def u(r, t):
        return u0 + t * (q1(r) if r <= M else q2(r))

    def source(r, t):
        if r <= M:
            lap = s1 * (r - A) * (3 * r - A) / (r * (M - A) ** 2)
            return rho_c1 * q1(r) - lam1 * t * lap
        lap = s2 * (B - r) * (B - 3 * r) / (r * (B - M) ** 2)
        return rho_c2 * q2(r) - lam2 * t * lap

    layers = [LayerSpec(A, M, "left", 8), LayerSpec(M, B, "right", 8)]
    materials = {
        "left": MaterialModel(Polynomial((rho_c1,)), Polynomial((1,)),
                              Polynomial((lam1,))),
        "right": MaterialModel(Polynomial((rho_c2,)), Polynomial((1,)),
                               Polynomial((lam2,))),
    }
    return layers, materials, ManufacturedSolution(
        u, source, "two layers, conductivity jump, nonzero interface flux")


def _jittered_mesh(layers, factor: int, seed: int) -> RadialMesh:
    """Uniform per-layer mesh with interior nodes jittered by up to 40% of
    the local step (interfaces stay put): breaks the piecewise-constant-step
    premise of the second-order claim."""
    base = build_mesh([
        LayerSpec(l.r_start, l.r_end, l.material_id, l.cells * factor)
        for l in layers
    ])
    rng = np.random.default_rng(seed + 1000 * factor)
    nodes = [float(v) for v in base.nodes.tolist()]
    fixed = {0, base.n - 1, *base.contact_indices}
    for i in range(1, base.n - 1):
        if i in fixed:
            continue
        h_local = min(nodes[i] - nodes[i - 1], nodes[i + 1] - nodes[i])
        nodes[i] += float(rng.uniform(-0.4, 0.4)) * h_local
    return RadialMesh.from_nodes(nodes, base.contact_indices,
                                 base.cell_materials)


@dataclass
class ConvergenceReport:
    """Errors and order estimates from one refinement sequence."""

    description: str
    h_values: list[float]
    errors: list[float]
    pair_orders: list[float]
    observed_order: float | None
    monotone: bool

    @property
    def inconclusive(self) -> bool:
        return not self.monotone or self.observed_order is None

    def lines(self) -> list[str]:
        out = [f"convergence study: {self.description}"]
        for i, (h, e) in enumerate(zip(self.h_values, self.errors)):
            order = f"  p={self.pair_orders[i - 1]:.3f}" if i else ""
            out.append(f"  h={h:.6e}  err={e:.6e}{order}")
        if self.observed_order is None:
            out.append("  observed order: inconclusive (non-monotone errors)")
        else:
            tag = " (non-monotone; estimate unreliable)" if not self.monotone else ""
            out.append(f"  observed order: {self.observed_order:.3f}{tag}")
        return out


def convergence_study(layers, materials, solution: ManufacturedSolution,
                      cells_factors=(1, 2, 4, 8), t_final: float = 0.5,
                      steps_base: int = 4, solver_id: str = "NTDM",
                      shift_mode: str = "none", randomize_steps: bool = False,
                      seed: int = 0) -> ConvergenceReport:
    """Refine the mesh by cells_factors, step to t_final with tau ~ h^2 and
    report the observed spatial order against the manufactured solution.

    randomize_steps=True replaces each refined mesh by a jittered-step
    variant (layer interfaces kept), the control for the
    piecewise-constant-step requirement of second-order accuracy.  A
    non-monotone error sequence yields an inconclusive report, not an error.
    """
    h_values = []
    errors = []
    for factor in cells_factors:
        if randomize_steps:
            mesh = _jittered_mesh(layers, factor, seed)
        else:
            mesh = build_mesh([
                LayerSpec(l.r_start, l.r_end, l.material_id, l.cells * factor)
                for l in layers
            ])
        steps = steps_base * factor * factor
        tau = t_final / steps
        cfg = StepConfig(tau=tau, solver_id=solver_id, shift_mode=shift_mode)
        radii = [float(r) for r in mesh.nodes.tolist()]
        u0 = TemperatureField(
            np.asarray([solution.u(r, 0.0) for r in radii], dtype=np.float64), 0.0)
        trajectory = run(mesh, materials, u0, cfg, steps, source=solution.source)
        final = trajectory[-1]
        reference = np.asarray([solution.u(r, final.time) for r in radii],
                               dtype=np.float64)
        errors.append(float(np.max(np.abs(final.values - reference))))
        h_values.append(float(max(mesh.steps.tolist())))

    pair_orders = []
    for (h1, e1), (h2, e2) in zip(zip(h_values, errors), zip(h_values[1:], errors[1:])):
        if e1 > 0 and e2 > 0 and h1 != h2:
            pair_orders.append(math.log(e1 / e2) / math.log(h1 / h2))
        else:
            pair_orders.append(float("nan"))
    monotone = all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))
    observed = None
    if all(e > 0 for e in errors):
        logs_h = [math.log(h) for h in h_values]
        logs_e = [math.log(e) for e in errors]
        mean_h = sum(logs_h) / len(logs_h)
        mean_e = sum(logs_e) / len(logs_e)
        denom = sum((lh - mean_h) ** 2 for lh in logs_h)
        if denom > 0:
            observed = sum((lh - mean_h) * (le - mean_e)
                           for lh, le in zip(logs_h, logs_e)) / denom
    tag = " [randomized steps]" if randomize_steps else ""
    return ConvergenceReport(solution.description + tag, h_values, errors,
                             pair_orders, observed, monotone)


# ---------------------------------------------------------------------------
# result emission
# ---------------------------------------------------------------------------

def _fmt_err(err) -> str:
    if err is None:
        return ""
    if isinstance(err, float):
        return repr(err)
    return str(err)  # exact scalars print exactly ("0")


def emit(results: list[BenchRow], path=None, metadata: dict | None = None,
         stream=None) -> None:
    """Write results as CSV (columns N,solver,wall_s,op_count,err_inf) and
    print an aligned table; optional metadata goes to <path>.meta.json.

    Reruns with the same seed produce identical files except for the
    wall-clock column.
    """
    if not results:
        raise ValueError("emit needs a nonempty result list")
    stream = stream or sys.stdout

    header = ("N", "solver", "path", "wall_s", "op_count", "err_inf", "note")
    table = [header]
    for row in results:
        table.append((str(row.n), row.solver, row.path, f"{row.wall_s:.6f}",
                      "" if row.op_count is None else str(row.op_count),
                      _fmt_err(row.err_inf), row.note))
    widths = [max(len(r[j]) for r in table) for j in range(len(header))]
    for r in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip(),
              file=stream)

    if path is not None:
        path = Path(path)
        lines = ["N,solver,wall_s,op_count,err_inf"]
        for row in results:
            lines.append(",".join((
                str(row.n), row.solver, f"{row.wall_s:.6f}",
                "" if row.op_count is None else str(row.op_count),
                _fmt_err(row.err_inf),
            )))
        path.write_text("\n".join(lines) + "\n")
        if metadata is not None:
            meta = dict(metadata)
            meta.setdefault("host", platform.platform())
            Path(str(path) + ".meta.json").write_text(
                json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
