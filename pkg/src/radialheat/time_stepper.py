"""Implicit time integration with fixed-point (Picard) iteration.

Each step solves the assembled system with coefficients frozen at the
current iterate.  When a dominance shift is active the solved system is the
shifted fixed-point form (A + P) u = rhs + P u, so even a linear problem
iterates; the converged limit is independent of the shift mode.  The shift
is rebuilt every iterate because the contact conductivities depend on the
iterate's contact temperatures.

Constant-coefficient problems (every material with constant rho, cv,
conductivity and temperature-independent source) make the system linear in
the unknowns; with shift_mode "none" a single solve is then exact and no
iteration is performed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .assembly import assemble_system
from .band_solvers import solve_pd_lu, solve_pd_modified, solve_td_thomas
from .conditioning import build_pd_shift, build_td_shift, pd_to_td
from .exact_solvers import exact_solve_pd, exact_solve_td
from .assembly import LinearSystem, contact_conductivities
from .materials import MaterialModel
from .mesh import RadialMesh

PD_SOLVERS = ("NPDM", "MNPDM", "SPDM")
TD_SOLVERS = ("NTDM", "STDM")
EXACT_SOLVERS = ("SPDM", "STDM")
SHIFT_MODES = ("none", "pd", "td")


class NonConvergenceError(RuntimeError):
    """Picard iteration hit its cap; carries the last iterate difference."""

    def __init__(self, last_diff, max_picard: int):
        super().__init__(
            f"no convergence within {max_picard} iterations "
            f"(last update {last_diff})")
        self.last_diff = last_diff


@dataclass(frozen=True)
class StepConfig:
    """Per-step solver configuration.

    shift_mode: "pd" dominantizes the pentadiagonal system, "td" reduces to
    tridiagonal first and dominantizes that, "none" solves the raw system.
    Pentadiagonal solvers pair with "pd"/"none", tridiagonal ones with
    "td"/"none".
    """

    tau: object
    picard_tol: float = 1e-12
    max_picard: int = 100
    solver_id: str = "NTDM"
    shift_mode: str = "td"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be positive")
        if self.max_picard < 1:
            raise ValueError("max_picard must be >= 1")
        if self.solver_id not in PD_SOLVERS + TD_SOLVERS:
            raise ValueError(f"unknown solver {self.solver_id!r}")
        if self.shift_mode not in SHIFT_MODES:
            raise ValueError(f"unknown shift mode {self.shift_mode!r}")
        if self.shift_mode == "pd" and self.solver_id in TD_SOLVERS:
            raise ValueError("tridiagonal solvers take shift_mode 'td' or 'none'")
        if self.shift_mode == "td" and self.solver_id in PD_SOLVERS:
            raise ValueError("pentadiagonal solvers take shift_mode 'pd' or 'none'")


@dataclass(eq=False)
class TemperatureField:
    """Nodal temperatures at one time level."""

    values: np.ndarray
    time: object = 0

    def __post_init__(self):
        self.values = np.asarray(self.values)

    def copy(self) -> "TemperatureField":
        return TemperatureField(self.values.copy(), self.time)


def _diff_inf(u_new, u_old) -> object:
    return max(abs(a - b) for a, b in zip(list(u_new), list(u_old)))


def _solve_once(system: LinearSystem, solver_id: str):
    if solver_id == "NPDM":
        return solve_pd_lu(system).solution
    if solver_id == "MNPDM":
        return solve_pd_modified(system).solution
    if solver_id == "NTDM":
        return solve_td_thomas(system).solution
    if solver_id == "SPDM":
        return np.array(exact_solve_pd(system), dtype=object)
    if solver_id == "STDM":
        return np.array(exact_solve_td(system), dtype=object)
    raise ValueError(f"unknown solver {solver_id!r}")


def _is_linear(materials: Mapping[str, MaterialModel]) -> bool:
    return all(m.constant_coefficients for m in materials.values())


def advance(mesh: RadialMesh, materials: Mapping[str, MaterialModel],
            u_old: TemperatureField, cfg: StepConfig,
            extra_source=None) -> tuple[TemperatureField, int]:
    """Advance one time step; returns the new field and the iteration count.

    Iterates u^(k+1) = solve(A_DD(u^k), rhs(u^k) + P u^k) from u^(0) = u_old
    until the sup-norm update drops below cfg.picard_tol.  extra_source is a
    length-N vector added to the interior right-hand sides (evaluate any
    space/time source at the new time level before calling).
    """
    u_prev = u_old.values
    u_iter = u_prev
    linear = _is_linear(materials)

    for k in range(1, cfg.max_picard + 1):
        system = assemble_system(mesh, materials, u_iter, u_prev, cfg.tau,
                                 extra_source=extra_source)
        if cfg.shift_mode == "none":
            if cfg.solver_id in TD_SOLVERS:
                system = pd_to_td(system)
            u_next = _solve_once(system, cfg.solver_id)
        elif cfg.shift_mode == "pd":
            shift = build_pd_shift(
                mesh, contact_conductivities(mesh, materials, u_iter))
            shifted = LinearSystem(shift.apply(system.matrix),
                                   system.rhs + shift.feedback(u_iter))
            u_next = _solve_once(shifted, cfg.solver_id)
        else:  # "td"
            reduced = pd_to_td(system)
            shift = build_td_shift(reduced.matrix)
            shifted = LinearSystem(shift.apply(reduced.matrix),
                                   reduced.rhs + shift.feedback(u_iter))
            u_next = _solve_once(shifted, cfg.solver_id)

        if linear and cfg.shift_mode == "none":
            # system and RHS do not depend on the iterate: one solve is exact
            return TemperatureField(u_next, u_old.time + cfg.tau), k
        diff = _diff_inf(u_next, u_iter)
        u_iter = u_next
        if diff < cfg.picard_tol:
            return TemperatureField(u_next, u_old.time + cfg.tau), k

    raise NonConvergenceError(diff, cfg.max_picard)


def run(mesh: RadialMesh, materials: Mapping[str, MaterialModel],
        u0: TemperatureField, cfg: StepConfig, steps: int,
        source=None, record_every: int = 1) -> list[TemperatureField]:
    """Advance `steps` time steps, recording every record_every-th field.

    source, if given, is a callable source(r, t) evaluated per node at each
    step's new time level.  The returned trajectory starts with u0 and
    always includes the final field.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    trajectory = [u0]
    field_now = u0
    radii = mesh.nodes.tolist()
    for step in range(1, steps + 1):
        extra = None
        if source is not None:
            t_new = field_now.time + cfg.tau
            extra = [source(r, t_new) for r in radii]
        field_now, _ = advance(mesh, materials, field_now, cfg,
                               extra_source=extra)
        if step % record_every == 0 or step == steps:
            trajectory.append(field_now)
    return trajectory
