"""Pentadiagonal system assembly for one implicit time level.

Row types:

* interior nodes: three-point conduction stencil in implicit form, positive
  main diagonal, right-hand side rho*c*u_old/tau + phi;
* nodes 0 and N-1: second-order one-sided derivative stencils for the
  homogeneous Neumann conditions, assembled in cleared-denominator form
  (coefficients h2*(2*h1+h2), -(h1+h2)^2, h1^2 and mirrored), zero RHS;
* contact nodes: five-point flux-continuity stencil, the two one-sided
  derivative expressions each scaled by the adjacent layer's conductivity
  and by 1/(h*h*(h+h)) as written, zero RHS.

The sign of every boundary/contact row is chosen to make its main-diagonal
entry positive.  With that scaling the dominance deficit of row 0 is exactly
2*h_1^2, of row N-1 exactly 2*h_{N-1}^2 and of a contact row exactly the
shift entry produced by conditioning.build_pd_shift; interior rows are
already weakly dominant on their own.

Assembly is arithmetic-generic: exact meshes with exact temperatures and tau
produce object (Fraction) arrays, float meshes produce float64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .materials import CoefficientSample, MaterialModel, sample
from .mesh import RadialMesh


class StencilError(ValueError):
    """Row assembled with the wrong stencil for its node type."""


def _new_array(values, exact: bool) -> np.ndarray:
    if exact:
        return np.array(values, dtype=object)
    return np.asarray(values, dtype=np.float64)


def _zeros(n: int, exact: bool) -> np.ndarray:
    if exact:
        return np.array([0] * n, dtype=object)
    return np.zeros(n, dtype=np.float64)


@dataclass(eq=False)
class PentaMatrix:
    """Five diagonals of an N x N band matrix.

    d2m/d1m are the second/first sub-diagonals, d1p/d2p the super-diagonals;
    entry conventions: d1m[i] multiplies x[i-1], d2p[i] multiplies x[i+2],
    and so on.  Out-of-band slots are fixed at zero.  full_rows lists the
    rows allowed to hold nonzero outer diagonals; for assembled systems that
    is exactly {0, N-1} plus the contact rows.
    """

    d2m: np.ndarray
    d1m: np.ndarray
    d0: np.ndarray
    d1p: np.ndarray
    d2p: np.ndarray
    full_rows: tuple[int, ...] = ()

    def __post_init__(self):
        self.full_rows = tuple(int(i) for i in self.full_rows)

    @property
    def n(self) -> int:
        return len(self.d0)

    @property
    def is_exact(self) -> bool:
        return self.d0.dtype == object

    @classmethod
    def zeros(cls, n: int, exact: bool = False, full_rows=()) -> "PentaMatrix":
        return cls(
            _zeros(n, exact), _zeros(n, exact), _zeros(n, exact),
            _zeros(n, exact), _zeros(n, exact), tuple(full_rows),
        )

    def validate(self):
        n = self.n
        full = set(self.full_rows)
        for name, diag, lo in (("d2m", self.d2m, 2), ("d1m", self.d1m, 1)):
            for i in range(min(lo, n)):
                if diag[i] != 0:
                    raise ValueError(f"{name}[{i}] out of band but nonzero")
        for name, diag, hi in (("d1p", self.d1p, 1), ("d2p", self.d2p, 2)):
            for i in range(max(n - hi, 0), n):
                if diag[i] != 0:
                    raise ValueError(f"{name}[{i}] out of band but nonzero")
        for i in range(n):
            if (self.d2m[i] != 0 or self.d2p[i] != 0) and i not in full:
                raise ValueError(f"row {i} has outer entries but is not in full_rows")

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        out = self.d0 * x
        out[:-1] = out[:-1] + self.d1p[:-1] * x[1:]
        out[1:] = out[1:] + self.d1m[1:] * x[:-1]
        out[:-2] = out[:-2] + self.d2p[:-2] * x[2:]
        out[2:] = out[2:] + self.d2m[2:] * x[:-2]
        return out

    def to_dense(self) -> np.ndarray:
        n = self.n
        dense = _zeros(n * n, self.is_exact).reshape(n, n)
        idx = np.arange(n)
        dense[idx, idx] = self.d0
        dense[idx[1:], idx[:-1]] = self.d1m[1:]
        dense[idx[:-1], idx[1:]] = self.d1p[:-1]
        dense[idx[2:], idx[:-2]] = self.d2m[2:]
        dense[idx[:-2], idx[2:]] = self.d2p[:-2]
        return dense

    def copy(self) -> "PentaMatrix":
        return PentaMatrix(
            self.d2m.copy(), self.d1m.copy(), self.d0.copy(),
            self.d1p.copy(), self.d2p.copy(), self.full_rows,
        )


@dataclass(eq=False)
class TriMatrix:
    """Three diagonals of an N x N band matrix.

    contact_rows carries the interface-row indices through the band
    reduction so the tridiagonal dominance shift knows where to act.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    contact_rows: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def is_exact(self) -> bool:
        return self.diag.dtype == object

    @classmethod
    def zeros(cls, n: int, exact: bool = False, contact_rows=()) -> "TriMatrix":
        return cls(_zeros(n, exact), _zeros(n, exact), _zeros(n, exact),
                   tuple(contact_rows))

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        out = self.diag * x
        out[:-1] = out[:-1] + self.sup[:-1] * x[1:]
        out[1:] = out[1:] + self.sub[1:] * x[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        n = self.n
        dense = _zeros(n * n, self.is_exact).reshape(n, n)
        idx = np.arange(n)
        dense[idx, idx] = self.diag
        dense[idx[1:], idx[:-1]] = self.sub[1:]
        dense[idx[:-1], idx[1:]] = self.sup[:-1]
        return dense

    def copy(self) -> "TriMatrix":
        return TriMatrix(self.sub.copy(), self.diag.copy(), self.sup.copy(),
                         self.contact_rows)


@dataclass(eq=False)
class LinearSystem:
    """A band matrix paired with its right-hand side."""

    matrix: PentaMatrix | TriMatrix
    rhs: np.ndarray

    def __post_init__(self):
        self.rhs = np.asarray(self.rhs)
        if len(self.rhs) != self.matrix.n:
            raise ValueError(
                f"rhs length {len(self.rhs)} != matrix size {self.matrix.n}"
            )

    def residual(self, x) -> np.ndarray:
        return self.matrix.matvec(x) - self.rhs

    def copy(self) -> "LinearSystem":
        return LinearSystem(self.matrix.copy(), self.rhs.copy())


# ---------------------------------------------------------------------------
# row assembly
# ---------------------------------------------------------------------------

def assemble_interior_row(mesh: RadialMesh, coeff: CoefficientSample, i: int,
                          tau, u_old_i):
    """Implicit conduction row at interior node i.

    Returns (c_{i,i-1}, c_{i,i}, c_{i,i+1}, rhs_i) with the unknowns on the
    left and the main diagonal positive:

        c_{i,i-1} = -r_{i-1/2} lam_{i-1/2} / (r_i hbar_i h_i)
        c_{i,i+1} = -r_{i+1/2} lam_{i+1/2} / (r_i hbar_i h_{i+1})
        c_{i,i}   = rho*c/tau - c_{i,i-1} - c_{i,i+1}
        rhs_i     = rho*c*u_old_i/tau + phi_i
    """
    n = mesh.n
    if not 1 <= i <= n - 2 or i in mesh.contact_indices:
        raise StencilError(f"node {i} does not take the interior stencil")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    r_prev, r_i, r_next = mesh.nodes[i - 1], mesh.nodes[i], mesh.nodes[i + 1]
    h_lo = r_i - r_prev
    h_hi = r_next - r_i
    hbar = (h_lo + h_hi) / 2
    r_lo = (r_prev + r_i) / 2
    r_hi = (r_i + r_next) / 2
    c_lo = -(r_lo * coeff.lambda_minus) / (r_i * hbar * h_lo)
    c_hi = -(r_hi * coeff.lambda_plus) / (r_i * hbar * h_hi)
    diag = coeff.rho_c / tau - c_lo - c_hi
    rhs = coeff.rho_c * u_old_i / tau + coeff.phi
    return c_lo, diag, c_hi, rhs


def assemble_neumann_rows(mesh: RadialMesh):
    """One-sided second-order zero-derivative rows for both ends.

    Returns ((c00, c01, c02), (c_{N-1,N-3}, c_{N-1,N-2}, c_{N-1,N-1})); both
    right-hand sides are zero.  Rows are kept in cleared-denominator form, so
    with equal steps row 0 is (3, -4, 1) times h^2.  Coefficients of each row
    sum to zero (the derivative of a constant vanishes).
    """
    if mesh.n < 3:
        raise StencilError("Neumann stencils need at least 3 nodes")
    steps = mesh.steps
    h1, h2 = steps[0], steps[1]
    row_first = (h2 * (2 * h1 + h2), -((h1 + h2) * (h1 + h2)), h1 * h1)
    hn, hm = steps[-1], steps[-2]  # h_{N-1}, h_{N-2}
    row_last = (hn * hn, -((hn + hm) * (hn + hm)), hm * (2 * hn + hm))
    return row_first, row_last


def assemble_contact_row(mesh: RadialMesh, lam_left, lam_right, i_star: int):
    """Five-point flux-continuity row at contact node i_star.

    The left one-sided derivative (columns i*-2..i*) is scaled by the left
    layer's conductivity at the contact temperature, the right one-sided
    derivative (columns i*..i*+2) by the right layer's, and the two are
    summed so that a continuous flux gives zero.  Returns the 5 coefficients
    over columns i*-2..i*+2; the right-hand side is zero.
    """
    if i_star not in mesh.contact_indices:
        raise StencilError(f"node {i_star} is not a contact index")
    steps = mesh.steps
    h_im1 = steps[i_star - 2]  # h_{i*-1}
    h_i = steps[i_star - 1]    # h_{i*}
    h_ip1 = steps[i_star]      # h_{i*+1}
    h_ip2 = steps[i_star + 1]  # h_{i*+2}

    den_l = h_i * h_im1 * (h_i + h_im1)
    den_r = h_ip1 * h_ip2 * (h_ip1 + h_ip2)
    scale_l = lam_left / den_l
    scale_r = lam_right / den_r

    c_mm = scale_l * h_i * h_i
    c_m = -scale_l * (h_i + h_im1) * (h_i + h_im1)
    c_0 = (scale_l * h_im1 * (2 * h_i + h_im1)
           + scale_r * h_ip2 * (2 * h_ip1 + h_ip2))
    c_p = -scale_r * (h_ip1 + h_ip2) * (h_ip1 + h_ip2)
    c_pp = scale_r * h_ip1 * h_ip1
    return c_mm, c_m, c_0, c_p, c_pp


def contact_conductivities(mesh: RadialMesh,
                           materials: Mapping[str, MaterialModel],
                           u) -> list[tuple]:
    """(lambda_left, lambda_right) at each contact, evaluated at the shared
    contact temperature u[i*]."""
    pairs = []
    for i_star in mesh.contact_indices:
        left = materials[mesh.cell_materials[i_star - 1]]
        right = materials[mesh.cell_materials[i_star]]
        u_star = u[i_star]
        pairs.append((left.conductivity_at(u_star),
                      right.conductivity_at(u_star)))
    return pairs


def assemble_system(mesh: RadialMesh, materials: Mapping[str, MaterialModel],
                    u_guess, u_old, tau, extra_source=None) -> LinearSystem:
    """Assemble the full pentadiagonal system for one implicit level.

    Nonlinear coefficients are frozen at u_guess; u_old feeds the time term
    on the right-hand side.  extra_source, if given, is a length-N vector
    added to the interior right-hand sides (used for manufactured-solution
    studies; boundary and contact rows keep zero RHS).

    full_rows of the result is exactly {0, N-1} union the contact indices.
    """
    n = mesh.n
    exact = mesh.is_exact
    u_guess = list(u_guess)
    u_old = list(u_old)
    if len(u_guess) != n or len(u_old) != n:
        raise ValueError("temperature fields must have one value per node")
    if exact and (isinstance(tau, float) or any(isinstance(v, float) for v in u_guess)
                  or any(isinstance(v, float) for v in u_old)):
        raise TypeError("exact mesh requires exact (non-float) tau and fields")

    contacts = set(mesh.contact_indices)
    d2m = [0] * n
    d1m = [0] * n
    d0 = [0] * n
    d1p = [0] * n
    d2p = [0] * n
    rhs = [0] * n

    row_first, row_last = assemble_neumann_rows(mesh)
    d0[0], d1p[0], d2p[0] = row_first
    d2m[n - 1], d1m[n - 1], d0[n - 1] = row_last

    mats = mesh.cell_materials
    for i in range(1, n - 1):
        if i in contacts:
            continue
        model = materials[mats[i]]
        coeff = sample(model, u_guess[i], u_guess[i - 1], u_guess[i + 1])
        c_lo, diag, c_hi, b = assemble_interior_row(mesh, coeff, i, tau, u_old[i])
        d1m[i], d0[i], d1p[i] = c_lo, diag, c_hi
        rhs[i] = b if extra_source is None else b + extra_source[i]

    for (i_star, (lam_l, lam_r)) in zip(
        mesh.contact_indices, contact_conductivities(mesh, materials, u_guess)
    ):
        c_mm, c_m, c_0, c_p, c_pp = assemble_contact_row(mesh, lam_l, lam_r, i_star)
        d2m[i_star], d1m[i_star], d0[i_star] = c_mm, c_m, c_0
        d1p[i_star], d2p[i_star] = c_p, c_pp

    full_rows = tuple(sorted({0, n - 1} | contacts))
    matrix = PentaMatrix(
        _new_array(d2m, exact), _new_array(d1m, exact), _new_array(d0, exact),
        _new_array(d1p, exact), _new_array(d2p, exact), full_rows,
    )
    return LinearSystem(matrix, _new_array(rhs, exact))
