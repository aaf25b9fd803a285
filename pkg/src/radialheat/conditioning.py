"""Diagonal dominance shifts and the band-preserving PD -> TD reduction.

The assembled pentadiagonal matrix is weakly dominant in every interior row
but strictly deficient in rows 0, N-1 and the contact rows.  Two remedies
are provided:

* build_pd_shift: a diagonal matrix P with entries 2*h_1^2 and 2*h_{N-1}^2
  at the ends and, at each contact row,

      p = 2*lam_left*h_{i*} / (h_{i*-1} (h_{i*}+h_{i*-1}))
        + 2*lam_right*h_{i*+1} / (h_{i*+2} (h_{i*+1}+h_{i*+2})),

  each entry being exactly that row's dominance deficit, so A + P is weakly
  dominant everywhere.  The solved system becomes a fixed point:
  (A+P) u = rhs + P u.

* pd_to_td + build_td_shift: pivot-free local eliminations remove the four
  outer entries (row 1 clears row 0's, row N-2 clears row N-1's, rows
  i*-1 / i*+1 clear a contact row's), preserving both the band and the
  solution set; the tridiagonal result is then shifted by the magnitudes of
  its own off-diagonal entries at the same rows.  Any other row that comes
  out of the reduction non-dominant receives a make-up shift as well; such
  rows are recorded in ShiftDiag.extended_rows (none arise for assembled
  systems in exact arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import LinearSystem, PentaMatrix, TriMatrix
from .mesh import RadialMesh


class ReductionBreakdownError(RuntimeError):
    """A neighbor row's eliminating coefficient is zero, so the multiplier
    for the band-preserving elimination cannot be formed."""

    def __init__(self, row: int, message: str):
        super().__init__(message)
        self.row = row


@dataclass(eq=False)
class ShiftDiag:
    """Diagonal dominance shift and its right-hand-side feedback.

    entries is a length-N vector, nonzero at the designated rows ({0, N-1}
    and the contact rows) plus any extension rows; kind is "pd" or "td".
    The shifted solve is a fixed point: (A + P) u = rhs + P u, so feedback()
    supplies the P*u term.
    """

    entries: np.ndarray
    kind: str
    designated_rows: tuple[int, ...]
    extended_rows: tuple[int, ...] = ()

    def apply(self, matrix):
        """Return a copy of the matrix with the shift added to its diagonal.
        Off-diagonal entries are never touched."""
        shifted = matrix.copy()
        if isinstance(matrix, PentaMatrix):
            shifted.d0 = shifted.d0 + self.entries
        elif isinstance(matrix, TriMatrix):
            shifted.diag = shifted.diag + self.entries
        else:
            raise TypeError(f"cannot shift {type(matrix).__name__}")
        return shifted

    def feedback(self, u) -> np.ndarray:
        """P*u, the right-hand-side compensation for the current iterate."""
        return self.entries * np.asarray(u)


def build_pd_shift(mesh: RadialMesh, contact_lams) -> ShiftDiag:
    """Dominance shift for the assembled pentadiagonal system.

    contact_lams pairs up with mesh.contact_indices and holds the
    (lambda_left, lambda_right) conductivities at each contact temperature,
    i.e. the same values the contact rows were assembled with.
    """
    n = mesh.n
    steps = mesh.steps
    exact = mesh.is_exact
    entries = [0] * n
    entries[0] = 2 * steps[0] * steps[0]
    entries[n - 1] = 2 * steps[-1] * steps[-1]
    contact_lams = list(contact_lams)
    if len(contact_lams) != mesh.k:
        raise ValueError(
            f"need one conductivity pair per contact ({mesh.k}), "
            f"got {len(contact_lams)}"
        )
    for i_star, (lam_l, lam_r) in zip(mesh.contact_indices, contact_lams):
        h_im1 = steps[i_star - 2]
        h_i = steps[i_star - 1]
        h_ip1 = steps[i_star]
        h_ip2 = steps[i_star + 1]
        entries[i_star] = (
            2 * lam_l * h_i / (h_im1 * (h_i + h_im1))
            + 2 * lam_r * h_ip1 / (h_ip2 * (h_ip1 + h_ip2))
        )
    arr = np.array(entries, dtype=object) if exact else np.asarray(entries, dtype=np.float64)
    designated = tuple(sorted({0, n - 1} | set(mesh.contact_indices)))
    return ShiftDiag(arr, "pd", designated)


def pd_to_td(system: LinearSystem) -> LinearSystem:
    """Reduce a pentadiagonal system to a tridiagonal one, preserving the
    solution set exactly (in exact arithmetic).

    Each full row's outer entries are eliminated against the adjacent
    tridiagonal row that covers the offending column: row 1 serves row 0,
    row N-2 serves row N-1, and rows i*-1 / i*+1 serve a contact row.  Only
    the full rows themselves are modified.  Raises ReductionBreakdownError
    when an eliminating coefficient is zero.
    """
    matrix = system.matrix
    if not isinstance(matrix, PentaMatrix):
        raise TypeError("pd_to_td expects a pentadiagonal system")
    n = matrix.n
    sub = matrix.d1m.copy()
    diag = matrix.d0.copy()
    sup = matrix.d1p.copy()
    rhs = system.rhs.copy()

    for i in matrix.full_rows:
        if i == 0:
            if matrix.d2p[0] != 0:
                if sup[1] == 0:
                    raise ReductionBreakdownError(
                        0, "row 1 has a zero super-diagonal entry; cannot "
                           "eliminate the (0,2) entry of row 0")
                m = matrix.d2p[0] / sup[1]
                diag[0] = diag[0] - m * sub[1]
                sup[0] = sup[0] - m * diag[1]
                rhs[0] = rhs[0] - m * rhs[1]
        elif i == n - 1:
            if matrix.d2m[n - 1] != 0:
                if sub[n - 2] == 0:
                    raise ReductionBreakdownError(
                        n - 1, f"row {n - 2} has a zero sub-diagonal entry; "
                               f"cannot eliminate the ({n - 1},{n - 3}) entry")
                m = matrix.d2m[n - 1] / sub[n - 2]
                diag[n - 1] = diag[n - 1] - m * sup[n - 2]
                sub[n - 1] = sub[n - 1] - m * diag[n - 2]
                rhs[n - 1] = rhs[n - 1] - m * rhs[n - 2]
        else:
            if matrix.d2m[i] != 0:
                if sub[i - 1] == 0:
                    raise ReductionBreakdownError(
                        i, f"row {i - 1} has a zero sub-diagonal entry; "
                           f"cannot eliminate the ({i},{i - 2}) entry")
                m = matrix.d2m[i] / sub[i - 1]
                sub[i] = sub[i] - m * diag[i - 1]
                diag[i] = diag[i] - m * sup[i - 1]
                rhs[i] = rhs[i] - m * rhs[i - 1]
            if matrix.d2p[i] != 0:
                if sup[i + 1] == 0:
                    raise ReductionBreakdownError(
                        i, f"row {i + 1} has a zero super-diagonal entry; "
                           f"cannot eliminate the ({i},{i + 2}) entry")
                m = matrix.d2p[i] / sup[i + 1]
                diag[i] = diag[i] - m * sub[i + 1]
                sup[i] = sup[i] - m * diag[i + 1]
                rhs[i] = rhs[i] - m * rhs[i + 1]

    contact_rows = tuple(i for i in matrix.full_rows if 0 < i < n - 1)
    return LinearSystem(TriMatrix(sub, diag, sup, contact_rows), rhs)


def weakly_dominant_rows(matrix, rtol: float = 0.0) -> list[bool]:
    """Row-by-row weak diagonal dominance scan: |diag| >= sum |off-diag|.

    rtol loosens the comparison by rtol * (row magnitude) to absorb float
    rounding; exact (object) matrices are scanned exactly.
    """
    n = matrix.n
    flags = []
    if isinstance(matrix, PentaMatrix):
        bands = (matrix.d2m, matrix.d1m, matrix.d0, matrix.d1p, matrix.d2p)
    elif isinstance(matrix, TriMatrix):
        bands = (matrix.sub, matrix.diag, matrix.sup)
    else:
        raise TypeError(f"cannot scan {type(matrix).__name__}")
    mid = len(bands) // 2
    for i in range(n):
        diag = abs(bands[mid][i])
        off = sum(abs(band[i]) for j, band in enumerate(bands) if j != mid)
        slack = rtol * max(diag, off) if rtol else 0
        flags.append(diag + slack >= off)
    return flags


def is_weakly_dominant(matrix, rtol: float = 0.0) -> bool:
    return all(weakly_dominant_rows(matrix, rtol))


def build_td_shift(td: TriMatrix, rtol: float = 1e-13) -> ShiftDiag:
    """Dominance shift for a reduced tridiagonal matrix.

    Designated entries: |sup| of row 0, |sub| of row N-1 (the sole
    off-diagonal of each), and |sub| + |sup| at every contact row.  Any
    other row found non-dominant (within rtol, for float noise) gets the
    minimal make-up shift and is listed in extended_rows.
    """
    n = td.n
    exact = td.is_exact
    designated = tuple(sorted({0, n - 1} | set(td.contact_rows)))
    entries = [0] * n
    entries[0] = abs(td.sup[0])
    entries[n - 1] = abs(td.sub[n - 1])
    for i in td.contact_rows:
        entries[i] = abs(td.sub[i]) + abs(td.sup[i])

    extended = []
    designated_set = set(designated)
    for i in range(n):
        if i in designated_set:
            continue
        off = abs(td.sub[i]) + abs(td.sup[i]) if 0 < i < n - 1 else (
            abs(td.sup[0]) if i == 0 else abs(td.sub[n - 1]))
        diag = td.diag[i]
        deficit = off - diag
        slack = 0 if exact else rtol * max(abs(diag), off)
        if deficit > slack:
            entries[i] = deficit
            extended.append(i)

    arr = np.array(entries, dtype=object) if exact else np.asarray(entries, dtype=np.float64)
    return ShiftDiag(arr, "td", designated, tuple(extended))
