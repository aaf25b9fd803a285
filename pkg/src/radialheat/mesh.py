"""Uneven radial meshes for multilayer cylinders.

The mesh places a node on every layer interface.  Interface nodes ("contact
nodes") carry a five-point flux-continuity stencil, the two outermost nodes
carry three-point one-sided Neumann stencils, and every other node carries the
three-point conduction stencil.  All of those stencils read geometry straight
off the node array, so the mesh stores nodes as the single source of truth.

Meshes are value objects: immutable after construction and safe to share
between threads.

Exact meshes: if every radius in the layer specification is an int or a
Fraction (no floats anywhere), the node array is built in exact rational
arithmetic and downstream assembly can run entirely over Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

#: Fewest cells a single layer may contain.  Four cells keep the five-point
#: contact stencils and their eliminator rows clear of each other and of the
#: boundary stencils.
MIN_CELLS_PER_LAYER = 4

#: Smallest allowed index distance between two contact nodes (>= 3 interior
#: nodes strictly between them).
MIN_CONTACT_SEPARATION = 4


class MeshStructureError(ValueError):
    """Layer list is not a contiguous partition of the radial domain."""


class MeshDomainError(ValueError):
    """Domain violates r_min > 0 (the radial operator divides by r)."""


class MeshSpacingError(ValueError):
    """Contact nodes sit too close together for the interface stencils."""


def _is_float(value) -> bool:
    return isinstance(value, (float, np.floating))


def _as_exact(value):
    """Coerce ints to Fraction so later divisions stay exact."""
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return value


@dataclass(frozen=True)
class LayerSpec:
    """One radial layer: [r_start, r_end] subdivided into `cells` equal cells.

    Consecutive layers of a mesh must share their boundary radius exactly.
    """

    r_start: float | Fraction
    r_end: float | Fraction
    material_id: str
    cells: int

    def __post_init__(self):
        if not isinstance(self.cells, (int, np.integer)) or self.cells < 1:
            raise ValueError(f"cells must be a positive integer, got {self.cells!r}")
        if not self.r_start < self.r_end:
            raise MeshStructureError(
                f"layer {self.material_id!r}: need r_start < r_end, "
                f"got [{self.r_start}, {self.r_end}]"
            )

    @property
    def width(self):
        return self.r_end - self.r_start


@dataclass(frozen=True, eq=False)
class RadialMesh:
    """Radial node set with interface bookkeeping.

    nodes            strictly increasing radii r_0..r_{N-1}; dtype float64 or
                     object (Fractions) for exact meshes
    contact_indices  sorted interior node indices lying on layer interfaces
    cell_materials   material id of each cell [r_j, r_{j+1}], length N-1
    steps            steps[j] = nodes[j+1] - nodes[j]; derived from nodes at
                     construction so it can never drift
    """

    nodes: np.ndarray
    contact_indices: tuple[int, ...]
    cell_materials: tuple[str, ...]
    steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        n = nodes.shape[0]
        if n < 3:
            raise MeshStructureError(f"need at least 3 nodes, got {n}")
        if not nodes[0] > 0:
            raise MeshDomainError(f"r_min must be positive, got {nodes[0]}")
        steps = nodes[1:] - nodes[:-1]
        if not all(h > 0 for h in steps.tolist()):
            raise MeshStructureError("nodes must be strictly increasing")
        object.__setattr__(self, "steps", steps)

        contacts = tuple(int(i) for i in self.contact_indices)
        object.__setattr__(self, "contact_indices", contacts)
        if list(contacts) != sorted(set(contacts)):
            raise MeshStructureError("contact indices must be sorted and unique")
        for i_star in contacts:
            if not 2 <= i_star <= n - 3:
                raise MeshSpacingError(
                    f"contact index {i_star} too close to the boundary "
                    f"(need 2 <= i* <= {n - 3})"
                )
        for a, b in zip(contacts, contacts[1:]):
            if b - a < MIN_CONTACT_SEPARATION:
                raise MeshSpacingError(
                    f"contact indices {a} and {b} closer than "
                    f"{MIN_CONTACT_SEPARATION}: interface stencils overlap"
                )

        mats = tuple(self.cell_materials)
        object.__setattr__(self, "cell_materials", mats)
        if len(mats) != n - 1:
            raise MeshStructureError(
                f"cell_materials has length {len(mats)}, expected {n - 1}"
            )
        # Material may only change across a declared contact node.
        for j in range(1, n - 1):
            if mats[j] != mats[j - 1] and j not in contacts:
                raise MeshStructureError(
                    f"material changes at node {j} which is not a contact index"
                )

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        """Number of nodes N."""
        return self.nodes.shape[0]

    @property
    def k(self) -> int:
        """Number of contact (interface) nodes."""
        return len(self.contact_indices)

    @property
    def r_min(self):
        return self.nodes[0]

    @property
    def r_max(self):
        return self.nodes[-1]

    @property
    def is_exact(self) -> bool:
        """True when nodes are stored as exact rationals."""
        return self.nodes.dtype == object

    @property
    def uniform_steps_per_layer(self) -> bool:
        """True when the step is constant inside every layer.

        The conduction stencil is second-order accurate only in this regime;
        graded meshes are accepted but reported as first-order.
        """
        bounds = (0, *self.contact_indices, self.n - 1)
        steps = self.steps.tolist()
        for lo, hi in zip(bounds, bounds[1:]):
            region = steps[lo:hi]
            if self.is_exact:
                if any(h != region[0] for h in region):
                    return False
            else:
                hmax, hmin = max(region), min(region)
                if hmax - hmin > 1e-12 * hmax:
                    return False
        return True

    @classmethod
    def from_nodes(cls, nodes, contact_indices, cell_materials) -> "RadialMesh":
        """Build a mesh directly from a node list (graded meshes allowed)."""
        seq = list(nodes)
        if any(_is_float(x) for x in seq):
            arr = np.asarray(seq, dtype=np.float64)
        else:
            arr = np.array([_as_exact(x) for x in seq], dtype=object)
        return cls(arr, tuple(contact_indices), tuple(cell_materials))


def build_mesh(layers: Sequence[LayerSpec]) -> RadialMesh:
    """Subdivide each layer uniformly and join the pieces into one mesh.

    Every layer interface becomes a node and its index is recorded as a
    contact index.  Requires contiguous layers, >= MIN_CELLS_PER_LAYER cells
    per layer and at least 7 nodes overall.

    Raises MeshStructureError for non-contiguous layers, MeshDomainError for
    r_min <= 0 and MeshSpacingError when interface stencils would overlap.
    """
    if not layers:
        raise MeshStructureError("need at least one layer")
    for spec in layers:
        if spec.cells < MIN_CELLS_PER_LAYER:
            raise MeshSpacingError(
                f"layer {spec.material_id!r} has {spec.cells} cells; "
                f"need >= {MIN_CELLS_PER_LAYER} to separate the stencils"
            )
    for prev, cur in zip(layers, layers[1:]):
        if prev.r_end != cur.r_start:
            raise MeshStructureError(
                f"layers not contiguous: {prev.material_id!r} ends at "
                f"{prev.r_end}, {cur.material_id!r} starts at {cur.r_start}"
            )
    if not layers[0].r_start > 0:
        raise MeshDomainError(f"r_min must be positive, got {layers[0].r_start}")

    exact = not any(
        _is_float(v) for spec in layers for v in (spec.r_start, spec.r_end)
    )

    nodes = []
    contacts = []
    materials = []
    for spec in layers:
        r0 = _as_exact(spec.r_start) if exact else spec.r_start
        r1 = _as_exact(spec.r_end) if exact else spec.r_end
        h = (r1 - r0) / spec.cells
        # The layer's final node is supplied by the next layer's r_start (or
        # appended after the loop), so interfaces land exactly on r_end.
        nodes.extend(r0 + j * h for j in range(spec.cells))
        materials.extend([spec.material_id] * spec.cells)
        contacts.append(len(nodes))
    nodes.append(_as_exact(layers[-1].r_end) if exact else layers[-1].r_end)
    contacts.pop()  # last entry is the outer boundary, not a contact

    if len(nodes) < 7:
        raise MeshStructureError(f"need at least 7 nodes, got {len(nodes)}")

    arr = (
        np.array(nodes, dtype=object)
        if exact
        else np.asarray(nodes, dtype=np.float64)
    )
    return RadialMesh(arr, tuple(contacts), tuple(materials))


def geometry(mesh: RadialMesh, i: int):
    """Half-step average and cell midpoints at interior node i.

    Returns (hbar_i, r_{i-1/2}, r_{i+1/2}) where hbar_i is the mean of the
    two adjacent steps and r_{i+-1/2} are the midpoints of the adjacent
    cells.  Values are recomputed from the node array on every call.
    """
    n = mesh.n
    if not 1 <= i <= n - 2:
        raise IndexError(f"geometry needs an interior node, got i={i} of N={n}")
    r_prev, r_i, r_next = mesh.nodes[i - 1], mesh.nodes[i], mesh.nodes[i + 1]
    h_lo = r_i - r_prev
    h_hi = r_next - r_i
    return (h_lo + h_hi) / 2, (r_prev + r_i) / 2, (r_i + r_next) / 2
