"""Uniform square mesh and bilinear Lagrange hat functions on (0, D)^2."""

from dataclasses import dataclass

import numpy as np


def node_index(m1, m2, m):
    """Flatten lattice coordinates (m1, m2) of an m-by-m grid to one index.

    Uses the row-major bijection j = m1 + m2 * m onto {0, ..., m**2 - 1}.
    """
    if not (0 <= m1 < m and 0 <= m2 < m):
        raise IndexError(f"lattice coordinates ({m1}, {m2}) outside [0, {m})^2")
    return m1 + m2 * m


def node_coords(j, m):
    """Invert :func:`node_index`: flat index j -> lattice coordinates (m1, m2)."""
    if not (0 <= j < m * m):
        raise IndexError(f"flat index {j} outside [0, {m * m})")
    return j % m, j // m


@dataclass(frozen=True)
class Mesh:
    """Uniform lattice on the closed square [0, D]^2 with Dirichlet DOFs.

    There are ``n`` nodes per side including the boundary, so the spacing is
    ``h = D / (n - 1)``.  Only the ``m = n - 2`` interior nodes per side carry
    degrees of freedom (homogeneous Dirichlet boundary conditions eliminate
    the boundary nodes); interior node (m1, m2) sits at ((m1+1)h, (m2+1)h).
    """

    side_length: float
    nodes_per_side: int

    def __post_init__(self):
        if self.side_length <= 0:
            raise ValueError("side_length must be positive")
        if self.nodes_per_side < 3:
            raise ValueError("need at least 3 nodes per side (one interior node)")

    @property
    def h(self):
        return self.side_length / (self.nodes_per_side - 1)

    @property
    def m(self):
        """Interior nodes per side."""
        return self.nodes_per_side - 2

    @property
    def num_dofs(self):
        return self.m * self.m

    def interior_points(self):
        """Coordinates of the interior nodes, flat-index order, shape (N_h, 2)."""
        g = (np.arange(self.m) + 1.0) * self.h
        xx, yy = np.meshgrid(g, g, indexing="xy")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def interior_grid(self):
        """1D coordinate array of the interior lattice lines."""
        return (np.arange(self.m) + 1.0) * self.h

    def node_position(self, j):
        m1, m2 = node_coords(j, self.m)
        return (m1 + 1) * self.h, (m2 + 1) * self.h


def reference_shape(x, y, h):
    """Reference hat on its support [0, 2h]^2, four bilinear pieces.

    Value 1 at the centre vertex (h, h), zero on and outside the support
    boundary; continuous across the sub-squares.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fx = np.clip(1.0 - np.abs(x / h - 1.0), 0.0, None)
    fy = np.clip(1.0 - np.abs(y / h - 1.0), 0.0, None)
    out = fx * fy
    out = np.where((x < 0) | (x > 2 * h) | (y < 0) | (y > 2 * h), 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def basis_eval(j, x, y, mesh):
    """Evaluate the j-th interior hat function at (x, y); 0 outside its support."""
    xj, yj = mesh.node_position(j)
    h = mesh.h
    return reference_shape(
        np.asarray(x, dtype=float) - (xj - h),
        np.asarray(y, dtype=float) - (yj - h),
        h,
    )
