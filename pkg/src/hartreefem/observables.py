"""Mass and energy functionals, Ritz projection, and error norms."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import element_quadrature, shape_functions_1d, _interior_restriction


def mass(z, A):
    """Discrete mass z^dagger A z (squared L2 norm of psi_h)."""
    z = np.asarray(z, dtype=np.complex128)
    val = np.vdot(z, A @ z)
    return float(val.real)


def energy(z, B, Y, interaction):
    """Discrete energy: Dirichlet + external potential + half the interaction pairing."""
    z = np.asarray(z, dtype=np.complex128)
    quad = np.vdot(z, B @ z) + np.vdot(z, Y @ z)
    return float(quad.real) + interaction.energy(z)


@dataclass
class NormReport:
    l2_error: float
    h1_seminorm_error: float
    time: float


def _element_qpoints(mesh, npts):
    """Physical quadrature points per element, shape (E, q)."""
    n, h = mesh.nodes_per_side, mesh.h
    xi, eta, w, S = element_quadrature(npts)
    ex, ey = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="xy")
    xq = (ex.ravel()[:, None] + xi[None, :]) * h
    yq = (ey.ravel()[:, None] + eta[None, :]) * h
    return xq, yq, w, S, xi, eta


def _state_padded(z, mesh):
    n = mesh.nodes_per_side
    zp = np.zeros((n, n), dtype=np.complex128)
    zp[1:-1, 1:-1] = np.asarray(z).reshape(mesh.m, mesh.m)
    return zp


def _corner_values(zp):
    n = zp.shape[0]
    return np.stack([
        zp[0 : n - 1, 0 : n - 1],
        zp[0 : n - 1, 1 : n],
        zp[1 : n, 0 : n - 1],
        zp[1 : n, 1 : n],
    ])  # corner order c = 2*cy + cx, element layout [ey, ex]


def fem_values_at_quadrature(z, mesh, npts=4):
    """psi_h at the element Gauss points, shape (E, q), E ordered [ey, ex]."""
    xq, yq, w, S, _, _ = _element_qpoints(mesh, npts)
    zc = _corner_values(_state_padded(z, mesh))
    vals = np.einsum("cij,cq->ijq", zc, S).reshape(-1, S.shape[1])
    return xq, yq, w, vals


def l2_error(z, reference, mesh, A, npts=4):
    """L2 distance between a FEM state and a reference.

    ``reference`` is a closed-form callable psi(x, y) (per-element Gauss
    quadrature) or a same-size coefficient vector (mass-matrix norm).
    """
    z = np.asarray(z, dtype=np.complex128)
    if callable(reference):
        xq, yq, w, vals = fem_values_at_quadrature(z, mesh, npts)
        ref = np.asarray(reference(xq, yq), dtype=np.complex128)
        err2 = mesh.h ** 2 * np.sum(w[None, :] * np.abs(vals - ref) ** 2)
        return float(np.sqrt(err2))
    ref = np.asarray(reference, dtype=np.complex128)
    if ref.shape != z.shape:
        raise ValueError("reference state size does not match; restrict it first")
    d = z - ref
    return float(np.sqrt(max(np.vdot(d, A @ d).real, 0.0)))


def h1_seminorm_error(z, reference_state, B):
    d = np.asarray(z, dtype=np.complex128) - np.asarray(reference_state, dtype=np.complex128)
    return float(np.sqrt(max(np.vdot(d, B @ d).real, 0.0)))


def restrict_state(z_fine, mesh_fine, mesh_coarse):
    """Nodal restriction from a once-refined aligned lattice to the coarse one."""
    if abs(mesh_fine.side_length - mesh_coarse.side_length) > 1e-14 * mesh_coarse.side_length:
        raise ValueError("meshes cover different domains")
    if mesh_fine.nodes_per_side - 1 != 2 * (mesh_coarse.nodes_per_side - 1):
        raise ValueError("fine mesh must refine the coarse lattice by a factor 2")
    zf = np.asarray(z_fine).reshape(mesh_fine.m, mesh_fine.m)
    return np.ascontiguousarray(zf[1::2, 1::2]).ravel()


def interpolate(mesh, f):
    """Nodal interpolation of a callable onto the interior DOFs."""
    pts = mesh.interior_grid()
    xx, yy = np.meshgrid(pts, pts, indexing="xy")
    return np.asarray(f(xx, yy), dtype=np.complex128).ravel()


def ritz_load(mesh, gradient, npts=4):
    """Load vector (grad phi_i, grad psi) by per-element Gauss quadrature."""
    n, h = mesh.nodes_per_side, mesh.h
    xq, yq, w, S, xi, eta = _element_qpoints(mesh, npts)
    gx_ref = np.empty_like(S)
    gy_ref = np.empty_like(S)
    lx = shape_functions_1d(xi)
    ly = shape_functions_1d(eta)
    dl = np.array([-1.0, 1.0])
    for cy in range(2):
        for cx in range(2):
            gx_ref[2 * cy + cx] = dl[cx] * ly[cy]
            gy_ref[2 * cy + cx] = lx[cx] * dl[cy]
    gpsi_x, gpsi_y = gradient(xq, yq)
    # physical gradients carry 1/h; the h^2 Jacobian leaves one factor of h
    loc = h * np.einsum("q,cq,eq->ec", w, gx_ref, np.asarray(gpsi_x, dtype=np.complex128))
    loc += h * np.einsum("q,cq,eq->ec", w, gy_ref, np.asarray(gpsi_y, dtype=np.complex128))

    full = np.zeros(n * n, dtype=np.complex128)
    ex, ey = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="xy")
    for c, (cy, cx) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        gidx = ((ey.ravel() + cy) * n + (ex.ravel() + cx))
        np.add.at(full, gidx, loc[:, c])
    return full[_interior_restriction(n)]


class RitzProjector:
    """Stiffness-orthogonal projection onto the FEM space."""

    def __init__(self, mesh, B):
        self.mesh = mesh
        self.B = B
        self._lu = spla.splu(sp.csc_matrix(B.astype(np.complex128)))

    def project(self, gradient, npts=4):
        """Project a field given by its gradient callable (gx, gy) = gradient(x, y)."""
        return self._lu.solve(ritz_load(self.mesh, gradient, npts))

    def project_state(self, z):
        """Projection of a function already in the FEM space: identity (via solve)."""
        return self._lu.solve(self.B @ np.asarray(z, dtype=np.complex128))
