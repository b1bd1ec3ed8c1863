"""Galerkin matrices of the bilinear-element discretization: mass, stiffness, potential."""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def gauss_rule(npts):
    """Gauss-Legendre points/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def shape_functions_1d(t):
    """The two linear nodal shapes on the unit interval, shape (2, len(t))."""
    t = np.asarray(t, dtype=float)
    return np.stack([1.0 - t, t])


def mass_1d(m, h):
    """Tridiagonal 1D hat-function Gram matrix on m interior nodes."""
    main = np.full(m, 2.0 * h / 3.0)
    off = np.full(m - 1, h / 6.0)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def stiffness_1d(m, h):
    """Tridiagonal 1D Dirichlet Gram matrix on m interior nodes."""
    main = np.full(m, 2.0 / h)
    off = np.full(m - 1, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def assemble_mass(mesh):
    """2D mass matrix A = M1 (x) M1, exact for tensor-product hats."""
    M1 = mass_1d(mesh.m, mesh.h)
    return sp.kron(M1, M1, format="csr")


def assemble_stiffness(mesh):
    """2D stiffness matrix B = K1 (x) M1 + M1 (x) K1."""
    M1 = mass_1d(mesh.m, mesh.h)
    K1 = stiffness_1d(mesh.m, mesh.h)
    return (sp.kron(K1, M1) + sp.kron(M1, K1)).tocsr()


def element_quadrature(npts=2):
    """Tensor Gauss rule on the unit square.

    Returns (xi, eta, w, S) with quadrature coordinates, weights, and the
    four bilinear corner shapes S[c, q] in corner order c = 2*cy + cx.
    """
    t, wt = gauss_rule(npts)
    xi, eta = np.meshgrid(t, t, indexing="xy")
    xi, eta = xi.ravel(), eta.ravel()
    w = np.outer(wt, wt).ravel()
    lx = shape_functions_1d(xi)
    ly = shape_functions_1d(eta)
    S = np.empty((4, xi.size))
    for cy in range(2):
        for cx in range(2):
            S[2 * cy + cx] = ly[cy] * lx[cx]
    return xi, eta, w, S


def element_product_tensor(h):
    """Q[c, a, b] = integral over one element of hat_c * hat_a * hat_b.

    Computed with the 2x2 Gauss rule, which integrates the cubic integrand
    exactly.  Shared by the variable-coefficient potential apply and the
    quadrature-consistent density so their pairing is entry-exact.
    """
    _, _, w, S = element_quadrature(2)
    return h * h * np.einsum("q,cq,aq,bq->cab", w, S, S, S)


def _interior_restriction(n):
    """Flat full-grid indices of interior nodes, in DOF order."""
    iy, ix = np.meshgrid(np.arange(1, n - 1), np.arange(1, n - 1), indexing="ij")
    return (iy * n + ix).ravel()


def assemble_potential(mesh, v, npts=2):
    """Potential matrix Y_ij = (phi_i, v phi_j), per-element Gauss quadrature.

    ``v(x, y)`` must be real-valued on the closed square.
    """
    n = mesh.nodes_per_side
    h = mesh.h
    xi, eta, w, S = element_quadrature(npts)
    ex, ey = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="xy")
    xq = (ex.ravel()[:, None] + xi[None, :]) * h
    yq = (ey.ravel()[:, None] + eta[None, :]) * h
    vq = np.asarray(v(xq, yq))
    if np.iscomplexobj(vq):
        raise ValueError("external potential must be real-valued")
    vq = vq.astype(float)
    loc = h * h * np.einsum("eq,q,aq,bq->eab", vq, w, S, S)

    corner = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])  # (cy, cx) per corner
    gidx = np.empty((ex.size, 4), dtype=np.int64)
    for c, (cy, cx) in enumerate(corner):
        gidx[:, c] = (ey.ravel() + cy) * n + (ex.ravel() + cx)
    rows = np.repeat(gidx, 4, axis=1).ravel()
    cols = np.tile(gidx, (1, 4)).ravel()
    full = sp.coo_matrix(
        (loc.reshape(-1, 16).ravel(), (rows, cols)), shape=(n * n, n * n)
    ).tocsr()
    keep = _interior_restriction(n)
    return full[np.ix_(keep, keep)].tocsr()


class MassSolver:
    """Cached sparse LU factorization of the (constant, SPD) mass matrix."""

    def __init__(self, A):
        self._lu = spla.splu(sp.csc_matrix(A.astype(np.complex128)))

    def solve(self, b):
        return self._lu.solve(np.asarray(b, dtype=np.complex128))


def dump_operator(path, op):
    """Write a sparse operator in coordinate text form: row col real imag."""
    coo = sp.coo_matrix(op)
    with open(path, "w") as f:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            z = complex(v)
            f.write(f"{r} {c} {z.real:.17g} {z.imag:.17g}\n")
