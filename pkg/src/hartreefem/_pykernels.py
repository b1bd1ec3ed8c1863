"""Pure-numpy implementations of the per-iteration element kernels.

Both kernels loop over the (n-1)^2 elements of the padded node grid
(boundary nodes included, field values there are zero for Dirichlet data).
``Q`` is the element product tensor from :func:`assembly.element_product_tensor`.
"""

import numpy as np

_CORNERS = ((0, 0), (0, 1), (1, 0), (1, 1))  # (cy, cx), corner index c = 2*cy + cx


def _corner_stack(x):
    n = x.shape[0]
    return np.stack([x[cy : cy + n - 1, cx : cx + n - 1] for cy, cx in _CORNERS])


def _corner_scatter(contrib, n, dtype):
    out = np.zeros((n, n), dtype=dtype)
    for c, (cy, cx) in enumerate(_CORNERS):
        out[cy : cy + n - 1, cx : cx + n - 1] += contrib[c]
    return out


def apply_nodal_potential(u, z, Q):
    """Action of the potential matrix with bilinearly interpolated coefficient u.

    u: real (n, n) nodal coefficient; z: complex (n, n) nodal state.
    Returns the load r with r_i = (phi_i, u_interp * psi_h), all nodes.
    """
    n = u.shape[0]
    uc = _corner_stack(u)
    zc = _corner_stack(z)
    rloc = np.einsum("cab,cij,bij->aij", Q, uc, zc, optimize=True)
    return _corner_scatter(rloc, n, np.complex128)


def weighted_density(z, Q):
    """Quadrature-consistent nodal density G_c = (hat_c, |psi_h|^2), all nodes."""
    n = z.shape[0]
    zc = _corner_stack(z)
    pab = np.einsum("aij,bij->abij", np.conj(zc), zc).real
    gloc = np.einsum("cab,abij->cij", Q, pab, optimize=True)
    return _corner_scatter(gloc, n, np.float64)
