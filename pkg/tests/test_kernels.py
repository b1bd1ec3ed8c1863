"""Element-kernel backends: compiled vs numpy fallback, and matrix consistency."""

import numpy as np
import pytest

from hartreefem import kernels, _pykernels
from hartreefem.assembly import assemble_potential, element_product_tensor
from hartreefem.mesh import Mesh, basis_eval


def _random_padded_state(n, rng):
    z = np.zeros((n, n), dtype=np.complex128)
    z[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2)) \
        + 1j * rng.standard_normal((n - 2, n - 2))
    return z


def _random_padded_coeff(n, rng):
    u = np.zeros((n, n))
    u[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2))
    return u


@pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled extension not built")
def test_backend_parity():
    from hartreefem import _core

    rng = np.random.default_rng(11)
    for n in (3, 5, 10, 17):
        Q = element_product_tensor(1.0 / (n - 1))
        z = _random_padded_state(n, rng)
        u = _random_padded_coeff(n, rng)
        np.testing.assert_allclose(
            _core.apply_nodal_potential(u, z, Q),
            _pykernels.apply_nodal_potential(u, z, Q),
            rtol=1e-13, atol=1e-15)
        np.testing.assert_allclose(
            _core.weighted_density(z, Q),
            _pykernels.weighted_density(z, Q),
            rtol=1e-13, atol=1e-15)


def test_apply_nodal_potential_matches_assembled_matrix():
    # Y[u] z for nodal u must equal the sparse matrix assembled from the
    # bilinear interpolant of u applied to z
    mesh = Mesh(1.0, 6)
    n, m = mesh.nodes_per_side, mesh.m
    rng = np.random.default_rng(4)
    Q = element_product_tensor(mesh.h)
    u = _random_padded_coeff(n, rng)
    z = _random_padded_state(n, rng)

    def u_func(x, y):
        out = np.zeros(np.broadcast(x, y).shape)
        for j in range(mesh.num_dofs):
            j1, j2 = j % m, j // m
            out = out + u[j2 + 1, j1 + 1] * basis_eval(j, x, y, mesh)
        return out

    Y = assemble_potential(mesh, u_func)
    got = kernels.apply_nodal_potential(u, z, Q)[1:-1, 1:-1].ravel()
    want = Y @ z[1:-1, 1:-1].ravel()
    np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_weighted_density_pairs_exactly_with_potential_apply():
    # the identity z^dagger Y[u] z = sum_c u_c G_c(z) is what the discrete
    # conservation proofs rest on; it must hold to rounding
    mesh = Mesh(1.0, 9)
    rng = np.random.default_rng(5)
    Q = element_product_tensor(mesh.h)
    u = _random_padded_coeff(mesh.nodes_per_side, rng)
    z = _random_padded_state(mesh.nodes_per_side, rng)
    lhs = np.vdot(z, kernels.apply_nodal_potential(u, z, Q)).real
    g = kernels.weighted_density(z, Q)
    rhs = np.sum(u * g)
    assert abs(lhs - rhs) <= 1e-13 * max(abs(lhs), 1.0)


def test_weighted_density_is_real_nonnegative_total():
    mesh = Mesh(1.0, 8)
    rng = np.random.default_rng(6)
    Q = element_product_tensor(mesh.h)
    z = _random_padded_state(mesh.nodes_per_side, rng)
    g = kernels.weighted_density(z, Q)
    assert g.dtype == np.float64
    # total weighted density = integral of |psi_h|^2 = discrete mass > 0
    assert np.sum(g) > 0
