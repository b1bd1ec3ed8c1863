"""Mesh indexing and bilinear hat function tests."""

import numpy as np
import pytest

from hartreefem.mesh import Mesh, basis_eval, node_coords, node_index, reference_shape


def test_node_index_examples():
    assert node_index(0, 0, 5) == 0
    assert node_index(2, 3, 5) == 17
    assert node_index(4, 4, 5) == 24


def test_node_index_is_a_bijection():
    m = 5
    seen = {node_index(m1, m2, m) for m2 in range(m) for m1 in range(m)}
    assert seen == set(range(m * m))
    for j in range(m * m):
        m1, m2 = node_coords(j, m)
        assert node_index(m1, m2, m) == j


def test_node_index_bounds():
    with pytest.raises(IndexError):
        node_index(5, 0, 5)
    with pytest.raises(IndexError):
        node_index(0, -1, 5)
    with pytest.raises(IndexError):
        node_coords(25, 5)


def test_mesh_geometry():
    mesh = Mesh(2.0, 11)
    assert mesh.h == pytest.approx(0.2, rel=1e-15)
    assert mesh.m == 9
    assert mesh.num_dofs == 81
    x0, y0 = mesh.node_position(0)
    assert x0 == pytest.approx(mesh.h)
    assert y0 == pytest.approx(mesh.h)
    pts = mesh.interior_points()
    assert pts.shape == (81, 2)
    # flat order runs over x first
    assert pts[1, 0] == pytest.approx(2 * mesh.h)
    assert pts[1, 1] == pytest.approx(mesh.h)


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(-1.0, 5)
    with pytest.raises(ValueError):
        Mesh(1.0, 2)


def test_reference_shape_values():
    h = 0.25
    assert reference_shape(h, h, h) == pytest.approx(1.0)
    assert reference_shape(0.0, h, h) == 0.0
    assert reference_shape(2 * h, h, h) == 0.0
    assert reference_shape(-0.1, h, h) == 0.0
    assert reference_shape(3 * h, h, h) == 0.0
    # bilinear on each sub-square: value at a sub-square centre
    assert reference_shape(0.5 * h, 0.5 * h, h) == pytest.approx(0.25)
    assert reference_shape(1.5 * h, 0.5 * h, h) == pytest.approx(0.25)


def test_reference_shape_integral():
    # midpoint rule on a fine grid; exact integral is h^2
    h = 0.3
    k = 400
    t = (np.arange(k) + 0.5) * (2 * h / k)
    xx, yy = np.meshgrid(t, t)
    val = np.sum(reference_shape(xx, yy, h)) * (2 * h / k) ** 2
    assert val == pytest.approx(h * h, rel=1e-4)


def test_basis_kronecker_property():
    mesh = Mesh(1.0, 6)
    pts = mesh.interior_points()
    for j in range(mesh.num_dofs):
        vals = basis_eval(j, pts[:, 0], pts[:, 1], mesh)
        expect = np.zeros(mesh.num_dofs)
        expect[j] = 1.0
        np.testing.assert_allclose(vals, expect, atol=1e-14)


def test_basis_vanishes_on_boundary():
    mesh = Mesh(1.0, 6)
    s = np.linspace(0.0, 1.0, 23)
    zero = np.zeros_like(s)
    for j in (0, 7, mesh.num_dofs - 1):
        for bx, by in ((s, zero), (s, zero + 1.0), (zero, s), (zero + 1.0, s)):
            np.testing.assert_allclose(basis_eval(j, bx, by, mesh), 0.0, atol=1e-15)


def test_basis_partition_of_unity():
    # away from the boundary the interior hats sum to one
    mesh = Mesh(1.0, 7)
    x = np.array([0.37, 0.52, 0.61])
    y = np.array([0.45, 0.33, 0.58])
    total = sum(basis_eval(j, x, y, mesh) for j in range(mesh.num_dofs))
    np.testing.assert_allclose(total, 1.0, atol=1e-13)
