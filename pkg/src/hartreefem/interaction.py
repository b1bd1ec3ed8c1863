"""Nonlocal interaction term: convolution kernel, coupling field, load and energy.

The Galerkin load of f[psi] = lambda * (V * |psi|^2) * psi is approximated
nodally: a quadrature-consistent nodal density G_c = (hat_c, |psi_h|^2) is
convolved with kernel samples on the node-difference lattice, the product
with the coupling samples gives an effective potential that is interpolated
bilinearly and applied through the same element quadrature.  Sharing one
element tensor between density and apply makes the discrete pairing
(xi, lambda g_V[rho] omega) symmetric under state exchange for even kernels,
which is what the conservation proofs use.
"""

import numpy as np
import scipy.fft as sfft

from .assembly import element_product_tensor


def _smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        g0 = np.where(u > 0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
        g1 = np.where(u < 1, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
    return g0 / (g0 + g1)


class KernelSpec:
    """Even real interaction kernel with samples on the difference lattice."""

    def __init__(self, func, name, sup_norm=None):
        self.func = func
        self.name = name
        self._sup_norm = sup_norm

    @classmethod
    def gaussian(cls, sigma, amplitude=1.0):
        if sigma <= 0:
            raise ValueError("gaussian kernel needs sigma > 0")

        def f(x, y):
            return amplitude * np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))

        return cls(f, f"gaussian(sigma={sigma}, amplitude={amplitude})",
                   sup_norm=abs(amplitude))

    @classmethod
    def smoothed_indicator(cls, radius, width, amplitude=1.0):
        if radius <= 0 or width <= 0:
            raise ValueError("smoothed indicator needs radius > 0 and width > 0")

        def f(x, y):
            r = np.sqrt(x * x + y * y)
            return amplitude * _smoothstep((radius + width - r) / width)

        return cls(f, f"smoothed_indicator(radius={radius}, width={width})",
                   sup_norm=abs(amplitude))

    @classmethod
    def zero(cls):
        return cls(lambda x, y: np.zeros(np.broadcast(x, y).shape), "zero",
                   sup_norm=0.0)

    def samples(self, mesh):
        """Kernel on the (2m-1)^2 lattice of interior node differences."""
        m, h = mesh.m, mesh.h
        d = (np.arange(2 * m - 1) - (m - 1)) * h
        dx, dy = np.meshgrid(d, d, indexing="xy")
        table = np.asarray(self.func(dx, dy), dtype=float)
        validate_even_samples(table)
        return table

    def sup_norm(self, mesh):
        if self._sup_norm is not None:
            return self._sup_norm
        return float(np.max(np.abs(self.samples(mesh))))


def validate_even_samples(table):
    """Reject sample tables that are not symmetric under index negation."""
    table = np.asarray(table)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] % 2 == 0:
        raise ValueError("kernel sample table must be square with odd side")
    if not np.all(np.isfinite(table)):
        raise ValueError("kernel samples must be finite")
    if not np.allclose(table, table[::-1, ::-1], rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(table)))):
        raise ValueError("kernel samples must be even: V(-x) = V(x) is required")


class TabulatedKernel(KernelSpec):
    """Kernel given directly by its sample table (must match the mesh lattice)."""

    def __init__(self, table):
        validate_even_samples(table)
        self.table = np.asarray(table, dtype=float)
        super().__init__(None, f"table({self.table.shape[0]}x{self.table.shape[0]})",
                         sup_norm=float(np.max(np.abs(self.table))))

    def samples(self, mesh):
        if self.table.shape[0] != 2 * mesh.m - 1:
            raise ValueError(
                f"sample table side {self.table.shape[0]} does not match "
                f"the {2 * mesh.m - 1} node-difference lattice of this mesh")
        return self.table


class CouplingField:
    """Real coupling strength lambda(x) at the interior nodes."""

    def __init__(self, func, name, sup_norm=None):
        self.func = func
        self.name = name
        self._sup_norm = sup_norm

    @classmethod
    def constant(cls, value):
        return cls(lambda x, y: np.full(np.broadcast(x, y).shape, float(value)),
                   f"constant({value})", sup_norm=abs(value))

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    @classmethod
    def plateau(cls, value, side_length, margin):
        """Smooth characteristic function of the square, off within ``margin`` of the boundary."""
        if not 0 < margin < side_length / 2:
            raise ValueError("plateau margin must lie in (0, D/2)")

        def f(x, y):
            bx = _smoothstep(x / margin) * _smoothstep((side_length - x) / margin)
            by = _smoothstep(y / margin) * _smoothstep((side_length - y) / margin)
            return float(value) * bx * by

        return cls(f, f"plateau({value}, margin={margin})", sup_norm=abs(value))

    def sample_interior(self, mesh):
        pts = mesh.interior_grid()
        xx, yy = np.meshgrid(pts, pts, indexing="xy")
        lam = np.asarray(self.func(xx, yy))
        if np.iscomplexobj(lam):
            raise ValueError("coupling field must be real-valued")
        return lam.astype(float)  # [iy, ix]

    def sup_norm(self, mesh):
        if self._sup_norm is not None:
            return self._sup_norm
        return float(np.max(np.abs(self.sample_interior(mesh))))


class Convolver:
    """Linear (zero-padded) convolution with a fixed kernel sample table."""

    def __init__(self, table, h):
        self.table = np.asarray(table, dtype=float)
        self.h = h
        self.m = (self.table.shape[0] + 1) // 2
        p = 3 * self.m - 2  # full linear-convolution size, no wrap-around
        self._shape = (sfft.next_fast_len(p), sfft.next_fast_len(p))
        self._kf = sfft.rfft2(self.table, s=self._shape)

    def apply(self, rho):
        """w_c = h^2 sum_j V(x_c - x_j) rho_j via zero-padded FFT."""
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (self.m, self.m):
            raise ValueError(f"density shape {rho.shape} does not match grid m={self.m}")
        rf = sfft.rfft2(rho, s=self._shape)
        full = sfft.irfft2(self._kf * rf, s=self._shape)
        out = full[self.m - 1 : 2 * self.m - 1, self.m - 1 : 2 * self.m - 1]
        return self.h * self.h * out

    def apply_direct(self, rho):
        """Direct O(N^2) double sum; the oracle for the FFT path."""
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (self.m, self.m):
            raise ValueError(f"density shape {rho.shape} does not match grid m={self.m}")
        m = self.m
        idx = np.arange(m)
        dyx = idx[:, None] - idx[None, :] + (m - 1)  # pairwise offset index
        # V[(c - j) + (m-1)] split over the two axes
        w = np.empty((m, m))
        for cy in range(m):
            for cx in range(m):
                w[cy, cx] = np.sum(self.table[dyx[cy, :], :][:, dyx[cx, :]] * rho)
        return self.h * self.h * w


def convolve(kernel_samples, rho, h, direct=False):
    """Nodal convolution w = h^2 V * rho on the interior lattice."""
    conv = Convolver(kernel_samples, h)
    return conv.apply_direct(rho) if direct else conv.apply(rho)


class NonlocalInteraction:
    """Precomputed context for evaluating the nonlinear load on one mesh."""

    def __init__(self, mesh, kernel, coupling):
        from . import kernels as _k

        self.mesh = mesh
        self.kernel = kernel
        self.coupling = coupling
        self._k = _k
        self.Q = element_product_tensor(mesh.h)
        self.lam = coupling.sample_interior(mesh)
        self.is_zero = not np.any(self.lam)
        if not self.is_zero:
            self.convolver = Convolver(kernel.samples(mesh), mesh.h)
        else:
            self.convolver = None

    # -- grid helpers -------------------------------------------------
    def _pad(self, z):
        n = self.mesh.nodes_per_side
        zp = np.zeros((n, n), dtype=np.complex128)
        zp[1:-1, 1:-1] = np.asarray(z).reshape(self.mesh.m, self.mesh.m)
        return zp

    def _unpad(self, field):
        return np.ascontiguousarray(field[1:-1, 1:-1]).ravel()

    # -- building blocks ----------------------------------------------
    def density(self, z):
        """Quadrature-consistent nodal density (hat_c, |psi_h|^2), interior (m, m)."""
        g = self._k.weighted_density(self._pad(z), self.Q)
        return np.ascontiguousarray(g[1:-1, 1:-1])

    def effective_potential(self, g):
        """u = lambda * (V convolved with the density), interior (m, m)."""
        h2 = self.mesh.h ** 2
        return self.lam * self.convolver.apply(g / h2)

    def apply_potential(self, u, z):
        """Load r = Y[u] z for an interior nodal coefficient u (zero at the boundary)."""
        n = self.mesh.nodes_per_side
        up = np.zeros((n, n), dtype=np.float64)
        up[1:-1, 1:-1] = u
        r = self._k.apply_nodal_potential(up, self._pad(z), self.Q)
        return self._unpad(r)

    # -- public operations --------------------------------------------
    def load(self, z):
        """r_i ~ (phi_i, lambda g_V[|psi_h|^2] psi_h)."""
        z = np.asarray(z, dtype=np.complex128)
        if z.size != self.mesh.num_dofs:
            raise ValueError("state size does not match mesh")
        if self.is_zero:
            return np.zeros(z.size, dtype=np.complex128)
        return self.apply_potential(self.effective_potential(self.density(z)), z)

    def load_with_density(self, z, g):
        """Load with an externally prescribed density g (incoherent scheme)."""
        if self.is_zero:
            return np.zeros(np.asarray(z).size, dtype=np.complex128)
        return self.apply_potential(self.effective_potential(g), z)

    def energy(self, z):
        """Half the interaction pairing, 0.5 * Re z^dagger r(z)."""
        z = np.asarray(z, dtype=np.complex128)
        if self.is_zero:
            return 0.0
        r = self.load(z)
        val = np.vdot(z, r)
        return 0.5 * float(val.real)

    def pairing(self, z, w):
        """(psi_z, lambda g_V[rho_w] psi_z): exchange-symmetric for even kernels."""
        z = np.asarray(z, dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        if self.is_zero:
            return 0.0
        r = self.load_with_density(z, self.density(w))
        return float(np.vdot(z, r).real)
