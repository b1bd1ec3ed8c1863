"""Scalar field families: external potentials and initial conditions."""

import numpy as np

from .interaction import _smoothstep


class Potential:
    """Real external potential v(x, y) on the closed square."""

    def __init__(self, func, name):
        self.func = func
        self.name = name

    def __call__(self, x, y):
        return self.func(x, y)

    @classmethod
    def none(cls):
        return cls(lambda x, y: np.zeros(np.broadcast(x, y).shape), "none")

    @classmethod
    def harmonic(cls, strength, side_length, margin):
        """Harmonic well about the centre, smoothly cut off near the boundary."""
        if not 0 < margin < side_length / 2:
            raise ValueError("harmonic cutoff margin must lie in (0, D/2)")
        c = side_length / 2.0

        def f(x, y):
            bump = (_smoothstep(np.asarray(x) / margin)
                    * _smoothstep((side_length - np.asarray(x)) / margin)
                    * _smoothstep(np.asarray(y) / margin)
                    * _smoothstep((side_length - np.asarray(y)) / margin))
            return strength * ((x - c) ** 2 + (y - c) ** 2) * bump

        return cls(f, f"harmonic(k={strength}, margin={margin})")

    @classmethod
    def gaussian_well(cls, depth, sigma, side_length):
        if sigma <= 0:
            raise ValueError("gaussian well needs sigma > 0")
        c = side_length / 2.0

        def f(x, y):
            return -depth * np.exp(-(((x - c) ** 2 + (y - c) ** 2)) / (2 * sigma ** 2))

        return cls(f, f"gaussian_well(depth={depth}, sigma={sigma})")


class InitialCondition:
    """Complex initial state with an analytic gradient (used by the Ritz load)."""

    def __init__(self, func, grad, name):
        self.func = func
        self.grad = grad
        self.name = name

    def __call__(self, x, y):
        return self.func(x, y)

    def gradient(self, x, y):
        return self.grad(x, y)

    @classmethod
    def eigenmode(cls, p, q, side_length, amplitude=1.0):
        """Dirichlet Laplacian eigenmode sin(p pi x / D) sin(q pi y / D)."""
        if p < 1 or q < 1:
            raise ValueError("eigenmode indices must be >= 1")
        kx = p * np.pi / side_length
        ky = q * np.pi / side_length

        def f(x, y):
            return amplitude * np.sin(kx * x) * np.sin(ky * y) + 0j

        def g(x, y):
            return (amplitude * kx * np.cos(kx * x) * np.sin(ky * y) + 0j,
                    amplitude * ky * np.sin(kx * x) * np.cos(ky * y) + 0j)

        mode = cls(f, g, f"eigenmode({p},{q})")
        mode.frequency = kx * kx + ky * ky  # linear-case phase rate, v = 0, lambda = 0
        return mode

    @classmethod
    def gaussian_packet(cls, center, width, momentum, amplitude=1.0):
        """Gaussian wave packet; effectively zero at the boundary for small width."""
        if width <= 0:
            raise ValueError("gaussian packet needs width > 0")
        cx, cy = center
        px, py = momentum

        def envelope(x, y):
            return amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (4 * width ** 2))

        def f(x, y):
            return envelope(x, y) * np.exp(1j * (px * x + py * y))

        def g(x, y):
            base = f(x, y)
            return (base * (1j * px - (x - cx) / (2 * width ** 2)),
                    base * (1j * py - (y - cy) / (2 * width ** 2)))

        return cls(f, g, f"gaussian_packet(center=({cx},{cy}), width={width}, "
                         f"momentum=({px},{py}))")
