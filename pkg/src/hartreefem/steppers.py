"""Fully discrete Crank-Nicolson-type schemes and their fixed-point solver.

Both schemes advance the implicit midpoint state m with the Banach iteration

    A m <- A z_prev - (i tau / 2) [ (B + Y) m + r(m) ],

starting from m = z_prev, and recover the new state as z_next = 2 m - z_prev.
They differ only in the density entering the nonlinear load r: the coherent
scheme uses the density of the midpoint state, the incoherent scheme the
average of the densities at the two adjacent time levels.
"""

import enum
import time as _time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import observables
from .assembly import MassSolver, assemble_mass, assemble_potential, assemble_stiffness
from .interaction import NonlocalInteraction


class SchemeKind(enum.Enum):
    COHERENT = "coherent"
    INCOHERENT = "incoherent"


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    steps: int

    def __post_init__(self):
        # negative horizons are allowed: both schemes are time-reversible
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")

    @property
    def tau(self):
        return self.horizon / self.steps if self.steps else 0.0

    def times(self):
        return np.linspace(0.0, self.horizon, self.steps + 1)


@dataclass
class FixedPointConfig:
    tolerance: float | None = None  # A-norm of iterate difference; None -> 1e-13 * sqrt(M0)
    max_iterations: int = 200
    divergence_patience: int = 3
    extrapolate: bool = False

    def __post_init__(self):
        if self.tolerance is not None and self.tolerance <= 0:
            raise ValueError("fixed-point tolerance must be positive")
        if self.max_iterations < 2:
            raise ValueError("need at least two fixed-point iterations")


@dataclass
class StepDiagnostics:
    step: int
    time: float
    iterations: int
    residual: float
    mass: float
    energy: float
    wall_time: float


class NonContractionError(RuntimeError):
    """Fixed-point iteration failed to contract; the caller must reduce tau."""

    def __init__(self, step_index, ratio, guard):
        self.step_index = step_index
        self.ratio = ratio
        self.guard = guard
        super().__init__(
            f"fixed-point iteration did not contract at step {step_index}: "
            f"empirical ratio {ratio:.3g}; admissibility surrogate "
            f"alpha*(sqrt(M)+1)*tau = {guard:.3g} (must stay <= 1); reduce the time step"
        )


class Operators:
    """Constant matrices and the nonlocal context for one problem setup."""

    def __init__(self, mesh, potential=None, kernel=None, coupling=None):
        from .interaction import CouplingField, KernelSpec

        self.mesh = mesh
        self.A = assemble_mass(mesh)
        self.B = assemble_stiffness(mesh)
        if potential is None:
            self.Y = 0.0 * self.A
        else:
            self.Y = assemble_potential(mesh, potential)
        self.linear = (self.B + self.Y).tocsr()
        self.solver = MassSolver(self.A)
        kernel = kernel if kernel is not None else KernelSpec.zero()
        coupling = coupling if coupling is not None else CouplingField.zero()
        self.interaction = NonlocalInteraction(mesh, kernel, coupling)

    def mass(self, z):
        return observables.mass(z, self.A)

    def energy(self, z):
        return observables.energy(z, self.B, self.Y, self.interaction)

    def contraction_surrogate(self, mass0, rng_seed=0):
        """Estimate of the step-size constant: lambda_max(A^-1 (B+Y)) + nonlinear part."""
        rng = np.random.default_rng(rng_seed)
        v = rng.standard_normal(self.mesh.num_dofs) + 0j
        lam = 0.0
        for _ in range(30):
            v = self.solver.solve(self.linear @ v)
            nrm = np.linalg.norm(v)
            if nrm == 0:
                break
            lam, v = nrm, v / nrm
        nl = 4.0 * self.interaction.coupling.sup_norm(self.mesh) \
            * self.interaction.kernel.sup_norm(self.mesh) * (np.sqrt(mass0) + 1.0) ** 2
        return float(lam + nl)


def _anorm(A, d):
    return float(np.sqrt(max(np.vdot(d, A @ d).real, 0.0)))


def _solve_midpoint(z_prev, ops, tau, tol, fp, load_fn, step_index, guard, m0=None):
    A = ops.A
    az_prev = A @ z_prev
    m = (z_prev if m0 is None else m0).astype(np.complex128, copy=True)
    prev_res = None
    growth = 0
    last_ratio = float("nan")
    for k in range(1, fp.max_iterations + 1):
        rhs = az_prev - 0.5j * tau * (ops.linear @ m + load_fn(m))
        m_new = ops.solver.solve(rhs)
        res = _anorm(A, m_new - m)
        m = m_new
        if res <= tol:
            return m, k, res
        if prev_res is not None and prev_res > 0:
            last_ratio = res / prev_res
            growth = growth + 1 if res > prev_res else 0
            if growth >= fp.divergence_patience:
                raise NonContractionError(step_index, last_ratio, guard)
        prev_res = res
    raise NonContractionError(step_index, last_ratio, guard)


def step_coherent(z_prev, ops, tau, fp, tol=None, step_index=0, guard=float("nan"), m0=None):
    """One step of the midpoint-density scheme; conserves the discrete mass."""
    if tol is None:
        tol = fp.tolerance if fp.tolerance is not None else 1e-13 * max(np.sqrt(ops.mass(z_prev)), 1.0)
    t0 = _time.perf_counter()
    inter = ops.interaction

    def load(mid):
        return inter.load(mid)

    mid, iters, res = _solve_midpoint(z_prev, ops, tau, tol, fp, load, step_index, guard, m0)
    z_next = 2.0 * mid - z_prev
    diag = StepDiagnostics(step_index, float("nan"), iters, res,
                           ops.mass(z_next), ops.energy(z_next),
                           _time.perf_counter() - t0)
    return z_next, diag


def step_incoherent(z_prev, ops, tau, fp, tol=None, step_index=0, guard=float("nan"), m0=None):
    """One step of the averaged-density scheme; conserves discrete mass and energy."""
    if tol is None:
        tol = fp.tolerance if fp.tolerance is not None else 1e-13 * max(np.sqrt(ops.mass(z_prev)), 1.0)
    t0 = _time.perf_counter()
    inter = ops.interaction
    g_prev = None if inter.is_zero else inter.density(z_prev)

    def load(mid):
        if inter.is_zero:
            return inter.load(mid)
        g_next = inter.density(2.0 * mid - z_prev)
        return inter.load_with_density(mid, 0.5 * (g_next + g_prev))

    mid, iters, res = _solve_midpoint(z_prev, ops, tau, tol, fp, load, step_index, guard, m0)
    z_next = 2.0 * mid - z_prev
    diag = StepDiagnostics(step_index, float("nan"), iters, res,
                           ops.mass(z_next), ops.energy(z_next),
                           _time.perf_counter() - t0)
    return z_next, diag


_STEP_FUNCTIONS = {
    SchemeKind.COHERENT: step_coherent,
    SchemeKind.INCOHERENT: step_incoherent,
}


@dataclass
class Trajectory:
    times: np.ndarray
    snapshot_steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def state_at_step(self, n):
        return self.snapshots[self.snapshot_steps.index(n)]


def evolve(z0, scheme, grid, ops, fp=None, snapshot_stride=1, check_guard=True):
    """March the chosen scheme over the whole time grid.

    Snapshots are stored every ``snapshot_stride`` steps (plus step 0 and the
    final step); diagnostics are recorded every step.
    """
    fp = fp or FixedPointConfig()
    z = np.asarray(z0, dtype=np.complex128).copy()
    mass0 = ops.mass(z)
    tol = fp.tolerance if fp.tolerance is not None else 1e-13 * max(np.sqrt(mass0), 1e-30)
    tau = grid.tau
    guard = float("nan")
    if grid.steps > 0 and check_guard:
        alpha = ops.contraction_surrogate(mass0)
        guard = alpha * (np.sqrt(mass0) + 1.0) * abs(tau)
        if guard > 1.0:
            warnings.warn(
                f"step-size admissibility surrogate alpha*(sqrt(M)+1)*tau = {guard:.3g} > 1; "
                "the fixed-point iteration may fail to contract", RuntimeWarning)

    step_fn = _STEP_FUNCTIONS[scheme]
    traj = Trajectory(times=grid.times())
    traj.snapshot_steps.append(0)
    traj.snapshots.append(z.copy())
    diag0 = StepDiagnostics(0, 0.0, 0, 0.0, mass0, ops.energy(z), 0.0)
    traj.diagnostics.append(diag0)

    z_prev2 = None
    for n in range(1, grid.steps + 1):
        start = z.copy()
        m0 = None
        if fp.extrapolate and z_prev2 is not None:
            m0 = 1.5 * start - 0.5 * z_prev2  # linear midpoint prediction
        z, diag = step_fn(start, ops, tau, fp, tol=tol, step_index=n, guard=guard, m0=m0)
        diag.time = traj.times[n]
        traj.diagnostics.append(diag)
        if n % snapshot_stride == 0 or n == grid.steps:
            traj.snapshot_steps.append(n)
            traj.snapshots.append(z.copy())
        z_prev2 = start
    return traj
