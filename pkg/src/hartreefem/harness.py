"""Experiment orchestration: single runs, convergence sweeps, file outputs."""

import os
import struct
from dataclasses import dataclass

import numpy as np

from . import observables
from .config import ProblemSpec
from .mesh import Mesh
from .steppers import Operators, SchemeKind, TimeGrid, evolve

SNAPSHOT_MAGIC = b"HFEM"
SNAPSHOT_VERSION = 1

OUTPUT_ROOT_ENV = "HARTREEFEM_OUTPUT_ROOT"


def resolve_output_dir(spec_dir):
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root:
        return os.path.join(root, spec_dir)
    return spec_dir


def write_snapshot(path, z, mesh, t):
    """Binary state dump: magic, version u32, m u32, h f64, t f64, (re, im) pairs."""
    z = np.asarray(z, dtype=np.complex128)
    header = SNAPSHOT_MAGIC + struct.pack("<IIdd", SNAPSHOT_VERSION, mesh.m, mesh.h, t)
    inter = np.empty(2 * z.size)
    inter[0::2] = z.real
    inter[1::2] = z.imag
    with open(path, "wb") as f:
        f.write(header)
        f.write(inter.astype("<f8").tobytes())


def read_snapshot(path):
    """Read a state dump; returns (z, m, h, t)."""
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != SNAPSHOT_MAGIC:
        raise ValueError(f"{path} is not a state snapshot (bad magic)")
    version, m, h, t = struct.unpack_from("<IIdd", blob, 4)
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    payload = np.frombuffer(blob, dtype="<f8", offset=4 + struct.calcsize("<IIdd"))
    if payload.size != 2 * m * m:
        raise ValueError(f"{path}: truncated snapshot payload")
    z = payload[0::2] + 1j * payload[1::2]
    return z, m, h, t


def initial_state(spec, ops=None):
    if spec.use_ritz_initial:
        B = ops.B if ops is not None else None
        if B is None:
            from .assembly import assemble_stiffness
            B = assemble_stiffness(spec.mesh)
        projector = observables.RitzProjector(spec.mesh, B)
        return projector.project(spec.initial.gradient)
    return observables.interpolate(spec.mesh, spec.initial)


@dataclass
class RunResult:
    trajectory: object
    operators: Operators
    output_dir: str
    mass_drift: float
    energy_drift: float


def _relative_drift(values):
    values = np.asarray(values, dtype=float)
    ref = values[0]
    scale = max(abs(ref), 1e-300)
    return float(np.max(np.abs(values - ref)) / scale)


def run(spec: ProblemSpec, write_files=True):
    """Evolve one configured problem and write diagnostics, snapshots, summary."""
    outdir = resolve_output_dir(spec.output_dir)
    ops = Operators(spec.mesh, spec.potential, spec.kernel, spec.coupling)
    z0 = initial_state(spec, ops)
    traj = evolve(z0, spec.scheme, spec.grid, ops, spec.fixed_point,
                  snapshot_stride=spec.snapshot_stride)

    masses = [d.mass for d in traj.diagnostics]
    energies = [d.energy for d in traj.diagnostics]
    mass_drift = _relative_drift(masses)
    energy_drift = _relative_drift(energies)

    if write_files:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "diagnostics.csv"), "w") as f:
            f.write("t,mass,energy,fp_iters,fp_residual\n")
            for d in traj.diagnostics:
                f.write(f"{d.time:.17g},{d.mass:.17g},{d.energy:.17g},"
                        f"{d.iterations},{d.residual:.17g}\n")
        for step, z in zip(traj.snapshot_steps, traj.snapshots):
            write_snapshot(os.path.join(outdir, f"state_{step:06d}.bin"),
                           z, spec.mesh, traj.times[step])
        with open(os.path.join(outdir, "summary.txt"), "w") as f:
            f.write(f"scheme: {spec.scheme.value}\n")
            f.write(f"grid: m={spec.mesh.m} h={spec.mesh.h:.17g}\n")
            f.write(f"time: T={spec.grid.horizon:.17g} N={spec.grid.steps} "
                    f"tau={spec.grid.tau:.17g}\n")
            f.write(f"max relative mass drift: {mass_drift:.6e}\n")
            f.write(f"max relative energy drift: {energy_drift:.6e}\n")
            f.write(f"total fixed-point iterations: "
                    f"{sum(d.iterations for d in traj.diagnostics)}\n")
    return RunResult(traj, ops, outdir, mass_drift, energy_drift)


@dataclass
class ConvergenceRow:
    h: float
    tau: float
    error: float
    order: float | None


@dataclass
class ConvergenceReport:
    mode: str
    rows: list

    def write_csv(self, path):
        with open(path, "w") as f:
            f.write("h,tau,max_l2_error,observed_order\n")
            for row in self.rows:
                order = "n/a" if row.order is None else f"{row.order:.6g}"
                f.write(f"{row.h:.17g},{row.tau:.17g},{row.error:.17g},{order}\n")


_MODES = ("refine-both", "refine-tau-only", "refine-h-only")


def _level_spec(spec, level, mode):
    mesh, grid = spec.mesh, spec.grid
    if mode in ("refine-both", "refine-h-only"):
        n = (mesh.nodes_per_side - 1) * 2 ** level + 1
        mesh = Mesh(mesh.side_length, n)
    if mode in ("refine-both", "refine-tau-only"):
        grid = TimeGrid(grid.horizon, grid.steps * 2 ** level)
    return mesh, grid


def _closed_form_reference(spec):
    """Exact solution when the problem is linear and starts in an eigenmode."""
    linear = spec.coupling.sup_norm(spec.mesh) == 0.0
    free = spec.potential.name == "none"
    if linear and free and hasattr(spec.initial, "frequency"):
        freq = spec.initial.frequency
        ic = spec.initial

        def psi(x, y, t):
            return ic(x, y) * np.exp(-1j * freq * t)

        return psi
    return None


def converge(spec: ProblemSpec, levels, mode="refine-both", probe_steps=None):
    """Refinement sweep; errors are max-over-time L2 on the coarsest time lattice."""
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    if levels < 1:
        raise ValueError("need at least one level")

    closed_form = _closed_form_reference(spec)
    base_steps = spec.grid.steps
    probe = probe_steps if probe_steps is not None else max(base_steps, 1)

    runs = []
    for level in range(levels):
        mesh, grid = _level_spec(spec, level, mode)
        ops = Operators(mesh, spec.potential, spec.kernel, spec.coupling)
        level_spec = ProblemSpec(mesh=mesh, grid=grid, scheme=spec.scheme,
                                 potential=spec.potential, kernel=spec.kernel,
                                 coupling=spec.coupling, initial=spec.initial,
                                 use_ritz_initial=spec.use_ritz_initial,
                                 fixed_point=spec.fixed_point)
        z0 = initial_state(level_spec, ops)
        stride = max(grid.steps // probe, 1) if grid.steps else 1
        traj = evolve(z0, spec.scheme, grid, ops, spec.fixed_point,
                      snapshot_stride=stride)
        runs.append((mesh, grid, ops, traj))

    if closed_form is None:
        # two extra refinements keep the reference's own discretization error
        # from polluting the finest-level error ratio
        ref_mesh, ref_grid = _level_spec(spec, levels + 1, mode)
        ref_ops = Operators(ref_mesh, spec.potential, spec.kernel, spec.coupling)
        ref_spec = ProblemSpec(mesh=ref_mesh, grid=ref_grid, scheme=spec.scheme,
                               potential=spec.potential, kernel=spec.kernel,
                               coupling=spec.coupling, initial=spec.initial,
                               use_ritz_initial=spec.use_ritz_initial,
                               fixed_point=spec.fixed_point)
        ref_z0 = initial_state(ref_spec, ref_ops)
        ref_stride = max(ref_grid.steps // probe, 1) if ref_grid.steps else 1
        ref_traj = evolve(ref_z0, spec.scheme, ref_grid, ref_ops, spec.fixed_point,
                          snapshot_stride=ref_stride)
    else:
        ref_mesh = ref_traj = None

    rows = []
    prev_error = None
    for level, (mesh, grid, ops, traj) in enumerate(runs):
        errs = []
        for step, z in zip(traj.snapshot_steps, traj.snapshots):
            t = traj.times[step]
            if closed_form is not None:
                errs.append(observables.l2_error(
                    z, lambda x, y: closed_form(x, y, t), mesh, ops.A))
            else:
                ref_step = int(round(t / ref_traj.times[-1] * ref_grid.steps)) \
                    if ref_grid.steps else 0
                zr = ref_traj.state_at_step(ref_step)
                mr = ref_mesh
                while mr.nodes_per_side > mesh.nodes_per_side:
                    coarser = Mesh(mr.side_length, (mr.nodes_per_side - 1) // 2 + 1)
                    zr = observables.restrict_state(zr, mr, coarser)
                    mr = coarser
                errs.append(observables.l2_error(z, zr, mesh, ops.A))
        error = float(np.max(errs))
        order = None if prev_error is None or error == 0 \
            else float(np.log2(prev_error / error))
        rows.append(ConvergenceRow(mesh.h, grid.tau, error, order))
        prev_error = error
    return ConvergenceReport(mode, rows)
