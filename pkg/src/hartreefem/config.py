"""Experiment configuration: flat key = value sections, strictly validated."""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .fields import InitialCondition, Potential
from .interaction import CouplingField, KernelSpec, TabulatedKernel
from .mesh import Mesh
from .steppers import FixedPointConfig, SchemeKind, TimeGrid


class ConfigError(ValueError):
    pass


@dataclass
class ProblemSpec:
    mesh: Mesh
    grid: TimeGrid
    scheme: SchemeKind
    potential: Potential
    kernel: KernelSpec
    coupling: CouplingField
    initial: InitialCondition
    use_ritz_initial: bool = False
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)
    snapshot_stride: int = 1
    output_dir: str = "out"


class _Section:
    """One config section with consumed-key tracking (unknown keys are errors)."""

    def __init__(self, name, items):
        self.name = name
        self._items = dict(items)
        self._seen = set()

    def get(self, key, default=None, required=False):
        if key in self._items:
            self._seen.add(key)
            return self._items[key]
        if required:
            raise ConfigError(f"[{self.name}] is missing required key '{key}'")
        return default

    def get_float(self, key, default=None, required=False):
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is not a number") from None

    def get_int(self, key, default=None, required=False):
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} = {raw!r} is not an integer") from None

    def get_bool(self, key, default=False):
        raw = self.get(key)
        if raw is None:
            return default
        low = raw.strip().lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"[{self.name}] {key} = {raw!r} is not a boolean")

    def check_consumed(self):
        unknown = set(self._items) - self._seen
        if unknown:
            raise ConfigError(
                f"[{self.name}] has unknown key(s): {', '.join(sorted(unknown))}")


_KNOWN_SECTIONS = ("domain", "time", "potential", "kernel", "coupling",
                   "initial", "fixed_point", "output")


def load_config(path):
    """Parse and fully validate a config file into a ProblemSpec."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        with open(path) as f:
            parser.read_file(f)
    except OSError:
        raise
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    unknown = set(parser.sections()) - set(_KNOWN_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    for required in ("domain", "time", "initial"):
        if required not in parser:
            raise ConfigError(f"missing required section [{required}]")

    sections = {name: _Section(name, parser[name].items() if name in parser else ())
                for name in _KNOWN_SECTIONS}

    dom = sections["domain"]
    side = dom.get_float("side", required=True)
    n = dom.get_int("nodes_per_side", required=True)
    if side <= 0:
        raise ConfigError("[domain] side must be positive")
    if n < 3:
        raise ConfigError("[domain] nodes_per_side must be at least 3")
    mesh = Mesh(side, n)

    tim = sections["time"]
    horizon = tim.get_float("horizon", required=True)
    steps = tim.get_int("steps", required=True)
    if horizon < 0 or steps < 0:
        raise ConfigError("[time] horizon and steps must be nonnegative")
    scheme_name = tim.get("scheme", default="coherent").strip().lower()
    try:
        scheme = SchemeKind(scheme_name)
    except ValueError:
        raise ConfigError(f"[time] scheme must be 'coherent' or 'incoherent', "
                          f"got {scheme_name!r}") from None
    grid = TimeGrid(horizon, steps)

    potential = _parse_potential(sections["potential"], side)
    coupling = _parse_coupling(sections["coupling"], side)
    kernel = _parse_kernel(sections["kernel"], side)
    initial, use_ritz = _parse_initial(sections["initial"], side)

    fps = sections["fixed_point"]
    tol_raw = fps.get("tolerance", default="auto")
    tolerance = None if str(tol_raw).strip().lower() == "auto" else float(tol_raw)
    fp = FixedPointConfig(
        tolerance=tolerance,
        max_iterations=fps.get_int("max_iterations", default=200),
        divergence_patience=fps.get_int("divergence_patience", default=3),
        extrapolate=fps.get_bool("extrapolate", default=False),
    )

    out = sections["output"]
    stride = out.get_int("snapshot_stride", default=1)
    if stride < 1:
        raise ConfigError("[output] snapshot_stride must be >= 1")
    outdir = out.get("directory", default="out")

    for sec in sections.values():
        sec.check_consumed()

    return ProblemSpec(mesh=mesh, grid=grid, scheme=scheme, potential=potential,
                       kernel=kernel, coupling=coupling, initial=initial,
                       use_ritz_initial=use_ritz, fixed_point=fp,
                       snapshot_stride=stride, output_dir=outdir)


def _parse_potential(sec, side):
    family = sec.get("family", default="none").strip().lower()
    if family == "none":
        return Potential.none()
    if family == "harmonic":
        strength = sec.get_float("strength", required=True)
        margin = sec.get_float("margin", default=side / 10.0)
        return Potential.harmonic(strength, side, margin)
    if family == "gaussian_well":
        depth = sec.get_float("depth", required=True)
        sigma = sec.get_float("sigma", required=True)
        return Potential.gaussian_well(depth, sigma, side)
    raise ConfigError(f"[potential] unknown family {family!r}")


def _parse_kernel(sec, side):
    family = sec.get("family", default="zero").strip().lower()
    if family == "zero":
        return KernelSpec.zero()
    if family == "gaussian":
        sigma = sec.get_float("sigma", required=True)
        amplitude = sec.get_float("amplitude", default=1.0)
        return KernelSpec.gaussian(sigma, amplitude)
    if family == "smoothed_indicator":
        radius = sec.get_float("radius", required=True)
        width = sec.get_float("width", required=True)
        amplitude = sec.get_float("amplitude", default=1.0)
        return KernelSpec.smoothed_indicator(radius, width, amplitude)
    if family == "table":
        path = sec.get("file", required=True)
        try:
            table = np.loadtxt(path, ndmin=2)
        except OSError:
            raise
        except ValueError as exc:
            raise ConfigError(f"[kernel] cannot parse sample table {path}: {exc}") from exc
        try:
            return TabulatedKernel(table)
        except ValueError as exc:
            raise ConfigError(f"[kernel] {exc}") from exc
    raise ConfigError(f"[kernel] unknown family {family!r}")


def _parse_coupling(sec, side):
    family = sec.get("family", default="zero").strip().lower()
    if family == "zero":
        return CouplingField.zero()
    if family == "constant":
        return CouplingField.constant(sec.get_float("strength", required=True))
    if family == "plateau":
        strength = sec.get_float("strength", required=True)
        margin = sec.get_float("margin", default=side / 10.0)
        try:
            return CouplingField.plateau(strength, side, margin)
        except ValueError as exc:
            raise ConfigError(f"[coupling] {exc}") from exc
    raise ConfigError(f"[coupling] unknown family {family!r}")


def _parse_initial(sec, side):
    family = sec.get("family", required=True).strip().lower()
    projection = sec.get("projection", default="interpolation").strip().lower()
    if projection not in ("interpolation", "ritz"):
        raise ConfigError(f"[initial] projection must be 'interpolation' or 'ritz', "
                          f"got {projection!r}")
    if family == "eigenmode":
        p = sec.get_int("p", required=True)
        q = sec.get_int("q", required=True)
        amplitude = sec.get_float("amplitude", default=1.0)
        if p < 1 or q < 1:
            raise ConfigError("[initial] eigenmode indices p, q must be >= 1")
        ic = InitialCondition.eigenmode(p, q, side, amplitude)
    elif family == "gaussian_packet":
        cx = sec.get_float("center_x", default=side / 2.0)
        cy = sec.get_float("center_y", default=side / 2.0)
        width = sec.get_float("width", required=True)
        px = sec.get_float("momentum_x", default=0.0)
        py = sec.get_float("momentum_y", default=0.0)
        amplitude = sec.get_float("amplitude", default=1.0)
        ic = InitialCondition.gaussian_packet((cx, cy), width, (px, py), amplitude)
    else:
        raise ConfigError(f"[initial] unknown family {family!r}")
    return ic, projection == "ritz"
