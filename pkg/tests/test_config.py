"""Config parsing: happy path and strict validation."""

import textwrap

import numpy as np
import pytest

from hartreefem.config import ConfigError, load_config
from hartreefem.steppers import SchemeKind

MINIMAL = """\
[domain]
side = 1.0
nodes_per_side = 10

[time]
horizon = 1e-3
steps = 5

[initial]
family = eigenmode
p = 1
q = 2
"""

FULL = """\
[domain]
side = 2.0
nodes_per_side = 17

[time]
horizon = 4e-3
steps = 20
scheme = incoherent

[potential]
family = gaussian_well
depth = 3.0
sigma = 0.3

[kernel]
family = gaussian
sigma = 0.25
amplitude = 0.5

[coupling]
family = constant
strength = 1.5

[initial]
family = gaussian_packet
width = 0.2
center_x = 0.9
center_y = 1.1
momentum_x = 2.0
projection = ritz

[fixed_point]
tolerance = 1e-12
max_iterations = 60
extrapolate = yes

[output]
directory = results
snapshot_stride = 4
"""


def _write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(textwrap.dedent(text))
    return str(path)


def test_minimal_config(tmp_path):
    spec = load_config(_write(tmp_path, MINIMAL))
    assert spec.mesh.side_length == 1.0
    assert spec.mesh.nodes_per_side == 10
    assert spec.grid.horizon == 1e-3
    assert spec.grid.steps == 5
    assert spec.scheme is SchemeKind.COHERENT
    assert spec.potential.name == "none"
    assert spec.coupling.sup_norm(spec.mesh) == 0.0
    assert spec.fixed_point.tolerance is None  # auto
    assert spec.snapshot_stride == 1
    assert spec.output_dir == "out"


def test_full_config(tmp_path):
    spec = load_config(_write(tmp_path, FULL))
    assert spec.scheme is SchemeKind.INCOHERENT
    assert spec.mesh.m == 15
    assert spec.use_ritz_initial
    assert spec.fixed_point.tolerance == 1e-12
    assert spec.fixed_point.max_iterations == 60
    assert spec.fixed_point.extrapolate
    assert spec.snapshot_stride == 4
    assert spec.output_dir == "results"
    assert spec.kernel.sup_norm(spec.mesh) == 0.5
    assert spec.coupling.sup_norm(spec.mesh) == 1.5
    z = spec.initial(0.9, 1.1)
    assert abs(z) > 0


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(_write(tmp_path, MINIMAL + "tilt = 3\n"))


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(_write(tmp_path, MINIMAL + "\n[turbo]\nlevel = 11\n"))


def test_missing_required_section(tmp_path):
    text = MINIMAL.split("[initial]")[0]
    with pytest.raises(ConfigError, match="initial"):
        load_config(_write(tmp_path, text))


def test_missing_required_key(tmp_path):
    text = MINIMAL.replace("steps = 5\n", "")
    with pytest.raises(ConfigError, match="steps"):
        load_config(_write(tmp_path, text))


def test_bad_number(tmp_path):
    text = MINIMAL.replace("horizon = 1e-3", "horizon = soon")
    with pytest.raises(ConfigError, match="not a number"):
        load_config(_write(tmp_path, text))


def test_bad_scheme(tmp_path):
    text = MINIMAL.replace("steps = 5", "steps = 5\nscheme = leapfrog")
    with pytest.raises(ConfigError, match="scheme"):
        load_config(_write(tmp_path, text))


def test_too_few_nodes(tmp_path):
    text = MINIMAL.replace("nodes_per_side = 10", "nodes_per_side = 2")
    with pytest.raises(ConfigError, match="nodes_per_side"):
        load_config(_write(tmp_path, text))


def test_bad_projection(tmp_path):
    text = MINIMAL + "projection = galerkin\n"
    with pytest.raises(ConfigError, match="projection"):
        load_config(_write(tmp_path, text))


def test_bad_eigenmode_index(tmp_path):
    text = MINIMAL.replace("p = 1", "p = 0")
    with pytest.raises(ConfigError, match="eigenmode"):
        load_config(_write(tmp_path, text))


def test_unknown_families(tmp_path):
    for section, line in (("potential", "family = coulomb\n"),
                          ("kernel", "family = yukawa\n"),
                          ("coupling", "family = ramp\n")):
        text = MINIMAL + f"\n[{section}]\n{line}"
        with pytest.raises(ConfigError, match="family"):
            load_config(_write(tmp_path, text))


def test_bad_boolean(tmp_path):
    text = MINIMAL + "\n[fixed_point]\nextrapolate = maybe\n"
    with pytest.raises(ConfigError, match="boolean"):
        load_config(_write(tmp_path, text))


def test_bad_stride(tmp_path):
    text = MINIMAL + "\n[output]\nsnapshot_stride = 0\n"
    with pytest.raises(ConfigError, match="snapshot_stride"):
        load_config(_write(tmp_path, text))


def test_tabulated_kernel_from_file(tmp_path):
    m = 8  # nodes_per_side = 10
    d = np.arange(2 * m - 1) - (m - 1)
    table = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / 30.0)
    table_path = tmp_path / "kernel.txt"
    np.savetxt(table_path, table)
    text = MINIMAL + f"\n[kernel]\nfamily = table\nfile = {table_path}\n"
    spec = load_config(_write(tmp_path, text))
    got = spec.kernel.samples(spec.mesh)
    np.testing.assert_allclose(got, table, rtol=1e-12)


def test_tabulated_kernel_rejects_uneven_table(tmp_path):
    table = np.zeros((5, 5))
    table[0, 1] = 1.0
    table_path = tmp_path / "kernel.txt"
    np.savetxt(table_path, table)
    text = MINIMAL + f"\n[kernel]\nfamily = table\nfile = {table_path}\n"
    with pytest.raises(ConfigError, match="even"):
        load_config(_write(tmp_path, text))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "absent.cfg"))
