import os

import numpy as np
import pytest

import dbarlab


def bump_potential(grid, inner=0.5, outer=2.0):
    z = grid.z()[0]
    r = np.abs(z)
    t = np.clip((r - inner) / (outer - inner), 0.0, 1.0)
    s = t**3 * (10 - 15 * t + 6 * t**2)
    return (np.exp(-r**2) * (1 - s)).astype(complex)[None, :]


def test_grid_and_weight():
    g = dbarlab.Grid(1, 2.0, 16)
    assert g.points == 256
    assert g.h == pytest.approx(0.25)
    w = dbarlab.Weight.gaussian(1, 2.0)
    value, grad, hess = w.eval([1 + 1j])
    assert value == pytest.approx(4.0)
    assert grad[0] == pytest.approx(2 * (1 - 1j))
    assert w.smallest_eigenvalue([0.3j]) == pytest.approx(2.0)


def test_dbar_of_zbar_is_one():
    g = dbarlab.Grid(1, 1.0, 8)
    zbar = np.conj(g.z())
    np.testing.assert_allclose(dbarlab.dbar(g, 0, zbar), 1.0, atol=1e-13)


def test_solve_reproduces_data():
    g = dbarlab.Grid(1, 4.0, 32)
    w = dbarlab.Weight.gaussian(1, 1.0)
    omega = dbarlab.dbar(g, 0, bump_potential(g))
    assert dbarlab.moment_defect(g, omega) < 1e-9
    u, report = dbarlab.solve(g, 1, omega, w)
    assert report["residual"] <= 1e-10
    assert u.shape == (1, g.points)
    assert np.all(np.isfinite(u))


def test_errors_map_to_python():
    with pytest.raises(dbarlab.ConfigError):
        dbarlab.Grid(1, 1.0, 7)
    g = dbarlab.Grid(1, 1.0, 8)
    with pytest.raises(dbarlab.ShapeError):
        dbarlab.dbar(g, 0, np.zeros((1, 10), complex))
    assert issubclass(dbarlab.ConfigError, dbarlab.Error)


def test_presets_and_validate(tmp_path):
    names = dbarlab.preset_names()
    assert "thm21_decay" in names and "validate" in names
    code, report, summary = dbarlab.execute("validate")
    assert code == 0, summary
    assert report["passed"] is True
    code, out, err = dbarlab.run("validate", out_dir=str(tmp_path))
    assert code == 0, err
    assert (tmp_path / "report.json").exists()


def test_bad_config_is_exit_2(tmp_path):
    cfg = dbarlab.load_preset("thm11_solve")
    del cfg["grid"]["N"]
    code, out, err = dbarlab.run(cfg, out_dir=str(tmp_path))
    assert code == 2
    assert "grid.N" in err


def test_module_location():
    pkg = os.environ.get("DBARLAB_PYTHON_PACKAGE")
    if pkg:
        assert dbarlab._core.__file__.startswith(pkg)
