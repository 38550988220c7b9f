import numpy as np

from tswaves.grid import panel_grid, wave_grid


def test_derivative_and_integrals():
    g = panel_grid(lambda y: 0.5, 10.0)
    Y = g.nodes
    f = np.sin(Y) * np.exp(-0.2 * Y)
    df = np.cos(Y) * np.exp(-0.2 * Y) - 0.2 * f
    assert np.max(np.abs(g.deriv(f) - df)) < 1e-10
    assert np.max(np.abs(g.cumint(df) - (f - f[0]))) < 1e-12
    assert np.max(np.abs(g.tailint(df) - (f[-1] - f))) < 1e-12


def test_interpolation():
    g = panel_grid(lambda y: 0.4, 6.0)
    f = np.exp(-g.nodes)
    y = np.linspace(0.0, 6.0, 37)
    assert np.max(np.abs(g.interp(f, y) - np.exp(-y))) < 1e-12


def test_wave_grid_resolves_critical_layer():
    g = wave_grid(0.3, 1e-3, 0.01)
    assert 0.3 in set(np.round(g.breaks, 15))
    assert g.spacing_near(0.3, 0.005) < 0.01
    assert g.y_max == 40.0
