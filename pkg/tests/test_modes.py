import math

import numpy as np
import pytest

from tswaves.acceptance import check_helmholtz
from tswaves.errors import ConfigError, SolverError
from tswaves.grid import ComplexField, panel_grid
from tswaves.langer import build_langer, make_context
from tswaves.modes import (
    density_fixed_point,
    density_grid,
    fast_boundary,
    helmholtz_halfline,
    helmholtz_operator,
    slow_boundary,
    stokes_rho_residual,
)
from tswaves.rayleigh import slow_mode


@pytest.fixture()
def dctx(blasius):
    return make_context(blasius, 1e-8, 0.3, 0.1, 0.3 + 0.01j)


def test_helmholtz_zero(dctx):
    g = density_grid(dctx)
    f = helmholtz_halfline(ComplexField(np.zeros(g.size, complex), g), dctx.beta)
    assert np.all(f.values == 0)


def test_helmholtz_manufactured(dctx):
    g = density_grid(dctx)
    Y, b = g.nodes, dctx.beta
    gam = 2 * b.real
    src = (gam**2 - b**2) * np.exp(-gam * Y)
    f = helmholtz_halfline(ComplexField(src, g), b)
    # the decaying solution selected by the Green formula has f'(0) = beta f(0)
    exact = np.exp(-gam * Y) - (gam + b) / (2 * b) * np.exp(-b * Y)
    assert np.max(np.abs(f.values - exact)) < 1e-8
    assert f.info["deriv"][0] == pytest.approx(b * f.values[0], abs=1e-10)
    assert np.max(np.abs(helmholtz_operator(f.values, b, g) - src)) < 1e-7 * np.max(np.abs(src))


def test_helmholtz_real_beta_closed_form():
    g = panel_grid(lambda y: 0.5, 40.0)
    Y = g.nodes
    src = -3.0 * np.exp(-2 * Y)  # (d^2 - 1) f = g with f = -e^{-2Y} + e^{-Y}... checked below
    f = helmholtz_halfline(ComplexField(src.astype(complex), g), 1.0)
    exact = -np.exp(-2 * Y) + 1.5 * np.exp(-Y)
    assert np.max(np.abs(f.values - exact)) < 1e-12


def test_helmholtz_errors(dctx):
    g = density_grid(dctx)
    with pytest.raises(SolverError) as exc:
        helmholtz_halfline(ComplexField(np.ones(g.size, complex), g), dctx.beta)
    assert exc.value.code == "modes.growth"
    with pytest.raises(ConfigError):
        helmholtz_halfline(ComplexField(np.zeros(g.size, complex), g), -1.0 + 0j)


def test_density_zero(dctx):
    g = density_grid(dctx)
    z = ComplexField(np.zeros(g.size, complex), g)
    assert np.all(density_fixed_point(z, z, dctx).values == 0)


def test_density_contraction_and_residual():
    ok, _, m = check_helmholtz()
    for case in m["cases"]:
        assert case["contraction"] <= 2 * case["alpha"]
        assert case["density_residual"] < 1e-5
    assert ok


def test_slow_boundary(blasius):
    ctx = make_context(blasius, 1e-8, 0.3, 0.03, 0.0947 + 0.005j)
    sm = slow_mode(blasius, ctx)
    sb = slow_boundary(blasius, ctx, sm)
    assert sb.v0 / (-1j * ctx.alpha) == pytest.approx(sm.wall_value, abs=1e-10)
    assert math.isfinite(sb.info["u0_delta_scaled"])
    assert sb.info["u0_delta_scaled"] < 10


def test_slow_boundary_incompressible(blasius):
    ctx = make_context(blasius, 1e-8, 0.0, 0.03, 0.09 + 0.005j)
    sb = slow_boundary(blasius, ctx)
    assert sb.info["rho0"] == 0
    assert abs(sb.u0 - blasius.wall_slope) < 0.5 * blasius.wall_slope


def test_fast_boundary(blasius_ctx, blasius):
    fb = fast_boundary(blasius, blasius_ctx)
    assert fb.v0 / fb.u0 == pytest.approx(-1j * blasius_ctx.alpha * fb.info["wall_ratio"], abs=1e-10)
    assert 0.5 <= fb.info["u0_over_scale"] <= 2.0
    assert 0.5 <= fb.info["psi0_over_scale"] <= 2.0


def test_fast_boundary_nu_halving(blasius):
    c = 0.3 + 0.01j
    a = 0.1
    u = [abs(fast_boundary(blasius, make_context(blasius, nu, 0.3, a, c)).u0) for nu in (1e-8, 5e-9)]
    expected = 0.5**0.25
    assert abs(u[1] / u[0] / expected - 1) < 0.3
