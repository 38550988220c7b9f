import math

import numpy as np
import pytest

from tswaves.acceptance import check_rayleigh
from tswaves.errors import SolverError
from tswaves.grid import ComplexField
from tswaves.langer import make_context
from tswaves.rayleigh import (
    context_grid,
    ray_operator,
    singular_split_constants,
    slow_mode,
    solve_ray_nonhomog,
    wall_ratio,
    wall_ratio_asymptotic,
)


def test_zero_source(blasius_ctx):
    g = context_grid(blasius_ctx)
    phi = solve_ray_nonhomog(ComplexField(np.zeros(g.size, complex), g), blasius_ctx)
    assert np.all(phi.values == 0)


def test_nonhomogeneous_residual(blasius_ctx):
    g = context_grid(blasius_ctx)
    Y = g.nodes
    F = np.exp(-Y) * (1 + Y)
    phi = solve_ray_nonhomog(ComplexField(F.astype(complex), g), blasius_ctx)
    r = np.abs(ray_operator(phi.values, blasius_ctx, g) - F)
    interior = (Y > 0.05) & (Y < 20)
    assert np.max(r[interior]) <= 1e-5 * np.max(np.abs(F))
    a = abs(blasius_ctx.alpha)
    bound = 2 * a**2 * abs(math.log(blasius_ctx.c_i))
    assert max(phi.info["ratios"]) <= bound


def test_requires_growing_mode(blasius):
    ctx = make_context(blasius, 1e-8, 0.3, 0.03, 0.1)
    with pytest.raises(SolverError) as exc:
        slow_mode(blasius, ctx)
    assert exc.value.code == "rayleigh.regime"


def test_wall_value_constant_bounded():
    ok, _, m = check_rayleigh()
    assert m["K_max"] <= 50 and m["no_growth"]
    assert ok


def test_wall_slope(blasius_ctx, blasius):
    sm = slow_mode(blasius, blasius_ctx)
    lead = (1 - blasius_ctx.m**2) * blasius.wall_slope
    Kp = abs(sm.wall_slope - lead) / (abs(blasius_ctx.alpha) * abs(math.log(blasius_ctx.c_i)))
    assert Kp < 10


def test_far_field_incompressible(blasius):
    ctx = make_context(blasius, 1e-8, 0.0, 0.03, 0.1 + 0.005j)
    sm = slow_mode(blasius, ctx)
    Y = sm.grid.nodes
    sel = (Y >= ctx.Yc + 2) & (Y <= 30)
    U = blasius.eval_k(Y[sel])
    far = (U - ctx.c) * np.exp(-ctx.beta * Y[sel]) / (1 - ctx.c) ** 2
    ratio = sm.phi.values[sel] / far
    # the mode is defined up to the normalization fixed at infinity
    assert np.max(np.abs(ratio - 1)) < 5e-2


def test_wall_ratio_against_closed_form(blasius):
    # away from the base speed, where the two leading terms do not cancel
    ctx = make_context(blasius, 1e-8, 0.3, 0.03, 0.05 + 0.005j)
    r = wall_ratio(slow_mode(blasius, ctx))
    ref = wall_ratio_asymptotic(ctx)
    assert abs(r - ref) / abs(ref) < 0.15


def test_wall_ratio_continuous_in_m(blasius):
    c = 0.1 + 0.005j
    r0 = wall_ratio(slow_mode(blasius, make_context(blasius, 1e-8, 0.0, 0.03, c)))
    r1 = wall_ratio(slow_mode(blasius, make_context(blasius, 1e-8, 1e-6, 0.03, c)))
    assert abs(r1 - r0) / abs(r0) < 1e-5


def test_singular_split_bounded(blasius_ctx):
    g = context_grid(blasius_ctx)
    assert np.max(singular_split_constants(blasius_ctx, g)) < 50
