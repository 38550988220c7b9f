import cmath
import math

import numpy as np
import pytest

from tswaves.acceptance import check_fast_ratio
from tswaves.airy_bvp import (
    ModifiedAiryPair,
    airy_residual,
    fast_mode,
    fast_mode_grid,
    green_solve_airy,
    green_solve_corrected,
    wronskian_residual,
)
from tswaves.grid import ComplexField
from tswaves.langer import build_langer, make_context


def _setup(profile, ctx):
    lm = build_langer(profile, ctx)
    return lm, fast_mode_grid(ctx, lm)


def _source(ctx, g):
    Y = g.nodes
    return ComplexField((np.exp(-2 * Y) * (1 + np.sin(3 * Y))).astype(complex), g)


def test_zero_source(blasius, blasius_ctx):
    lm, g = _setup(blasius, blasius_ctx)
    sol = green_solve_airy(ComplexField(np.zeros(g.size, complex), g), blasius_ctx, lm)
    assert np.all(sol.w.values == 0) and np.all(sol.psi.values == 0)


def test_green_residual(blasius, blasius_ctx):
    lm, g = _setup(blasius, blasius_ctx)
    F = _source(blasius_ctx, g)
    sol = green_solve_airy(F, blasius_ctx, lm)
    assert np.max(airy_residual(sol, F, blasius_ctx, lm)) <= 1e-4 * np.max(np.abs(F.values))


def test_err_correction_contracts(blasius, blasius_ctx):
    lm, g = _setup(blasius, blasius_ctx)
    sol = green_solve_corrected(_source(blasius_ctx, g), blasius_ctx, lm)
    bound = 2 * abs(blasius_ctx.eps) ** (1 / 3) * abs(math.log(blasius_ctx.c_i))
    assert sol.info["ratios"] and max(sol.info["ratios"]) <= bound


def test_fast_ratio_closed_form():
    ok, _, m = check_fast_ratio()
    assert m["contexts_used"] > 0 and m["max_delta"] <= 0.2
    assert ok


def test_fast_mode_normalization_and_tilde_a(blasius, blasius_ctx):
    lm = build_langer(blasius, blasius_ctx)
    fm = fast_mode(blasius, blasius_ctx, lm)
    assert fm.w_a0.values[0] == pytest.approx(1.0, abs=1e-14)
    cmp = fm.comparison
    assert cmp["tildeA1_delta"] <= 10 * cmp["tildeA1_bound_unit"]


def test_fast_mode_correction_is_small(blasius, blasius_ctx):
    lm = build_langer(blasius, blasius_ctx)
    fm = fast_mode(blasius, blasius_ctx, lm, correct=True)
    assert fm.info["correction_relative"] < 0.5


def _wronskian(profile, ctx, orientation="A2A1", unit=False):
    lm, g = _setup(profile, ctx)
    return wronskian_residual(ModifiedAiryPair(ctx, lm), lm, ctx, g, orientation, unit)


def test_wronskian_representative(blasius, blasius_ctx):
    assert _wronskian(blasius, blasius_ctx) < 1e-6


def test_wronskian_sign_convention(blasius, blasius_ctx):
    # A1 dA2 - dA1 A2 equals -eps^{-1} d eta for this pair
    assert _wronskian(blasius, blasius_ctx, "A1A2") == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("theta0", [-0.01, 0.0, 0.01])
def test_wronskian_theta_invariance(blasius, theta0):
    alpha = 0.03 * cmath.exp(-3j * theta0)
    ctx = make_context(blasius, 1e-8, 0.3, alpha, 0.0947 + 0.005j)
    assert abs(ctx.theta0 - theta0) < 1e-15
    assert _wronskian(blasius, ctx) < 1e-6


def test_wronskian_negative_control(blasius, blasius_ctx):
    assert _wronskian(blasius, blasius_ctx, unit=True) >= 1e-2
