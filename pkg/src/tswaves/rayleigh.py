"""Rayleigh-type equation and the slow (inviscid) mode.

The operator is

    Ray[phi] = (U - c) Lambda phi - d(A^{-1} U') phi,
    Lambda   = d(A^{-1} d) - alpha^2,

which can be written as d[A^{-1}(U-c)^2 d(phi/(U-c))] - alpha^2 (U-c) phi.
The inhomogeneous problem is solved by the iteration that inverts the first
part by two tail integrals and treats the alpha^2 term as a perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .grid import ComplexField, GridSpec, wave_grid
from .langer import WaveContext
from .profiles import Profile

__all__ = [
    "SlowMode",
    "context_grid",
    "ray_operator",
    "solve_ray_nonhomog",
    "slow_mode",
    "wall_ratio",
    "wall_ratio_asymptotic",
    "wall_value_asymptotic",
    "singular_split_constants",
    "choose_Y0",
]


def context_grid(ctx: WaveContext, y_max: float = 40.0, seams=(), p: int = 16) -> GridSpec:
    """Panel grid resolving the critical layer (scale c_i) and sublayer (|eps|^{1/3})."""
    sub = min(1.0 / ctx.kappa, abs(ctx.eps) ** (1.0 / 3.0))
    pole = min(ctx.c_i / ctx.U1c, ctx.c_i) if ctx.c_i > 0 else 1e-3 * sub
    return wave_grid(ctx.Yc, pole, sub, y_max=y_max, seams=seams, p=p)


def _coefficients(ctx: WaveContext, Y):
    P = ctx.profile
    U, U1, U2 = P.eval_k(Y, 0), P.eval_k(Y, 1), P.eval_k(Y, 2)
    A = 1.0 - ctx.m**2 * (U - ctx.c) ** 2
    A1 = -2.0 * ctx.m**2 * (U - ctx.c) * U1
    return U, U1, U2, A, A1


def ray_operator(phi, ctx: WaveContext, grid: GridSpec):
    """Apply Ray[.] to samples of phi on the grid (spectral derivatives)."""
    Y = grid.nodes
    U, U1, U2, A, A1 = _coefficients(ctx, Y)
    d1 = grid.deriv(phi)
    d2 = grid.deriv(d1)
    lam = d2 / A - A1 / A**2 * d1 - ctx.alpha**2 * phi
    return (U - ctx.c) * lam - (U2 / A - A1 * U1 / A**2) * phi


def _invert(src, ctx: WaveContext, grid: GridSpec, Umc, A):
    """(U - c) int_Y^inf A/(U-c)^2 int_{Y'}^inf src."""
    inner = grid.tailint(src)
    return Umc * grid.tailint(A * inner / Umc**2)


def solve_ray_nonhomog(F, ctx: WaveContext, grid: GridSpec | None = None, max_iters: int = 20, tol: float = 1e-14) -> ComplexField:
    """Solve Ray[phi] = F by the alpha^2-iteration; returns the summed series."""
    if isinstance(F, ComplexField):
        grid, F = F.grid, F.values
    if grid is None:
        raise ValueError("a grid is required when F is a raw array")
    if ctx.c_i <= 0:
        raise SolverError("rayleigh.regime", "c_i must be positive")
    F = np.asarray(F, dtype=complex)
    Y = grid.nodes
    U, _, _, A, _ = _coefficients(ctx, Y)
    Umc = U - ctx.c
    term = _invert(F, ctx, grid, Umc, A)
    total = term.copy()
    norms = [float(np.max(np.abs(term)))]
    ratios = []
    high = 0
    for _ in range(max_iters):
        if norms[-1] == 0.0 or norms[-1] <= tol * np.max(np.abs(total)):
            break
        term = ctx.alpha**2 * _invert(Umc * term, ctx, grid, Umc, A)
        total += term
        norms.append(float(np.max(np.abs(term))))
        ratios.append(norms[-1] / norms[-2])
        high = high + 1 if ratios[-1] >= 0.9 else 0
        if high >= 3:
            raise SolverError("rayleigh.divergence", f"term ratios {ratios[-3:]} do not contract")
    return ComplexField(total, grid, {"ratios": ratios, "iterations": len(ratios)})


@dataclass
class SlowMode:
    phi: ComplexField
    phi0: ComplexField
    wall_value: complex
    wall_slope: complex
    grid: GridSpec
    info: dict

    def deriv(self, k: int = 1):
        v = self.phi.values
        for _ in range(k):
            v = self.grid.deriv(v)
        return v


def slow_mode(profile: Profile, ctx: WaveContext, grid: GridSpec | None = None, max_iters: int = 20) -> SlowMode:
    """phi_Ray = phi_Ray^(0) + phi_R with Ray[phi_Ray] = 0."""
    if ctx.c_i <= 0:
        raise SolverError("rayleigh.regime", "slow mode needs c_i > 0")
    grid = context_grid(ctx) if grid is None else grid
    Y = grid.nodes
    U, U1, _, A, A1 = _coefficients(ctx, Y)
    Umc = U - ctx.c
    b = ctx.beta
    y_max = grid.y_max
    g = A * np.exp(-2.0 * b * Y) / Umc**2
    # beyond Y_max the integrand is A_inf e^{-2 beta Z}/(1-c)^2
    tail = ctx.A_inf / (1.0 - ctx.c) ** 2 * np.exp(-2.0 * b * y_max) / (2.0 * b)
    J = grid.tailint(g) + tail
    phi0 = 2.0 * b * np.exp(b * Y) * Umc * J
    rhs = -2.0 * b * U1 / A * phi0 + b * A1 / A**2 * Umc * phi0 - (b**2 / A - ctx.alpha**2) * Umc * phi0
    phiR = solve_ray_nonhomog(rhs, ctx, grid, max_iters=max_iters)
    phi = phi0 + phiR.values
    d1 = grid.deriv(phi)
    info = {"ratios": phiR.info["ratios"], "phiR_wall": complex(phiR.values[0])}
    return SlowMode(ComplexField(phi, grid), ComplexField(phi0, grid), complex(phi[0]), complex(d1[0]), grid, info)


def wall_value_asymptotic(ctx: WaveContext) -> complex:
    return -(1.0 - ctx.m**2) * ctx.c + ctx.beta / ctx.U1c


def wall_ratio_asymptotic(ctx: WaveContext) -> complex:
    u1 = ctx.U1w
    return -ctx.c / u1 + ctx.beta / ((1.0 - ctx.m**2) * u1**2)


def wall_ratio(mode: SlowMode, ctx: WaveContext | None = None) -> complex:
    if abs(mode.wall_slope) <= 1e-12:
        raise SolverError("rayleigh.degenerate-slope", "wall slope of the slow mode vanishes")
    return mode.wall_value / mode.wall_slope


def choose_Y0(ctx: WaveContext, grid: GridSpec) -> float:
    """First grid node where U >= c_r + 0.25."""
    U = ctx.profile.eval_k(grid.nodes, 0)
    idx = np.nonzero(U >= ctx.c_r + 0.25)[0]
    return float(grid.nodes[idx[0]]) if idx.size else grid.y_max


def singular_split_constants(ctx: WaveContext, grid: GridSpec, Y0: float | None = None, samples: int = 20):
    """|int_Y^{Y0} (U-c)^{-2} - 1/(U'(Y_c)(U(Y)-c))| / |log c_i| for Y < Y_c."""
    Y0 = choose_Y0(ctx, grid) if Y0 is None else Y0
    Y = grid.nodes
    U = ctx.profile.eval_k(Y, 0)
    T = grid.tailint(1.0 / (U - ctx.c) ** 2)
    T0 = grid.interp(T, [Y0])[0]
    ys = np.linspace(0.0, ctx.Yc, samples + 1)[:-1]
    Ts = grid.interp(T, ys) - T0
    Us = ctx.profile.eval_k(ys, 0)
    lead = 1.0 / (ctx.U1c * (Us - ctx.c))
    return np.abs(Ts - lead) / abs(math.log(ctx.c_i))
