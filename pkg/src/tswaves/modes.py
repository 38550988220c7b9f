"""Wall data of the slow and fast modes and the half-line density solver.

The density of the quasi-compressible system solves

    (d^2 - beta^2) rho = alpha^2 (A - A_inf) rho
                         - i m^2 alpha sqrt(nu) (1 + lambda) (d^2 - alpha^2)((U - c) rho)
                         - i alpha m^2 sqrt(nu) U'' rho - i alpha m^2 q1 - m^2 dq2,

which is inverted by the decaying Green function of d^2 - beta^2 and iterated
on the right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .airy_bvp import FastMode, fast_mode
from .errors import ConfigError, SolverError
from .grid import ComplexField, GridSpec, panel_grid
from .langer import LangerMap, WaveContext, build_langer
from .rayleigh import SlowMode, slow_mode

__all__ = [
    "ModeBoundary",
    "helmholtz_halfline",
    "helmholtz_operator",
    "density_grid",
    "density_fixed_point",
    "stokes_rho_residual",
    "slow_boundary",
    "fast_boundary",
]


@dataclass
class ModeBoundary:
    u0: complex
    v0: complex
    kind: str  # "slow" or "fast"
    info: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "u0": [self.u0.real, self.u0.imag], "v0": [self.v0.real, self.v0.imag]}
        for k, v in self.info.items():
            out[k] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


# ---------------------------------------------------------------------------
# half-line Helmholtz problem


def _weighted_running(grid: GridSpec, g, beta: complex):
    """L(Y) = int_0^Y e^{-beta(Y-Z)} g dZ and R(Y) = int_Y^top e^{-beta(Z-Y)} g dZ.

    Both are accumulated panel by panel; the carried value is multiplied by the
    decaying factor across each panel, so nothing grows.
    """
    idx, half, Q = grid._idx, grid._half, grid._Q
    Y = grid.nodes
    L = np.zeros(grid.size, dtype=complex)
    R = np.zeros(grid.size, dtype=complex)
    carry = 0j
    for k in range(idx.shape[0]):
        ii = idx[k]
        y = Y[ii]
        W = np.exp(-beta * (y[:, None] - y[None, :]))
        loc = ((Q * W) @ g[ii]) * half[k] + carry * np.exp(-beta * (y - y[0]))
        L[ii] = loc
        carry = loc[-1]
    carry = 0j
    for k in range(idx.shape[0] - 1, -1, -1):
        ii = idx[k]
        y = Y[ii]
        W = np.exp(-beta * (y[None, :] - y[:, None]))
        loc = (((Q[-1][None, :] - Q) * W) @ g[ii]) * half[k] + carry * np.exp(-beta * (y[-1] - y))
        R[ii] = loc
        carry = loc[0]
    return L, R


def helmholtz_halfline(g, beta: complex, grid: GridSpec | None = None, tail_tol: float = 1e-8) -> ComplexField:
    """Decaying solution of (d^2 - beta^2) f = g on [0, inf).

    f = -(L + R)/(2 beta) with L, R the one-sided exponential convolutions.
    The returned field carries f' in ``info["deriv"]``.
    """
    if isinstance(g, ComplexField):
        grid, gv = g.grid, g.values
    else:
        if grid is None:
            raise ValueError("a grid is required when g is a raw array")
        gv = np.asarray(g, dtype=complex)
    beta = complex(beta)
    if beta.real <= 0:
        raise ConfigError("modes.beta", "Re beta must be positive")
    scale = float(np.max(np.abs(gv))) if gv.size else 0.0
    if scale == 0.0:
        z = np.zeros(grid.size, dtype=complex)
        return ComplexField(z, grid, {"deriv": z.copy()})
    if abs(gv[-1]) > tail_tol * scale:
        raise SolverError("modes.growth", f"source does not decay: |g(top)|/sup|g| = {abs(gv[-1]) / scale:.3g}")
    L, R = _weighted_running(grid, gv, beta)
    f = -(L + R) / (2.0 * beta)
    return ComplexField(f, grid, {"deriv": 0.5 * (L - R)})


def helmholtz_operator(f, beta: complex, grid: GridSpec):
    """(d^2 - beta^2) f by spectral differentiation."""
    return grid.deriv(grid.deriv(f)) - beta**2 * np.asarray(f)


# ---------------------------------------------------------------------------
# density equation


def density_grid(ctx: WaveContext, p: int = 16, decay_lengths: float = 40.0) -> GridSpec:
    """Grid for the density: O(1) panels near the wall, out to e^{-40} of the far-field decay."""
    y_max = max(40.0, decay_lengths / ctx.beta.real)
    far = min(2.0, max(0.5, 0.5 / abs(ctx.beta)))
    return panel_grid(lambda y: min(0.25 + 0.25 * y, far), y_max, p=p)


def _g_terms(rho, ctx: WaveContext, grid: GridSpec):
    Y = grid.nodes
    P = ctx.profile
    U, U2 = P.eval_k(Y, 0), P.eval_k(Y, 2)
    A = 1.0 - ctx.m**2 * (U - ctx.c) ** 2
    sq = math.sqrt(ctx.nu)
    a = ctx.alpha
    w = (U - ctx.c) * rho
    lap_w = grid.deriv(grid.deriv(w)) - a**2 * w
    g1 = a**2 * (A - ctx.A_inf) * rho
    g2 = -1j * ctx.m**2 * a * sq * (1.0 + ctx.lam) * lap_w - 1j * a * ctx.m**2 * sq * U2 * rho
    return g1 + g2


def _taper(g, grid: GridSpec, width: float = 2.0):
    """Zero the source smoothly over the last ``width`` of the grid (well below round-off there)."""
    Y = grid.nodes
    t = np.clip((grid.y_max - Y) / width, 0.0, 1.0)
    return g * t * t * (3.0 - 2.0 * t)


def density_fixed_point(q1, q2, ctx: WaveContext, max_iters: int = 40, tol: float = 1e-13) -> ComplexField:
    """Sum of the density iterates; increment ratios are reported in ``info``."""
    if not isinstance(q1, ComplexField) or not isinstance(q2, ComplexField):
        raise ValueError("q1 and q2 must be ComplexFields on a common grid")
    grid = q1.grid
    if q2.grid is not grid:
        raise ValueError("q1 and q2 must share a grid")
    m2 = ctx.m**2
    F = -1j * ctx.alpha * m2 * q1.values - m2 * grid.deriv(q2.values)
    term = helmholtz_halfline(F, ctx.beta, grid).values
    total = term.copy()
    norms = [float(np.max(np.abs(term)))]
    ratios = []
    for _ in range(max_iters):
        if norms[-1] == 0.0 or norms[-1] <= tol * float(np.max(np.abs(total))):
            break
        G = _taper(_g_terms(term, ctx, grid), grid)
        term = helmholtz_halfline(G, ctx.beta, grid).values
        total = total + term
        norms.append(float(np.max(np.abs(term))))
        ratios.append(norms[-1] / norms[-2])
        if ratios[-1] >= 0.9:
            raise SolverError("modes.divergence", f"density increments contract by {ratios[-1]:.3g}")
    return ComplexField(total, grid, {"ratios": ratios, "iterations": len(ratios)})


def stokes_rho_residual(rho: ComplexField, q1: ComplexField, q2: ComplexField, ctx: WaveContext, trim: float = 0.5):
    """Relative residual of the density equation in its m^2-multiplied form.

    Evaluated on nodes whose height is below ``(1 - trim)`` of the grid top, where
    the truncated tail of the source plays no role.
    """
    grid = rho.grid
    r = rho.values
    m2 = ctx.m**2
    lhs = helmholtz_operator(r, ctx.beta, grid) - _g_terms(r, ctx, grid)
    rhs = -1j * ctx.alpha * m2 * q1.values - m2 * grid.deriv(q2.values)
    sel = grid.nodes <= (1.0 - trim) * grid.y_max
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    return float(np.max(np.abs(lhs[sel] - rhs[sel]))) / scale


# ---------------------------------------------------------------------------
# wall data


def _wall_rho(ctx: WaveContext, phi0, d1, d2, d3):
    """Density at the wall of a homogeneous mode with stream function phi."""
    A0 = 1.0 - ctx.m**2 * ctx.c**2
    U1 = ctx.U1w
    return ctx.m**2 / A0 * (ctx.eps * (d3 - ctx.alpha**2 * d1) + ctx.c * d1 + U1 * phi0)


def slow_boundary(profile, ctx: WaveContext, mode: SlowMode | None = None) -> ModeBoundary:
    """Wall velocities (u, v) of the slow mode."""
    mode = slow_mode(profile, ctx) if mode is None else mode
    g = mode.grid
    phi = mode.phi.values
    d1 = g.deriv(phi)
    d2 = g.deriv(d1)
    d3 = g.deriv(d2)
    phi0 = complex(phi[0])
    rho0 = complex(_wall_rho(ctx, phi0, d1[0], d2[0], d3[0]))
    u0 = complex(d1[0]) + ctx.c * rho0
    v0 = -1j * ctx.alpha * phi0
    lead = (1.0 - ctx.m**2) * ctx.U1w
    log_ci = abs(math.log(ctx.c_i))
    info = {
        "phi0": phi0,
        "rho0": rho0,
        "u0_leading": lead,
        "u0_delta": abs(u0 - lead),
        "u0_delta_scaled": abs(u0 - lead) / (abs(ctx.alpha) * log_ci**4),
        "wall_ratio": phi0 / complex(d1[0]),
    }
    return ModeBoundary(u0, v0, "slow", info)


def fast_boundary(profile, ctx: WaveContext, lmap: LangerMap | None = None, mode: FastMode | None = None, correct: bool = False) -> ModeBoundary:
    """Wall velocities (u, v) of the fast mode, normalized by w(0) = 1."""
    if mode is None:
        lmap = build_langer(profile, ctx) if lmap is None else lmap
        mode = fast_mode(profile, ctx, lmap, correct=correct)
    u0 = complex(mode.dpsi0)
    v0 = -1j * ctx.alpha * complex(mode.psi0)
    eps = abs(ctx.eps)
    cabs = abs(ctx.c)
    info = {
        "psi0": complex(mode.psi0),
        "wall_ratio": complex(mode.wall_ratio),
        "u0_scale": eps**0.5 * cabs**-0.5,
        "psi0_scale": eps / cabs,
        "u0_over_scale": abs(u0) / (eps**0.5 * cabs**-0.5),
        "psi0_over_scale": abs(mode.psi0) / (eps / cabs),
    }
    return ModeBoundary(u0, v0, "fast", info)
