"""Airy-type boundary value problems on the Langer coordinate.

The pair

    A1(Y) = -i e^{-2 i theta0} |eps|^{-2/3} U'(Y_c)^{-1/3} Ai(e^{i(pi/6 - theta0)} kappa eta(Y)),
    A2(Y) = 2 pi Ai(e^{i(5pi/6 - theta0)} kappa eta(Y))

solves the approximate Airy equation up to the Err_1/Err_2 terms.  A1 decays
away from the wall, A2 decays toward it.  Both are handled as
``amplitude * exp(exponent)`` with the exponent of the scaled Airy function, so
that kernel products are formed before anything is exponentiated.

The Green formula is only evaluated on the part of the grid that resolves the
Airy length scale (the "zone").  Above the zone the kernel is much narrower
than a panel and the local outer solution -F/(U - c + eps alpha^2) is used.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .airyfn import rotated_ratios
from .errors import ConfigError, SolverError
from .grid import ComplexField, GridSpec
from .langer import LangerMap, WaveContext, err_terms
from .rayleigh import context_grid

__all__ = [
    "ModifiedAiryPair",
    "FastMode",
    "GreenSolution",
    "airy_zone_top",
    "fast_mode_grid",
    "green_solve_airy",
    "green_solve_corrected",
    "fast_mode",
    "wronskian",
    "wronskian_residual",
    "airy_residual",
    "region_masks",
    "kernel_log_abs",
]

EXP_LIMIT = 700.0


def _zeta(z):
    return (2.0 / 3.0) * np.power(z, 1.5)


class ModifiedAiryPair:
    """The two Langer-mapped Airy solutions and their Y-derivatives."""

    def __init__(self, ctx: WaveContext, lmap: LangerMap):
        self.ctx = ctx
        self.lmap = lmap
        th = ctx.theta0
        self.phase1 = math.pi / 6 - th
        self.phase2 = 5 * math.pi / 6 - th
        self.rot1 = cmath.exp(1j * self.phase1)
        self.rot2 = cmath.exp(1j * self.phase2)
        self.pref1 = -1j * cmath.exp(-2j * th) * abs(ctx.eps) ** (-2.0 / 3.0) * ctx.U1c ** (-1.0 / 3.0)
        self.pref2 = 2.0 * math.pi
        self.kappa = ctx.kappa

    def eta(self, Y):
        er, d1, d2 = self.lmap.evaluate(Y)
        return er + 1j * self.lmap.eta_i, d1, d2

    def parts(self, Y, j: int):
        """(a, a', a'', E) with d^k A_j = a^(k) * exp(E), k = 0, 1, 2."""
        eta, d1, d2 = self.eta(Y)
        rot = self.rot1 if j == 1 else self.rot2
        pref = self.pref1 if j == 1 else self.pref2
        z = rot * self.kappa * eta
        eai, eaip, _, _ = special.airye(z)
        E = -_zeta(z)
        s = rot * self.kappa
        a0 = pref * eai
        a1 = pref * s * d1 * eaip
        a2 = pref * ((s * d1) ** 2 * z * eai + s * d2 * eaip)
        return a0, a1, a2, E

    def values(self, Y, j: int):
        """(A_j, dA_j, d2A_j); raises when the exponent leaves double range."""
        a0, a1, a2, E = self.parts(Y, j)
        if np.any(E.real > EXP_LIMIT):
            raise SolverError("airy_bvp.overflow", "Airy factor exceeds the exponent guard")
        e = np.exp(E)
        return a0 * e, a1 * e, a2 * e


def wronskian(pair: ModifiedAiryPair, Y):
    """A1 dA2 - dA1 A2, formed with the exponents combined first."""
    a, ap, _, E1 = pair.parts(Y, 1)
    b, bp, _, E2 = pair.parts(Y, 2)
    S = E1 + E2
    if np.any(S.real > EXP_LIMIT):
        raise SolverError("airy_bvp.overflow", "paired exponent exceeds the guard")
    return (a * bp - ap * b) * np.exp(S)


def wronskian_residual(
    pair: ModifiedAiryPair,
    lmap: LangerMap,
    ctx: WaveContext,
    grid: GridSpec,
    orientation: str = "A1A2",
    unit_map_derivative: bool = False,
) -> float:
    """sup |W - eps^{-1} d eta| / |eps^{-1} d eta| over the grid.

    ``orientation="A1A2"`` uses W = A1 dA2 - dA1 A2; ``"A2A1"`` uses the
    opposite order, which is the one the Green kernel relies on.
    ``unit_map_derivative`` replaces d eta by 1 (a broken identity).
    """
    Y = grid.nodes
    W = wronskian(pair, Y)
    if orientation == "A2A1":
        W = -W
    elif orientation != "A1A2":
        raise ConfigError("airy_bvp.orientation", f"unknown orientation {orientation!r}")
    _, d1, _ = lmap.evaluate(Y)
    target = (np.ones_like(d1) if unit_map_derivative else d1) / ctx.eps
    return float(np.max(np.abs(W - target) / np.abs(target)))


# ---------------------------------------------------------------------------
# grids and regions


def airy_zone_top(ctx: WaveContext, extent: float = 40.0) -> float:
    sub = min(1.0 / ctx.kappa, abs(ctx.eps) ** (1.0 / 3.0))
    return ctx.Yc + extent * sub


def fast_mode_grid(ctx: WaveContext, lmap: LangerMap, y_max: float = 40.0, p: int = 16) -> GridSpec:
    return context_grid(ctx, y_max=y_max, seams=lmap.seams(), p=p)


def refine(grid: GridSpec) -> GridSpec:
    """Halve every panel."""
    b = grid.breaks
    mids = 0.5 * (b[1:] + b[:-1])
    nb = np.empty(2 * b.size - 1)
    nb[0::2] = b
    nb[1::2] = mids
    return GridSpec(nb, grid.p, grid.refinement_center)


def region_masks(lmap: LangerMap, ctx: WaveContext, grid: GridSpec, M: float | None = None):
    """Boolean masks (N^-, N, N^+) on the grid nodes; threshold |kappa eta| = 3M."""
    M = lmap.cutoff_M if M is None else M
    Y = grid.nodes
    eta = lmap.eta(Y)
    big = np.abs(ctx.kappa * eta) >= 3.0 * M
    below = Y <= ctx.Yc
    return big & below, ~big, big & ~below


def kernel_log_abs(pair: ModifiedAiryPair, Y: float, Z):
    """log |A1(max(Y,Z)) A2(min(Y,Z))| for a fixed Y and an array of Z."""
    Z = np.atleast_1d(np.asarray(Z, dtype=float))
    hi = np.maximum(Z, Y)
    lo = np.minimum(Z, Y)
    a, _, _, E1 = pair.parts(hi, 1)
    b, _, _, E2 = pair.parts(lo, 2)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(a * b)) + (E1 + E2).real


# ---------------------------------------------------------------------------
# Green solver


@dataclass
class GreenSolution:
    w: ComplexField
    psi: ComplexField
    zone: np.ndarray  # mask of nodes where the kernel is resolved
    info: dict = field(default_factory=dict)


def _scaled_running(grid: GridSpec, amp, E, g, from_left: bool):
    """Scaled cumulative integral of amp*exp(E)*g.

    Returns (J, s) with the true integral equal to J * exp(s), where s is
    Re E at the node.  ``from_left`` integrates over [0, Y], otherwise
    over [Y, top].
    """
    idx = grid._idx
    half = grid._half
    Q = grid._Q
    K = idx.shape[0]
    s = E.real
    h = amp * g
    J = np.zeros(grid.size, dtype=complex)
    order = range(K) if from_left else range(K - 1, -1, -1)
    carry = 0j
    carry_s = None
    for k in order:
        ii = idx[k]
        Ek = E[ii]
        sk = s[ii]
        # exponent differences E(Z) - s(Y_j): rows j, columns Z
        X = Ek[None, :] - sk[:, None]
        if np.any(X.real > EXP_LIMIT):
            raise SolverError("airy_bvp.overflow", "kernel exponent exceeds the guard after pairing")
        W = np.exp(X)
        if from_left:
            loc = ((Q * W) @ h[ii]) * half[k]
            if carry_s is not None:
                loc = loc + carry * np.exp(carry_s - sk)
            J[ii] = loc
            carry, carry_s = loc[-1], sk[-1]
        else:
            # int_{Y_j}^{b} = int_a^b - int_a^{Y_j}
            full = (Q[-1][None, :] * W) @ h[ii]
            part = (Q * W) @ h[ii]
            loc = (full - part) * half[k]
            if carry_s is not None:
                loc = loc + carry * np.exp(carry_s - sk)
            J[ii] = loc
            carry, carry_s = loc[0], sk[0]
    return J, s


def _zone_grid(grid: GridSpec, top: float):
    """Sub-grid of whole panels inside [0, top] and its node count."""
    b = grid.breaks
    kmax = int(np.searchsorted(b, top, side="right")) - 1
    kmax = max(1, min(kmax, b.size - 1))
    sub = GridSpec(b[: kmax + 1], grid.p, grid.refinement_center)
    return sub, sub.size


def green_solve_airy(
    F,
    ctx: WaveContext,
    lmap: LangerMap,
    grid: GridSpec | None = None,
    zone_extent: float = 40.0,
    delta0: float = 0.1,
) -> GreenSolution:
    """(w_app, psi_app) for the source F via the Langer-Airy Green kernel."""
    if isinstance(F, ComplexField):
        grid, Fv = F.grid, F.values
    else:
        if grid is None:
            raise ValueError("a grid is required when F is a raw array")
        Fv = np.asarray(F, dtype=complex)
    in_band = abs(ctx.kappa * lmap.eta_i) < delta0
    if abs(ctx.theta0) >= math.pi / 3:
        raise SolverError("airy_bvp.sector-violation", "theta0 leaves the Airy decay sector")
    Y = grid.nodes
    w = np.zeros(grid.size, dtype=complex)
    if np.any(Fv != 0):
        pair = ModifiedAiryPair(ctx, lmap)
        zg, nz = _zone_grid(grid, airy_zone_top(ctx, zone_extent))
        Yz = zg.nodes
        _, d1, _ = lmap.evaluate(Yz)
        g = Fv[:nz] / d1
        a, _, _, E1 = pair.parts(Yz, 1)
        b, _, _, E2 = pair.parts(Yz, 2)
        J2, s2 = _scaled_running(zg, b, E2, g, from_left=True)
        J1, s1 = _scaled_running(zg, a, E1, g, from_left=False)
        X1 = E1 + s2
        X2 = E2 + s1
        if np.any(X1.real > EXP_LIMIT) or np.any(X2.real > EXP_LIMIT):
            raise SolverError("airy_bvp.overflow", "paired exponent exceeds the guard")
        w[:nz] = a * np.exp(X1) * J2 + b * np.exp(X2) * J1
        if nz < grid.size:
            U = ctx.profile.eval_k(Y[nz:], 0)
            w[nz:] = -Fv[nz:] / (U - ctx.c + ctx.eps * ctx.alpha**2)
            # decaying continuation of the zone solution
            Yt = Y[nz:]
            at, _, _, Et = pair.parts(Yt, 1)
            Xt = Et + s2[-1]
            if np.any(Xt.real > EXP_LIMIT):
                raise SolverError("airy_bvp.overflow", "paired exponent exceeds the guard")
            with np.errstate(under="ignore"):
                w[nz:] += at * np.exp(Xt) * J2[-1]
        zone = np.zeros(grid.size, dtype=bool)
        zone[:nz] = True
    else:
        zone = np.zeros(grid.size, dtype=bool)
        zone[: _zone_grid(grid, airy_zone_top(ctx, zone_extent))[1]] = True
    A = ctx.A(Y)
    psi = grid.tailint(A * grid.tailint(w))
    return GreenSolution(ComplexField(w, grid), ComplexField(psi, grid), zone, {"in_band": in_band})


def airy_residual(sol: GreenSolution, F, ctx: WaveContext, lmap: LangerMap, trim: int = 2):
    """|eps (d^2 - alpha^2) w - (U - c) w - F - Err_1 w - Err_2 dw| on zone-interior nodes.

    Derivatives are taken on the zone sub-grid so that the outer approximation
    above the zone does not enter the stencils of the last zone panel.
    """
    grid = sol.w.grid
    Fv = F.values if isinstance(F, ComplexField) else np.asarray(F)
    nz = int(np.count_nonzero(sol.zone))
    zg = GridSpec(grid.breaks[: (nz - 1) // (grid.p - 1) + 1], grid.p, grid.refinement_center)
    w = sol.w.values[:nz]
    Y = zg.nodes
    d1 = zg.deriv(w)
    d2 = zg.deriv(d1)
    U = ctx.profile.eval_k(Y, 0)
    e1, e2 = err_terms(lmap, ctx, Y)
    r = ctx.eps * (d2 - ctx.alpha**2 * w) - (U - ctx.c) * w - Fv[:nz] - e1 * w - e2 * d1
    if trim > 0 and nz > 2 * trim:
        r = r[trim:-trim]
    return np.abs(r)


def green_solve_corrected(
    F,
    ctx: WaveContext,
    lmap: LangerMap,
    grid: GridSpec | None = None,
    max_iters: int = 12,
    tol: float = 1e-13,
) -> GreenSolution:
    """Remove the Err terms by iterating the Green solve on -Err_1 w - Err_2 dw."""
    first = green_solve_airy(F, ctx, lmap, grid)
    grid = first.w.grid
    Y = grid.nodes
    e1, e2 = err_terms(lmap, ctx, Y)
    total = first.w.values.copy()
    term = first.w.values
    norms = [float(np.max(np.abs(term)))]
    ratios = []
    for _ in range(max_iters):
        if norms[-1] <= tol * max(np.max(np.abs(total)), 1e-300):
            break
        src = -(e1 * term + e2 * grid.deriv(term))
        term = green_solve_airy(src, ctx, lmap, grid).w.values
        total = total + term
        norms.append(float(np.max(np.abs(term))))
        ratios.append(norms[-1] / norms[-2])
        if len(ratios) >= 3 and min(ratios[-3:]) >= 0.9:
            raise SolverError("airy_bvp.divergence", f"Err iteration ratios {ratios[-3:]}")
    A = ctx.A(Y)
    psi = grid.tailint(A * grid.tailint(total))
    info = {"ratios": ratios, "iterations": len(ratios)}
    return GreenSolution(ComplexField(total, grid), ComplexField(psi, grid), first.zone, info)


# ---------------------------------------------------------------------------
# homogeneous fast mode


@dataclass
class FastMode:
    w_a0: ComplexField
    psi_a0: ComplexField
    tildeA1_0: complex
    tildeA2_0: complex
    wall_ratio: complex
    wall_ratio_leading: complex
    psi0: complex  # psi_a(0) for the normalization w_a0(0) = 1
    dpsi0: complex
    comparison: dict
    info: dict


def _fast_fields(pair: ModifiedAiryPair, ctx: WaveContext, grid: GridSpec):
    Y = grid.nodes
    a, ap, _, E = pair.parts(Y, 1)
    a0, _, _, E0 = pair.parts(np.array([0.0]), 1)
    # Ai(z(Y))/Ai(z(0)); the prefactor of A1 cancels
    X = E - E0[0]
    if np.any(X.real > EXP_LIMIT):
        raise SolverError("airy_bvp.overflow", "w_a0 exponent exceeds the guard")
    w = a / a0[0] * np.exp(X)
    A = ctx.A(Y)
    t1 = -A * grid.tailint(w)  # tilde A(1, Y) / Ai(z(0))
    t2 = -grid.tailint(t1)
    return w, t1, t2, a0[0] / pair.pref1, E0[0]


def fast_mode(
    profile,
    ctx: WaveContext,
    lmap: LangerMap,
    grid: GridSpec | None = None,
    correct: bool = False,
    rtol: float = 1e-10,
    max_depth: int = 4,
    c0: float = 0.1,
    c_upper: float = 1.0,
) -> FastMode:
    """Leading fast mode psi_a^(0), w_a^(0) and the wall ratio tilde A(2,0)/tilde A(1,0)."""
    pair = ModifiedAiryPair(ctx, lmap)
    grid = fast_mode_grid(ctx, lmap) if grid is None else grid
    w, t1, t2, eai0, E0 = _fast_fields(pair, ctx, grid)
    ratio = t2[0] / t1[0]
    depth = 0
    history = [ratio]
    while True:
        fine = refine(grid)
        wf, t1f, t2f, _, _ = _fast_fields(pair, ctx, fine)
        rf = t2f[0] / t1f[0]
        history.append(rf)
        depth += 1
        if abs(rf - ratio) <= rtol * abs(rf):
            break
        if depth >= max_depth:
            raise SolverError("airy_bvp.quadrature-stall", f"wall ratio not settled after {depth} refinements")
        grid, w, t1, t2, ratio = fine, wf, t1f, t2f, rf
    # Ai(z(0)) = eai0 exp(E0); tilde A values carry that factor
    scale_log = E0
    if scale_log.real > EXP_LIMIT:
        raise SolverError("airy_bvp.overflow", "Ai(z(0)) exceeds the exponent guard")
    ai0 = eai0 * np.exp(scale_log)
    tA1 = complex(t1[0] * ai0)
    tA2 = complex(t2[0] * ai0)
    z0 = ctx.kappa * lmap.eta(np.array([0.0]))[0]
    eps_half = abs(ctx.eps) ** 0.5 * ctx.c_r ** -0.5
    closed = -cmath.exp(1j * (math.pi / 4 - ctx.theta0 / 2)) * eps_half
    r21, ai_over_a1, _ = rotated_ratios(z0, ctx.theta0)
    rot_phase = cmath.exp(1j * pair.phase1)
    # calA(1, z0)/Ai(z(0)) = 1/ai_over_a1
    cal1_scaled = 1.0 / ai_over_a1
    comparison = {
        "kappa_eta0": [z0.real, z0.imag],
        "closed_form": closed,
        "closed_form_delta": abs(ratio - closed) / abs(eps_half),
        "kappa_inverse_ratio": r21 / ctx.kappa,
        "tildeA1_scaled": complex(t1[0]),
        "calA1_scaled_over_kappa": complex(cal1_scaled / ctx.kappa),
        "tildeA1_delta": abs(t1[0] - cal1_scaled / ctx.kappa),
        "tildeA1_bound_unit": abs(cal1_scaled / ctx.kappa) * (abs(ctx.c) + 1.0 / ctx.kappa),
    }
    eps13 = abs(ctx.eps) ** (1.0 / 3.0)
    window = c0 * abs(ctx.eps) ** 0.5 <= ctx.c_i <= c_upper * eps13
    info = {
        "refinements": depth,
        "ratio_history": history,
        "in_window": bool(window),
        "rotation_phase": rot_phase,
        "grid_nodes": grid.size,
    }
    psi0, dpsi0 = complex(t2[0]), complex(t1[0])
    wall = ratio
    if correct:
        Y = grid.nodes
        dw = grid.deriv(w)
        e1, e2 = err_terms(lmap, ctx, Y)
        corr = green_solve_corrected(-(e1 * w + e2 * dw), ctx, lmap, grid)
        werr = corr.w.values
        # Lambda psi_err = w_err + alpha^2 psi_a0, with the alpha^2 psi_err term iterated
        A = ctx.A(Y)
        src = werr + ctx.alpha**2 * t2
        perr = grid.tailint(A * grid.tailint(src))
        for _ in range(40):
            nxt = grid.tailint(A * grid.tailint(src + ctx.alpha**2 * perr))
            done = np.max(np.abs(nxt - perr)) <= 1e-14 * max(np.max(np.abs(nxt)), 1e-300)
            perr = nxt
            if done:
                break
        dperr = grid.deriv(perr)
        psi0 = complex(t2[0] + perr[0])
        dpsi0 = complex(t1[0] + dperr[0])
        wall = psi0 / dpsi0
        info["err_ratios"] = corr.info["ratios"]
        info["correction_wall"] = complex(perr[0])
        info["correction_relative"] = abs(perr[0]) / abs(t2[0])
    return FastMode(
        ComplexField(w, grid),
        ComplexField(t2, grid),
        tA1,
        tA2,
        complex(wall),
        complex(ratio),
        psi0,
        dpsi0,
        comparison,
        info,
    )
