"""Dispersion relation: residuals, temporal/spatial/mixed roots, nu-sweeps.

Two tiers are available.  The leading tier is

    F(c) = c - alpha/(U'(0) sqrt(1 - m^2)) + U'(0) tA(2,0)/tA(1,0),

the boundary-data tier compares the wall velocities of the computed slow and
fast modes, u_s v_f - u_f v_s.  Roots are found by the c-iteration
c <- c - F(c) followed by a damped Newton polish with a 2x2 real Jacobian.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .airy_bvp import ModifiedAiryPair, _fast_fields, fast_mode
from .airyfn import rotated_ratios
from .errors import ConfigError, SolverError
from .grid import GridSpec
from .langer import LangerMap, WaveContext, build_langer, make_context
from .modes import slow_boundary
from .profiles import Profile
from .rayleigh import context_grid, slow_mode

__all__ = [
    "DispersionProblem",
    "DispersionPoint",
    "ScalingFit",
    "dispersion_residual",
    "leading_seed",
    "airy_map",
    "derivative_estimate",
    "solve_temporal",
    "solve_mixed",
    "solve_spatial",
    "sweep_scaling",
    "fit_loglog",
]

TIERS = ("leading", "boundary")


@dataclass(frozen=True)
class DispersionProblem:
    """Builds wave contexts for a fixed profile, viscosity and Mach number."""

    profile: Profile
    nu: float
    m: float
    lam: float = 0.0
    M: float = 1.0
    y_max: float = 40.0
    band: tuple = (8.0, 48.0)

    def context(self, alpha: complex, c: complex) -> WaveContext:
        return make_context(self.profile, self.nu, self.m, alpha, c, self.lam)

    def langer(self, ctx: WaveContext) -> LangerMap:
        return build_langer(self.profile, ctx, self.M, self.y_max)

    @property
    def wall_slope(self) -> float:
        return self.profile.wall_slope

    def base_speed(self, alpha: complex) -> complex:
        """alpha / (U'(0) sqrt(1 - m^2))."""
        return alpha / (self.wall_slope * math.sqrt(1.0 - self.m**2))

    def amplitude(self, alpha: complex) -> float:
        """A = |alpha| nu^{-1/8}."""
        return abs(alpha) * self.nu ** -0.125


@dataclass
class DispersionPoint:
    alpha: complex
    c: complex
    residual: float
    iterations: int
    mode_kind: str
    tier: str
    info: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (np.floating, np.integer, np.bool_)):
                return v.item()
            return v

        return {
            "alpha": enc(complex(self.alpha)),
            "c": enc(complex(self.c)),
            "residual": self.residual,
            "iterations": self.iterations,
            "mode_kind": self.mode_kind,
            "tier": self.tier,
            "info": enc(self.info),
        }


@dataclass
class ScalingFit:
    exponent: float
    intercept: float
    r_squared: float
    points: list
    residuals: list = field(default_factory=list)
    failed: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.r_squared >= 0.98 and not self.failed

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": [[float(a), float(b)] for a, b in self.points],
            "residuals": [float(r) for r in self.residuals],
            "failed": list(self.failed),
        }


# ---------------------------------------------------------------------------
# residual evaluation


def _check_regime(problem: DispersionProblem, alpha: complex, c: complex, tier: str):
    if tier not in TIERS:
        raise ConfigError("dispersion.tier", f"unknown tier {tier!r}")
    if not 0.0 <= problem.m < 1.0:
        raise ConfigError("dispersion.m", "Mach number must satisfy 0 <= m < 1")
    ratio = abs(c) / abs(problem.base_speed(alpha))
    if not 0.1 <= ratio <= 10.0:
        raise SolverError("dispersion.invalid-regime", f"|c| U'(0) sqrt(1-m^2)/|alpha| = {ratio:.3g} outside [0.1, 10]")
    if c.imag < 0 or (tier == "boundary" and c.imag == 0):
        raise SolverError("dispersion.invalid-regime", "c_i must be positive")


def _leading_ratio(problem: DispersionProblem, ctx: WaveContext, grid: GridSpec | None):
    """tA(2,0)/tA(1,0) and the grid it was settled on."""
    lmap = problem.langer(ctx)
    if grid is None:
        fm = fast_mode(problem.profile, ctx, lmap)
        return fm.wall_ratio_leading, fm.w_a0.grid
    pair = ModifiedAiryPair(ctx, lmap)
    _, t1, t2, _, _ = _fast_fields(pair, ctx, grid)
    return complex(t2[0] / t1[0]), grid


def _evaluate(problem: DispersionProblem, alpha: complex, c: complex, tier: str, grids=None):
    """(normalized residual G, raw residual, relative size, grids).

    G has the form c - c_base + ... in both tiers, so c <- c - G is the
    c-iteration.  The raw residual is the tier's own definition.
    """
    ctx = problem.context(alpha, c)
    U1 = problem.wall_slope
    if tier == "leading":
        g = None if grids is None else grids[0]
        ratio, g = _leading_ratio(problem, ctx, g)
        F = c - problem.base_speed(alpha) + U1 * ratio
        return F, F, abs(F), (g,)
    gs = context_grid(ctx) if grids is None else grids[0]
    sm = slow_mode(problem.profile, ctx, gs)
    sb = slow_boundary(problem.profile, ctx, sm)
    if grids is None:
        lmap = problem.langer(ctx)
        fm = fast_mode(problem.profile, ctx, lmap)
        gf = fm.w_a0.grid
        psi0, dpsi0 = fm.psi0, fm.dpsi0
    else:
        gf = grids[1]
        pair = ModifiedAiryPair(ctx, problem.langer(ctx))
        _, t1, t2, _, _ = _fast_fields(pair, ctx, gf)
        psi0, dpsi0 = complex(t2[0]), complex(t1[0])
    fb_u, fb_v = dpsi0, -1j * alpha * psi0
    raw = sb.u0 * fb_v - fb_u * sb.v0
    G = -U1 * (sb.info["phi0"] / sb.u0 - psi0 / dpsi0)
    rel = abs(raw) / max(abs(sb.u0 * fb_v), 1e-300)
    return G, raw, rel, (gs, gf)


def dispersion_residual(alpha: complex, c: complex, problem: DispersionProblem, tier: str = "leading") -> complex:
    """Leading tier: c - alpha/(U'(0) sqrt(1-m^2)) + U'(0) tA(2,0)/tA(1,0).
    Boundary tier: u_s(0) v_f(0) - u_f(0) v_s(0)."""
    alpha, c = complex(alpha), complex(c)
    _check_regime(problem, alpha, c, tier)
    return complex(_evaluate(problem, alpha, c, tier)[1])


def airy_map(alpha: complex, c: complex, problem: DispersionProblem) -> complex:
    """U'(0) tA(2,0)/tA(1,0), the Airy part of the leading relation."""
    ctx = problem.context(complex(alpha), complex(c))
    ratio, _ = _leading_ratio(problem, ctx, None)
    return problem.wall_slope * ratio


def derivative_estimate(alpha: complex, c: complex, problem: DispersionProblem, h: float = 1e-8) -> dict:
    """Central-difference d(airy_map)/dc against -1 + Ai calA(2)/calA(1)^2 at kappa eta(0)."""
    alpha, c = complex(alpha), complex(c)
    ctx = problem.context(alpha, c)
    lmap = problem.langer(ctx)
    _, grid = _leading_ratio(problem, ctx, None)
    step = h * abs(c)
    vals = []
    for dc in (step, -step):
        cx = problem.context(alpha, c + dc)
        r, _ = _leading_ratio(problem, cx, grid)
        vals.append(problem.wall_slope * r)
    fd = (vals[0] - vals[1]) / (2 * step)
    z0 = complex(ctx.kappa * lmap.eta(np.array([0.0]))[0])
    _, _, third = rotated_ratios(z0, ctx.theta0)
    est = -1.0 + third
    return {"finite_difference": complex(fd), "estimate": complex(est), "relative_gap": abs(fd - est) / abs(est)}


# ---------------------------------------------------------------------------
# root finding


def leading_seed(alpha: complex, problem: DispersionProblem) -> complex:
    """c^(0) = alpha/(U'(0) sqrt(1 - m^2)) with a non-negative imaginary part."""
    c0 = problem.base_speed(complex(alpha))
    return complex(c0.real, max(c0.imag, 0.0))


def _jacobian(problem, alpha, c, tier, grids, rel_step=1e-7):
    h = rel_step * abs(c)
    cols = []
    for dc in (h, 1j * h):
        fp = _evaluate(problem, alpha, c + dc, tier, grids)[0]
        fm = _evaluate(problem, alpha, c - dc, tier, grids)[0]
        d = (fp - fm) / (2 * h)
        cols.append([d.real, d.imag])
    return np.array(cols).T


def _iterate(problem: DispersionProblem, alpha: complex, c_start: complex, tier: str, fp_iters: int, max_total: int, tol: float):
    """c-iteration followed by a damped Newton polish."""
    c = c_start
    increments = []
    history = []
    it = 0
    # c-iteration
    while it < fp_iters:
        G = _evaluate(problem, alpha, c, tier)[0]
        it += 1
        c_new = c - G
        increments.append(abs(c_new - c))
        history.append(c_new)
        if c_new.imag <= 0:
            c_new = complex(c_new.real, abs(c_new.imag) * 0.5 + 1e-12)
        c = c_new
        if increments[-1] <= 1e-9 * abs(c):
            break
        if len(increments) >= 3 and increments[-1] >= 0.9 * increments[-2] and increments[-2] >= 0.9 * increments[-3]:
            break
    ratios = [b / a for a, b in zip(increments[:-1], increments[1:]) if a > 0]
    # Newton polish
    G, raw, rel, grids = _evaluate(problem, alpha, c, tier)
    newton = 0
    while abs(G) > tol * max(abs(c), 1.0):
        if it >= max_total:
            raise SolverError("dispersion.no-convergence", f"|G| = {abs(G):.3g} after {it} iterations")
        J = _jacobian(problem, alpha, c, tier, grids)
        try:
            d = np.linalg.solve(J, [-G.real, -G.imag])
        except np.linalg.LinAlgError as exc:
            raise SolverError("dispersion.singular-jacobian", str(exc)) from exc
        step = complex(d[0], d[1])
        lam = 1.0
        accepted = False
        for _ in range(8):
            trial = c + lam * step
            if trial.imag > 0:
                try:
                    Gt, rawt, relt, gt = _evaluate(problem, alpha, trial, tier)
                except SolverError:
                    Gt = None
                if Gt is not None and abs(Gt) < abs(G):
                    accepted = True
                    break
            lam *= 0.5
        it += 1
        newton += 1
        if not accepted:
            if (c + step).imag <= 0:
                raise SolverError("dispersion.wrong-branch", "Newton steps toward c_i <= 0 (stable root)")
            raise SolverError("dispersion.no-convergence", "damped Newton step failed to reduce the residual")
        c, G, raw, rel, grids = trial, Gt, rawt, relt, gt
    return c, G, raw, rel, it, {"contraction_ratios": ratios, "fixed_point_iterations": len(increments), "newton_steps": newton, "c_history": history}


def solve_temporal(
    alpha_r: complex,
    problem: DispersionProblem,
    tier: str = "leading",
    c_start: complex | None = None,
    max_iters: int = 50,
    fp_iters: int = 30,
    tol: float = 1e-12,
    mode_kind: str = "temporal",
) -> DispersionPoint:
    """Root c of the dispersion relation at the given wavenumber.

    The boundary tier is seeded from the leading-tier root unless ``c_start``
    is given.
    """
    alpha = complex(alpha_r)
    if tier not in TIERS:
        raise ConfigError("dispersion.tier", f"unknown tier {tier!r}")
    info = {}
    if tier == "boundary" and c_start is None:
        lead = solve_temporal(alpha, problem, "leading", max_iters=max_iters, fp_iters=fp_iters, tol=tol, mode_kind=mode_kind)
        c_start = lead.c
        info["leading_c"] = lead.c
        info["leading_iterations"] = lead.iterations
    if c_start is None:
        c_start = leading_seed(alpha, problem)
    if tier == "boundary":
        # G'(c) is far from 1 here, so the c-iteration is replaced by Newton alone
        fp_iters = 0
    c, G, raw, rel, it, extra = _iterate(problem, alpha, complex(c_start), tier, fp_iters, max_iters, tol)
    info.update(extra)
    if c.imag <= 0:
        raise SolverError("dispersion.wrong-branch", f"root has c_i = {c.imag:.3g} <= 0")
    _check_regime(problem, alpha, c, tier)
    scale = problem.nu**0.125 / problem.amplitude(alpha)
    info["ci_over_scale"] = c.imag / scale
    info["ci_in_window"] = bool(0.1 <= c.imag / scale <= 10.0)
    info["growth_margin"] = c.imag - problem.base_speed(alpha).imag
    info["relative_residual"] = rel
    ctx = problem.context(alpha, c)
    lmap = problem.langer(ctx)
    info["kappa_eta0"] = complex(ctx.kappa * lmap.eta(np.array([0.0]))[0])
    residual = abs(raw) if tier == "leading" else rel
    return DispersionPoint(alpha, c, float(residual), it, mode_kind, tier, info)


def solve_mixed(alpha_r: float, gamma: float, problem: DispersionProblem, tier: str = "leading", **kw) -> DispersionPoint:
    """Root at alpha = alpha_r (1 - i gamma)."""
    return solve_temporal(complex(alpha_r, -gamma * alpha_r), problem, tier, mode_kind="mixed", **kw)


def solve_spatial(alpha_r: float, problem: DispersionProblem, tier: str = "leading", tol: float = 1e-13, max_outer: int = 30) -> DispersionPoint:
    """alpha^0 = alpha_r (1 - i gamma_0) with alpha^0 c real.

    The outer equation c_i/c_r = gamma is solved by the secant method.
    """
    alpha_r = float(alpha_r)
    if tier not in TIERS:
        raise ConfigError("dispersion.tier", f"unknown tier {tier!r}")

    def inner(gamma, start):
        return solve_temporal(complex(alpha_r, -gamma * alpha_r), problem, tier, c_start=start, mode_kind="spatial")

    p0 = solve_temporal(alpha_r, problem, tier)
    g0, gv0 = 0.0, p0.c.imag / p0.c.real
    start = p0.c if tier == "boundary" else None
    # theta0 = arctan(gamma)/3 must stay within pi/100
    g_cap = 0.999 * math.tan(3.0 * math.pi / 100.0)
    g1 = min(gv0, 0.5 * g_cap)
    p1 = inner(g1, start)
    gv1 = p1.c.imag / p1.c.real - g1
    total = p0.iterations + p1.iterations
    outer = 1
    f0 = gv0 - g0
    while abs(gv1) > tol:
        if outer >= max_outer:
            raise SolverError("dispersion.no-convergence", f"spatial outer residual {abs(gv1):.3g}")
        if gv1 == f0:
            raise SolverError("dispersion.no-convergence", "secant denominator vanished")
        g2 = g1 - gv1 * (g1 - g0) / (gv1 - f0)
        if g2 > g_cap:
            if g1 >= g_cap:
                raise SolverError("dispersion.sector", "spatial root needs |theta0| > pi/100")
            g2 = g_cap
        g0, f0 = g1, gv1
        g1 = g2
        p1 = inner(g1, p1.c if tier == "boundary" else None)
        gv1 = p1.c.imag / p1.c.real - g1
        total += p1.iterations
        outer += 1
    if g1 <= 0:
        raise SolverError("dispersion.sign-violation", f"gamma_0 = {g1:.3g} <= 0")
    alpha = complex(alpha_r, -g1 * alpha_r)
    prod = alpha * p1.c
    info = dict(p1.info)
    info.update(
        {
            "gamma0": g1,
            "outer_iterations": outer,
            "spatial_condition": abs(gv1),
            "im_alpha_c_relative": abs(prod.imag) / abs(prod),
            "temporal_c": p0.c,
        }
    )
    return DispersionPoint(alpha, p1.c, p1.residual, total, "spatial", tier, info)


# ---------------------------------------------------------------------------
# sweeps


def fit_loglog(xs, ys) -> tuple[float, float, float]:
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    res = stats.linregress(lx, ly)
    return float(res.slope), float(res.intercept), float(res.rvalue**2)


OBSERVABLES = ("c_i", "c_r_over_alpha", "alpha_i0")


def _sweep_point(args):
    profile, nu, A, m, observable, tier, lam = args
    problem = DispersionProblem(profile, nu, m, lam)
    alpha_r = A * nu**0.125
    if observable == "alpha_i0":
        pt = solve_spatial(alpha_r, problem, tier)
        return abs(pt.alpha.imag), pt.residual
    pt = solve_temporal(alpha_r, problem, tier)
    if observable == "c_i":
        return pt.c.imag, pt.residual
    return pt.c.real / alpha_r, pt.residual


def sweep_scaling(nu_list, A: float, m: float, observable: str, profile: Profile, tier: str = "leading", lam: float = 0.0, workers: int = 1) -> ScalingFit:
    """Least-squares slope of log(observable) against log(nu)."""
    if observable not in OBSERVABLES:
        raise ConfigError("dispersion.observable", f"unknown observable {observable!r}")
    nus = [float(n) for n in nu_list]
    jobs = [(profile, nu, A, m, observable, tier, lam) for nu in nus]
    results = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_point, j) for j in jobs]
            for nu, fut in zip(nus, futures):
                try:
                    results.append((nu, fut.result()))
                except SolverError as exc:
                    results.append((nu, exc))
    else:
        for nu, j in zip(nus, jobs):
            try:
                results.append((nu, _sweep_point(j)))
            except SolverError as exc:
                results.append((nu, exc))
    points = [(nu, r[0]) for nu, r in results if not isinstance(r, Exception)]
    resid = [r[1] for nu, r in results if not isinstance(r, Exception)]
    failed = [[nu, getattr(r, "code", "error")] for nu, r in results if isinstance(r, Exception)]
    if failed:
        fit = ScalingFit(math.nan, math.nan, math.nan, points, resid, failed)
        err = SolverError("dispersion.sweep-failed", f"{len(failed)} sweep point(s) failed")
        err.partial = fit
        raise err
    slope, icpt, r2 = fit_loglog([p[0] for p in points], [p[1] for p in points])
    return ScalingFit(slope, icpt, r2, points, resid, [])
