"""Acceptance harness: one function per criterion, each returning a CriterionResult.

Every check is self-contained (it builds its own profiles and contexts) so it
can be run from the command line or from the test suite.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .airy_bvp import ModifiedAiryPair, fast_mode, fast_mode_grid, wronskian_residual
from .airyfn import OMEGA, airy_reference, eval_airy
from .dispersion import DispersionProblem, fit_loglog, solve_mixed, solve_spatial, solve_temporal, sweep_scaling
from .errors import ConfigError
from .grid import ComplexField, panel_grid
from .langer import build_langer, make_context
from .modes import density_fixed_point, density_grid, helmholtz_halfline, helmholtz_operator, stokes_rho_residual
from .profiles import StretchedProfile, blasius_profile, solve_blasius
from .rayleigh import slow_mode, wall_value_asymptotic
from .spectral import build_operator, solve_spectrum, track_eigenvalue

__all__ = ["CriterionResult", "CRITERIA", "resolve", "run_criterion", "scaling_profile"]

# Blasius in a wall variable scaled so that the unstable band sits at A = |alpha| nu^{-1/8} ~ 10
SCALING_STRETCH = 6.6
SCALING_A = 10.0
SWEEP_NU = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7)


def scaling_profile():
    return StretchedProfile(blasius_profile(), SCALING_STRETCH)


@dataclass
class CriterionResult:
    number: int
    ident: str
    title: str
    passed: bool
    summary: str
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:>2} {self.ident}: {self.summary}"

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "number": self.number,
            "id": self.ident,
            "title": self.title,
            "passed": self.passed,
            "summary": self.summary,
            "metrics": _plain(self.metrics),
        }
        if timing:
            out["elapsed_s"] = self.elapsed
        return out


def _plain(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.complexfloating):
        return [float(v.real), float(v.imag)]
    return v


# ---------------------------------------------------------------------------
# 1. Blasius


def blasius_oracle(zeta_max: float = 12.0):
    """f''(0) by adaptive Runge-Kutta shooting and bisection."""

    def rhs(_, y):
        return [y[1], y[2], -0.5 * y[0] * y[2]]

    def miss(h):
        sol = integrate.solve_ivp(rhs, (0.0, zeta_max), [0.0, 0.0, h], method="DOP853", rtol=1e-12, atol=1e-13)
        return sol.y[1, -1] - 1.0

    return optimize.bisect(miss, 0.2, 0.5, xtol=1e-13)


def check_blasius() -> tuple:
    t = time.perf_counter()
    sol = solve_blasius()
    runtime = time.perf_counter() - t
    oracle = blasius_oracle(sol.zeta_max)
    k = int(np.argmin(np.abs(sol.zeta - 12.0)))
    tail = abs(sol.fp[k] - 1.0)
    diff = abs(sol.fpp0 - oracle)
    ok = diff < 1e-6 and tail < 1e-7 and runtime < 1.0
    m = {"fpp0": sol.fpp0, "oracle_fpp0": oracle, "difference": diff, "fp12_minus_1": tail, "runtime_s": runtime}
    return ok, f"f''(0)={sol.fpp0:.10f} |diff|={diff:.2e} |f'(12)-1|={tail:.2e} t={runtime:.2f}s", m


# ---------------------------------------------------------------------------
# 2. Airy functions


def airy_test_grid(n_radii: int = 20, n_angles: int = 10):
    """200 points with |z| from 0.3 to 20, covering the series and asymptotic regimes."""
    radii = np.geomspace(0.3, 20.0, n_radii)
    angles = np.linspace(-math.pi, math.pi, n_angles, endpoint=False) + 0.05
    return [r * cmath.exp(1j * a) for r in radii for a in angles]


def check_airy() -> tuple:
    worst = 0.0
    worst_conn = 0.0
    regimes = set()
    for z in airy_test_grid():
        e = eval_airy(z)
        ai, aip, regime = airy_reference(z)
        regimes.add(regime)
        worst = max(worst, abs(e.ai - ai) / abs(ai), abs(e.ai_prime - aip) / abs(aip))
        terms = [e.ai, OMEGA * eval_airy(OMEGA * z).ai, OMEGA**2 * eval_airy(OMEGA**2 * z).ai]
        worst_conn = max(worst_conn, abs(sum(terms)) / max(abs(x) for x in terms))
    ok = worst < 1e-9 and worst_conn < 1e-9 and len(regimes) == 2
    m = {"max_relative_error": worst, "max_connection_residual": worst_conn, "regimes": sorted(regimes), "points": 200}
    return ok, f"max rel err={worst:.2e} connection={worst_conn:.2e}", m


# ---------------------------------------------------------------------------
# 3. Wronskian


def wronskian_contexts():
    """Blasius contexts with A = 0.8 and c slightly above the base speed."""
    prof = blasius_profile()
    out = []
    for m in (0.0, 0.3, 0.7):
        for nu in (1e-6, 1e-10):
            alpha = 0.8 * nu**0.125
            base = alpha / (prof.wall_slope * math.sqrt(1.0 - m * m))
            out.append((prof, make_context(prof, nu, m, alpha, complex(base, 0.05 * base))))
    return out


def check_wronskian() -> tuple:
    rows = []
    for prof, ctx in wronskian_contexts():
        lmap = build_langer(prof, ctx)
        grid = fast_mode_grid(ctx, lmap)
        pair = ModifiedAiryPair(ctx, lmap)
        lit = wronskian_residual(pair, lmap, ctx, grid, "A1A2")
        rev = wronskian_residual(pair, lmap, ctx, grid, "A2A1")
        rows.append({"nu": ctx.nu, "m": ctx.m, "as_stated": lit, "reversed_order": rev})
    lit = max(r["as_stated"] for r in rows)
    rev = max(r["reversed_order"] for r in rows)
    ok = lit < 1e-6
    m = {"contexts": rows, "max_as_stated": lit, "max_reversed_order": rev}
    return ok, f"A1 dA2 - dA1 A2 vs eps^-1 d eta: {lit:.2e}; reversed order: {rev:.2e}", m


# ---------------------------------------------------------------------------
# 4. Langer map


def check_langer(c_values=(0.1, 0.3, 0.5, 0.7), gap: float = 0.05) -> tuple:
    prof = blasius_profile()
    worst_id = 0.0
    worst_quad = 0.0
    rows = []
    for cr in c_values:
        ctx = make_context(prof, 1e-8, 0.3, 0.1, complex(cr, 0.01))
        lmap = build_langer(prof, ctx)
        Yc = ctx.Yc
        res = 0.0
        # d eta_out by spectral differentiation of the tabulated map on each side of the seam
        for lo, hi in ((Yc + gap, min(Yc + 8.0, lmap.y_max - 1.0)), (0.0, Yc - gap)):
            if hi - lo < 0.05:
                continue
            g = panel_grid(lambda y: 0.1, hi - lo, p=16)
            Y = lo + g.nodes
            e = lmap.eta_out(Y)
            de = g.deriv(e)
            Umc = prof.eval_k(Y, 0) - cr
            res = max(res, float(np.max(np.abs(ctx.U1c * e * de**2 - Umc) / np.abs(Umc))))
        d = np.linspace(-0.3, 0.3, 601)
        Y = Yc + d
        sel = (Y > 0) & (np.abs(d) > 1e-9)
        quad = float(np.max(np.abs(lmap.eta_out(Y[sel]) - d[sel]) / d[sel] ** 2))
        worst_id = max(worst_id, res)
        worst_quad = max(worst_quad, quad)
        rows.append({"c_r": cr, "Y_c": Yc, "identity_residual": res, "quadratic_constant": quad})
    ok = worst_id < 1e-8 and worst_quad <= 2.0
    m = {"cases": rows, "max_identity_residual": worst_id, "max_quadratic_constant": worst_quad}
    return ok, f"identity residual={worst_id:.2e} max |eta-(Y-Yc)|/(Y-Yc)^2={worst_quad:.3f}", m


# ---------------------------------------------------------------------------
# 5. Rayleigh wall value


def check_rayleigh(m: float = 0.3) -> tuple:
    prof = scaling_profile()
    rows = []
    for nu in (1e-7, 1e-9, 1e-11):
        problem = DispersionProblem(prof, nu, m)
        alpha = SCALING_A * nu**0.125
        c = solve_temporal(alpha, problem).c
        ctx = problem.context(alpha, c)
        sm = slow_mode(prof, ctx)
        dev = abs(sm.wall_value - wall_value_asymptotic(ctx))
        K = dev / ((abs(ctx.alpha) ** 2 + abs(c) ** 2) * abs(math.log(c.imag)))
        rows.append({"nu": nu, "c": c, "phi0": sm.wall_value, "deviation": dev, "K": K})
    Ks = [r["K"] for r in rows]
    # no growth trend: the constant at the smallest nu does not exceed twice the largest-nu value
    trend = Ks[-1] <= 2.0 * Ks[0]
    ok = max(Ks) <= 50.0 and trend
    m_ = {"m": m, "A": SCALING_A, "sweep": rows, "K_max": max(Ks), "no_growth": trend}
    return ok, "K = " + ", ".join(f"{k:.3f}" for k in Ks) + " (bound 50)", m_


# ---------------------------------------------------------------------------
# 6. Fast-mode wall ratio


def check_fast_ratio(nus=(1e-12, 1e-10, 1e-8), ms=(0.0, 0.3, 0.7)) -> tuple:
    prof = scaling_profile()
    rows = []
    for m in ms:
        for nu in nus:
            problem = DispersionProblem(prof, nu, m)
            alpha = SCALING_A * nu**0.125
            c = solve_temporal(alpha, problem).c
            ctx = problem.context(alpha, c)
            fm = fast_mode(prof, ctx, build_langer(prof, ctx))
            ke = fm.comparison["kappa_eta0"]
            rows.append({"nu": nu, "m": m, "c": c, "abs_kappa_eta0": abs(complex(*ke)), "delta": fm.comparison["closed_form_delta"]})
    used = [r for r in rows if r["abs_kappa_eta0"] >= 5.0]
    worst = max((r["delta"] for r in used), default=math.nan)
    ok = bool(used) and worst <= 0.2
    m_ = {"contexts": rows, "contexts_used": len(used), "max_delta": worst}
    return ok, f"{len(used)} contexts with |kappa eta(0)|>=5, max scaled deviation={worst:.3f} (bound 0.2)", m_


# ---------------------------------------------------------------------------
# 7. Temporal scaling


def check_temporal_scaling(ms=(0.0, 0.3, 0.7), workers: int = 1) -> tuple:
    prof = scaling_profile()
    rows = []
    ok = True
    for m in ms:
        t = time.perf_counter()
        fit = sweep_scaling(SWEEP_NU, SCALING_A, m, "c_i", prof, workers=workers)
        nu0 = SWEEP_NU[0]
        alpha = SCALING_A * nu0**0.125
        pt = solve_temporal(alpha, DispersionProblem(prof, nu0, m))
        ratio = pt.c.real / alpha
        target = 1.0 / (prof.wall_slope * math.sqrt(1.0 - m * m))
        rel = abs(ratio - target) / target
        dt = time.perf_counter() - t
        good = abs(fit.exponent - 0.125) <= 0.02 and fit.r_squared >= 0.99 and rel <= 0.10 and dt < 60.0
        ok = ok and good
        rows.append({"m": m, "slope": fit.exponent, "r_squared": fit.r_squared, "cr_over_alpha": ratio, "target": target, "relative_gap": rel, "runtime_s": dt, "passed": good})
    summ = "; ".join(f"m={r['m']}: slope={r['slope']:.4f} r2={r['r_squared']:.5f} cr/ar gap={100 * r['relative_gap']:.1f}%" for r in rows)
    return ok, summ, {"A": SCALING_A, "nu": list(SWEEP_NU), "per_m": rows}


# ---------------------------------------------------------------------------
# 8. Spatial mode


def check_spatial(workers: int = 1) -> tuple:
    prof = scaling_profile()
    nu, m = 1e-10, 0.3
    pt = solve_spatial(SCALING_A * nu**0.125, DispersionProblem(prof, nu, m))
    imrel = pt.info["im_alpha_c_relative"]
    part_a = pt.alpha.imag < 0 and imrel < 1e-8
    fit = sweep_scaling(SWEEP_NU, SCALING_A, m, "alpha_i0", prof, workers=workers)
    part_b = abs(fit.exponent - 0.125) <= 0.03
    # gamma_0 against A at fixed nu, deep in the asymptotic regime
    m_g, nu_g = 0.7, 1e-14
    As = (8.0, 12.0, 16.0, 24.0)
    gammas = []
    for A in As:
        sp = solve_spatial(A * nu_g**0.125, DispersionProblem(prof, nu_g, m_g))
        gammas.append(sp.info["gamma0"])
    expo, _, r2 = fit_loglog(As, gammas)
    part_c = -2.4 <= expo <= -1.6
    ok = part_a and part_b and part_c
    m_ = {
        "point": pt.as_dict(),
        "im_alpha_c_relative": imrel,
        "alpha_i_slope": fit.exponent,
        "alpha_i_r_squared": fit.r_squared,
        "alpha_i_points": fit.points,
        "gamma_vs_A": {"m": m_g, "nu": nu_g, "A": list(As), "gamma0": gammas, "exponent": expo, "r_squared": r2},
    }
    summ = f"alpha_i={pt.alpha.imag:.3e} |Im(alpha c)|/|alpha c|={imrel:.1e}; slope={fit.exponent:.4f}; gamma0 ~ A^{expo:.3f}"
    return ok, summ, m_


# ---------------------------------------------------------------------------
# 9. Mixed modes


def check_mixed(m: float = 0.3) -> tuple:
    prof = scaling_profile()
    nus = (1e-12, 1e-8)
    data = {}
    margins_ok = True
    rows = []
    for nu in nus:
        problem = DispersionProblem(prof, nu, m)
        alpha_r = SCALING_A * nu**0.125
        g0 = solve_spatial(alpha_r, problem).info["gamma0"]
        for j, gamma in enumerate((0.0, 0.5 * g0, g0)):
            pt = solve_mixed(alpha_r, gamma, problem)
            q = pt.c.imag - pt.alpha.imag / (prof.wall_slope * math.sqrt(1.0 - m * m))
            margins_ok = margins_ok and q > 0
            data[(nu, j)] = q
            rows.append({"nu": nu, "gamma": gamma, "c": pt.c, "margin": q})
    expected = (nus[1] / nus[0]) ** 0.125
    ratios = [data[(nus[1], j)] / data[(nus[0], j)] for j in range(3)]
    within = all(abs(r / expected - 1.0) <= 0.3 for r in ratios)
    ok = margins_ok and within
    m_ = {"m": m, "A": SCALING_A, "points": rows, "two_point_ratios": ratios, "expected_ratio": expected}
    return ok, "margins>0: " + str(margins_ok) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios) + f" vs {expected:.3f}", m_


# ---------------------------------------------------------------------------
# 10. Spectral cross-check


def check_spectral() -> tuple:
    prof = blasius_profile()
    nu, m, alpha = 1e-6, 0.3, 0.15
    t = time.perf_counter()
    root = solve_temporal(alpha, DispersionProblem(prof, nu, m), "boundary").c
    op = build_operator(prof, nu, m, 0.0, alpha, 256)
    spec = solve_spectrum(op, root, k=6, profile=prof)
    dt = time.perf_counter() - t
    j = track_eigenvalue(spec, root)
    if j is None:
        return False, "no resolution-stable unstable eigenvalue near the dispersion root", {"root": root, "spectrum": spec.as_dict()}
    c = complex(spec.eigenvalues[j])
    dist = abs(c - root) / abs(root)
    mv = float(spec.movement[j])
    ok = dist <= 0.2 and mv < 1e-4 and dt < 120.0
    m_ = {"alpha": alpha, "nu": nu, "m": m, "dispersion_root": root, "eigenvalue": c, "relative_distance": dist, "movement": mv, "runtime_s": dt}
    return ok, f"root={root:.5f} eigenvalue={c:.5f} distance={100 * dist:.2f}% movement={mv:.1e} t={dt:.0f}s", m_


# ---------------------------------------------------------------------------
# 11. Incompressible limit


def check_incompressible() -> tuple:
    prof = scaling_profile()
    nu = 1e-12
    alpha = SCALING_A * nu**0.125
    rows = []
    ok = True
    for tier in ("leading", "boundary"):
        c0 = solve_temporal(alpha, DispersionProblem(prof, nu, 0.0), tier).c
        c1 = solve_temporal(alpha, DispersionProblem(prof, nu, 1e-6), tier).c
        rel = abs(c1 - c0) / abs(c0)
        ok = ok and rel <= 1e-6
        rows.append({"tier": tier, "c_m0": c0, "c_m1e-6": c1, "relative_difference": rel})
    return ok, "; ".join(f"{r['tier']}: {r['relative_difference']:.1e}" for r in rows), {"nu": nu, "alpha": alpha, "tiers": rows}


# ---------------------------------------------------------------------------
# 12. Half-line Helmholtz and density


def check_helmholtz() -> tuple:
    prof = blasius_profile()
    rows = []
    ok = True
    for nu, m, a, c in ((1e-8, 0.3, 0.1, 0.3 + 0.01j), (1e-8, 0.5, 0.03, 0.1 + 0.005j), (1e-6, 0.7, 0.2, 0.4 + 0.02j)):
        ctx = make_context(prof, nu, m, a, c)
        g = density_grid(ctx)
        Y = g.nodes
        b = ctx.beta
        gam = 2.0 * b.real
        src = (gam**2 - b**2) * np.exp(-gam * Y)
        f = helmholtz_halfline(ComplexField(src, g), b)
        # the decaying solution selected by the Green formula has f'(0) = beta f(0)
        exact = np.exp(-gam * Y) - (gam + b) / (2.0 * b) * np.exp(-b * Y)
        err = float(np.max(np.abs(f.values - exact)))
        q1 = ComplexField(np.exp(-1.5 * b.real * Y) * (1 + Y), g)
        q2 = ComplexField(np.exp(-1.2 * b.real * Y) * np.cos(Y), g)
        rho = density_fixed_point(q1, q2, ctx)
        res = stokes_rho_residual(rho, q1, q2, ctx)
        contraction = max(rho.info["ratios"]) if rho.info["ratios"] else 0.0
        good = err < 1e-8 and res < 1e-5 and contraction <= 2.0 * abs(a)
        ok = ok and good
        rows.append({"nu": nu, "m": m, "alpha": a, "c": c, "manufactured_error": err, "operator_residual": float(np.max(np.abs(helmholtz_operator(f.values, b, g) - src)) / np.max(np.abs(src))), "density_residual": res, "contraction": contraction, "contraction_over_alpha": contraction / abs(a)})
    summ = f"manufactured err={max(r['manufactured_error'] for r in rows):.1e} density residual={max(r['density_residual'] for r in rows):.1e} contraction/|alpha|={max(r['contraction_over_alpha'] for r in rows):.3f}"
    return ok, summ, {"cases": rows}


# ---------------------------------------------------------------------------
# registry

CRITERIA = {
    "blasius-oracle": (1, "Blasius oracle", check_blasius),
    "airy-accuracy": (2, "Airy accuracy", check_airy),
    "wronskian": (3, "Wronskian identity", check_wronskian),
    "langer-identity": (4, "Langer identity", check_langer),
    "rayleigh-wall": (5, "Rayleigh wall asymptotics", check_rayleigh),
    "fast-ratio": (6, "Fast-mode wall ratio", check_fast_ratio),
    "scaling-ci": (7, "Temporal scaling", check_temporal_scaling),
    "spatial-mode": (8, "Spatial mode", check_spatial),
    "mixed-mode": (9, "Mixed-mode inequality", check_mixed),
    "spectral-cross": (10, "Spectral cross-validation", check_spectral),
    "incompressible-limit": (11, "Incompressible limit", check_incompressible),
    "helmholtz": (12, "Half-line Helmholtz", check_helmholtz),
}

_PARALLEL = {"scaling-ci", "spatial-mode"}


def resolve(ident: str) -> str:
    """Accept an id or the criterion number."""
    key = str(ident).strip()
    if key in CRITERIA:
        return key
    for name, (num, _, _) in CRITERIA.items():
        if key == str(num):
            return name
    raise ConfigError("cli.criterion", f"unknown criterion {ident!r}; known: {', '.join(CRITERIA)}")


def run_criterion(ident: str, workers: int = 1) -> CriterionResult:
    name = resolve(ident)
    num, title, fn = CRITERIA[name]
    t = time.perf_counter()
    ok, summary, metrics = fn(workers=workers) if name in _PARALLEL else fn()
    return CriterionResult(num, name, title, bool(ok), summary, metrics, time.perf_counter() - t)
