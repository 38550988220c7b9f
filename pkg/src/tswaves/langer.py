"""Wave parameters and the modified Langer transformation.

The outer map solves U'(Y_c) eta (eta')^2 = U - c_r with eta(Y_c) = 0.  It is
blended into the identity map Y - Y_c inside a window of width M/kappa around
the critical layer and shifted by the constant imaginary part -c_i/U'(Y_c).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SolverError
from .grid import panel_grid
from .profiles import Profile, critical_layer

__all__ = ["WaveContext", "make_context", "LangerMap", "build_langer", "err_terms", "bump"]


@dataclass(frozen=True)
class WaveContext:
    nu: float
    m: float
    lam: float
    theta0: float
    alpha: complex
    c: complex
    eps: complex
    Yc: float
    A_inf: complex
    beta: complex
    kappa: float
    U1c: float  # U'(Y_c)
    U1w: float  # U'(0)
    profile: Profile

    @property
    def c_r(self) -> float:
        return self.c.real

    @property
    def c_i(self) -> float:
        return self.c.imag

    def A(self, Y):
        """Compressibility coefficient 1 - m^2 (U - c)^2."""
        U = self.profile.eval_k(Y, 0)
        return 1.0 - self.m**2 * (U - self.c) ** 2

    def dA(self, Y):
        U = self.profile.eval_k(Y, 0)
        return -2.0 * self.m**2 * (U - self.c) * self.profile.eval_k(Y, 1)

    def with_c(self, c: complex) -> "WaveContext":
        return make_context(self.profile, self.nu, self.m, self.alpha, c, self.lam)

    def summary(self) -> dict:
        return {
            "nu": self.nu,
            "m": self.m,
            "lambda": self.lam,
            "theta0": self.theta0,
            "alpha": [self.alpha.real, self.alpha.imag],
            "c": [self.c.real, self.c.imag],
            "eps_abs": abs(self.eps),
            "Yc": self.Yc,
            "beta": [self.beta.real, self.beta.imag],
            "kappa": self.kappa,
        }


def make_context(profile: Profile, nu: float, m: float, alpha: complex, c: complex, lam: float = 0.0) -> WaveContext:
    if not nu > 0:
        raise ConfigError("langer.nu", "nu must be positive")
    if not 0.0 <= m < 1.0:
        raise ConfigError("langer.m", "Mach number must satisfy 0 <= m < 1")
    alpha = complex(alpha)
    c = complex(c)
    if alpha == 0:
        raise ConfigError("langer.alpha", "alpha must be non-zero")
    # alpha = |alpha| e^{-3 i theta0}
    theta0 = -cmath.phase(alpha) / 3.0
    if abs(theta0) > math.pi / 100 + 1e-15:
        raise ConfigError("langer.theta0", f"arg(alpha) gives |theta0| = {abs(theta0):.4g} > pi/100")
    eps = math.sqrt(nu) / (1j * alpha)
    if not 0.0 < c.real < 1.0:
        raise ConfigError("langer.out-of-range", f"c_r = {c.real} outside (0, 1)")
    Yc = critical_layer(profile, c.real)
    A_inf = 1.0 - m * m * (1.0 - c) ** 2
    sq = cmath.sqrt(A_inf)
    if sq.real < 0:
        sq = -sq
    beta = alpha * sq
    U1c = float(profile.eval_k(Yc, 1))
    kappa = abs(eps) ** (-1.0 / 3.0) * U1c ** (1.0 / 3.0)
    return WaveContext(nu, m, lam, theta0, alpha, c, eps, Yc, A_inf, beta, kappa, U1c, profile.wall_slope, profile)


# ---------------------------------------------------------------------------
# smooth cutoff


def _h(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _h1(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos]) / x[pos] ** 2
    return out


def _h2(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = np.exp(-1.0 / xp) * (1.0 - 2.0 * xp) / xp**4
    return out


def bump(s):
    """chi(s) = 1 for |s| <= 1, 0 for |s| >= 2, C-infinity; returns (chi, chi', chi'')."""
    s = np.asarray(s, dtype=float)
    t = np.abs(s)
    sg = np.where(s < 0, -1.0, 1.0)
    a, b = _h(2.0 - t), _h(t - 1.0)
    a1, b1 = -_h1(2.0 - t), _h1(t - 1.0)
    a2, b2 = _h2(2.0 - t), _h2(t - 1.0)
    S = a + b
    chi = a / S
    N = a1 * b - a * b1
    D = S * S
    chi_t = N / D
    chi_tt = ((a2 * b - a * b2) * D - N * 2.0 * S * (a1 + b1)) / (D * D)
    return chi, sg * chi_t, chi_tt


# ---------------------------------------------------------------------------
# Langer map


class LangerMap:
    """Blended Langer map for a given profile and wave context.

    The outer map is tabulated in the variable v = |Y - Y_c|^{1/2}, in which
    the defining quadrature has a smooth integrand on both sides of Y_c.
    """

    def __init__(self, profile: Profile, ctx: WaveContext, M: float = 1.0, y_max: float = 40.0):
        if M < 1.0:
            raise ConfigError("langer.M", "cutoff M must be at least 1")
        if ctx.c_i < 0:
            raise ConfigError("langer.c_i", "c_i must be non-negative")
        self.profile = profile
        self.ctx = ctx
        self.cutoff_M = float(M)
        self.Yc = ctx.Yc
        self.c_r = ctx.c_r
        self.U1c = ctx.U1c
        self.eta_i = -ctx.c_i / ctx.U1c
        self.width = M / ctx.kappa
        self.y_max = y_max
        if self.c_r >= float(profile.eval_k(y_max, 0)):
            raise SolverError("langer.negative-radicand", "c_r reaches the free-stream velocity")
        self._tables = {}
        for side, span in ((1, y_max - self.Yc), (-1, self.Yc)):
            vmax = math.sqrt(span)
            g = panel_grid(lambda v: 0.05, vmax, p=16)
            v = g.nodes
            Y = self.Yc + side * v * v
            q = np.abs(profile.eval_k(Y, 0) - self.c_r) / self.U1c
            integrand = 2.0 * v * np.sqrt(q)
            self._tables[side] = (g, g.cumint(integrand))

    # -- outer map ------------------------------------------------------
    def eta_out(self, Y):
        Y = np.atleast_1d(np.asarray(Y, dtype=float))
        d = Y - self.Yc
        out = np.zeros_like(Y)
        for side in (1, -1):
            sel = (d * side) > 0
            if np.any(sel):
                g, I = self._tables[side]
                v = np.sqrt(np.abs(d[sel]))
                Iv = g.interp(I, v)
                out[sel] = side * (1.5 * Iv) ** (2.0 / 3.0)
        return out

    def outer(self, Y):
        """(eta_out, d eta_out, d2 eta_out) from the defining identity."""
        Y = np.atleast_1d(np.asarray(Y, dtype=float))
        e = self.eta_out(Y)
        U = self.profile.eval_k(Y, 0)
        U1 = self.profile.eval_k(Y, 1)
        d = Y - self.Yc
        with np.errstate(invalid="ignore", divide="ignore"):
            de = np.sqrt((U - self.c_r) / (self.U1c * e))
            d2 = (U1 / self.U1c - de**3) / (2.0 * e * de)
        at = np.abs(d) < 1e-12
        if np.any(at):
            de[at] = 1.0
            d2[at] = self.profile.eval_k(self.Yc, 2) / (3.0 * self.U1c)
        return e, de, d2

    # -- blended map ----------------------------------------------------
    def evaluate(self, Y):
        """(eta_r, d eta_r, d2 eta_r) of the blended real map."""
        Y = np.atleast_1d(np.asarray(Y, dtype=float))
        d = Y - self.Yc
        L = self.width
        chi, c1, c2 = bump(d / L)
        eta_r = d.copy()
        de = np.ones_like(d)
        d2 = np.zeros_like(d)
        out = np.abs(d) > L
        if np.any(out):
            e, e1, e2 = self.outer(Y[out])
            ch, ch1, ch2 = chi[out], c1[out], c2[out]
            gap = d[out] - e
            eta_r[out] = ch * d[out] + (1.0 - ch) * e
            de[out] = ch + (1.0 - ch) * e1 + ch1 * gap / L
            d2[out] = ch2 * gap / L**2 + 2.0 * ch1 * (1.0 - e1) / L + (1.0 - ch) * e2
        return eta_r, de, d2

    def eta(self, Y):
        return self.evaluate(Y)[0] + 1j * self.eta_i

    def seams(self):
        L = self.width
        return [self.Yc + s * L for s in (-2.0, -1.0, 1.0, 2.0) if 0.0 < self.Yc + s * L < self.y_max]

    def seam_jump(self, h: float | None = None) -> float:
        """Largest relative mismatch of one-sided second differences of eta_r
        across the blend seams."""
        h = self.width * 1e-3 if h is None else h
        worst = 0.0
        for y in self.seams():
            # second-order one-sided stencils for f''(y) from each side
            left = self.evaluate(y - h * np.arange(4))[0]
            right = self.evaluate(y + h * np.arange(4))[0]
            sl = (2 * left[0] - 5 * left[1] + 4 * left[2] - left[3]) / h**2
            sr = (2 * right[0] - 5 * right[1] + 4 * right[2] - right[3]) / h**2
            # compare against the curvature of the outer map at the seam
            scale = max(abs(self.outer(np.array([y]))[2][0]), abs(sl), abs(sr), 1e-8)
            worst = max(worst, abs(sl - sr) / scale)
        return worst

    def calibrate_L(self, const: float = 2.0, radii=None) -> float:
        """Largest radius on which |eta_out - (Y - Y_c)| <= const |Y - Y_c|^2."""
        radii = np.linspace(0.01, 1.0, 100) if radii is None else np.asarray(radii)
        best = 0.0
        for r in radii:
            Y = self.Yc + np.linspace(-r, r, 81)
            Y = Y[(Y > 0) & (np.abs(Y - self.Yc) > 1e-9)]
            d = Y - self.Yc
            if np.all(np.abs(self.eta_out(Y) - d) <= const * d * d):
                best = float(r)
            else:
                break
        return best


def build_langer(profile: Profile, ctx: WaveContext, M: float = 1.0, y_max: float = 40.0) -> LangerMap:
    return LangerMap(profile, ctx, M, y_max)


def err_terms(lmap: LangerMap, ctx: WaveContext, Y):
    """(Err_1, Err_2) of the approximate Airy equation at Y."""
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    if np.any(Y < 0):
        raise ConfigError("langer.domain", "Y must be non-negative")
    er, de, d2 = lmap.evaluate(Y)
    eta = er + 1j * lmap.eta_i
    U = ctx.profile.eval_k(Y, 0)
    err1 = ctx.U1c * eta * de**2 - ctx.eps * ctx.alpha**2 - (U - ctx.c)
    err2 = ctx.eps * d2 / de
    return err1, err2
