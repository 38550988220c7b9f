"""Boundary-layer base profiles U_s(Y).

Three families are provided: the Blasius similarity profile (tabulated from a
shooting solution), closed-form test profiles tanh(sY) and 1 - exp(-sY), and
profiles read from CSV tables.  All expose ``eval_k(Y, k)`` for k = 0..4.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, SolverError

__all__ = [
    "Profile",
    "AnalyticProfile",
    "BlasiusProfile",
    "TableProfile",
    "StretchedProfile",
    "BlasiusSolution",
    "StructureReport",
    "solve_blasius",
    "blasius_profile",
    "make_analytic_profile",
    "check_structure",
    "critical_layer",
    "export_profile_csv",
    "load_profile_csv",
]


class Profile:
    """Base flow U_s on [0, inf) with derivatives up to order four."""

    kind: str = "custom-table"
    decay_rate: float = 0.3

    def eval_k(self, Y, k: int = 0):
        raise NotImplementedError

    def __call__(self, Y):
        return self.eval_k(Y, 0)

    @property
    def wall_slope(self) -> float:
        return float(self.eval_k(0.0, 1))

    def describe(self) -> dict:
        return {"kind": self.kind}


class AnalyticProfile(Profile):
    """tanh(sY) or 1 - exp(-sY) with closed-form derivatives."""

    def __init__(self, kind: str, steepness: float):
        if kind not in ("tanh", "exp"):
            raise ConfigError("profiles.kind", f"unknown analytic profile {kind!r}")
        if not steepness > 0:
            raise ConfigError("profiles.steepness", "steepness must be positive")
        self.kind = kind
        self.s = float(steepness)
        # 1 - tanh(sY) ~ 2 exp(-2sY); 1 - exp(-sY) decays at rate s
        self.decay_rate = 2.0 * self.s if kind == "tanh" else self.s

    def eval_k(self, Y, k: int = 0):
        s = self.s
        x = s * np.asarray(Y, dtype=float)
        if self.kind == "exp":
            e = np.exp(-x)
            return 1.0 - e if k == 0 else -((-s) ** k) * e
        e = np.exp(-2.0 * x)
        t = (1.0 - e) / (1.0 + e)
        q = 4.0 * e / (1.0 + e) ** 2  # sech^2 without cancellation
        if k == 0:
            return t
        if k == 1:
            return s * q
        if k == 2:
            return -2.0 * s**2 * t * q
        if k == 3:
            return -2.0 * s**3 * q * (1.0 - 3.0 * t * t)
        if k == 4:
            return 8.0 * s**4 * t * q * (2.0 - 3.0 * t * t)
        raise ValueError("derivative order must be 0..4")

    def describe(self) -> dict:
        return {"kind": self.kind, "steepness": self.s}


def make_analytic_profile(kind: str, steepness: float) -> AnalyticProfile:
    return AnalyticProfile(kind, steepness)


# ---------------------------------------------------------------------------
# Blasius


def _rk4_shoot(h0: float, zeta_max: float, step: float, early_exit: bool = True):
    """Integrate f''' = -f f''/2 from the wall with f''(0) = h0.

    Returns (sign, trajectory) where sign is +1 if the shot overshoots
    (f' > 1 at the end), -1 if it undershoots.  With ``early_exit`` the march
    stops as soon as the outcome is certain.
    """
    n = int(round(zeta_max / step))
    dt = zeta_max / n
    f, g, h = 0.0, 0.0, h0
    traj = None if early_exit else [(f, g, h)]
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(n):
        k1f, k1g, k1h = g, h, -0.5 * f * h
        f2, g2, h2 = f + half * k1f, g + half * k1g, h + half * k1h
        k2f, k2g, k2h = g2, h2, -0.5 * f2 * h2
        f3, g3, h3 = f + half * k2f, g + half * k2g, h + half * k2h
        k3f, k3g, k3h = g3, h3, -0.5 * f3 * h3
        f4, g4, h4 = f + dt * k3f, g + dt * k3g, h + dt * k3h
        k4f, k4g, k4h = g4, h4, -0.5 * f4 * h4
        f += sixth * (k1f + 2.0 * k2f + 2.0 * k3f + k4f)
        g += sixth * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        h += sixth * (k1h + 2.0 * k2h + 2.0 * k3h + k4h)
        if early_exit:
            # f'' keeps its sign along a trajectory, so f' only grows
            if g > 1.0:
                return 1, g
            if h < 0.0:
                return -1, g
        else:
            traj.append((f, g, h))
    if early_exit:
        return (1 if g > 1.0 else -1), g
    return traj, dt


@dataclass(frozen=True)
class BlasiusSolution:
    zeta: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    fpp: np.ndarray
    fpp0: float
    zeta_max: float
    iterations: int

    def ode_residual(self) -> float:
        """Sup of |f f''/2 + f'''| with f''' from 4th-order differences of f''."""
        z, h = self.zeta, self.fpp
        d = z[1] - z[0]
        f3 = (h[:-4] - 8 * h[1:-3] + 8 * h[3:-1] - h[4:]) / (12 * d)
        return float(np.max(np.abs(0.5 * self.f[2:-2] * h[2:-2] + f3)))


def solve_blasius(
    tolerance: float = 1e-10,
    zeta_max: float = 12.0,
    step: float = 1.0 / 256.0,
    bracket: tuple[float, float] = (0.2, 0.5),
    max_iter: int = 80,
    table_end: float = 20.0,
) -> BlasiusSolution:
    """Shoot on f''(0) by bisection so that |f'(zeta_max) - 1| <= tolerance."""
    if not tolerance > 0:
        raise ConfigError("profiles.tolerance", "tolerance must be positive")
    if zeta_max < 10:
        raise ConfigError("profiles.zeta_max", "zeta_max must be at least 10")
    lo, hi = bracket
    s_lo, _ = _rk4_shoot(lo, zeta_max, step)
    s_hi, _ = _rk4_shoot(hi, zeta_max, step)
    if s_lo == s_hi:
        raise SolverError("profiles.no-convergence", f"bracket {bracket} does not straddle f'(inf)=1")
    it = 0
    mid = 0.5 * (lo + hi)
    while it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        sgn, _ = _rk4_shoot(mid, zeta_max, step)
        if sgn == s_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    else:
        raise SolverError("profiles.no-convergence", "bisection did not settle")
    traj, dt = _rk4_shoot(mid, max(table_end, zeta_max), step, early_exit=False)
    arr = np.array(traj)
    # scaling symmetry f -> k f(k zeta) pins f'(end) to 1 exactly, so the
    # table approaches the free stream from below
    k = arr[-1, 1] ** -0.5
    zeta = dt * np.arange(arr.shape[0]) / k
    f, fp, fpp = k * arr[:, 0], k * k * arr[:, 1], k**3 * arr[:, 2]
    fp = np.minimum(fp, 1.0)
    g_end = float(np.interp(zeta_max, zeta, fp))
    if abs(g_end - 1.0) > tolerance:
        raise SolverError("profiles.no-convergence", f"|f'(zeta_max)-1| = {abs(g_end-1):.3e} > tolerance")
    return BlasiusSolution(zeta, f, fp, fpp, float(fpp[0]), zeta_max, it)


def _hermite(x, xs, y, dy):
    """Cubic Hermite interpolation on a uniform table."""
    d = xs[1] - xs[0]
    i = np.clip(((x - xs[0]) / d).astype(int), 0, len(xs) - 2)
    t = (x - xs[i]) / d
    y0, y1, m0, m1 = y[i], y[i + 1], dy[i] * d, dy[i + 1] * d
    t2, t3 = t * t, t * t * t
    val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1
    return val


class BlasiusProfile(Profile):
    """U_s = f' from a tabulated Blasius solution.

    f, f', f'' are interpolated by cubic Hermite pieces whose slopes come from
    the ODE itself; higher derivatives of U_s follow from f''' = -f f''/2.
    Beyond the table U_s is continued by an exponential tail.
    """

    kind = "blasius"

    def __init__(self, sol: BlasiusSolution, decay_rate: float = 0.3):
        self.sol = sol
        self.decay_rate = decay_rate
        z = sol.zeta
        self._z = z
        f, g, h = sol.f, sol.fp, sol.fpp
        h3 = -0.5 * f * h
        self._tab = (f, g, h, h3)
        self._zend = float(z[-1])
        self._gap = max(1.0 - float(g[-1]), 0.0)
        self._rate = max(float(h[-1]) / self._gap, 1.0) if self._gap > 0 else 1.0

    def _fgh(self, x):
        f, g, h, h3 = self._tab
        F = _hermite(x, self._z, f, g)
        G = np.minimum(_hermite(x, self._z, g, h), 1.0)
        H = _hermite(x, self._z, h, h3)
        return F, G, H

    def eval_k(self, Y, k: int = 0):
        Y = np.asarray(Y, dtype=float)
        scalar = Y.ndim == 0
        Y = np.atleast_1d(Y)
        out = np.empty_like(Y)
        inside = Y <= self._zend
        if np.any(inside):
            F, G, H = self._fgh(Y[inside])
            if k == 0:
                v = G
            elif k == 1:
                v = H
            elif k == 2:
                v = -0.5 * F * H
            elif k == 3:
                v = -0.5 * G * H + 0.25 * F * F * H
            elif k == 4:
                v = -0.5 * H * H + 0.75 * F * G * H - 0.125 * F**3 * H
            else:
                raise ValueError("derivative order must be 0..4")
            out[inside] = v
        if np.any(~inside):
            d = Y[~inside] - self._zend
            tail = self._gap * np.exp(-self._rate * d)
            out[~inside] = 1.0 - tail if k == 0 else -((-self._rate) ** k) * tail
        return out[0] if scalar else out

    @property
    def wall_slope(self) -> float:
        return float(self.sol.fpp[0])

    def describe(self) -> dict:
        return {"kind": "blasius", "fpp0": self.sol.fpp0}


_BLASIUS_CACHE: dict = {}


def blasius_profile(tolerance: float = 1e-10, zeta_max: float = 12.0) -> BlasiusProfile:
    """Blasius profile, memoized per (tolerance, zeta_max)."""
    key = (tolerance, zeta_max)
    if key not in _BLASIUS_CACHE:
        _BLASIUS_CACHE[key] = BlasiusProfile(solve_blasius(tolerance, zeta_max))
    return _BLASIUS_CACHE[key]


class StretchedProfile(Profile):
    """U(Y) = base(s Y): the base profile on a compressed wall-normal scale."""

    def __init__(self, base: Profile, stretch: float):
        if not stretch > 0:
            raise ConfigError("profiles.stretch", "stretch must be positive")
        self.base = base
        self.s = float(stretch)
        self.kind = f"{base.kind}-stretched"
        self.decay_rate = base.decay_rate * self.s

    def eval_k(self, Y, k: int = 0):
        return self.s**k * self.base.eval_k(self.s * np.asarray(Y, dtype=float), k)

    @property
    def wall_slope(self) -> float:
        return self.s * self.base.wall_slope

    def describe(self) -> dict:
        return {"kind": self.kind, "stretch": self.s, "base": self.base.describe()}


class TableProfile(Profile):
    """Profile given by tabulated columns, interpolated with cubic splines."""

    kind = "custom-table"

    def __init__(self, Y: Sequence[float], cols: Sequence[Sequence[float]], decay_rate: float = 0.3):
        self.Y = np.asarray(Y, dtype=float)
        self._splines = [CubicSpline(self.Y, np.asarray(c, dtype=float)) for c in cols]
        self.decay_rate = decay_rate

    def eval_k(self, Y, k: int = 0):
        Y = np.asarray(Y, dtype=float)
        Yc = np.clip(Y, self.Y[0], self.Y[-1])
        v = self._splines[k](Yc)
        if k == 0:
            return np.where(Y > self.Y[-1], 1.0, v)
        return np.where(Y > self.Y[-1], 0.0, v)


# ---------------------------------------------------------------------------
# Structure check and critical layer


@dataclass
class StructureReport:
    eta0: float
    suprema: list[float]
    cap: float
    passed: bool
    monotone: bool
    bounds_ok: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "eta0": self.eta0,
            "suprema": self.suprema,
            "cap": self.cap,
            "passed": self.passed,
            "monotone": self.monotone,
            "bounds_ok": self.bounds_ok,
        }


def check_structure(profile: Profile, eta0: float, grid=None, cap: float = 1e3) -> StructureReport:
    """Grid suprema of exp(eta0 Y)|d^k(U_s - 1)| for k = 0..4.

    The exponentially weighted quantity must stay below ``cap`` and must not
    grow toward the end of the grid (that would signal a slower decay than
    eta0).
    """
    if not eta0 > 0:
        raise ConfigError("profiles.eta0", "eta0 must be positive")
    Y = np.linspace(0.0, 40.0, 4001) if grid is None else np.asarray(getattr(grid, "nodes", grid), dtype=float)
    w = np.exp(eta0 * Y)
    sups = []
    ok = True
    for k in range(5):
        d = profile.eval_k(Y, k) - (1.0 if k == 0 else 0.0)
        q = w * np.abs(d)
        sups.append(float(np.max(q)))
        # a weighted tail that keeps rising means eta0 exceeds the decay rate
        tail = q[Y >= 0.75 * Y[-1]]
        rising = tail.size > 2 and tail[-1] > 1e-3 * max(sups[-1], 1e-300) and tail[-1] > tail[0]
        if not np.isfinite(sups[-1]) or sups[-1] > cap or rising:
            ok = False
    U = profile.eval_k(Y, 0)
    resolvable = (1.0 - U) > 1e-14
    dU = np.diff(U)
    monotone = bool(np.all(dU[resolvable[1:]] > 0))
    bounds_ok = bool(U[0] == 0.0 and np.all(U[1:] > 0) and np.all(U <= 1.0) and profile.wall_slope > 0)
    return StructureReport(eta0, sups, cap, ok and monotone and bounds_ok, monotone, bounds_ok)


def critical_layer(profile: Profile, c_r: float, y_max: float = 40.0) -> float:
    """The unique Y_c with U_s(Y_c) = c_r (bisection then Newton polish)."""
    umax = float(profile.eval_k(y_max, 0))
    if not (0.0 < c_r < umax) or not (c_r < 1.0):
        raise ConfigError("profiles.out-of-range", f"c_r={c_r} outside (0, U_s(Y_max))")
    a, b = 0.0, 1.0
    while float(profile.eval_k(b, 0)) < c_r:
        a, b = b, 2.0 * b
        if b > y_max:
            b = y_max
            break
    for _ in range(200):
        m = 0.5 * (a + b)
        if float(profile.eval_k(m, 0)) < c_r:
            a = m
        else:
            b = m
        if b - a < 1e-9 * max(1.0, b):
            break
    y = 0.5 * (a + b)
    for _ in range(8):
        r = float(profile.eval_k(y, 0)) - c_r
        d = float(profile.eval_k(y, 1))
        if d <= 0:
            break
        step = r / d
        y -= step
        if abs(step) < 1e-15 * max(1.0, y):
            break
    return float(y)


# ---------------------------------------------------------------------------
# CSV interchange

_COLS = ["Y", "U", "U'", "U''", "U'''", "U''''"]


def export_profile_csv(profile: Profile, path, Y=None, comment: str | None = None) -> None:
    Y = np.linspace(0.0, 40.0, 2001) if Y is None else np.asarray(Y, dtype=float)
    data = [Y] + [np.broadcast_to(profile.eval_k(Y, k), Y.shape) for k in range(5)]
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(_COLS)
        for row in zip(*data):
            w.writerow([repr(float(v)) for v in row])


def load_profile_csv(path) -> TableProfile:
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    if [h.strip() for h in header] != _COLS:
        raise ConfigError("profiles.csv-header", f"expected header {_COLS}, got {header}")
    for r in reader:
        if r:
            rows.append([float(v) for v in r])
    arr = np.array(rows)
    if arr.ndim != 2 or arr.shape[1] != 6 or not np.all(np.diff(arr[:, 0]) > 0):
        raise ConfigError("profiles.csv-shape", "profile table must have 6 columns and increasing Y")
    return TableProfile(arr[:, 0], [arr[:, k] for k in range(1, 6)])
