"""Direct collocation solver for the linearized compressible system.

Unknowns are (p, u, v) with p = rho/m^2, so the incompressible limit m = 0 is
the same code path.  In these variables the equations read

    i alpha (U - c) m^2 p + div = 0,
    sqrt(nu)(d^2 - alpha^2) u + i alpha lambda sqrt(nu) div - i alpha (U - c) u
        - (i alpha + sqrt(nu) m^2 U'') p - U' v = 0,
    sqrt(nu)(d^2 - alpha^2) v + lambda sqrt(nu) d div - i alpha (U - c) v - dp = 0,

with div = i alpha u + v'.  The half-line is mapped from xi in [-1, 1] by
Y = a (1 + xi)/(1 - xi); xi = 1 is the point at infinity.  The pencil is
L x = c M x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigs

from .errors import ConfigError, SolverError
from .profiles import Profile

__all__ = [
    "CollocationOperator",
    "Spectrum",
    "cheb",
    "mapped_nodes",
    "build_operator",
    "solve_spectrum",
    "track_eigenvalue",
    "eigen_residual",
]

COND_LIMIT = 1e14


def cheb(N: int):
    """Chebyshev-Lobatto nodes x_j = -cos(pi j / N) (ascending) and the differentiation matrix."""
    if N < 1:
        raise ConfigError("spectral.N", "N must be positive")
    j = np.arange(N + 1)
    x = -np.cos(np.pi * j / N)
    cvec = np.where((j == 0) | (j == N), 2.0, 1.0) * (-1.0) ** j
    X = x[:, None] - x[None, :]
    D = np.outer(cvec, 1.0 / cvec) / (X + np.eye(N + 1))
    D = D - np.diag(D.sum(axis=1))
    return x, D


def mapped_nodes(N: int, a: float = 4.0):
    """(Y, d/dY) on the rationally mapped grid; the last node is Y = inf."""
    xi, D = cheb(N)
    with np.errstate(divide="ignore"):
        Y = a * (1.0 + xi) / (1.0 - xi)
    dxi = (1.0 - xi) ** 2 / (2.0 * a)  # dxi/dY
    return Y, dxi[:, None] * D


@dataclass
class CollocationOperator:
    L: np.ndarray
    M: np.ndarray
    nodes: np.ndarray
    D1: np.ndarray
    map_a: float
    bc_rows: list
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.nodes.size


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    spurious_flags: np.ndarray  # True when the eigenvalue failed the doubling test
    resolution: int
    movement: np.ndarray = None
    residuals: np.ndarray = None
    vectors: np.ndarray = None
    info: dict = field(default_factory=dict)

    def genuine(self):
        return self.eigenvalues[~self.spurious_flags]

    def as_dict(self) -> dict:
        out = []
        for k, lam in enumerate(self.eigenvalues):
            out.append(
                {
                    "c": [float(lam.real), float(lam.imag)],
                    "spurious": bool(self.spurious_flags[k]),
                    "movement": None if self.movement is None else float(self.movement[k]),
                    "residual": None if self.residuals is None else float(self.residuals[k]),
                }
            )
        return {"resolution": self.resolution, "eigenvalues": out, "info": self.info}


def _profile_samples(profile: Profile, Y):
    fin = np.isfinite(Y)
    U = np.ones_like(Y)
    U1 = np.zeros_like(Y)
    U2 = np.zeros_like(Y)
    U[fin] = profile.eval_k(Y[fin], 0)
    U1[fin] = profile.eval_k(Y[fin], 1)
    U2[fin] = profile.eval_k(Y[fin], 2)
    return U, U1, U2


def build_operator(profile: Profile, nu: float, m: float, lam: float, alpha: complex, N: int, a: float = 4.0, check_conditioning: bool = True) -> CollocationOperator:
    """Assemble the pencil (L, M) on N + 1 mapped Chebyshev nodes."""
    if N < 64:
        raise ConfigError("spectral.N", "N must be at least 64")
    if a <= 0:
        raise ConfigError("spectral.map", "map parameter must be positive")
    if not 0.0 <= m < 1.0:
        raise ConfigError("spectral.m", "Mach number must satisfy 0 <= m < 1")
    if not nu > 0:
        raise ConfigError("spectral.nu", "nu must be positive")
    alpha = complex(alpha)
    Y, D1 = mapped_nodes(N, a)
    n = Y.size
    D2 = D1 @ D1
    if check_conditioning:
        # the map only rescales rows, so the Chebyshev matrix carries the conditioning
        _, Dx = cheb(N)
        cond = np.linalg.cond((Dx @ Dx)[1:-1, 1:-1])
        if cond > COND_LIMIT:
            warnings.warn(f"second-derivative matrix condition estimate {cond:.3g} exceeds {COND_LIMIT:.0e}", RuntimeWarning)
    U, U1, U2 = _profile_samples(profile, Y)
    I = np.eye(n)
    sq = math.sqrt(nu)
    m2 = m * m
    ia = 1j * alpha
    dU = np.diag(U)
    lap = sq * (D2 - alpha**2 * I)
    Z = np.zeros((n, n), dtype=complex)
    # blocks [p, u, v]
    Lc = [ia * m2 * dU, ia * I, D1.astype(complex)]
    Mc = [ia * m2 * I, Z, Z]
    Lx = [-(ia * I + sq * m2 * np.diag(U2)), lap + ia * lam * sq * ia * I - ia * dU, lam * sq * ia * D1 - np.diag(U1)]
    Mx = [Z, -ia * I, Z]
    Ly = [-D1.astype(complex), lam * sq * ia * D1, lap + lam * sq * D2 - ia * dU]
    My = [Z, Z, -ia * I]
    L = np.block([Lc, Lx, Ly]).astype(complex)
    M = np.block([Mc, Mx, My]).astype(complex)
    # boundary rows: u, v at the wall and at infinity, p at infinity
    rows = []
    for blk, node in ((1, 0), (1, n - 1), (2, 0), (2, n - 1), (0, n - 1)):
        r = blk * n + node
        L[r, :] = 0.0
        M[r, :] = 0.0
        L[r, r] = 1.0
        rows.append(r)
    params = {"nu": nu, "m": m, "lambda": lam, "alpha": [alpha.real, alpha.imag], "N": N, "a": a}
    return CollocationOperator(L, M, Y, D1, a, rows, params)


def eigen_residual(op: CollocationOperator, c: complex, x) -> float:
    x = np.asarray(x)
    return float(np.linalg.norm(op.L @ x - c * (op.M @ x)) / np.linalg.norm(x))


def _shift_invert(op: CollocationOperator, shift: complex, k: int):
    A = op.L - shift * op.M
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", linalg.LinAlgWarning)
            lu = linalg.lu_factor(A, check_finite=False)
    except (linalg.LinAlgWarning, ValueError, np.linalg.LinAlgError):
        return None
    if np.min(np.abs(np.diag(lu[0]))) == 0.0:
        return None
    n = A.shape[0]
    Mop = op.M
    opinv = LinearOperator((n, n), matvec=lambda x: linalg.lu_solve(lu, Mop @ x, check_finite=False), dtype=complex)
    v0 = np.ones(n, dtype=complex)
    k = min(k, n - 2)
    try:
        mu, vec = eigs(opinv, k=k, which="LM", v0=v0, tol=1e-11, maxiter=500, ncv=min(n - 1, max(4 * k, 40)))
    except ArpackNoConvergence as exc:
        # keep the converged pairs; the far ones belong to the continuous spectrum
        mu, vec = exc.eigenvalues, exc.eigenvectors
        if mu.size == 0:
            raise SolverError("spectral.no-convergence", "Arnoldi iteration did not converge") from exc
    c = shift + 1.0 / mu
    order = np.lexsort((np.round(c.imag, 14), np.round(c.real, 14), np.round(np.abs(c - shift), 14)))
    return c[order], vec[:, order], lu


def _polish(op, c, x, lu_shift=None, steps=2):
    """Rayleigh-quotient refinement of an eigenpair by inverse iteration at c."""
    for _ in range(steps):
        A = op.L - c * op.M
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", linalg.LinAlgWarning)
                y = linalg.solve(A, op.M @ x, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            break
        if not np.all(np.isfinite(y)):
            break
        x = y / np.linalg.norm(y)
        w = x.conj()
        num = w @ (op.L @ x)
        den = w @ (op.M @ x)
        if den == 0:
            break
        c = num / den
    return c, x


def solve_spectrum(op: CollocationOperator, shift: complex, k: int = 6, profile: Profile | None = None, doubling: bool = True, movement_tol: float = 1e-4) -> Spectrum:
    """k eigenvalues nearest ``shift``; the doubling test rebuilds the operator at 2N."""
    shift = complex(shift)
    res = None
    s = shift
    for attempt in range(4):
        res = _shift_invert(op, s, k)
        if res is not None:
            break
        s = shift * (1.0 + 1e-8 * (attempt + 1)) + 1e-10j
    if res is None:
        raise SolverError("spectral.factorization-singular", "shifted pencil stayed singular after perturbation")
    c, vec, _ = res
    pol_c = []
    pol_v = []
    resid = []
    for j in range(c.size):
        cj, xj = _polish(op, c[j], vec[:, j])
        pol_c.append(cj)
        pol_v.append(xj)
        resid.append(eigen_residual(op, cj, xj))
    c = np.array(pol_c)
    V = np.array(pol_v).T
    flags = np.zeros(c.size, dtype=bool)
    movement = None
    info = {"shift": [shift.real, shift.imag], "shift_used": [s.real, s.imag]}
    if doubling:
        if profile is None:
            raise ValueError("the doubling test needs the profile")
        p = op.params
        alpha = complex(*p["alpha"])
        fine = build_operator(profile, p["nu"], p["m"], p["lambda"], alpha, 2 * p["N"], p["a"], check_conditioning=False)
        fs = solve_spectrum(fine, shift, k=k, doubling=False)
        movement = np.array([np.min(np.abs(fs.eigenvalues - cj)) / abs(cj) for cj in c])
        flags = movement >= movement_tol
        info["fine_resolution"] = 2 * p["N"]
    return Spectrum(c, flags, op.params["N"], movement, np.array(resid), V, info)


def track_eigenvalue(spec: Spectrum, target: complex, unstable_only: bool = True):
    """Genuine eigenvalue nearest to ``target`` (optionally with c_i > 0)."""
    cand = [(abs(c - target), j) for j, c in enumerate(spec.eigenvalues) if not spec.spurious_flags[j] and (c.imag > 0 or not unstable_only)]
    if not cand:
        return None
    return int(min(cand)[1])
