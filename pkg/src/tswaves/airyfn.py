"""Complex Airy function and the rotated antiderivatives used by the fast mode.

Values of Ai come from the AMOS routines in :mod:`scipy.special`.  Two
independent reference evaluations are kept alongside (a Maclaurin series summed
in extended precision and the large-|z| asymptotic series with the connection
formula); the test-suite checks the library values against them.

Rotated antiderivatives::

    calA(1, z) = -int_z^inf Ai(e^{i phi} t) dt,     phi = pi/6 - theta0
    calA(2, z) = -int_z^inf calA(1, t) dt
    calB(1, z) =  int_0^z Ai(e^{i psi} t) dt,       psi = 5 pi/6 - theta0
    calB(2, z) =  int_0^z calB(1, t) dt

The rays to infinity run parallel to the real axis, where the rotated
integrand decays.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import ConfigError, SolverError

__all__ = [
    "AiryEval",
    "RotatedAntiderivatives",
    "eval_airy",
    "airy",
    "airy_scaled",
    "airy_reference_series",
    "airy_reference_asymptotic",
    "airy_reference",
    "eval_rotated_antiderivatives",
    "a0_log_derivative",
    "HANDOFF_RADIUS",
]

HANDOFF_RADIUS = 8.0
OMEGA = cmath.exp(2j * math.pi / 3)


@dataclass(frozen=True)
class AiryEval:
    ai: complex
    ai_prime: complex
    regime: str  # "series" or "asymptotic"


def _zeta(z):
    return (2.0 / 3.0) * np.power(z, 1.5)


def eval_airy(z: complex) -> AiryEval:
    z = complex(z)
    if not cmath.isfinite(z):
        raise ConfigError("airyfn.domain", "z must be finite")
    if (-_zeta(z)).real > 700:
        raise SolverError("airyfn.overflow", f"Ai({z}) overflows (growth direction)")
    ai, aip, _, _ = special.airy(z)
    regime = "series" if abs(z) <= HANDOFF_RADIUS else "asymptotic"
    return AiryEval(complex(ai), complex(aip), regime)


def airy(z):
    """Vectorized (Ai, Ai') for complex arrays."""
    ai, aip, _, _ = special.airy(np.asarray(z, dtype=complex))
    return ai, aip


def airy_scaled(z):
    """Return (Ai e^{zeta}, Ai' e^{zeta}, zeta) with zeta = (2/3) z^{3/2}.

    Ai(z) = first * exp(-zeta); exponent bookkeeping stays in log space.
    """
    z = np.asarray(z, dtype=complex)
    eai, eaip, _, _ = special.airye(z)
    return eai, eaip, _zeta(z)


# ---------------------------------------------------------------------------
# reference evaluations


def airy_reference_series(z: complex, terms: int = 60, dps: int = 50):
    """Maclaurin series for (Ai, Ai'), summed with ``dps`` decimal digits."""
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z)
        c1 = mpmath.mpf(3) ** (-mpmath.mpf(2) / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
        c2 = mpmath.mpf(3) ** (-mpmath.mpf(1) / 3) / mpmath.gamma(mpmath.mpf(1) / 3)
        z3 = zz**3
        # f = sum a_k z^{3k}, g = sum b_k z^{3k+1}
        a = mpmath.mpf(1)
        b = mpmath.mpf(1)
        f = fp = g = gp = mpmath.mpf(0)
        p = mpmath.mpf(1)  # z^{3k}
        q = mpmath.mpf(0)  # z^{3k-1}, zero for k = 0
        for k in range(terms):
            f += a * p
            g += b * p * zz
            fp += a * 3 * k * q
            gp += b * (3 * k + 1) * p
            q = p * zz * zz
            a = a / ((3 * k + 2) * (3 * k + 3))
            b = b / ((3 * k + 3) * (3 * k + 4))
            p = p * z3
        ai = c1 * f - c2 * g
        aip = c1 * fp - c2 * gp
        return complex(ai), complex(aip)


def _asym_coeffs(n):
    u = [1.0]
    for k in range(1, n + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n + 1)]
    return u, v


_U, _V = _asym_coeffs(60)


def _asym_sector(z: complex, min_terms: int):
    zeta = (2.0 / 3.0) * z**1.5
    pre = cmath.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    s_ai = 0.0
    s_aip = 0.0
    last = math.inf
    for k in range(len(_U)):
        t = (-1) ** k * _U[k] / zeta**k
        tp = (-1) ** k * _V[k] / zeta**k
        if k >= min_terms and abs(t) > last:
            break
        s_ai += t
        s_aip += tp
        last = abs(t)
        if k >= min_terms and last < 1e-17 * abs(s_ai):
            break
    return pre * s_ai / z**0.25, -pre * s_aip * z**0.25


def airy_reference_asymptotic(z: complex, min_terms: int = 6):
    """Large-|z| expansion, rotated by the connection formula off |arg z| <= 2pi/3."""
    z = complex(z)
    if abs(cmath.phase(z)) <= 2 * math.pi / 3:
        return _asym_sector(z, min_terms)
    a1, d1 = _asym_sector(OMEGA * z, min_terms)
    a2, d2 = _asym_sector(OMEGA**2 * z, min_terms)
    ai = -OMEGA * a1 - OMEGA**2 * a2
    aip = -(OMEGA**2) * d1 - OMEGA**4 * d2
    return ai, aip


def airy_reference(z: complex):
    """Reference (Ai, Ai', regime) independent of the library evaluation."""
    if abs(z) <= HANDOFF_RADIUS:
        return (*airy_reference_series(z), "series")
    return (*airy_reference_asymptotic(z), "asymptotic")


# ---------------------------------------------------------------------------
# rotated antiderivatives


@dataclass(frozen=True)
class RotatedAntiderivatives:
    z: complex
    theta0: float
    A1: complex
    A2: complex
    B1: complex
    B2: complex


def _quad_complex(fun, a, b, tol):
    with warnings.catch_warnings():
        # QUADPACK reports roundoff once the tolerance sits at machine level
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fun, a, b, complex_func=True, epsabs=tol, epsrel=1e-13, limit=400)
    return val


def _ray_integrals(z: complex, phi: float, tol: float = 1e-11):
    """Scaled (int_0^inf Ai(w) dtau, int_0^inf tau Ai(w) dtau), w = e^{i phi}(z+tau).

    Returned with the common factor exp(-zeta(w0)) removed; that exponent is
    returned separately.
    """
    if abs(phi) >= math.pi / 3:
        raise SolverError("airyfn.sector-violation", f"phase {phi} leaves the Airy decay sector")
    rot = cmath.exp(1j * phi)
    w0 = rot * z
    zeta0 = (2.0 / 3.0) * w0**1.5

    def g(tau):
        w = rot * (z + tau)
        e, _, _, _ = special.airye(w)
        return e * cmath.exp(-(2.0 / 3.0) * w**1.5 + zeta0)

    # split at the point nearest the turning point, where oscillation ends
    brk = max(0.0, -z.real) + 2.0
    i1 = _quad_complex(g, 0.0, brk, tol) + _quad_complex(g, brk, np.inf, tol)
    i2 = _quad_complex(lambda t: t * g(t), 0.0, brk, tol) + _quad_complex(lambda t: t * g(t), brk, np.inf, tol)
    return i1, i2, zeta0


def _segment_integrals(z: complex, psi: float, tol: float = 1e-11):
    rot = cmath.exp(1j * psi)
    if abs(z) == 0:
        return 0j, 0j

    def g(s):
        return special.airy(rot * z * s)[0]

    b1 = z * _quad_complex(g, 0.0, 1.0, tol)
    b2 = z * z * _quad_complex(lambda s: (1.0 - s) * g(s), 0.0, 1.0, tol)
    return b1, b2


def eval_rotated_antiderivatives(z: complex, theta0: float = 0.0) -> RotatedAntiderivatives:
    if abs(theta0) > math.pi / 100:
        raise ConfigError("airyfn.theta0", "|theta0| must not exceed pi/100")
    z = complex(z)
    i1, i2, zeta0 = _ray_integrals(z, math.pi / 6 - theta0)
    if (-zeta0).real > 700:
        raise SolverError("airyfn.overflow", "rotated antiderivative overflows")
    s = cmath.exp(-zeta0)
    b1, b2 = _segment_integrals(z, 5 * math.pi / 6 - theta0)
    return RotatedAntiderivatives(z, theta0, -s * i1, s * i2, b1, b2)


def rotated_ratios(z: complex, theta0: float = 0.0):
    """Overflow-free (calA(2)/calA(1), Ai(e^{i phi} z)/calA(1), Ai calA(2)/calA(1)^2)."""
    phi = math.pi / 6 - theta0
    i1, i2, zeta0 = _ray_integrals(complex(z), phi)
    eai = special.airye(cmath.exp(1j * phi) * complex(z))[0]
    a1, a2 = -i1, i2
    return a2 / a1, eai / a1, eai * a2 / a1**2


def a0_log_derivative(z: complex, theta0: float = 0.0, delta0: float = 0.1) -> complex:
    """A_0'(z)/A_0(z) with A_0(z) = int_{e^{i phi} z}^inf Ai(t) dt."""
    z = complex(z)
    if z.imag > delta0:
        raise ConfigError("airyfn.band", f"Im z = {z.imag} exceeds delta0 = {delta0}")
    phi = math.pi / 6 - theta0
    i1, _, zeta0 = _ray_integrals(z, phi)
    if abs(i1) < 1e-300:
        raise SolverError("airyfn.division-degenerate", "|A_0(z)| underflows")
    eai = special.airye(cmath.exp(1j * phi) * z)[0]
    return complex(-eai / i1)
