import cmath
import math

import numpy as np
import pytest

from tswaves.acceptance import airy_test_grid
from tswaves.airyfn import (
    OMEGA,
    a0_log_derivative,
    airy_reference,
    eval_airy,
    eval_rotated_antiderivatives,
    rotated_ratios,
)
from tswaves.errors import ConfigError, SolverError


def test_values_at_origin():
    e = eval_airy(0.0)
    assert e.ai.real == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-14)
    assert e.ai_prime.real == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-14)
    assert e.ai.real == pytest.approx(0.3550280538878, abs=1e-12)
    assert e.ai_prime.real == pytest.approx(-0.2588194037928, abs=1e-12)


def test_decay_asymptote():
    z = 20.0
    lead = 1 / (2 * math.sqrt(math.pi)) * z**-0.25 * math.exp(-(2 / 3) * z**1.5)
    assert abs(eval_airy(z).ai.real / lead - 1) < 1e-2


def test_against_reference_on_grid():
    pts = airy_test_grid()
    assert len(pts) == 200
    regimes = set()
    for z in pts:
        e = eval_airy(z)
        ai, aip, reg = airy_reference(z)
        regimes.add(reg)
        assert abs(e.ai - ai) <= 1e-9 * abs(ai)
        assert abs(e.ai_prime - aip) <= 1e-9 * abs(aip)
    assert regimes == {"series", "asymptotic"}


def test_connection_identity():
    for z in airy_test_grid()[::7]:
        t = [eval_airy(z).ai, OMEGA * eval_airy(OMEGA * z).ai, OMEGA**2 * eval_airy(OMEGA**2 * z).ai]
        assert abs(sum(t)) <= 1e-9 * max(abs(x) for x in t)


def test_overflow_in_growth_direction():
    with pytest.raises(SolverError) as exc:
        eval_airy(120 * cmath.exp(2j * math.pi / 3))
    assert exc.value.code == "airyfn.overflow"


def test_rotated_antiderivative_decay_formula():
    th = 0.0
    z = 15.0
    r = cmath.exp(1j * (math.pi / 6 - th))
    lead = -cmath.exp(-1j * (math.pi / 6 - th)) * (r * z) ** -0.75 * cmath.exp(-(2 / 3) * (r * z) ** 1.5)
    got = eval_rotated_antiderivatives(z, th).A1
    # leading term of the rotated tail integral carries the factor 1/(2 sqrt(pi))
    assert abs(got / (lead / (2 * math.sqrt(math.pi))) - 1) < 5e-2


def test_rotated_antiderivative_derivative():
    z, h = 1.3 - 0.2j, 1e-4
    a1 = eval_rotated_antiderivatives(z).A1
    fd = (eval_rotated_antiderivatives(z + h).A2 - eval_rotated_antiderivatives(z - h).A2) / (2 * h)
    assert abs(fd - a1) < 1e-6 * abs(a1)


def test_segment_integral_at_origin():
    assert eval_rotated_antiderivatives(0.0).B1 == 0


def test_rotated_ratios_consistent():
    z = 2.0 - 0.05j
    ra = eval_rotated_antiderivatives(z)
    r21, _, _ = rotated_ratios(z)
    assert abs(r21 - ra.A2 / ra.A1) < 1e-10 * abs(r21)


def test_a0_log_derivative_bounds():
    for x in np.linspace(0.0, 20.0, 41):
        v = a0_log_derivative(x)
        assert v.real <= -1 / 3
        assert abs(v) <= 5 * (1 + math.sqrt(x))
    assert cmath.isfinite(a0_log_derivative(0.0))


def test_a0_band_and_sector():
    with pytest.raises(ConfigError):
        a0_log_derivative(1.0 + 0.5j, delta0=0.1)
    with pytest.raises(ConfigError):
        eval_rotated_antiderivatives(1.0, theta0=0.1)
