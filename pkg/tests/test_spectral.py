import math
import warnings

import numpy as np
import pytest

from tswaves import spectral
from tswaves.errors import ConfigError
from tswaves.spectral import build_operator, cheb, eigen_residual, mapped_nodes, solve_spectrum, track_eigenvalue

NU, M, ALPHA = 1e-6, 0.3, 0.15
SHIFT = 0.331 + 0.015j


def test_constant_annihilation():
    _, D = cheb(64)
    assert np.max(np.abs(D @ np.ones(65))) < 1e-10
    _, D1 = mapped_nodes(64)
    assert np.max(np.abs(D1 @ np.ones(65))) < 1e-10


def test_mapped_monomial():
    a = 4.0
    Y, D1 = mapped_nodes(64, a)
    xi, _ = cheb(64)
    f = xi**3
    fin = np.isfinite(Y)
    exact = 3 * xi[fin] ** 2 * 2 * a / (Y[fin] + a) ** 2
    assert np.max(np.abs((D1 @ f)[fin] - exact)) < 1e-8


def _incompressible_rows(profile, N, a=4.0):
    """u and v momentum rows of the incompressible system, assembled directly."""
    Y, D1 = mapped_nodes(N, a)
    n = Y.size
    D2 = D1 @ D1
    U = np.ones(n)
    U1 = np.zeros(n)
    fin = np.isfinite(Y)
    U[fin] = profile.eval_k(Y[fin], 0)
    U1[fin] = profile.eval_k(Y[fin], 1)
    ia = 1j * ALPHA
    lap = math.sqrt(NU) * (D2 - ALPHA**2 * np.eye(n))
    Z = np.zeros((n, n))
    xrow = np.hstack([-ia * np.eye(n), lap - ia * np.diag(U), -np.diag(U1)])
    yrow = np.hstack([-D1, Z, lap - ia * np.diag(U)])
    return xrow, yrow


def test_zero_mach_operator(blasius):
    N = 64
    op = build_operator(blasius, NU, 0.0, 0.0, ALPHA, N)
    n = N + 1
    xrow, yrow = _incompressible_rows(blasius, N)
    keep = [r for r in range(n) if n + r not in op.bc_rows]
    assert np.max(np.abs(op.L[n : 2 * n][keep] - xrow[keep])) < 1e-10
    keep = [r for r in range(n) if 2 * n + r not in op.bc_rows]
    assert np.max(np.abs(op.L[2 * n :][keep] - yrow[keep])) < 1e-10
    # density rows reduce to the divergence constraint
    assert np.all(op.M[:n] == 0)


def test_eigenpair_residuals(blasius):
    op = build_operator(blasius, NU, M, 0.0, ALPHA, 128)
    spec = solve_spectrum(op, SHIFT, k=4, doubling=False)
    for c, x in zip(spec.eigenvalues, spec.vectors.T):
        assert eigen_residual(op, c, x) < 1e-8


def test_mach_continuity(blasius):
    found = []
    for m in (0.0, 1e-8):
        op = build_operator(blasius, NU, m, 0.0, ALPHA, 128)
        spec = solve_spectrum(op, SHIFT, k=4, doubling=False)
        found.append(spec.eigenvalues[track_eigenvalue(spec, SHIFT)])
    assert abs(found[1] - found[0]) / abs(found[0]) < 1e-5


def test_resolution_and_unstable_mode(blasius):
    op = build_operator(blasius, NU, M, 0.0, ALPHA, 256)
    spec = solve_spectrum(op, SHIFT, k=6, profile=blasius)
    j = track_eigenvalue(spec, SHIFT)
    assert j is not None
    c = spec.eigenvalues[j]
    assert c.imag > 0 and spec.movement[j] < 1e-4
    assert spec.as_dict()["eigenvalues"][j]["spurious"] is False


def test_singular_shift_is_perturbed(blasius):
    op = build_operator(blasius, NU, M, 0.0, ALPHA, 96)
    c = solve_spectrum(op, SHIFT, k=2, doubling=False).eigenvalues[0]
    spec = solve_spectrum(op, c, k=2, doubling=False)
    assert np.min(np.abs(spec.eigenvalues - c)) < 1e-8 * abs(c)


def test_input_validation(blasius):
    with pytest.raises(ConfigError):
        build_operator(blasius, NU, M, 0.0, ALPHA, 32)
    with pytest.raises(ConfigError):
        build_operator(blasius, NU, 1.2, 0.0, ALPHA, 64)


def test_conditioning_warning(blasius, monkeypatch):
    monkeypatch.setattr(spectral, "COND_LIMIT", 1.0)
    with pytest.warns(RuntimeWarning):
        build_operator(blasius, NU, M, 0.0, ALPHA, 64)
