import math

import numpy as np
import pytest

from tswaves.acceptance import blasius_oracle
from tswaves.errors import ConfigError, SolverError
from tswaves.profiles import (
    StretchedProfile,
    check_structure,
    critical_layer,
    export_profile_csv,
    load_profile_csv,
    make_analytic_profile,
    solve_blasius,
)


def test_blasius_boundary_conditions():
    sol = solve_blasius()
    assert sol.f[0] == 0.0 and sol.fp[0] == 0.0


def test_blasius_wall_shear_matches_oracle():
    sol = solve_blasius()
    assert sol.fpp0 == pytest.approx(0.3320573, abs=1e-6)
    assert abs(sol.fpp0 - blasius_oracle()) < 1e-6


def test_blasius_free_stream():
    sol = solve_blasius()
    k = int(np.argmin(np.abs(sol.zeta - 12.0)))
    assert abs(sol.fp[k] - 1.0) < 1e-7
    assert sol.ode_residual() < 1e-8


def test_blasius_bad_bracket():
    with pytest.raises(SolverError) as exc:
        solve_blasius(bracket=(0.4, 0.5))
    assert exc.value.code == "profiles.no-convergence"


def test_blasius_profile_structure(blasius):
    Y = np.linspace(0.0, 15.0, 3001)
    U = blasius.eval_k(Y)
    assert U[0] == 0.0
    assert abs(blasius.eval_k(15.0) - 1.0) < 1e-6
    assert np.all((U[1:] > 0) & (U[1:] < 1.0 + 1e-15))
    assert blasius.wall_slope > 0
    assert check_structure(blasius, 0.3).passed


def test_blasius_derivatives_consistent(blasius):
    Y = np.linspace(0.2, 8.0, 50)
    h = 1e-5
    for k in range(4):
        fd = (blasius.eval_k(Y + h, k) - blasius.eval_k(Y - h, k)) / (2 * h)
        assert np.max(np.abs(fd - blasius.eval_k(Y, k + 1))) < 1e-5 * max(1.0, np.max(np.abs(fd)))


def test_analytic_closed_forms():
    t = make_analytic_profile("tanh", 1.0)
    assert t.eval_k(0.0) == 0.0 and t.eval_k(0.0, 1) == pytest.approx(1.0)
    e = make_analytic_profile("exp", 2.0)
    assert e.eval_k(0.0, 2) == pytest.approx(-4.0)


@pytest.mark.parametrize("kind", ["tanh", "exp"])
def test_analytic_derivatives(kind):
    p = make_analytic_profile(kind, 1.3)
    Y = np.linspace(0.1, 5.0, 40)
    h = 1e-5
    for k in range(4):
        fd = (p.eval_k(Y + h, k) - p.eval_k(Y - h, k)) / (2 * h)
        assert np.allclose(fd, p.eval_k(Y, k + 1), atol=1e-7)


def test_structure_checks():
    assert check_structure(make_analytic_profile("tanh", 1.0), 1.9).passed
    assert not check_structure(make_analytic_profile("tanh", 1.0), 3.0).passed
    assert check_structure(make_analytic_profile("exp", 2.0), 1.0).passed


def test_analytic_bad_input():
    with pytest.raises(ConfigError):
        make_analytic_profile("sech", 1.0)
    with pytest.raises(ConfigError):
        make_analytic_profile("tanh", -1.0)


def test_critical_layer(blasius):
    assert critical_layer(make_analytic_profile("tanh", 1.0), math.tanh(1.0)) == pytest.approx(1.0, abs=1e-12)
    yc = critical_layer(blasius, 0.05)
    assert yc == pytest.approx(0.05 / 0.33206, rel=1e-3)
    assert blasius.eval_k(yc) == pytest.approx(0.05, abs=1e-13)
    with pytest.raises(ConfigError) as exc:
        critical_layer(blasius, 0.0)
    assert exc.value.code == "profiles.out-of-range"


def test_stretched_profile(blasius):
    s = StretchedProfile(blasius, 6.6)
    assert s.wall_slope == pytest.approx(6.6 * blasius.wall_slope)
    assert s.eval_k(0.5, 2) == pytest.approx(6.6**2 * blasius.eval_k(3.3, 2))


def test_csv_round_trip(tmp_path, blasius):
    path = tmp_path / "u.csv"
    export_profile_csv(blasius, path, comment="config-hash test")
    assert path.read_text().startswith("# config-hash test\nY,U,")
    table = load_profile_csv(path)
    Y = np.linspace(0.05, 10.0, 77)
    assert np.max(np.abs(table.eval_k(Y) - blasius.eval_k(Y))) < 1e-6


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        load_profile_csv(path)
