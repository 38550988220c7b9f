"""Command-line front end.

Configuration is a JSON document validated against ``RunConfig``; command-line
flags override individual fields before validation.  Results are written as
JSON (sorted keys, no timestamps) and optionally as CSV with a leading
``# config-hash`` comment.

Exit status: 0 success, 1 configuration error, 2 solver failure, 3 a
``reproduce`` criterion that ran but did not pass.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import __version__
from .errors import ConfigError, SolverError

SCHEMA_VERSION = 1
WORKERS_ENV = "TSWAVES_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_CRITERION_FAILED = 3


# ---------------------------------------------------------------------------
# configuration schema


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProfileSpec(_Strict):
    kind: Literal["blasius", "tanh", "exp", "table"] = "blasius"
    stretch: float = Field(6.6, gt=0)
    steepness: float = Field(1.0, gt=0)
    path: Optional[str] = None

    @model_validator(mode="after")
    def _table_path(self):
        if self.kind == "table" and not self.path:
            raise ValueError("profile kind 'table' needs a path")
        return self


class Physics(_Strict):
    nu: float = Field(1e-10, gt=0, lt=1)
    nu_list: Optional[list[float]] = None
    m: float = Field(0.3, ge=0, lt=1)
    lam: float = 0.0
    A: Optional[float] = Field(10.0, gt=0)
    alpha_re: Optional[float] = Field(None, gt=0)
    alpha_im: Optional[float] = None
    theta0: Optional[float] = None
    c_re: Optional[float] = None
    c_im: Optional[float] = None

    @field_validator("nu_list")
    @classmethod
    def _positive(cls, v):
        if v is not None and (not v or any(not (0 < x < 1) for x in v)):
            raise ValueError("nu_list entries must lie in (0, 1)")
        return v

    @field_validator("theta0")
    @classmethod
    def _sector(cls, v):
        if v is not None and abs(v) > math.pi / 100:
            raise ValueError("|theta0| must not exceed pi/100")
        return v


class Solver(_Strict):
    tier: Literal["leading", "boundary"] = "leading"
    p: int = Field(16, ge=4)
    y_max: float = Field(40.0, gt=0)
    tol: float = Field(1e-12, gt=0)
    max_iters: int = Field(50, ge=1)
    fp_iters: int = Field(30, ge=0)
    band: tuple[float, float] = (8.0, 48.0)
    M: float = Field(1.0, ge=1)
    delta0: float = Field(0.1, gt=0)
    N: int = Field(256, ge=64)
    map_a: float = Field(4.0, gt=0)
    k: int = Field(6, ge=1)
    movement_tol: float = Field(1e-4, gt=0)
    workers: int = Field(1, ge=1)

    @field_validator("band")
    @classmethod
    def _band(cls, v):
        if not 0 < v[0] < v[1]:
            raise ValueError("band must satisfy 0 < low < high")
        return v


class Outputs(_Strict):
    json_path: Optional[str] = None
    csv_path: Optional[str] = None


class RunConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    profile: ProfileSpec = ProfileSpec()
    physics: Physics = Physics()
    solver: Solver = Solver()
    outputs: Outputs = Outputs()

    def canonical(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def load_config(path: Optional[str], overrides: dict) -> RunConfig:
    """Read the JSON file (if any), apply dotted-key overrides, validate."""
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("cli.config", f"cannot read {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("cli.config", "config must be a JSON object")
    for key, value in overrides.items():
        if value is None:
            continue
        section, name = key.split(".")
        data.setdefault(section, {})[name] = value
    return RunConfig.model_validate(data)


def resolve_workers(cfg: RunConfig) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env is None or env == "":
        return cfg.solver.workers
    try:
        n = int(env)
    except ValueError as exc:
        raise ConfigError("cli.workers", f"{WORKERS_ENV} must be an integer") from exc
    if n < 1:
        raise ConfigError("cli.workers", f"{WORKERS_ENV} must be at least 1")
    return n


# ---------------------------------------------------------------------------
# builders


def build_profile(spec: ProfileSpec):
    from .profiles import StretchedProfile, blasius_profile, load_profile_csv, make_analytic_profile

    if spec.kind == "blasius":
        base = blasius_profile()
        return base if spec.stretch == 1.0 else StretchedProfile(base, spec.stretch)
    if spec.kind == "table":
        return load_profile_csv(spec.path)
    return make_analytic_profile(spec.kind, spec.steepness)


def _alpha(ph: Physics, nu: float) -> complex:
    if ph.alpha_re is not None:
        ar = ph.alpha_re
    elif ph.A is not None:
        ar = ph.A * nu**0.125
    else:
        raise ConfigError("cli.alpha", "give alpha_re or A")
    if ph.alpha_im is not None:
        return complex(ar, ph.alpha_im)
    if ph.theta0 is not None:
        # alpha = |alpha| e^{-3 i theta0}
        return complex(ar, -ar * math.tan(3.0 * ph.theta0))
    return complex(ar, 0.0)


def _problem(cfg: RunConfig, profile, nu: Optional[float] = None):
    from .dispersion import DispersionProblem

    ph = cfg.physics
    return DispersionProblem(profile, ph.nu if nu is None else nu, ph.m, ph.lam, cfg.solver.M, cfg.solver.y_max, tuple(cfg.solver.band))


def _context(cfg: RunConfig, profile):
    """Wave context from the configured c, or from the leading-tier root when c is absent."""
    from .dispersion import solve_temporal
    from .langer import make_context

    ph = cfg.physics
    alpha = _alpha(ph, ph.nu)
    if ph.c_re is not None:
        c = complex(ph.c_re, ph.c_im or 0.0)
        source = "config"
    else:
        c = solve_temporal(alpha, _problem(cfg, profile), "leading", max_iters=cfg.solver.max_iters, fp_iters=cfg.solver.fp_iters, tol=cfg.solver.tol).c
        source = "leading-root"
    return make_context(profile, ph.nu, ph.m, alpha, c, ph.lam), source


# ---------------------------------------------------------------------------
# output


def _plain(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


class Emitter:
    def __init__(self, cfg: RunConfig, command: str, stdout=None):
        self.cfg = cfg
        self.command = command
        self.hash = cfg.digest()
        self.stdout = sys.stdout if stdout is None else stdout

    def json(self, result) -> None:
        doc = {"schema_version": SCHEMA_VERSION, "command": self.command, "config_hash": self.hash, "version": __version__, "result": result}
        text = dumps(doc)
        if self.cfg.outputs.json_path:
            with open(self.cfg.outputs.json_path, "w") as fh:
                fh.write(text)
        self.stdout.write(text)

    def csv(self, header, rows) -> Optional[str]:
        path = self.cfg.outputs.csv_path
        if not path:
            return None
        buf = io.StringIO()
        buf.write(f"# config-hash {self.hash} command {self.command}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
        return path


def _reim(values):
    values = np.asarray(values, dtype=complex)
    return values.real, values.imag


# ---------------------------------------------------------------------------
# subcommands


def cmd_blasius(cfg, args, out: Emitter):
    from .profiles import export_profile_csv, solve_blasius

    sol = solve_blasius()
    k = int(np.argmin(np.abs(sol.zeta - 12.0)))
    result = {
        "fpp0": sol.fpp0,
        "iterations": sol.iterations,
        "zeta_max": sol.zeta_max,
        "fp12_minus_1": abs(sol.fp[k] - 1.0),
        "ode_residual": sol.ode_residual(),
        "profile": cfg.profile.model_dump(),
    }
    if cfg.outputs.csv_path:
        export_profile_csv(build_profile(cfg.profile), cfg.outputs.csv_path, comment=f"config-hash {out.hash} command {out.command}")
    out.json(result)
    return EXIT_OK


def cmd_airy_check(cfg, args, out: Emitter):
    from .acceptance import airy_test_grid
    from .airyfn import OMEGA, airy_reference, eval_airy

    pts = [complex(args.z_re, args.z_im or 0.0)] if args.z_re is not None else airy_test_grid()
    rows = []
    worst = worst_conn = 0.0
    for z in pts:
        e = eval_airy(z)
        ai, aip, regime = airy_reference(z)
        err = max(abs(e.ai - ai) / abs(ai), abs(e.ai_prime - aip) / abs(aip))
        terms = [e.ai, OMEGA * eval_airy(OMEGA * z).ai, OMEGA**2 * eval_airy(OMEGA**2 * z).ai]
        conn = abs(sum(terms)) / max(abs(x) for x in terms)
        worst, worst_conn = max(worst, err), max(worst_conn, conn)
        rows.append((z.real, z.imag, e.ai.real, e.ai.imag, e.ai_prime.real, e.ai_prime.imag, regime, err, conn))
    out.csv(["z_re", "z_im", "ai_re", "ai_im", "aip_re", "aip_im", "reference", "relative_error", "connection_residual"], rows)
    result = {"points": len(pts), "max_relative_error": worst, "max_connection_residual": worst_conn}
    if len(pts) == 1:
        r = rows[0]
        result.update({"z": [r[0], r[1]], "ai": [r[2], r[3]], "ai_prime": [r[4], r[5]], "reference": r[6]})
    out.json(result)
    return EXIT_OK


def cmd_langer_dump(cfg, args, out: Emitter):
    from .airy_bvp import fast_mode_grid
    from .langer import build_langer, err_terms

    profile = build_profile(cfg.profile)
    ctx, source = _context(cfg, profile)
    lmap = build_langer(profile, ctx, cfg.solver.M, cfg.solver.y_max)
    Y = fast_mode_grid(ctx, lmap, cfg.solver.y_max, cfg.solver.p).nodes
    er, d1, d2 = lmap.evaluate(Y)
    e1, e2 = err_terms(lmap, ctx, Y)
    out.csv(
        ["Y", "eta_r", "deta", "d2eta", "err1_re", "err1_im", "err2_re", "err2_im"],
        zip(Y, er, d1, d2, *_reim(e1), *_reim(e2)),
    )
    result = {
        "context": ctx.summary(),
        "c_source": source,
        "eta_i": lmap.eta_i,
        "blend_width": lmap.width,
        "seams": lmap.seams(),
        "seam_jump": lmap.seam_jump(),
        "quadratic_radius": lmap.calibrate_L(),
        "nodes": int(Y.size),
    }
    out.json(result)
    return EXIT_OK


def cmd_rayleigh_mode(cfg, args, out: Emitter):
    from .modes import slow_boundary
    from .rayleigh import slow_mode, wall_ratio, wall_ratio_asymptotic, wall_value_asymptotic

    profile = build_profile(cfg.profile)
    ctx, source = _context(cfg, profile)
    sm = slow_mode(profile, ctx)
    sb = slow_boundary(profile, ctx, sm)
    Y = sm.grid.nodes
    out.csv(["Y", "phi_re", "phi_im"], zip(Y, *_reim(sm.phi.values)))
    asym = wall_value_asymptotic(ctx)
    dev = abs(sm.wall_value - asym)
    result = {
        "context": ctx.summary(),
        "c_source": source,
        "wall_value": sm.wall_value,
        "wall_slope": sm.wall_slope,
        "wall_ratio": wall_ratio(sm),
        "wall_value_asymptotic": asym,
        "wall_ratio_asymptotic": wall_ratio_asymptotic(ctx),
        "deviation": dev,
        "deviation_scaled": dev / ((abs(ctx.alpha) ** 2 + abs(ctx.c) ** 2) * abs(math.log(ctx.c_i))),
        "iteration_ratios": sm.info["ratios"],
        "boundary": sb.as_dict(),
    }
    out.json(result)
    return EXIT_OK


def cmd_fast_mode(cfg, args, out: Emitter):
    from .airy_bvp import ModifiedAiryPair, fast_mode, wronskian_residual
    from .langer import build_langer
    from .modes import fast_boundary

    profile = build_profile(cfg.profile)
    ctx, source = _context(cfg, profile)
    lmap = build_langer(profile, ctx, cfg.solver.M, cfg.solver.y_max)
    fm = fast_mode(profile, ctx, lmap, correct=args.correct, c0=cfg.solver.delta0)
    fb = fast_boundary(profile, ctx, lmap, fm)
    g = fm.w_a0.grid
    out.csv(["Y", "w_re", "w_im", "psi_re", "psi_im"], zip(g.nodes, *_reim(fm.w_a0.values), *_reim(fm.psi_a0.values)))
    pair = ModifiedAiryPair(ctx, lmap)
    result = {
        "context": ctx.summary(),
        "c_source": source,
        "wall_ratio": fm.wall_ratio,
        "wall_ratio_leading": fm.wall_ratio_leading,
        "tildeA1_0": fm.tildeA1_0,
        "tildeA2_0": fm.tildeA2_0,
        "comparison": fm.comparison,
        "info": fm.info,
        "boundary": fb.as_dict(),
        "wronskian_residual": {"A1A2": wronskian_residual(pair, lmap, ctx, g, "A1A2"), "A2A1": wronskian_residual(pair, lmap, ctx, g, "A2A1")},
    }
    out.json(result)
    return EXIT_OK


def _solve_point(cfg, profile, nu, spatial: bool):
    from .dispersion import solve_spatial, solve_temporal

    problem = _problem(cfg, profile, nu)
    alpha = _alpha(cfg.physics, nu)
    s = cfg.solver
    if spatial:
        return solve_spatial(alpha.real, problem, s.tier)
    start = None if cfg.physics.c_re is None else complex(cfg.physics.c_re, cfg.physics.c_im or 0.0)
    return solve_temporal(alpha, problem, s.tier, c_start=start, max_iters=s.max_iters, fp_iters=s.fp_iters, tol=s.tol)


def cmd_dispersion_solve(cfg, args, out: Emitter):
    profile = build_profile(cfg.profile)
    pt = _solve_point(cfg, profile, cfg.physics.nu, args.spatial)
    out.json({"point": pt.as_dict(), "amplitude": abs(pt.alpha) * cfg.physics.nu**-0.125})
    return EXIT_OK


def _nu_list(cfg, args):
    if args.nu_decades:
        try:
            lo, hi = (float(x) for x in args.nu_decades.lstrip("=").split(":"))
        except ValueError as exc:
            raise ConfigError("cli.nu-decades", "expected LOW:HIGH, e.g. 1e-12:1e-7 or =-12:-7") from exc
        if 0 < lo < 1 and 0 < hi < 1:
            lo, hi = math.log10(lo), math.log10(hi)
        if lo != round(lo) or hi != round(hi):
            raise ConfigError("cli.nu-decades", "endpoints must be whole decades")
        lo, hi = int(round(lo)), int(round(hi))
        if lo > hi:
            raise ConfigError("cli.nu-decades", "LOW must not exceed HIGH")
        return [10.0**k for k in range(lo, hi + 1)]
    if cfg.physics.nu_list:
        return list(cfg.physics.nu_list)
    raise ConfigError("cli.nu-list", "give --nu-decades or physics.nu_list")


def cmd_dispersion_sweep(cfg, args, out: Emitter):
    from .dispersion import sweep_scaling

    profile = build_profile(cfg.profile)
    nus = _nu_list(cfg, args)
    A = cfg.physics.A if cfg.physics.A is not None else 10.0
    try:
        fit = sweep_scaling(nus, A, cfg.physics.m, args.observable, profile, cfg.solver.tier, cfg.physics.lam, resolve_workers(cfg))
    except SolverError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            out.csv(["nu", args.observable], partial.points)
        raise
    out.csv(["nu", args.observable, "residual"], [(a, b, r) for (a, b), r in zip(fit.points, fit.residuals)])
    result = {"observable": args.observable, "A": A, "m": cfg.physics.m, "tier": cfg.solver.tier, "fit": fit.as_dict(), "accepted": fit.accepted}
    out.json(result)
    return EXIT_OK


def cmd_spatial_mode(cfg, args, out: Emitter):
    from .dispersion import solve_mixed

    profile = build_profile(cfg.profile)
    nu = cfg.physics.nu
    pt = _solve_point(cfg, profile, nu, True)
    g0 = pt.info["gamma0"]
    problem = _problem(cfg, profile)
    mixed = []
    slope = profile.wall_slope * math.sqrt(1.0 - cfg.physics.m**2)
    for gamma in (0.0, 0.5 * g0, g0):
        mp = solve_mixed(pt.alpha.real, gamma, problem, cfg.solver.tier)
        mixed.append({"gamma": gamma, "c": mp.c, "margin": mp.c.imag - mp.alpha.imag / slope, "residual": mp.residual})
    out.json({"spatial": pt.as_dict(), "mixed": mixed})
    return EXIT_OK


def cmd_spectrum(cfg, args, out: Emitter):
    from .dispersion import solve_temporal
    from .spectral import build_operator, solve_spectrum, track_eigenvalue

    profile = build_profile(cfg.profile)
    ph, s = cfg.physics, cfg.solver
    alpha = _alpha(ph, ph.nu)
    if args.shift_from_dispersion:
        shift = solve_temporal(alpha, _problem(cfg, profile), s.tier).c
    elif args.shift_re is not None:
        shift = complex(args.shift_re, args.shift_im or 0.0)
    elif ph.c_re is not None:
        shift = complex(ph.c_re, ph.c_im or 0.0)
    else:
        raise ConfigError("cli.shift", "give --shift-from-dispersion, --shift-re/--shift-im or physics.c_re")
    op = build_operator(profile, ph.nu, ph.m, ph.lam, alpha, s.N, s.map_a)
    spec = solve_spectrum(op, shift, k=s.k, profile=profile, movement_tol=s.movement_tol)
    j = track_eigenvalue(spec, shift)
    if j is not None and cfg.outputs.csv_path:
        n = op.n
        x = spec.vectors[:, j]
        fin = np.isfinite(op.nodes)
        p, u, v = x[:n][fin], x[n : 2 * n][fin], x[2 * n :][fin]
        out.csv(["Y", "p_re", "p_im", "u_re", "u_im", "v_re", "v_im"], zip(op.nodes[fin], *_reim(p), *_reim(u), *_reim(v)))
    result = {"shift": shift, "spectrum": spec.as_dict(), "tracked_index": j, "tracked": None if j is None else complex(spec.eigenvalues[j])}
    out.json(result)
    return EXIT_OK


def cmd_reproduce(cfg, args, out: Emitter):
    from .acceptance import CRITERIA, run_criterion

    ids = list(CRITERIA) if args.criterion == "all" else [args.criterion]
    workers = resolve_workers(cfg)
    results = []
    for ident in ids:
        r = run_criterion(ident, workers=workers)
        sys.stderr.write(f"{r.line()}  ({r.elapsed:.1f}s)\n")
        results.append(r)
    out.json({"criteria": [r.as_dict() for r in results], "lines": [r.line() for r in results]})
    return EXIT_OK if all(r.passed for r in results) else EXIT_CRITERION_FAILED


# ---------------------------------------------------------------------------
# argument parsing

_OVERRIDES = {
    "nu": "physics.nu",
    "m": "physics.m",
    "lam": "physics.lam",
    "A": "physics.A",
    "alpha_re": "physics.alpha_re",
    "alpha_im": "physics.alpha_im",
    "theta0": "physics.theta0",
    "c_re": "physics.c_re",
    "c_im": "physics.c_im",
    "profile": "profile.kind",
    "stretch": "profile.stretch",
    "steepness": "profile.steepness",
    "profile_path": "profile.path",
    "tier": "solver.tier",
    "N": "solver.N",
    "workers": "solver.workers",
    "json_out": "outputs.json_path",
    "csv_out": "outputs.csv_path",
}


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--json", dest="json_out", help="also write the JSON result here")
    g.add_argument("--csv", dest="csv_out", help="write tabular output here")
    g.add_argument("--profile", choices=["blasius", "tanh", "exp", "table"])
    g.add_argument("--stretch", type=float, help="wall-variable stretch of the Blasius profile")
    g.add_argument("--steepness", type=float)
    g.add_argument("--profile-path")
    g.add_argument("--nu", type=float)
    g.add_argument("--m", type=float)
    g.add_argument("--lam", type=float)
    g.add_argument("--A", type=float, help="alpha_r = A nu^{1/8}")
    g.add_argument("--alpha-re", type=float)
    g.add_argument("--alpha-im", type=float)
    g.add_argument("--theta0", type=float)
    g.add_argument("--c-re", type=float)
    g.add_argument("--c-im", type=float)
    g.add_argument("--tier", choices=["leading", "boundary"])
    g.add_argument("--N", type=int)
    g.add_argument("--workers", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="tswaves", description="Compressible Tollmien-Schlichting wave construction")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn, name=name)
        return sp

    add("blasius", cmd_blasius, "solve the Blasius equation; --csv exports the profile")
    sp = add("airy-check", cmd_airy_check, "Airy evaluation against the reference expansions")
    sp.add_argument("--z-re", type=float)
    sp.add_argument("--z-im", type=float)
    add("langer-dump", cmd_langer_dump, "Langer map and its error terms")
    add("rayleigh-mode", cmd_rayleigh_mode, "slow mode and its wall data")
    sp = add("fast-mode", cmd_fast_mode, "fast mode and its wall ratio")
    sp.add_argument("--correct", action="store_true", help="include the Err-term correction")

    disp = sub.add_parser("dispersion", help="dispersion relation roots and sweeps")
    dsub = disp.add_subparsers(dest="action", required=True)
    sp = dsub.add_parser("solve", parents=[common], help="one root")
    sp.add_argument("--spatial", action="store_true", help="spatial root (alpha c real)")
    sp.set_defaults(func=cmd_dispersion_solve, name="dispersion solve")
    sp = dsub.add_parser("sweep", parents=[common], help="log-log fit over a nu sweep")
    sp.add_argument("--nu-decades", help="LOW:HIGH as nu values (1e-12:1e-7) or exponents (=-12:-7), one point per decade")
    sp.add_argument("--observable", choices=["c_i", "c_r_over_alpha", "alpha_i0"], default="c_i")
    sp.set_defaults(func=cmd_dispersion_sweep, name="dispersion sweep")

    add("spatial-mode", cmd_spatial_mode, "spatial root and the mixed family")
    sp = add("spectrum", cmd_spectrum, "collocation eigenvalues near a shift")
    sp.add_argument("--shift-from-dispersion", action="store_true")
    sp.add_argument("--shift-re", type=float)
    sp.add_argument("--shift-im", type=float)
    sp = add("reproduce", cmd_reproduce, "run an acceptance criterion by id or number, or 'all'")
    sp.add_argument("criterion")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {key: getattr(args, attr, None) for attr, key in _OVERRIDES.items()}
        cfg = load_config(args.config, overrides)
        out = Emitter(cfg, args.name)
        if args.name == "reproduce":
            from .acceptance import resolve

            if args.criterion != "all":
                resolve(args.criterion)
        return args.func(cfg, args, out)
    except ValidationError as exc:
        msg = "; ".join(f"{'.'.join(str(x) for x in e['loc'])}: {e['msg']}" for e in exc.errors())
        sys.stderr.write(f"error [cli.schema] {msg}\n")
        return EXIT_CONFIG
    except ConfigError as exc:
        sys.stderr.write(f"error {exc}\n")
        return EXIT_CONFIG
    except SolverError as exc:
        sys.stderr.write(f"solver failure {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
