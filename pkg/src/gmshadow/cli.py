"""Command-line front end: experiment presets, key=value configuration files,
batch runs and CSV/report emission.

Verbs:
  run <preset|configpath>   execute a preset (several runs) or one config file
  bounds <configpath>       print the closed-form blow-up bound for a config
  convert-time ...          convert between the t and sigma clocks

The output root is $GMSHADOW_OUTDIR (default ./runs), overridable with
--outdir.  Every run directory contains the resolved config echo, the
series CSV, the final report and the requested snapshots; rerunning an
identical configuration reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import replace

from .analysis import BoundReport, Verdict, bernoulli_bound
from .evolution import EvolutionLaw, LawKind, sigma_horizon, sigma_of_t, t_of_sigma
from .initdata import InitKind, InitSpec
from .mesh import Grid, RadialGrid, RectGrid, write_field_csv
from .params import Parameters, derive_indices
from .solver import RunConfig, SystemKind, advance


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- presets

_TABLE1 = dict(p=3.0, q=2.0, r=1.0, s=2.0, D1=1.0)


def _rc(system, params, law, grid, init, **kw) -> RunConfig:
    return RunConfig(system=system, params=Parameters(**params), law=law,
                     grid=grid, init=init, **kw)


def _exp1() -> dict[str, RunConfig]:
    grid = RectGrid(128, 128)
    init = InitSpec(InitKind.COSINE_PLUS, c=2.0)
    laws = {
        "static": EvolutionLaw.static(2),
        "exp_growth": EvolutionLaw.exp_growth(0.1, 2),
        "exp_decay": EvolutionLaw.exp_decay(0.1, 2),
        "logistic": EvolutionLaw.logistic(0.1, 1.5, 2),
    }
    return {
        name: _rc(SystemKind.NONLOCAL_T, _TABLE1, law, grid, init,
                  dt=5e-4, end_time=1.0, blowup_threshold=1e4, sample_stride=20)
        for name, law in laws.items()
    }


def _exp1q() -> dict[str, RunConfig]:
    return {
        "quench": _rc(
            SystemKind.NONLOCAL_T,
            dict(p=1.4, q=1.0, r=1.0, s=2.0, D1=1.0),
            EvolutionLaw.exp_growth(0.1, 2),
            RectGrid(64, 64),
            InitSpec(InitKind.COSINE_PLUS, c=2.0),
            dt=5e-4, end_time=20.0, sample_stride=200,
        )
    }


def _exp2(row: str) -> dict[str, RunConfig]:
    kin = dict(p=1.0, q=2.0, r=3.0, s=2.0, D1=1.0) if row == "a" else dict(
        p=3.0, q=2.0, r=1.0, s=1.0, D1=1.0)
    return {
        "run": _rc(
            SystemKind.NONLOCAL_T, kin, EvolutionLaw.exp_growth(0.1, 2),
            RectGrid(64, 64), InitSpec(InitKind.COSINE_PLUS, c=2.0),
            dt=5e-4, end_time=10.0, sample_stride=100,
        )
    }


def _exp3() -> dict[str, RunConfig]:
    grid = RadialGrid(3, 512)
    init = InitSpec(InitKind.SPIKY, delta=0.8, lam=0.1)
    kin = dict(p=4.0, q=4.0, r=2.0, s=1.0, D1=1.0)
    laws = {
        "static": EvolutionLaw.static(3),
        "exp_decay": EvolutionLaw.exp_decay(0.1, 3),
        # the logistic-decay carrying ratio is a preset default (overridable)
        "logistic_decay": EvolutionLaw.logistic(0.1, 0.5, 3),
    }
    return {
        name: _rc(SystemKind.NONLOCAL_T, kin, law, grid, init,
                  dt=5e-4, end_time=0.3, sample_stride=50)
        for name, law in laws.items()
    }


def _exp4() -> dict[str, RunConfig]:
    grid = RectGrid(128, 128)
    init = InitSpec(InitKind.COSINE_PLUS, c=2.0)
    law = EvolutionLaw.exp_decay(0.1, 2)
    full = dict(_TABLE1, D1=0.01, D2=1.0, tau=0.01)
    nonloc = dict(_TABLE1, D1=0.01)
    return {
        "full_rd": _rc(SystemKind.FULL_RD, full, law, grid, init,
                       dt=1e-4, end_time=2.0, v0=2.0, sample_stride=20),
        "nonlocal_t": _rc(SystemKind.NONLOCAL_T, nonloc, law, grid, init,
                          dt=1e-4, end_time=2.0, sample_stride=20),
    }


PRESETS = {
    "exp1": _exp1,
    "exp1q": _exp1q,
    "exp2a": lambda: _exp2("a"),
    "exp2b": lambda: _exp2("b"),
    "exp3": _exp3,
    "exp4": _exp4,
}


# ------------------------------------------------------- config rendering

def render_config(cfg: RunConfig) -> str:
    """Canonical key=value echo of a fully resolved run configuration."""
    p, law, grid, init = cfg.params, cfg.law, cfg.grid, cfg.init
    lines = [
        "[run]",
        f"system = {cfg.system.value}",
        f"dt = {cfg.dt!r}",
        f"end_time = {cfg.end_time!r}",
        f"blowup_threshold = {cfg.blowup_threshold!r}",
        f"quench_threshold = {cfg.quench_threshold!r}",
        f"sample_stride = {cfg.sample_stride}",
        f"dt_safety = {cfg.dt_safety!r}",
    ]
    if cfg.eta0 is not None:
        lines.append(f"eta0 = {cfg.eta0!r}")
    if cfg.v0 is not None:
        lines.append(f"v0 = {cfg.v0!r}")
    if cfg.snapshot_times:
        lines.append("snapshot_times = " + ",".join(repr(t) for t in cfg.snapshot_times))
    lines += [
        "",
        "[params]",
        f"p = {p.p!r}",
        f"q = {p.q!r}",
        f"r = {p.r!r}",
        f"s = {p.s!r}",
        f"D1 = {p.D1!r}",
        f"D2 = {p.D2!r}",
        f"tau = {p.tau!r}",
        "",
        "[evolution]",
        f"evolution = {law.kind.value}",
        f"beta = {law.beta!r}",
        f"m = {law.m!r}",
        f"dimension = {law.dimension}",
        "",
        "[grid]",
    ]
    if isinstance(grid, RectGrid):
        lines += ["kind = rect", f"nx = {grid.nx}", f"ny = {grid.ny}"]
    else:
        lines += ["kind = radial", f"M = {grid.M}",
                  f"dimension = {grid.dim}", f"outer_bc = {grid.outer_bc}"]
    lines += ["", "[init]", f"init = {init.kind.value}"]
    if init.kind is InitKind.SPIKY:
        lines += [f"delta = {init.delta!r}", f"lambda = {init.lam!r}"]
    else:
        lines += [f"c = {init.c!r}"]
    return "\n".join(lines) + "\n"


def parse_config(path: str) -> RunConfig:
    """Read a key=value config file into a RunConfig."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh, source=path)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except configparser.Error as e:
        raise ConfigError(f"config parse error: {e}") from e

    def get(section, key, conv, default=None, required=False):
        if not cp.has_option(section, key):
            if required:
                raise ConfigError(f"missing [{section}] {key} in {path}")
            return default
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError as e:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r} ({e})") from e

    try:
        params = Parameters(
            p=get("params", "p", float, required=True),
            q=get("params", "q", float, required=True),
            r=get("params", "r", float, required=True),
            s=get("params", "s", float, required=True),
            D1=get("params", "D1", float, 1.0),
            D2=get("params", "D2", float, 1.0),
            tau=get("params", "tau", float, 0.0),
        )
        kind = LawKind(get("evolution", "evolution", str, "static"))
        law = EvolutionLaw(
            kind,
            beta=get("evolution", "beta", float, 0.0),
            m=get("evolution", "m", float, 1.0 if kind is not LawKind.LOGISTIC else None,
                  required=kind is LawKind.LOGISTIC),
            dimension=get("evolution", "dimension", int, 2),
        )
        gkind = get("grid", "kind", str, "rect")
        if gkind == "rect":
            grid: Grid = RectGrid(get("grid", "nx", int, 128), get("grid", "ny", int, 128))
        elif gkind == "radial":
            grid = RadialGrid(
                get("grid", "dimension", int, law.dimension),
                get("grid", "M", int, 512),
                get("grid", "outer_bc", str, "neumann"),
            )
        else:
            raise ConfigError(f"unknown grid kind {gkind!r}")
        ikind = InitKind(get("init", "init", str, "constant"))
        init = InitSpec(
            ikind,
            c=get("init", "c", float, 2.0),
            delta=get("init", "delta", float, 0.5),
            lam=get("init", "lambda", float, 1.0),
        )
        snap = get("run", "snapshot_times", str, "")
        snapshot_times = tuple(float(x) for x in snap.split(",") if x.strip())
        return RunConfig(
            system=SystemKind(get("run", "system", str, "nonlocal_sigma")),
            params=params,
            law=law,
            grid=grid,
            init=init,
            dt=get("run", "dt", float, 5e-4),
            end_time=get("run", "end_time", float, 1.0),
            blowup_threshold=get("run", "blowup_threshold", float, 1e6),
            quench_threshold=get("run", "quench_threshold", float, 1e-3),
            sample_stride=get("run", "sample_stride", int, 20),
            eta0=get("run", "eta0", float),
            v0=get("run", "v0", float),
            dt_safety=get("run", "dt_safety", float, 1.0),
            snapshot_times=snapshot_times,
        )
    except (ValueError, TypeError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid configuration in {path}: {e}") from e


# ------------------------------------------------------------ run driver

def _bound_block(cfg: RunConfig) -> list[str]:
    idx = derive_indices(cfg.params)
    lines = ["[bound]"]
    if idx.omega <= 1.0:
        lines.append("applicable = not-applicable (omega <= 1)")
        return lines
    from .initdata import build_initial
    from .mesh import mean
    u0 = build_initial(cfg.init, cfg.grid, p=cfg.params.p)
    rep = bernoulli_bound(cfg.law, idx, mean(u0, 1.0))
    lines += [
        f"applicable = {rep.applicable}",
        f"integral = {rep.integral!r}",
        f"mean_threshold = {rep.mean_threshold!r}",
    ]
    if rep.sigma_upper is not None:
        lines.append(f"sigma_upper = {rep.sigma_upper!r}")
        if rep.sigma_upper < sigma_horizon(cfg.law):
            lines.append(f"t_upper = {t_of_sigma(cfg.law, rep.sigma_upper)!r}")
    return lines


def run_one(cfg: RunConfig, outdir: str) -> Verdict:
    """Execute one run and write config echo, series CSV, report, snapshots."""
    os.makedirs(outdir, exist_ok=True)
    echo = render_config(cfg)
    with open(os.path.join(outdir, "config.ini"), "w") as fh:
        fh.write(echo)
    series, report, snapshots = advance(cfg)
    series.to_csv(os.path.join(outdir, "series.csv"))
    for label, snap in snapshots.items():
        write_field_csv(snap, os.path.join(outdir, f"snapshot_{label}.csv"))
    lines = [f"verdict={report.verdict.value}"]
    for key in ("event_time_t", "event_time_sigma", "extrapolated_sigma",
                "extrapolated_sigma_err", "fitted_rate_exponent"):
        val = getattr(report, key)
        if val is not None:
            lines.append(f"{key} = {float(val)!r}")
    lines.append("")
    lines += _bound_block(cfg)
    lines += ["", "[resolved-config]"]
    lines += ["# " + ln for ln in echo.rstrip("\n").split("\n")]
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return report.verdict


def run_preset(preset_id: str, outroot: str, overrides: dict | None = None) -> int:
    """Execute all runs of a preset; write per-run artifacts and a summary."""
    if preset_id not in PRESETS:
        raise ConfigError(f"unknown preset {preset_id!r}; have {sorted(PRESETS)}")
    runs = PRESETS[preset_id]()
    if overrides:
        runs = {name: _apply_overrides(cfg, overrides) for name, cfg in runs.items()}
    base = os.path.join(outroot, preset_id)
    results = {}
    for name, cfg in runs.items():
        verdict = run_one(cfg, os.path.join(base, name))
        results[name] = (verdict, cfg)
        print(f"[{preset_id}/{name}] verdict={verdict.value}")
    _write_summary(base, preset_id, results)
    bad = any(v is Verdict.NON_FINITE for v, _ in results.values())
    return 1 if bad else 0


def _apply_overrides(cfg: RunConfig, ov: dict) -> RunConfig:
    out = cfg
    if "nx" in ov or "ny" in ov:
        if not isinstance(cfg.grid, RectGrid):
            raise ConfigError("nx/ny override applies to rectangle grids")
        out = replace(out, grid=RectGrid(ov.get("nx", cfg.grid.nx), ov.get("ny", cfg.grid.ny)))
    if "M" in ov:
        if not isinstance(cfg.grid, RadialGrid):
            raise ConfigError("M override applies to radial grids")
        out = replace(out, grid=RadialGrid(cfg.grid.dim, ov["M"], cfg.grid.outer_bc))
    for key in ("dt", "end_time", "blowup_threshold", "quench_threshold", "dt_safety"):
        if key in ov:
            out = replace(out, **{key: ov[key]})
    return out


def _write_summary(base: str, preset_id: str, results: dict) -> None:
    lines = [f"preset={preset_id}"]
    events = []
    for name, (verdict, cfg) in results.items():
        rep_path = os.path.join(base, name, "report.txt")
        t_ev = None
        with open(rep_path) as fh:
            for ln in fh:
                if ln.startswith("event_time_t"):
                    t_ev = float(ln.split("=")[1])
        lines.append(f"run={name} verdict={verdict.value} event_time_t={t_ev}")
        if verdict is Verdict.BLOW_UP and t_ev is not None:
            events.append((t_ev, name))
    if len(events) >= 2:
        order = " < ".join(n for _, n in sorted(events))
        lines.append(f"blowup_order_t: {order}")
    with open(os.path.join(base, "summary.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def bounds_report_text(cfg: RunConfig) -> str:
    idx = derive_indices(cfg.params)
    head = [
        f"gamma = {idx.gamma!r}",
        f"omega = {idx.omega!r}",
        f"pi = {idx.pi!r}",
    ]
    return "\n".join(head + _bound_block(cfg))


# -------------------------------------------------------------- CLI plumbing

def _law_from_args(args) -> EvolutionLaw:
    kind = LawKind(args.evolution)
    if kind is LawKind.STATIC:
        return EvolutionLaw.static(args.dimension)
    if kind is LawKind.LOGISTIC:
        if args.m is None:
            raise ConfigError("logistic law needs --m")
        return EvolutionLaw.logistic(args.beta, args.m, args.dimension)
    return EvolutionLaw(kind, beta=args.beta, dimension=args.dimension)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="gmshadow", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)

    ap_run = sub.add_parser("run", help="run a preset or a config file")
    ap_run.add_argument("target", help="preset id (%s) or config path" % ",".join(sorted(PRESETS)))
    ap_run.add_argument("--outdir", default=None)
    ap_run.add_argument("--nx", type=int)
    ap_run.add_argument("--ny", type=int)
    ap_run.add_argument("--M", type=int)
    ap_run.add_argument("--dt", type=float)
    ap_run.add_argument("--end-time", dest="end_time", type=float)
    ap_run.add_argument("--blowup-threshold", dest="blowup_threshold", type=float)
    ap_run.add_argument("--quench-threshold", dest="quench_threshold", type=float)
    ap_run.add_argument("--dt-safety", dest="dt_safety", type=float)

    ap_b = sub.add_parser("bounds", help="print the blow-up bound for a config")
    ap_b.add_argument("configpath")

    ap_c = sub.add_parser("convert-time", help="convert between t and sigma clocks")
    ap_c.add_argument("--evolution", required=True,
                      choices=[k.value for k in LawKind])
    ap_c.add_argument("--beta", type=float, default=0.0)
    ap_c.add_argument("--m", type=float, default=None)
    ap_c.add_argument("--dimension", type=int, default=2)
    grp = ap_c.add_mutually_exclusive_group(required=True)
    grp.add_argument("--t", type=float)
    grp.add_argument("--sigma", type=float)

    args = ap.parse_args(argv)
    outroot = args.outdir if getattr(args, "outdir", None) else os.environ.get(
        "GMSHADOW_OUTDIR", "runs")
    try:
        if args.verb == "run":
            ov = {k: getattr(args, k) for k in
                  ("nx", "ny", "M", "dt", "end_time", "blowup_threshold",
                   "quench_threshold", "dt_safety")
                  if getattr(args, k) is not None}
            if args.target in PRESETS:
                return run_preset(args.target, outroot, ov)
            cfg = parse_config(args.target)
            if ov:
                cfg = _apply_overrides(cfg, ov)
            name = os.path.splitext(os.path.basename(args.target))[0]
            verdict = run_one(cfg, os.path.join(outroot, name))
            print(f"[{name}] verdict={verdict.value}")
            return 1 if verdict is Verdict.NON_FINITE else 0
        if args.verb == "bounds":
            cfg = parse_config(args.configpath)
            print(bounds_report_text(cfg))
            return 0
        law = _law_from_args(args)
        if args.t is not None:
            print(f"sigma = {sigma_of_t(law, args.t)!r}")
        else:
            print(f"t = {t_of_sigma(law, args.sigma)!r}")
        return 0
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
