"""Command-line front end.

All rates (A, kappa, epsilon) are plain numbers in one common inverse-time
unit; time and frequency grids use the reciprocal unit.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from . import analytics
from .config import COMMANDS, RunConfig, parse_config
from .core import derive_coefficients, stability_classify
from .csvio import render_csv
from .errors import CascadeLaserError, ConfigError, DomainError
from .figures import build_figure
from .langevin import simulate_ensemble

DIVERGES_PLUS = "plus quadrature at threshold"


def _linspace(grid):
    return np.linspace(grid.start, grid.stop, grid.n)


def cmd_coeffs(cfg: RunConfig):
    c = derive_coefficients(cfg.params)
    names = ("calA", "calB", "calC", "calD", "bigB", "N", "M", "lambda_minus", "lambda_plus",
             "epsilon_threshold")
    rows = [(n, getattr(c, n)) for n in names]
    rows.append(("stability", stability_classify(cfg.params).value))
    return ("name", "value"), rows, [], None


def cmd_variance(cfg: RunConfig):
    p = cfg.params
    rows = []
    cav = analytics.cavity_variances(p)
    rows.append(("cavity", cav.plus, cav.minus))
    if p.kappa <= 1:
        out = analytics.output_variances(p)
        rows.append(("output", out.plus, out.minus))
    return ("mode", "plus", "minus"), rows, [], DIVERGES_PLUS


def cmd_spectrum(cfg: RunConfig):
    w = _linspace(cfg.omega_grid)
    s_plus, s_minus = analytics.squeezing_spectrum_output(cfg.params, w)
    return (("omega", "S_plus", "S_minus"), list(zip(w, s_plus.values, s_minus.values)), [],
            "plus squeezing spectrum at threshold, omega=0")


def cmd_photon(cfg: RunConfig):
    t = _linspace(cfg.t_grid)
    n = analytics.mean_photon_cavity(cfg.params, t)
    if cfg.params.kappa <= 1:
        n_out = analytics.mean_photon_output(cfg.params, t)
        return ("t", "n_cavity", "n_output"), list(zip(t, n, n_out)), [], None
    return ("t", "n_cavity"), list(zip(t, n)), [], None


def cmd_power(cfg: RunConfig):
    w = _linspace(cfg.omega_grid)
    cav = analytics.power_spectrum_cavity(cfg.params, w).values
    if cfg.params.kappa <= 1:
        out = analytics.power_spectrum_output(cfg.params, w).values
        return ("omega", "S_cavity", "S_output"), list(zip(w, cav, out)), [], None
    return ("omega", "S_cavity"), list(zip(w, cav)), [], None


def cmd_mc(cfg: RunConfig):
    p, mc = cfg.params, cfg.mc
    c = derive_coefficients(p)
    t_end = mc.t_end if mc.t_end is not None else 10.0 / c.lambda_minus
    st = simulate_ensemble(p, mc.n_traj, t_end, dt=mc.dt, seed=mc.seed, n_records=mc.n_records,
                           n_workers=cfg.workers)
    exact = analytics.mean_photon_cavity(p, st.times)
    rows = list(zip(st.times, st.mean_cross.real, st.se_cross.real, st.mean_alpha_sq.real,
                    st.se_alpha_sq.real, exact))
    comments = [f"n_traj={st.n_traj} dt={st.dt!r} seed={st.seed}"]
    return ("t", "n_mc", "n_se", "alpha_sq_mc", "alpha_sq_se", "n_exact"), rows, comments, None


def cmd_oracle(cfg: RunConfig):
    from .validation import compare_oracles
    cmp = compare_oracles(cfg.params, n_traj=cfg.mc.n_traj, seed=cfg.mc.seed)
    rows = [("mean_n", cmp.closed_n, cmp.ode_n, cmp.fock_n, cmp.mc_n, cmp.mc_n_se),
            ("mean_alpha_sq", cmp.closed_x, cmp.ode_x, cmp.fock_x, cmp.mc_x, cmp.mc_x_se)]
    return ("quantity", "closed_form", "ode", "fock", "mc", "mc_se"), rows, [], None


def cmd_figure(cfg: RunConfig):
    if not cfg.figure:
        raise ConfigError("figure: a figure id (fig2..fig13) is required")
    tb = build_figure(cfg.figure, cfg.n_points)
    return tb.header, tb.rows, tb.comments, tb.divergence_note


def cmd_sweep(cfg: RunConfig):
    sw = cfg.sweep
    f = analytics.QUANTITIES[cfg.quantity]
    points = sw.points()

    def evaluate(value):
        return f(sw.params_at(value))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            values = list(pool.map(evaluate, points))  # map keeps sweep order
    else:
        values = [evaluate(v) for v in points]
    comments = [f"sweep {sw.variable} in [{sw.start!r}, {sw.stop!r}] with {sw.n_points} points",
                "fixed epsilon=threshold" if sw.epsilon_at_threshold else
                f"fixed A={sw.fixed.A!r} kappa={sw.fixed.kappa!r} beta={sw.fixed.beta!r} "
                f"epsilon={sw.fixed.epsilon!r} r={sw.fixed.r!r}"]
    return (sw.variable, cfg.quantity), list(zip(points, values)), comments, DIVERGES_PLUS


TABLE_COMMANDS = {
    "coeffs": cmd_coeffs, "variance": cmd_variance, "spectrum": cmd_spectrum,
    "photon": cmd_photon, "power": cmd_power, "mc": cmd_mc, "oracle": cmd_oracle,
    "figure": cmd_figure, "sweep": cmd_sweep,
}


def run_command(cfg: RunConfig, stdout=None) -> int:
    """Execute a validated configuration; return the process exit code."""
    stdout = stdout or sys.stdout
    try:
        if cfg.command == "report":
            from .report import build_report
            rep = build_report(cfg.report_sets, cfg.mc.n_traj, cfg.mc.seed)
            text = rep.text()
            _write_text(text, cfg.out, stdout)
            return 0 if rep.ok else 1
        header, rows, comments, note = TABLE_COMMANDS[cfg.command](cfg)
        text = render_csv(header, rows, comments, note)
        _write_text(text, cfg.out, stdout)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CascadeLaserError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _write_text(text: str, path: Optional[str], stdout):
    if path is None or path == "-":
        stdout.write(text)
        stdout.flush()
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cascade-laser",
        description="Degenerate three-level cascade laser with a parametric amplifier and a "
                    "squeezed vacuum reservoir. Rates share one arbitrary inverse-time unit.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("target", nargs="?", help="figure id (fig2..fig13) for 'figure'")
    ap.add_argument("--config", help="flat key=value file, '#' starts a comment")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--seed", help="unsigned 64-bit Monte Carlo seed")
    ap.add_argument("--ntraj", help="number of Monte Carlo trajectories")
    ap.add_argument("--dt", help="Monte Carlo time step")
    ap.add_argument("--A", "--linear-gain", dest="A", help="linear gain coefficient")
    ap.add_argument("--kappa", help="cavity damping constant")
    ap.add_argument("--beta", help="pump ratio Omega/gamma")
    ap.add_argument("--epsilon", help="amplifier strength or 'threshold'")
    ap.add_argument("--r", "--squeeze-r", dest="r", help="reservoir squeeze parameter")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override any config key (repeatable)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        text = ""
        if args.config:
            try:
                with open(args.config) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"config: cannot read {args.config!r}: {exc}")
        overrides = {"command": args.command}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        for key, attr in (("out", "out"), ("seed", "seed"), ("n_traj", "ntraj"), ("dt", "dt"),
                          ("A", "A"), ("kappa", "kappa"), ("beta", "beta"),
                          ("epsilon", "epsilon"), ("r", "r"), ("figure", "target")):
            value = getattr(args, attr)
            if value is not None:
                overrides[key] = value
        if args.target is not None and args.command != "figure":
            raise ConfigError(f"unexpected argument {args.target!r} for {args.command!r}")
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_command(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
