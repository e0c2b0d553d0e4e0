"""Verification report: oracle agreement plus checks of misprinted closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import brentq

from . import analytics, validation
from .core import SystemParams
from .moments import integrate_moments
from .spectra import output_excess_integral, parseval_check

ODE_TOL = 1e-8
FOCK_TOL = 1e-4
MC_SIGMAS = 4.0
PARSEVAL_TOL = 1e-3


@dataclass
class Report:
    lines: List[str] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    def info(self, text: str):
        self.lines.append(text)

    def check(self, name: str, ok: bool, detail: str):
        self.lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        if not ok:
            self.failures.append(name)

    @property
    def ok(self) -> bool:
        return not self.failures

    def text(self) -> str:
        tail = "overall: PASS" if self.ok else f"overall: FAIL ({', '.join(self.failures)})"
        return "\n".join(self.lines + [tail]) + "\n"


def typo_section(rep: Report):
    rep.info("== misprinted closed forms: printed vs corrected ==")
    p0 = SystemParams(100.0, 0.8, 0.0, 0.0, 1.0).at_threshold()
    printed = analytics.printed_output_minus_at_threshold(p0)
    corrected = analytics.output_minus_at_threshold(p0)
    rep.info(f"output-threshold-minus printed={printed:.3f} corrected={corrected:.3f} at beta=0"
             " (kappa=0.8, A=100, r=1)")
    rep.check("printed output threshold variance is unphysical", printed < 0 < corrected,
              f"printed={printed!r} corrected={corrected!r}")
    near = analytics.output_variances(p0.replace(epsilon=p0.epsilon * (1 - 1e-9))).minus
    rep.check("corrected output threshold variance is the below-threshold limit",
              abs(near - corrected) <= 1e-6 * abs(corrected), f"limit={near!r}")

    p = SystemParams(25.0, 0.8, 0.1, 0.3, 1.0)
    n_print = analytics.printed_mean_photon_cavity(p)
    n_corr = analytics.mean_photon_cavity(p)
    n_ode = integrate_moments(p, 60.0, record_every=10**9).final().mean_n
    rep.info(f"steady-photon-number printed={n_print:.3f} corrected={n_corr:.3f} "
             f"moment-ODE={n_ode:.6f} at A=25 kappa=0.8 beta=0.1 eps=0.3 r=1")
    n_out_print = 0.8 * n_print + 0.2 * math.sinh(1.0) ** 2
    rep.info(f"output-photon-number printed={n_out_print:.3f} "
             f"corrected={analytics.mean_photon_output(p):.4f}")
    rep.check("corrected photon number matches moment ODE",
              abs(n_ode - n_corr) <= ODE_TOL * n_corr, f"rel gap={abs(n_ode - n_corr) / n_corr:.2e}")

    q = SystemParams(100.0, 0.8, 0.01, 0.2, 1.0)
    w = np.linspace(-10.0, 10.0, 201)
    closed = analytics.power_spectrum_output(q, w).values
    coeff = analytics.power_spectrum_output_via_coefficients(q, w)
    gap = float(np.max(np.abs(coeff - closed) / np.abs(closed)))
    rep.info("output-power-spectrum coefficient form uses the restored kappa factor and the "
             "(N - M) weight on the fast Lorentzian")
    rep.check("output power spectrum coefficient form matches closed form", gap <= 1e-10,
              f"max rel gap={gap:.2e}")


def minima_section(rep: Report):
    rep.info("== reported minima over beta in [0, 1] (kappa=0.8, A=100, r=1) ==")
    targets = {"cavity_threshold": (0.022, 0.022), "cavity_no_amplifier": (0.035, 0.023),
               "output_threshold": (0.045, 0.022), "output_no_amplifier": (0.055, 0.023)}
    found = validation.reported_minima()
    for name, (beta, value) in found.items():
        v_ref, b_ref = targets[name]
        ok = abs(value - v_ref) <= 0.002 and abs(beta - b_ref) <= 0.005
        rep.check(f"minimum {name}", ok,
                  f"value={value:.6f} at beta={beta:.5f} (published {v_ref} at {b_ref})")
    gap = found["output_no_amplifier"][1] - found["output_threshold"][1]
    rep.info(f"amplifier gain in output squeezing: {gap:.4f} in variance")


def halfwidth_section(rep: Report):
    rep.info("== cavity power-spectrum half widths (A=100, beta=0.01, r=1, kappa=0.8) ==")
    hw = validation.halfwidths((0.2, 0.3))
    rep.info(f"eps=0.2 hwhm={hw[0.2]:.5f} (published reading 0.80, discrepant)")
    rep.info(f"eps=0.3 hwhm={hw[0.3]:.5f} (published reading 0.75, discrepant)")
    rep.check("half width decreases with epsilon", hw[0.3] < hw[0.2],
              f"{hw[0.2]:.5f} -> {hw[0.3]:.5f}")


def photon_section(rep: Report):
    rep.info("== output vs cavity photon number (A=25, kappa=0.8, r=1, eps=0.3) ==")
    # n_out < n  <=>  n > N, so the crossing is where n(beta) = sinh(r)^2
    N = math.sinh(1.0) ** 2
    base = SystemParams(25.0, 0.8, 0.0, 0.3, 1.0)
    f = lambda b: analytics.mean_photon_cavity(base.replace(beta=b)) - N
    cross = brentq(f, 0.01, 1.0, xtol=1e-12)
    rep.info(f"output photon number falls below cavity only for beta < {cross:.5f}")
    p = base.replace(beta=0.1)
    rep.info(f"output spectrum integral above its sinh(r)^2 floor at beta=0.1: "
             f"{output_excess_integral(p):.6f} (kappa*n={0.8 * analytics.mean_photon_cavity(p):.6f}; "
             "the gap is the input-output cross term)")


def oracle_section(rep: Report, n_sets: int, n_traj: int, seed: int):
    rep.info(f"== oracle agreement on {n_sets} random below-threshold sets "
             f"({n_traj} trajectories) ==")
    sets = validation.random_parameter_sets(n_sets)
    mc_ok = 0
    for i, p in enumerate(sets):
        c = validation.compare_oracles(p, n_traj=n_traj, seed=seed + i)
        pv = parseval_check(p)
        rep.info(f"set {i}: A={p.A:.4f} kappa={p.kappa:.4f} beta={p.beta:.4f} "
                 f"eps={p.epsilon:.4f} r={p.r:.4f} n={c.closed_n:.6f}")
        rep.check(f"set {i} ode", c.ode_error <= ODE_TOL, f"rel err={c.ode_error:.2e}")
        rep.check(f"set {i} fock", c.fock_error <= FOCK_TOL, f"rel err={c.fock_error:.2e}")
        rep.check(f"set {i} parseval", pv.gap <= PARSEVAL_TOL, f"rel gap={pv.gap:.2e}")
        within = c.mc_sigmas <= MC_SIGMAS
        mc_ok += within
        rep.info(f"set {i} mc: {c.mc_sigmas:.2f} SE from closed form"
                 f" ({'within' if within else 'outside'} {MC_SIGMAS:g})")
    need = math.ceil(0.9 * n_sets)
    rep.check("mc agreement count", mc_ok >= need, f"{mc_ok}/{n_sets} within {MC_SIGMAS:g} SE")


def build_report(n_sets: int = 10, n_traj: int = 10_000, seed: int = 0) -> Report:
    rep = Report()
    typo_section(rep)
    minima_section(rep)
    halfwidth_section(rep)
    photon_section(rep)
    oracle_section(rep, n_sets, n_traj, seed)
    return rep
