"""Acceptance gate: one test per criterion, each at its stated tolerance."""

import math
import time

import numpy as np
import pytest

from cascade_laser import (
    SystemParams,
    cavity_variances,
    mean_photon_cavity,
    mean_photon_output,
    minimize_over_beta,
    output_variances,
    squeezing_spectrum_output,
    threshold_epsilon,
)
from cascade_laser import derive_coefficients
from cascade_laser.figures import fig11, fig12
from cascade_laser.report import Report, typo_section
from cascade_laser.spectra import parseval_check
from cascade_laser.validation import (
    compare_oracles,
    em_bias_ratios,
    halfwidths,
    random_parameter_sets,
    rk4_order,
)

from conftest import record_acceptance

BASE = SystemParams(100.0, 0.8, 0.0, 0.0, 1.0)
ORACLE_SETS = random_parameter_sets(10)


def test_criterion_01_cavity_threshold_minimum():
    start = time.perf_counter()
    beta, value = minimize_over_beta("cavity_minus", BASE, at_threshold=True)
    elapsed = time.perf_counter() - start
    ok = abs(value - 0.022) <= 0.002 and abs(beta - 0.022) <= 0.005 and elapsed < 1.0
    assert record_acceptance(1, ok, f"min {value:.6f} at beta={beta:.5f} in {elapsed:.2f}s")


def test_criterion_02_cavity_no_amplifier_minimum():
    beta, value = minimize_over_beta("cavity_minus", BASE)
    ok = abs(value - 0.035) <= 0.002 and abs(beta - 0.023) <= 0.005
    assert record_acceptance(2, ok, f"min {value:.6f} at beta={beta:.5f}")


def test_criterion_03_output_threshold_minimum():
    beta, value = minimize_over_beta("output_minus", BASE, at_threshold=True)
    rep = Report()
    typo_section(rep)
    line = next(l for l in rep.lines if l.startswith("output-threshold-minus"))
    printed = float(line.split("printed=")[1].split()[0])
    ok = (abs(value - 0.045) <= 0.002 and abs(beta - 0.022) <= 0.005 and printed < 0)
    assert record_acceptance(3, ok, f"min {value:.6f} at beta={beta:.5f}; report: {line}")


def test_criterion_04_output_no_amplifier_minimum():
    beta, value = minimize_over_beta("output_minus", BASE)
    _, with_amp = minimize_over_beta("output_minus", BASE, at_threshold=True)
    gap = value - with_amp
    ok = (abs(value - 0.055) <= 0.002 and abs(beta - 0.023) <= 0.005
          and abs(gap - 0.010) <= 0.004)
    assert record_acceptance(4, ok, f"min {value:.6f} at beta={beta:.5f}; gap {gap:.5f}")


def test_criterion_05_perfect_output_squeezing():
    worst = 0.0
    for r in (0.0, 0.5, 1.0, 2.0):
        for kappa in (0.5, 0.8):
            for A in (10.0, 100.0):
                p = SystemParams(A, kappa, 0.0, 0.0, r).at_threshold()
                s_minus = float(squeezing_spectrum_output(p, 0.0)[1].values)
                worst = max(worst, abs(s_minus))
    ok = worst <= 1e-12
    assert record_acceptance(5, ok, f"max |S_minus(0)| = {worst:.3e} over 16 cases")


def test_criterion_06_halfwidth_decreases():
    hw = halfwidths((0.2, 0.3))
    ok = hw[0.3] < hw[0.2]
    assert record_acceptance(
        6, ok, f"hwhm {hw[0.2]:.5f} -> {hw[0.3]:.5f} (published readings 0.80 -> 0.75 differ)")


def test_criterion_07_oracle_triple_agreement():
    start = time.perf_counter()
    rows = [compare_oracles(p, n_traj=10_000, seed=100 + i) for i, p in enumerate(ORACLE_SETS)]
    elapsed = time.perf_counter() - start
    photons = max(r.closed_n for r in rows)
    ode = max(r.ode_error for r in rows)
    fock = max(r.fock_error for r in rows)
    mc_pass = sum(r.mc_sigmas <= 4.0 for r in rows)
    ok = photons < 10 and ode <= 1e-8 and fock <= 1e-4 and mc_pass >= 9 and elapsed < 300
    assert record_acceptance(
        7, ok, f"ode {ode:.1e}, fock {fock:.1e}, mc {mc_pass}/10 within 4 SE "
               f"(worst {max(r.mc_sigmas for r in rows):.2f}), {elapsed:.0f}s")


def test_criterion_08_parseval():
    gaps = [parseval_check(p).gap for p in ORACLE_SETS]
    ok = max(gaps) <= 1e-3
    assert record_acceptance(8, ok, f"max relative gap {max(gaps):.2e} over 10 sets")


def _random_valid(rng, n):
    out = []
    while len(out) < n:
        p = SystemParams(rng.uniform(0, 200), rng.uniform(0.05, 1.0), rng.uniform(0, 2),
                         0.0, rng.uniform(0, 2.5))
        eth = threshold_epsilon(p)
        if eth <= 0:
            continue
        # include points within 1e-6 of threshold
        frac = rng.choice([rng.uniform(0, 1), 1 - 10 ** rng.uniform(-6, -1)])
        q = p.replace(epsilon=frac * eth)
        if derive_coefficients(q).lambda_minus > 0:
            out.append(q)
    return out


def test_criterion_09_spectrum_limits_and_uncertainty():
    rng = np.random.default_rng(9)
    samples = _random_valid(rng, 3000)
    limit_err = 0.0
    for p in samples[:500] + ORACLE_SETS:
        c = derive_coefficients(p)
        w = 1e4 * (c.lambda_plus + p.kappa + p.A + p.epsilon)
        s_plus, s_minus = squeezing_spectrum_output(p, w)
        limit_err = max(limit_err,
                        abs(float(s_plus.values) / math.exp(2 * p.r) - 1),
                        abs(float(s_minus.values) / math.exp(-2 * p.r) - 1))
    worst = math.inf
    for p in samples:
        worst = min(worst, cavity_variances(p).product, output_variances(p).product)
    ok = limit_err <= 1e-6 and worst >= 1 - 1e-9
    assert record_acceptance(
        9, ok, f"max limit error {limit_err:.1e}; min uncertainty product {worst:.6f} "
               f"over {len(samples)} sets")


def test_criterion_10_integrator_orders():
    _, orders = rk4_order()
    _, ratios = em_bias_ratios()
    ok = all(3.7 <= o <= 4.3 for o in orders) and all(1.8 <= r <= 2.2 for r in ratios)
    assert record_acceptance(
        10, ok, "RK4 orders " + ", ".join(f"{o:.3f}" for o in orders)
                + "; EM bias ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def test_criterion_11_mean_photon_figures():
    rows = np.array(fig11(400).rows, dtype=float)
    beta, a, b, c = rows.T
    no_amp = np.array([mean_photon_cavity(SystemParams(25.0, 0.8, x, 0.0, 1.0)) for x in beta])
    part_a = bool(np.all((c > a) & (c > b) & (c > no_amp)))
    fig = np.array(fig12(400).rows, dtype=float)
    beta12, n_out, n_cav = fig.T
    below = n_out < n_cav
    part_b = bool(np.all(below))
    detail = f"cavity gain claim {'holds' if part_a else 'fails'} on beta < 0.5; "
    if part_b:
        detail += "n_out < n on every sampled beta"
    else:
        first = beta12[~below][0]
        detail += (f"n_out < n fails for beta >= {first:.4f} "
                   f"({int((~below).sum())}/{below.size} grid points; n falls below sinh(1)^2)")
    assert record_acceptance(11, part_a and part_b, detail)
