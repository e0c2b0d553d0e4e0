"""Curve data for the published figures, as CSV-ready tables.

Each builder returns a :class:`Table`.  Grids default to 400 points per
axis; the grid is recorded in the table comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import analytics
from .core import SystemParams
from .errors import ConfigError

KAPPA = 0.8
GAIN = 100.0
GAIN_PHOTON = 25.0


@dataclass
class Table:
    header: Sequence[str]
    rows: List[Sequence]
    comments: List[str] = field(default_factory=list)
    divergence_note: str = None


def _betas(n, stop=1.0, endpoint=True):
    return np.linspace(0.0, stop, n, endpoint=endpoint)


def _grid_comment(name, lo, hi, n, endpoint=True):
    bracket = "]" if endpoint else ")"
    return f"grid {name} in [{lo!r}, {hi!r}{bracket} with {n} points"


def _params_comment(**kw):
    return "params " + " ".join(f"{k}={v!r}" for k, v in kw.items())


def _threshold(beta, r):
    return SystemParams(GAIN, KAPPA, float(beta), 0.0, float(r)).at_threshold()


def _no_amp(beta, r):
    return SystemParams(GAIN, KAPPA, float(beta), 0.0, float(r))


def fig2(n: int = 400) -> Table:
    """Cavity minus variance at threshold over (beta, r)."""
    betas, rs = _betas(n), np.linspace(0.0, 2.0, n)
    rows = [(b, r, analytics.cavity_minus_at_threshold(_threshold(b, r)))
            for b in betas for r in rs]
    return Table(("beta", "r", "variance"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, epsilon="threshold"),
                  _grid_comment("beta", 0.0, 1.0, n), _grid_comment("r", 0.0, 2.0, n)])


def fig3(n: int = 400) -> Table:
    """Cavity minus variance against beta for three configurations."""
    rows = []
    for b in _betas(n):
        rows.append((b, analytics.cavity_variances(_no_amp(b, 0.0)).minus,
                     analytics.cavity_minus_at_threshold(_threshold(b, 0.0)),
                     analytics.cavity_minus_at_threshold(_threshold(b, 1.0))))
    return Table(("beta", "r0_eps0", "r0_threshold", "r1_threshold"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN), _grid_comment("beta", 0.0, 1.0, n)])


def fig4(n: int = 400) -> Table:
    """Cavity minus variance without the amplifier over (r, beta)."""
    rs, betas = np.linspace(0.0, 2.0, n), _betas(n)
    rows = [(r, b, analytics.cavity_variances(_no_amp(b, r)).minus) for r in rs for b in betas]
    return Table(("r", "beta", "variance"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, epsilon=0.0),
                  _grid_comment("r", 0.0, 2.0, n), _grid_comment("beta", 0.0, 1.0, n)])


def fig5(n: int = 400) -> Table:
    """Cavity minus variance without the amplifier, r = 0 and r = 1."""
    rows = [(b, analytics.cavity_variances(_no_amp(b, 0.0)).minus,
             analytics.cavity_variances(_no_amp(b, 1.0)).minus) for b in _betas(n)]
    return Table(("beta", "r0", "r1"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, epsilon=0.0),
                  _grid_comment("beta", 0.0, 1.0, n)])


def fig6(n: int = 400) -> Table:
    """Output and cavity minus variances at threshold, r = 1."""
    rows = []
    for b in _betas(n):
        p = _threshold(b, 1.0)
        rows.append((b, analytics.output_minus_at_threshold(p),
                     analytics.cavity_minus_at_threshold(p)))
    return Table(("beta", "output", "cavity"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, r=1.0, epsilon="threshold"),
                  "output column uses the kappa-consistent threshold substitution",
                  _grid_comment("beta", 0.0, 1.0, n)])


def fig7(n: int = 400) -> Table:
    """Output and cavity minus variances without the amplifier, r = 1."""
    rows = []
    for b in _betas(n):
        p = _no_amp(b, 1.0)
        rows.append((b, analytics.output_variances(p).minus, analytics.cavity_variances(p).minus))
    return Table(("beta", "output", "cavity"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, r=1.0, epsilon=0.0),
                  _grid_comment("beta", 0.0, 1.0, n)])


def fig8(n: int = 400) -> Table:
    """Output minus squeezing spectrum at threshold over (beta, omega), r = 1."""
    omegas = np.linspace(0.0, 10.0, n)
    rows = []
    for b in _betas(n):
        s_minus = analytics.squeezing_spectrum_output(_threshold(b, 1.0), omegas)[1].values
        rows.extend(zip([b] * n, omegas, s_minus))
    return Table(("beta", "omega", "S_minus"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, r=1.0, epsilon="threshold"),
                  _grid_comment("beta", 0.0, 1.0, n), _grid_comment("omega", 0.0, 10.0, n)])


SQUEEZE_VALUES = (0.0, 0.5, 1.0)


def _spectrum_zero(p):
    return float(analytics.squeezing_spectrum_output(p, 0.0)[1].values)


def fig9(n: int = 400) -> Table:
    """Output minus squeezing spectrum at omega = 0 and threshold for several r."""
    rows = [(b, *(_spectrum_zero(_threshold(b, r)) for r in SQUEEZE_VALUES)) for b in _betas(n)]
    return Table(("beta", *(f"r{r!r}" for r in SQUEEZE_VALUES)), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, omega=0.0, epsilon="threshold"),
                  _grid_comment("beta", 0.0, 1.0, n)])


def fig10(n: int = 400) -> Table:
    """Output minus squeezing spectrum at omega = 0 without the amplifier."""
    rows = [(b, *(_spectrum_zero(_no_amp(b, r)) for r in SQUEEZE_VALUES)) for b in _betas(n)]
    return Table(("beta", *(f"r{r!r}" for r in SQUEEZE_VALUES)), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, omega=0.0, epsilon=0.0),
                  _grid_comment("beta", 0.0, 1.0, n)])


PHOTON_BETA_MAX = 0.5
PHOTON_CASES = ((0.0, 0.0), (0.0, 0.3), (1.0, 0.3))  # (r, epsilon)


def fig11(n: int = 400) -> Table:
    """Steady cavity photon number against beta for three (r, epsilon) cases."""
    rows = []
    for b in _betas(n, PHOTON_BETA_MAX, endpoint=False):
        rows.append((b, *(analytics.mean_photon_cavity(SystemParams(GAIN_PHOTON, KAPPA, b, e, r))
                          for r, e in PHOTON_CASES)))
    return Table(("beta", "r0_eps0", "r0_eps0.3", "r1_eps0.3"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN_PHOTON),
                  _grid_comment("beta", 0.0, PHOTON_BETA_MAX, n, endpoint=False)])


def fig12(n: int = 400) -> Table:
    """Steady output and cavity photon numbers against beta."""
    rows = []
    for b in _betas(n, PHOTON_BETA_MAX, endpoint=False):
        p = SystemParams(GAIN_PHOTON, KAPPA, b, 0.3, 1.0)
        rows.append((b, analytics.mean_photon_output(p), analytics.mean_photon_cavity(p)))
    return Table(("beta", "output", "cavity"), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN_PHOTON, r=1.0, epsilon=0.3),
                  _grid_comment("beta", 0.0, PHOTON_BETA_MAX, n, endpoint=False)])


SPECTRUM_EPSILONS = (0.1, 0.2, 0.3)


def fig13(n: int = 400) -> Table:
    """Cavity power spectrum against omega for several amplifier strengths."""
    omegas = np.linspace(-5.0, 5.0, n)
    cols = [analytics.power_spectrum_cavity(SystemParams(GAIN, KAPPA, 0.01, e, 1.0), omegas).values
            for e in SPECTRUM_EPSILONS]
    rows = [(w, *vals) for w, *vals in zip(omegas, *cols)]
    return Table(("omega", *(f"eps{e!r}" for e in SPECTRUM_EPSILONS)), rows,
                 [_params_comment(kappa=KAPPA, A=GAIN, beta=0.01, r=1.0),
                  _grid_comment("omega", -5.0, 5.0, n)])


FIGURES: Dict[str, Callable[[int], Table]] = {
    f"fig{i}": f for i, f in enumerate(
        (fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10, fig11, fig12, fig13), start=2)
}


def build_figure(figure_id: str, n: int = 400) -> Table:
    try:
        builder = FIGURES[figure_id]
    except KeyError:
        raise ConfigError(f"figure: unknown figure id {figure_id!r}; choose fig2..fig13")
    return builder(n)
