"""Truncated-Fock evolution of the full cavity master equation.

Serves as an oracle for the moment equations: the density matrix is
propagated with fixed-step RK4 and the low-order moments are read off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .analytics import mean_photon_cavity
from .core import SystemParams, derive_coefficients, stability_classify, Stability
from .errors import DomainError, TruncationError


def ladder(n_max: int) -> sp.csr_matrix:
    """Annihilation operator on Fock levels ``0..n_max``."""
    return sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format="csr")


def liouvillian(params: SystemParams, n_max: int) -> sp.csr_matrix:
    """Sparse generator acting on the row-major vectorised density matrix."""
    c = derive_coefficients(params)
    eps = params.epsilon
    a = ladder(n_max).astype(complex)
    ad = a.T.tocsr()
    eye = sp.identity(n_max + 1, dtype=complex, format="csr")
    a2, ad2 = a @ a, ad @ ad
    aad, ada = a @ ad, ad @ a

    def left(op):
        return sp.kron(op, eye)

    def right(op):
        return sp.kron(eye, op.T)

    def sandwich(lop, rop):
        return sp.kron(lop, rop.T)

    gen = (eps / 2) * (right(a2) - left(a2) + left(ad2) - right(ad2))
    gen = gen + c.calA * (2 * sandwich(ad, a) - left(aad) - right(aad))
    gen = gen + c.calB * (2 * sandwich(a, ad) - left(ada) - right(ada))
    gen = gen + c.calC * (sandwich(ad, ad) + sandwich(a, a) - right(ad2) - left(a2))
    gen = gen + c.calD * (sandwich(ad, ad) + sandwich(a, a) - right(a2) - left(ad2))
    return gen.tocsr()


def default_n_max(params: SystemParams, t_end: float = None) -> int:
    """``ceil(10 n + 20)`` with ``n`` the expected photon number."""
    if stability_classify(params) is Stability.BELOW:
        n = mean_photon_cavity(params)
    else:
        n = mean_photon_cavity(params, t_end if t_end is not None else 0.0)
    return int(math.ceil(10 * max(n, 0.0) + 20))


@dataclass
class FockResult:
    times: np.ndarray
    mean_a: np.ndarray
    mean_a2: np.ndarray
    mean_n: np.ndarray
    rho: np.ndarray
    n_max: int
    dt: float
    diagnostics: dict = field(default_factory=dict)


def fock_evolve(params: SystemParams, n_max: int = None, t_end: float = 10.0,
                dt: float = None, record_every: int = 1, n_checks: int = 20,
                tail_tol: float = 1e-8) -> FockResult:
    """Evolve the vacuum under the cavity master equation.

    Parameters
    ----------
    n_max : int, optional
        Highest Fock level kept; defaults to :func:`default_n_max`.
    dt : float, optional
        RK4 step.  Defaults to the inverse of a row-sum bound on the
        generator, which keeps every mode inside the RK4 stability region.
    n_checks : int
        Number of evenly spaced checkpoints at which the smallest eigenvalue
        and Hermiticity of the density matrix are recorded.
    tail_tol : float
        Largest admissible population of level ``n_max``.

    Raises
    ------
    TruncationError
        If the population of the top level exceeds ``tail_tol``.
    """
    if n_max is None:
        n_max = default_n_max(params, t_end)
    if n_max < 4:
        raise DomainError("n_max must be >= 4")
    if not t_end > 0:
        raise DomainError("t_end must be > 0")
    dim = n_max + 1
    gen = liouvillian(params, n_max)
    if dt is None:
        bound = float(abs(gen).sum(axis=1).max())
        dt = 1.0 / bound if bound > 0 else t_end
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / steps

    a = ladder(n_max).toarray()
    a2 = a @ a
    levels = np.arange(dim, dtype=float)
    rho = np.zeros(dim * dim, complex)
    rho[0] = 1.0

    def observe(vec):
        m = vec.reshape(dim, dim)
        return (np.trace(a @ m), np.trace(a2 @ m), np.dot(levels, m.diagonal()).real,
                m.trace().real, m[n_max, n_max].real)

    check_every = max(1, steps // max(n_checks, 1))
    ts, A1, A2, NN = [0.0], [0j], [0j], [0.0]
    trace_drift = herm_err = tail = 0.0
    min_eig = 1.0
    for i in range(1, steps + 1):
        k1 = gen @ rho
        k2 = gen @ (rho + 0.5 * h * k1)
        k3 = gen @ (rho + 0.5 * h * k2)
        k4 = gen @ (rho + h * k3)
        rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if i % record_every == 0 or i == steps:
            m1, m2, n, tr, top = observe(rho)
            ts.append(i * h)
            A1.append(m1)
            A2.append(m2)
            NN.append(n)
            trace_drift = max(trace_drift, abs(tr - 1.0))
            tail = max(tail, top)
        if i % check_every == 0 or i == steps:
            m = rho.reshape(dim, dim)
            herm_err = max(herm_err, float(np.abs(m - m.conj().T).max()))
            min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]))
    if tail > tail_tol:
        need = int(math.ceil(1.5 * n_max)) + 10
        raise TruncationError(
            f"population {tail:.3g} at level n_max={n_max} exceeds {tail_tol:g}; "
            f"retry with n_max >= {need}", need)
    diagnostics = {"trace_drift": trace_drift, "hermiticity_error": herm_err,
                   "min_eigenvalue": min_eig, "tail_population": tail, "steps": steps}
    return FockResult(np.array(ts), np.array(A1), np.array(A2), np.array(NN),
                      rho.reshape(dim, dim), n_max, h, diagnostics)
