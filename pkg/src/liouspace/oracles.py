"""Independent reference computations used to check the main modules.

Nothing here imports :mod:`liouspace.duality_maps` or
:mod:`liouspace.schrodinger_like`; the formulas are written out again from
scratch (closed forms, hand-derived derivatives, brute-force quadrature)
so that agreement is meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import (
    FieldInvariantError,
    GridMismatchError,
    NonPositiveResidualError,
    WindowTooSmallError,
)
from .fields import EPS_NEG, NORM_TOL, PhaseSpaceField, UniformGrid1D, WaveFunctionField

DEFAULT_PQUAD = UniformGrid1D(-10.0, 10.0, 2049)
WINDOW_REL_TOL = 1e-9


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    l2: float
    location_of_max: tuple
    stencil_steps: tuple = ()
    convergence_order: Optional[float] = None


@dataclass(frozen=True)
class NegativityReport:
    min_value: float
    argmin: tuple
    fraction_negative_mass: float
    classical: bool


# -- exact classical solution ------------------------------------------------

def gaussian_solution(q, p, t):
    """Density started at ``exp(-q**2 - p**2)/pi``, pulled back along the flow."""
    q0 = np.asarray(q) - np.asarray(p) * t - 0.5 * t * t
    p0 = np.asarray(p) + t
    return np.exp(-(p0**2) - q0**2) / math.pi


def gaussian_position_marginal(x, t):
    """``int f(x, p, t) dp`` for :func:`gaussian_solution`."""
    s = 1.0 + t * t
    return np.exp(-((np.asarray(x) + 0.5 * t * t) ** 2) / s) / math.sqrt(math.pi * s)


def brute_force_rho(x, xp, t, pquad: UniformGrid1D = DEFAULT_PQUAD):
    """Density matrix of :func:`gaussian_solution` by direct momentum quadrature.

    ``x`` and ``xp`` broadcast against each other; the result has their
    broadcast shape.
    """
    x, xp = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xp, dtype=float))
    q = 0.5 * (x + xp)[..., None]
    u = (x - xp)[..., None]
    p = pquad.points
    env = np.exp(-((p + t) ** 2) - (q - p * t - 0.5 * t * t) ** 2) / math.pi
    edge = np.abs(env[..., [0, -1]]).max()
    peak = np.abs(env).max()
    if edge > WINDOW_REL_TOL * peak:
        raise WindowTooSmallError(f"brute-force momentum edge {edge:.3e} vs peak {peak:.3e}")
    return (env * np.exp(1j * p * u)) @ pquad.weights


# -- wave-function oracles ---------------------------------------------------

def _gaussian_poly(x, t):
    """Exponent polynomial ``P`` and its derivatives; ``psi = N(t) exp(-P/(4(1+t^2)))``."""
    P = 0.5 * t**4 + 2 * x**2 + 2 * t**2 * x + 1j * (4 * x * t - 2 * x**2 * t + 2 * t**3 * x)
    P_x = 4 * x + 2 * t**2 + 1j * (4 * t - 4 * x * t + 2 * t**3)
    P_xx = 4 - 4j * t
    P_t = 2 * t**3 + 4 * t * x + 1j * (4 * x - 2 * x**2 + 6 * t**2 * x)
    return P, P_x, P_xx, P_t


def gaussian_schrodinger_ratio(x, t):
    """``(-1/2 psi_xx + x psi - i psi_t) / psi`` for the ungauged Gaussian factor.

    Evaluated from hand-differentiated closed forms, no finite differences.
    """
    x = np.asarray(x, dtype=float)
    d = 1.0 + t * t
    P, P_x, P_xx, P_t = _gaussian_poly(x, t)
    e_x = -P_x / (4 * d)
    e_xx = -P_xx / (4 * d)
    e_t = -P_t / (4 * d) + P * 2 * t / (4 * d * d)
    log_norm_t = -t / (2 * d)
    return -0.5 * (e_xx + e_x**2) + x - 1j * (log_norm_t + e_t)


def gauge_phase_derivative(t):
    """Term-by-term derivative of the closed-form gauge phase."""
    t = np.asarray(t, dtype=float)
    s = 1.0 + t * t
    return -0.125 - t * t / 8 - 0.5 / s + 0.125 * (1 - t * t) / s**2


def gaussian_gauged_residual(x, t, psi_values):
    """Exact residual of the gauged Gaussian given its sampled values at ``(x, t)``."""
    return psi_values * (gaussian_schrodinger_ratio(x, t) + gauge_phase_derivative(t))


def hermite_state(n: int, xgrid: UniformGrid1D) -> WaveFunctionField:
    """Ground (``n=0``) or first excited (``n=1``) oscillator state, normalized on the grid."""
    x = xgrid.points
    if n == 0:
        v = math.pi**-0.25 * np.exp(-0.5 * x * x)
    elif n == 1:
        v = math.pi**-0.25 * math.sqrt(2.0) * x * np.exp(-0.5 * x * x)
    else:
        raise ValueError(f"only n in {{0, 1}} is supported, got {n}")
    v = v / math.sqrt(xgrid.weights @ v**2)
    return WaveFunctionField(xgrid, v.astype(complex), 0.0, gauge_anchor=int(np.argmax(v)))


def hermite_wigner(q, p, n: int):
    """Closed-form phase-space function of :func:`hermite_state`."""
    r2 = np.asarray(q) ** 2 + np.asarray(p) ** 2
    base = np.exp(-r2) / math.pi
    if n == 0:
        return base
    if n == 1:
        return (2 * r2 - 1) * base
    raise ValueError(f"only n in {{0, 1}} is supported, got {n}")


# -- scans and comparisons ---------------------------------------------------

def negativity_scan(f: PhaseSpaceField, eps: float = EPS_NEG) -> NegativityReport:
    v = f.values
    # argmin returns the first minimum in C order: lowest q index, then lowest p index
    i, j = np.unravel_index(int(np.argmin(v)), v.shape)
    neg_mass = float(f.qgrid.weights @ np.maximum(-v, 0.0) @ f.pgrid.weights)
    vmin = float(v[i, j])
    return NegativityReport(
        min_value=vmin,
        argmin=(float(f.qgrid.points[i]), float(f.pgrid.points[j])),
        fraction_negative_mass=neg_mass,
        classical=vmin >= -eps,
    )


def certify_classical(f: PhaseSpaceField, eps: float = EPS_NEG) -> PhaseSpaceField:
    """Return a copy of ``f`` marked as a probability density, or raise."""
    report = negativity_scan(f, eps)
    if not report.classical:
        raise FieldInvariantError(
            f"takes negative value {report.min_value:.3e} at {report.argmin}"
        )
    total = f.integral()
    if abs(total - 1.0) > NORM_TOL:
        raise FieldInvariantError(f"integrates to {total:.12g}, not 1")
    return replace(f, classical=True)


def marginal_check(f: PhaseSpaceField, psi: WaveFunctionField) -> ResidualReport:
    """Compare the position marginal of ``f`` with ``|psi|**2`` on a shared axis."""
    if not f.qgrid.same_as(psi.xgrid):
        raise GridMismatchError(f"q axis {f.qgrid} vs x axis {psi.xgrid}")
    diff = f.q_marginal() - np.abs(psi.values) ** 2
    k = int(np.argmax(np.abs(diff)))
    return ResidualReport(
        max_abs=float(np.abs(diff[k])),
        l2=float(math.sqrt(psi.xgrid.weights @ diff**2)),
        location_of_max=(float(psi.xgrid.points[k]),),
    )


def residual_report(values, coords: Sequence[np.ndarray], steps=(), order=None) -> ResidualReport:
    """Summarize residual samples taken at the points ``coords`` (all same shape)."""
    a = np.abs(np.asarray(values)).ravel()
    k = int(np.argmax(a))
    loc = tuple(float(np.asarray(c).ravel()[k]) for c in coords)
    return ResidualReport(float(a[k]), float(math.sqrt(np.mean(a**2))), loc, tuple(steps), order)


def convergence_order(residual_fn: Callable[[float], float], h0: float, levels: int = 4) -> float:
    """Least-squares slope of ``log|r(h)|`` against ``log h`` for ``h = h0 / 2**k``."""
    if levels < 2:
        raise ValueError("need at least two step sizes")
    hs = h0 / 2.0 ** np.arange(levels)
    rs = np.array([abs(residual_fn(h)) for h in hs])
    if np.any(rs < 1e-14):
        raise NonPositiveResidualError(f"residual saturated at {rs.min():.3e}; no order available")
    slope, _ = np.polyfit(np.log(hs), np.log(rs), 1)
    return float(slope)
