"""Wave-function picture of the classical particle in a linear potential.

The classical Gaussian density started at ``exp(-q**2 - p**2)/pi`` factorizes
into ``psi(x, t) psi*(x', t)``.  The factor obtained directly from the
density matrix (``psi_gaussian_raw``) misses a time-dependent global
phase; multiplying by ``exp(i phi(t))`` with ``phi`` from
:func:`phase_closed` turns it into an exact solution of

    i dpsi/dt = -1/2 d2psi/dx2 + x psi.

The Green function of that equation propagates any initial wave function.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import ChirpUndersampledError, InputNotDecayedError
from .fields import DensityMatrixField, UniformGrid1D, WaveFunctionField

logger = logging.getLogger(__name__)

T_MIN = 1e-3
GREEN_PREFACTOR_PHASE = -0.25 * math.pi
EDGE_DECAY_TOL = 1e-10
DEFAULT_PHASE_STEP = 1e-3


def _gaussian_exponent(x, t, offset):
    x = np.asarray(x, dtype=float)
    num = offset + 2 * x**2 + 2 * t**2 * x + 1j * (4 * x * t - 2 * x**2 * t + 2 * t**3 * x)
    return -0.25 * num / (1.0 + t * t)


def psi_gaussian_raw(x, t):
    """Wave-function factor of the evolved Gaussian density, without the gauge phase.

    The constant in the exponent is ``t**4/2``; it is what makes the
    state normalized for every ``t``.
    """
    amp = (math.pi * (1.0 + t * t)) ** -0.25
    return amp * np.exp(_gaussian_exponent(x, t, 0.5 * t**4))


def psi_gaussian_t2_offset(x, t):
    """Same as :func:`psi_gaussian_raw` but with ``t**2/2`` in place of ``t**4/2``.

    Not a valid state for ``t`` other than 0 or 1 (the norm is
    ``exp((t**4 - t**2)/(4 (1 + t**2)))``).  Kept for regression checks
    that show the difference.
    """
    amp = (math.pi * (1.0 + t * t)) ** -0.25
    return amp * np.exp(_gaussian_exponent(x, t, 0.5 * t**2))


def residual_coefficient(t):
    """Real factor ``c(t)`` with ``(H - i d/dt) psi_raw = c(t) psi_raw``."""
    t2 = np.asarray(t, dtype=float) ** 2
    return (4 + 8 * t2 + 3 * t2**2 + t2**3) / (8 * (1 + t2) ** 2)


def phase_rhs(t):
    """Time derivative of the gauge phase, ``-residual_coefficient(t)``."""
    return -residual_coefficient(t)


def phase_closed(t, constant: float = 0.0):
    """Closed-form gauge phase with ``phi(0) = constant``."""
    t = np.asarray(t, dtype=float)
    return -t / 8 - t**3 / 24 - 0.5 * np.arctan(t) + 0.125 * t / (1 + t * t) + constant


@dataclass(frozen=True)
class GaugePhase:
    """Time-dependent global phase attached to the raw Gaussian factor.

    ``kind="closed_form"`` evaluates :func:`phase_closed`;
    ``kind="ode_integrated"`` interpolates a table of RK4 knots with a
    cubic spline and refuses to extrapolate.
    """

    kind: Literal["closed_form", "ode_integrated"] = "closed_form"
    constant: float = 0.0
    samples: Optional[tuple] = None
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("closed_form", "ode_integrated"):
            raise ValueError(f"unknown gauge phase kind {self.kind!r}")
        if self.kind == "ode_integrated":
            if self.samples is None:
                raise ValueError("ode_integrated phase needs a (t, phi) table")
            ts, phis = (np.asarray(a, dtype=float) for a in self.samples)
            if ts.shape != phis.shape or ts.ndim != 1 or ts.size < 1:
                raise ValueError("phase table must be two equal-length 1-D arrays")
            object.__setattr__(self, "samples", (ts, phis))
            order = np.argsort(ts)
            if ts.size >= 4:
                interp = CubicSpline(ts[order], phis[order])
            elif ts.size > 1:
                interp = lambda s: np.interp(s, ts[order], phis[order])  # noqa: E731
            else:
                interp = lambda s: np.full_like(np.asarray(s, dtype=float), phis[0])  # noqa: E731
            object.__setattr__(self, "_interp", interp)

    @property
    def span(self):
        ts = self.samples[0]
        return float(ts.min()), float(ts.max())

    def __call__(self, t):
        if self.kind == "closed_form":
            return phase_closed(t, self.constant)
        lo, hi = self.span
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < lo - 1e-12) or np.any(t_arr > hi + 1e-12):
            raise ValueError(f"t outside integrated range [{lo}, {hi}]")
        return self._interp(t_arr)


def phase_integrate(t_end: float, step: float = DEFAULT_PHASE_STEP) -> GaugePhase:
    """Integrate ``dphi/dt = phase_rhs(t)`` from ``phi(0) = 0`` with classic RK4.

    The step is shrunk slightly (never enlarged) so the last knot lands
    exactly on ``t_end``.
    """
    if not step > 0.0:
        raise ValueError(f"integration step must be positive, got {step}")
    if t_end == 0.0:
        return GaugePhase("ode_integrated", 0.0, (np.zeros(1), np.zeros(1)))
    nsteps = max(1, math.ceil(abs(t_end) / step - 1e-9))
    h = t_end / nsteps
    ts = np.linspace(0.0, t_end, nsteps + 1)
    phis = np.empty(nsteps + 1)
    phi = 0.0
    phis[0] = phi
    for k in range(nsteps):
        t = ts[k]
        k1 = phase_rhs(t)
        k2 = phase_rhs(t + 0.5 * h)
        k4 = phase_rhs(t + h)
        # k3 == k2 because the right-hand side does not depend on phi
        phi += h * (k1 + 4.0 * k2 + k4) / 6.0
        phis[k + 1] = phi
    return GaugePhase("ode_integrated", 0.0, (ts, phis))


def psi_gaussian_gauged(x, t, phase: GaugePhase = None):
    phase = GaugePhase() if phase is None else phase
    return psi_gaussian_raw(x, t) * np.exp(1j * phase(t))


def psi_gaussian_field(xgrid: UniformGrid1D, t: float, phase: GaugePhase = None) -> WaveFunctionField:
    return WaveFunctionField(xgrid, psi_gaussian_gauged(xgrid.points, t, phase), t)


def schrodinger_residual(psi, x, t, hx: float = 1e-3, ht: float = 1e-3):
    """Central-difference ``-1/2 psi_xx + x psi - i psi_t`` for a sampler ``psi(x, t)``."""
    if not (hx > 0.0 and ht > 0.0):
        raise ValueError(f"finite-difference steps must be positive, got hx={hx}, ht={ht}")
    p0 = psi(x, t)
    p_xx = (psi(x + hx, t) - 2.0 * p0 + psi(x - hx, t)) / (hx * hx)
    p_t = (psi(x, t + ht) - psi(x, t - ht)) / (2.0 * ht)
    return -0.5 * p_xx + x * p0 - 1j * p_t


def _check_time(t):
    if not t >= T_MIN:
        raise ValueError(
            f"propagator singular near t=0; identity limit not sampled (t={t} < {T_MIN})"
        )


@dataclass(frozen=True)
class GreenKernel:
    """Green function of the linear-potential wave equation at a fixed time.

    The amplitude is ``1/sqrt(2 pi t)`` everywhere; ``prefactor_phase``
    is the constant phase folded in front (``-pi/4`` gives the
    ``(2 pi i t)**-1/2`` normalization that is consistent with
    ``phi(0) = 0``).
    """

    time: float
    prefactor_phase: float = GREEN_PREFACTOR_PHASE

    def __post_init__(self):
        _check_time(self.time)

    @property
    def amplitude(self) -> float:
        return 1.0 / math.sqrt(2.0 * math.pi * self.time)

    def phase(self, x, xp):
        t = self.time
        x, xp = np.asarray(x, dtype=float), np.asarray(xp, dtype=float)
        return (x - xp) ** 2 / (2 * t) - 0.5 * t * (x + xp) - t**3 / 24 + self.prefactor_phase

    def __call__(self, x, xp):
        return self.amplitude * np.exp(1j * self.phase(x, xp))


def greens(x, xp, t, prefactor_phase: float = GREEN_PREFACTOR_PHASE):
    return GreenKernel(t, prefactor_phase)(x, xp)


def b_kernel(x, y, xp, yp, t, prefactor_phase: float = GREEN_PREFACTOR_PHASE):
    """Density-matrix propagator ``G(x, x', t) G*(y, y', t)``."""
    g = GreenKernel(t, prefactor_phase)
    return g(x, xp) * np.conj(g(y, yp))


def chirp_spacing_bound(t: float, xgrid_in: UniformGrid1D, xgrid_out: UniformGrid1D) -> float:
    """Largest input spacing with less than pi of kernel phase change per sample."""
    return math.pi * t / (xgrid_in.abs_max + xgrid_out.abs_max)


def _check_propagation_input(values, t, xgrid_in, xgrid_out):
    _check_time(t)
    bound = chirp_spacing_bound(t, xgrid_in, xgrid_out)
    if xgrid_in.spacing > bound:
        raise ChirpUndersampledError(
            f"input spacing {xgrid_in.spacing:.4g} exceeds pi*t/(|x|max+|x'|max) = {bound:.4g}"
        )
    edge = max(np.abs(values[0]), np.abs(values[-1]))
    if edge > EDGE_DECAY_TOL:
        raise InputNotDecayedError(f"edge magnitude {edge:.3e} > {EDGE_DECAY_TOL:g}")


def propagate_psi(
    psi0: WaveFunctionField,
    t: float,
    xgrid_out: UniformGrid1D = None,
    prefactor_phase: float = GREEN_PREFACTOR_PHASE,
) -> WaveFunctionField:
    """Evolve ``psi0`` by time ``t`` with the Green function (trapezoidal quadrature).

    The output is not renormalized; a norm off by more than 1e-6 is
    logged as a warning because it signals a too-small output grid.
    """
    xgrid_out = psi0.xgrid if xgrid_out is None else xgrid_out
    _check_propagation_input(psi0.values, t, psi0.xgrid, xgrid_out)
    kernel = GreenKernel(t, prefactor_phase)
    g = kernel(xgrid_out.points[:, None], psi0.xgrid.points[None, :])
    values = g @ (psi0.xgrid.weights * psi0.values)
    out = WaveFunctionField(xgrid_out, values, psi0.time + t)
    nrm = out.norm()
    if abs(nrm - 1.0) > 1e-6:
        logger.warning("propagated norm %.9g differs from 1; output grid may be too small", nrm)
    return out


def propagate_density(
    rho0: DensityMatrixField,
    t: float,
    xgrid_out: UniformGrid1D = None,
    prefactor_phase: float = GREEN_PREFACTOR_PHASE,
) -> DensityMatrixField:
    """Evolve a density matrix with ``b_kernel``, i.e. ``G rho0 G^dagger`` by quadrature."""
    xgrid_out = rho0.xgrid if xgrid_out is None else xgrid_out
    rows = np.abs(rho0.values).max(axis=1)
    _check_propagation_input(rows, t, rho0.xgrid, xgrid_out)
    kernel = GreenKernel(t, prefactor_phase)
    gw = kernel(xgrid_out.points[:, None], rho0.xgrid.points[None, :]) * rho0.xgrid.weights
    return DensityMatrixField(xgrid_out, gw @ rho0.values @ gw.conj().T, rho0.time + t)
