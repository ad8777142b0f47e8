"""Classical motion under ``H = p**2/2 + q`` (unit mass and charge).

Phase points may hold scalars or broadcastable arrays; every function is
vectorized so Monte-Carlo clouds and whole grids go through in one call.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .fields import PhaseSpaceField, UniformGrid1D

DEFAULT_FD_STEP = 1e-3


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ValueError("phase point coordinates must be finite")


@dataclass(frozen=True)
class GaussianPhaseState:
    """Gaussian phase-space density: mean ``(mean_q, mean_p)`` and covariance ``cov``.

    ``cov`` is ordered ``[[s_qq, s_qp], [s_qp, s_pp]]``.
    """

    mean_q: float
    mean_p: float
    cov: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (2, 2) or not np.all(np.isfinite(cov)):
            raise ValueError("covariance must be a finite 2x2 matrix")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0.0:
            raise ValueError("covariance must be positive definite")
        if not (np.isfinite(self.mean_q) and np.isfinite(self.mean_p)):
            raise ValueError("mean must be finite")
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean_q", float(self.mean_q))
        object.__setattr__(self, "mean_p", float(self.mean_p))

    @classmethod
    def from_entries(cls, mean_q, mean_p, s_qq, s_qp, s_pp):
        return cls(mean_q, mean_p, np.array([[s_qq, s_qp], [s_qp, s_pp]]))

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.mean_q, self.mean_p])


@dataclass(frozen=True)
class TransformMatrix:
    """Linear part of the flow acting on ``(q, p)`` deviations from the mean."""

    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.shape != (2, 2):
            raise ValueError("transform matrix must be 2x2")
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det - 1.0) > 1e-12:
            raise ValueError(f"transform matrix must have unit determinant, got {det!r}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def at_time(cls, t: float) -> "TransformMatrix":
        return cls(np.array([[1.0, t], [0.0, 1.0]]))

    def conjugate(self, cov: np.ndarray) -> np.ndarray:
        out = self.a @ cov @ self.a.T
        # exact symmetry, the products above differ only by round-off
        return 0.5 * (out + out.T)


def hamiltonian(pt: PhasePoint):
    return 0.5 * pt.p**2 + pt.q


def flow_forward(pt0: PhasePoint, t: float) -> PhasePoint:
    """Position and momentum reached after time ``t`` (negative ``t`` allowed)."""
    return PhasePoint(pt0.q + pt0.p * t - 0.5 * t * t, pt0.p - t)


def flow_backward(pt: PhasePoint, t: float) -> PhasePoint:
    """Initial point that the flow carries to ``pt`` in time ``t``."""
    return PhasePoint(pt.q - pt.p * t - 0.5 * t * t, pt.p + t)


def evolve_gaussian(g0: GaussianPhaseState, t: float) -> GaussianPhaseState:
    mean = flow_forward(PhasePoint(g0.mean_q, g0.mean_p), t)
    cov = TransformMatrix.at_time(t).conjugate(g0.cov)
    return GaussianPhaseState(mean.q, mean.p, cov)


def gaussian_density(g: GaussianPhaseState, pt: PhasePoint):
    """Bivariate normal density of ``g`` evaluated at ``pt``."""
    (a, b), (_, c) = g.cov
    det = a * c - b * b
    dq = np.asarray(pt.q, dtype=float) - g.mean_q
    dp = np.asarray(pt.p, dtype=float) - g.mean_p
    quad = (c * dq * dq - 2.0 * b * dq * dp + a * dp * dp) / det
    return np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))


def gaussian_sampler(g0: GaussianPhaseState):
    """Return ``f(q, p, t)``: the density of ``g0`` carried along by the flow."""

    def f(q, p, t=0.0):
        return gaussian_density(evolve_gaussian(g0, t), PhasePoint(q, p))

    return f


PhaseSampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


def propagate_distribution(
    f0: Union[PhaseSampler, PhaseSpaceField],
    t: float,
    qgrid: UniformGrid1D,
    pgrid: UniformGrid1D,
) -> PhaseSpaceField:
    """Sample ``f(q, p, t) = f0(flow_backward((q, p), t))`` on a grid.

    ``f0`` is either a vectorized callable ``f0(q, p)`` or a gridded field,
    in which case it is interpolated bilinearly and taken as zero outside
    its rectangle.
    """
    q, p = np.meshgrid(qgrid.points, pgrid.points, indexing="ij")
    start = flow_backward(PhasePoint(q, p), t)
    if isinstance(f0, PhaseSpaceField):
        values = f0.at(start.q, start.p)
    else:
        values = np.broadcast_to(f0(start.q, start.p), q.shape)
    base = f0.time if isinstance(f0, PhaseSpaceField) else 0.0
    return PhaseSpaceField(qgrid, pgrid, np.array(values, dtype=float), time=base + t)


def liouville_residual(f, pt: PhasePoint, t: float, h: float = DEFAULT_FD_STEP):
    """Central-difference value of ``df/dt + p df/dq - df/dp`` for ``f(q, p, t)``."""
    if not h > 0.0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    q, p = pt.q, pt.p
    f_t = (f(q, p, t + h) - f(q, p, t - h)) / (2.0 * h)
    f_q = (f(q + h, p, t) - f(q - h, p, t)) / (2.0 * h)
    f_p = (f(q, p + h, t) - f(q, p - h, t)) / (2.0 * h)
    return f_t + p * f_q - f_p
