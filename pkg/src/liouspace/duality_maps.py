"""Fourier bridges between phase-space densities and density matrices.

Conventions (unit action, the phase-space density ``f`` normalized to 1)::

    rho(x, x') = int f((x + x')/2, p) exp(i p (x - x')) dp
    f(q, p)    = 1/(2 pi) int rho(q + u/2, q - u/2) exp(-i p u) du

Both integrals are evaluated directly with the trapezoidal rule.  The
integration windows are audited: if the integrand has not decayed at the
window edges a :class:`WindowTooSmallError` is raised instead of silently
truncating.
"""
from __future__ import annotations

import logging
from typing import Callable, Union

import numpy as np

from .exceptions import (
    DegenerateDiagonalError,
    FieldInvariantError,
    NonHermitianError,
    NotFactorizableError,
    WindowTooSmallError,
)
from .fields import (
    HERMITIAN_TOL,
    DensityMatrixField,
    PhaseSpaceField,
    UniformGrid1D,
    WaveFunctionField,
    aligned_uquad,
)

logger = logging.getLogger(__name__)

DEFAULT_XGRID = UniformGrid1D(-6.0, 6.0, 257)
DEFAULT_PGRID = UniformGrid1D(-8.0, 8.0, 257)
DEFAULT_QUAD = UniformGrid1D(-10.0, 10.0, 2049)

#: relative size of the integrand at a window edge that still counts as decayed
WINDOW_REL_TOL = 1e-9
IMAG_RESIDUE_TOL = 1e-10

PhaseSampler = Callable[[np.ndarray, np.ndarray], np.ndarray]
RhoSampler = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _check_window(edge_values, peak, what):
    peak = float(peak)
    edge = float(np.max(np.abs(edge_values))) if np.size(edge_values) else 0.0
    if peak > 0.0 and edge > WINDOW_REL_TOL * peak:
        raise WindowTooSmallError(
            f"{what} edge magnitude {edge:.3e} exceeds {WINDOW_REL_TOL:g} of peak {peak:.3e}"
        )


def f_to_rho(
    f: Union[PhaseSampler, PhaseSpaceField],
    xgrid: UniformGrid1D = DEFAULT_XGRID,
    pquad: UniformGrid1D = None,
    t: float = None,
) -> DensityMatrixField:
    """Density matrix of a phase-space density, sampled on ``xgrid x xgrid``.

    Parameters
    ----------
    f : callable or PhaseSpaceField
        Vectorized ``f(q, p)`` or a gridded field (bilinearly interpolated
        at the midpoints ``(x + x')/2``).
    xgrid : UniformGrid1D
        Output grid for both matrix indices.
    pquad : UniformGrid1D, optional
        Momentum quadrature grid. Defaults to the field's own momentum grid
        for gridded input and to ``[-10, 10]`` with 2049 points otherwise.
    t : float, optional
        Time stamp of the result; taken from the field when omitted.
    """
    if isinstance(f, PhaseSpaceField):
        pquad = f.pgrid if pquad is None else pquad
        time = f.time if t is None else t
        sample = f.at
        half = UniformGrid1D(xgrid.min, xgrid.max, 2 * xgrid.n - 1)
        if not half.same_as(f.qgrid):
            logger.info(
                "field q-grid is not the x-grid refined by two; midpoints are interpolated bilinearly"
            )
    else:
        pquad = DEFAULT_QUAD if pquad is None else pquad
        time = 0.0 if t is None else t
        sample = f

    n = xgrid.n
    # (x_i + x_j)/2 lives on the half-spaced grid, x_i - x_j on multiples of dx
    mid = xgrid.min + 0.5 * xgrid.spacing * np.arange(2 * n - 1)
    sep = xgrid.spacing * np.arange(-(n - 1), n)
    p = pquad.points
    fvals = np.asarray(sample(mid[:, None], p[None, :]), dtype=float)
    fvals = np.broadcast_to(fvals, (mid.size, p.size))
    _check_window(fvals[:, [0, -1]], np.abs(fvals).max(), "momentum")

    kernel = np.exp(1j * np.outer(sep, p)) * pquad.weights
    table = kernel @ fvals.T  # table[d, s] = rho at separation index d, midpoint s
    i, j = np.indices((n, n))
    rho = table[i - j + n - 1, i + j]

    out = DensityMatrixField(xgrid, rho, time)
    herm = out.hermiticity_error()
    if herm > HERMITIAN_TOL:
        raise FieldInvariantError(f"f_to_rho output not Hermitian (deviation {herm:.3e})")
    return out


def _midpoint_samples(rho, q, u):
    """``rho(q + u/2, q - u/2)`` as an array of shape ``(len(q), len(u))``."""
    a = q[:, None] + 0.5 * u[None, :]
    b = q[:, None] - 0.5 * u[None, :]
    if isinstance(rho, DensityMatrixField):
        return rho.at(a, b)
    return np.broadcast_to(np.asarray(rho(a, b), dtype=complex), a.shape)


def _wigner_quadrature(samples, pgrid: UniformGrid1D, uquad: UniformGrid1D):
    peak = np.abs(samples).max()
    _check_window(samples[:, [0, -1]], peak, "relative-coordinate")
    # on a symmetric u-grid, Hermiticity means samples(-u) == conj(samples(u))
    herm = np.max(np.abs(samples[:, ::-1] - samples.conj()))
    if herm > HERMITIAN_TOL * max(1.0, peak):
        raise NonHermitianError(f"max deviation {herm:.3e}")
    kernel = np.exp(-1j * np.outer(uquad.points, pgrid.points)) * uquad.weights[:, None]
    vals = (samples @ kernel) / (2.0 * np.pi)
    residue = np.abs(vals.imag).max()
    if residue > IMAG_RESIDUE_TOL:
        raise NonHermitianError(f"transform has imaginary residue {residue:.3e}")
    return vals.real


def _require_symmetric(uquad: UniformGrid1D):
    if abs(uquad.min + uquad.max) > 1e-12 * max(1.0, uquad.max):
        raise ValueError("relative-coordinate grid must be symmetric about zero")


def rho_to_f(
    rho: Union[RhoSampler, DensityMatrixField],
    qgrid: UniformGrid1D = None,
    pgrid: UniformGrid1D = DEFAULT_PGRID,
    uquad: UniformGrid1D = None,
    t: float = None,
) -> PhaseSpaceField:
    """Phase-space function of a density matrix.

    For gridded input the defaults are ``qgrid = rho.xgrid`` and a
    relative-coordinate grid aligned with it (see
    :func:`~liouspace.fields.aligned_uquad`), which reads ``rho`` only at
    its nodes. Samplers default to ``[-10, 10]`` with 2049 points.
    """
    if isinstance(rho, DensityMatrixField):
        qgrid = rho.xgrid if qgrid is None else qgrid
        uquad = aligned_uquad(rho.xgrid) if uquad is None else uquad
        time = rho.time if t is None else t
        herm = rho.hermiticity_error()
        if herm > HERMITIAN_TOL * max(1.0, np.abs(rho.values).max()):
            raise NonHermitianError(f"max deviation {herm:.3e}")
    else:
        qgrid = DEFAULT_XGRID if qgrid is None else qgrid
        uquad = DEFAULT_QUAD if uquad is None else uquad
        time = 0.0 if t is None else t
    _require_symmetric(uquad)
    samples = _midpoint_samples(rho, qgrid.points, uquad.points)
    return PhaseSpaceField(qgrid, pgrid, _wigner_quadrature(samples, pgrid, uquad), time)


def wavefunction_to_f(
    psi: WaveFunctionField,
    qgrid: UniformGrid1D = None,
    pgrid: UniformGrid1D = DEFAULT_PGRID,
    uquad: UniformGrid1D = None,
) -> PhaseSpaceField:
    """Phase-space function of the pure state ``psi(x) psi*(x')``.

    The result is never marked classical; run
    :func:`liouspace.oracles.certify_classical` for that.
    """
    qgrid = psi.xgrid if qgrid is None else qgrid
    uquad = aligned_uquad(psi.xgrid) if uquad is None else uquad
    _require_symmetric(uquad)
    q, u = qgrid.points, uquad.points
    samples = psi.at(q[:, None] + 0.5 * u[None, :]) * np.conj(psi.at(q[:, None] - 0.5 * u[None, :]))
    return PhaseSpaceField(qgrid, pgrid, _wigner_quadrature(samples, pgrid, uquad), psi.time)


def purity(rho: DensityMatrixField) -> float:
    w = rho.xgrid.weights
    return float(w @ np.abs(rho.values) ** 2 @ w)


def factorize_density(rho: DensityMatrixField, tol: float = 1e-6) -> WaveFunctionField:
    """Write a rank-one density matrix as ``psi(x) psi*(x')``.

    The column through the largest diagonal entry is used and the global
    phase is fixed by making that sample real-positive.

    Raises
    ------
    NotFactorizableError
        If the purity is below ``1 - tol`` or the reconstruction misses
        ``rho`` by more than ``tol * max|rho|``.
    DegenerateDiagonalError
        If the largest diagonal entry is below 1e-12.
    """
    pur = purity(rho)
    if pur < 1.0 - tol:
        raise NotFactorizableError(f"purity {pur:.9g} < 1 - {tol:g}")
    diag = np.diag(rho.values).real
    anchor = int(np.argmax(diag))
    if diag[anchor] < 1e-12:
        raise DegenerateDiagonalError(f"largest diagonal entry {diag[anchor]:.3e}")
    psi = rho.values[:, anchor] / np.sqrt(diag[anchor])
    psi[anchor] = np.sqrt(diag[anchor])

    err = np.max(np.abs(rho.values - np.outer(psi, psi.conj())))
    if err > tol * np.abs(rho.values).max():
        raise NotFactorizableError(f"reconstruction error {err:.3e}")
    logger.debug("factorized with anchor %d, purity %.12g, error %.3e", anchor, pur, err)
    return WaveFunctionField(rho.xgrid, psi, rho.time, gauge_anchor=anchor)


def von_neumann_residual(rho, x, xp, t, h: float = 1e-3):
    """Central-difference ``i drho/dt + 1/2 (d2/dx2 - d2/dx'2) rho - (x - x') rho``.

    ``rho`` is a space-time sampler ``rho(x, x', t)``.
    """
    if not h > 0.0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    r0 = rho(x, xp, t)
    r_t = (rho(x, xp, t + h) - rho(x, xp, t - h)) / (2.0 * h)
    r_xx = (rho(x + h, xp, t) - 2.0 * r0 + rho(x - h, xp, t)) / (h * h)
    r_yy = (rho(x, xp + h, t) - 2.0 * r0 + rho(x, xp - h, t)) / (h * h)
    return 1j * r_t + 0.5 * (r_xx - r_yy) - (x - xp) * r0


# The integral kernels of the two maps contain a Dirac delta on the
# midpoint, so they are realized as the change of variables
# (x, y) <-> (q = (x + y)/2, u = x - y) inside f_to_rho / rho_to_f.

def kernel_F(x, y, q, p) -> str:
    """Symbolic form of the density-matrix -> phase-space kernel."""
    return f"(1/2π)·exp(-i·{p}·({x} - {y}))·δ(({x} + {y})/2 - {q})"


def kernel_F_inv(x, y, q, p) -> str:
    """Symbolic form of the phase-space -> density-matrix kernel."""
    return f"exp(i·{p}·({x} - {y}))·δ(({x} + {y})/2 - {q})"


def midpoint_coordinates(x, y):
    """The change of variables carried out by the delta in both kernels."""
    return 0.5 * (np.asarray(x) + np.asarray(y)), np.asarray(x) - np.asarray(y)
