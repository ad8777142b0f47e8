"""Uniform grids and the sampled field containers shared by every module.

All quadratures use the composite trapezoidal rule on the grids defined
here.  Interpolation off the grid is (bi)linear and zero-extended outside
the sampled rectangle, which is exact at grid nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import FieldInvariantError

#: tolerance below which a negative sample is still considered classical
EPS_NEG = 1e-12
NORM_TOL = 1e-6
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class UniformGrid1D:
    """Endpoint-inclusive uniform grid of ``n`` points on ``[min, max]``."""

    min: float
    max: float
    n: int

    def __post_init__(self):
        lo, hi = float(self.min), float(self.max)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"grid bounds must be finite, got [{lo}, {hi}]")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs n >= 2 points, got {self.n}")
        if not hi > lo:
            raise ValueError(f"grid needs max > min, got [{lo}, {hi}]")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal weights; ``weights @ f`` integrates samples ``f``."""
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    @property
    def abs_max(self) -> float:
        return max(abs(self.min), abs(self.max))

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))

    def fractional_index(self, x):
        return (np.asarray(x, dtype=float) - self.min) / self.spacing

    def same_as(self, other: "UniformGrid1D", rtol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.min), abs(self.max))
        return (
            self.n == other.n
            and abs(self.min - other.min) <= rtol * scale
            and abs(self.max - other.max) <= rtol * scale
        )

    @classmethod
    def parse(cls, text: str) -> "UniformGrid1D":
        """Build a grid from ``"min,max,n"``."""
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 'min,max,n', got {text!r}")
        n = float(parts[2])
        if n != int(n):
            raise ValueError(f"grid size must be an integer, got {parts[2]!r}")
        return cls(float(parts[0]), float(parts[1]), int(n))

    def spec(self) -> str:
        return f"{self.min:.17g},{self.max:.17g},{self.n}"


def aligned_uquad(xgrid: UniformGrid1D) -> UniformGrid1D:
    """Relative-coordinate grid whose step is twice the spacing of ``xgrid``.

    For ``q`` on a node of ``xgrid`` the points ``q +/- u/2`` are nodes
    too, so gridded data needs no interpolation in the Wigner integral.
    """
    width = xgrid.max - xgrid.min
    return UniformGrid1D(-2.0 * width, 2.0 * width, 2 * xgrid.n - 1)


def _locate(grid: UniformGrid1D, x):
    idx = grid.fractional_index(x)
    # snap round-off so exact nodes do not leak weight into neighbours
    near = np.rint(idx)
    idx = np.where(np.abs(idx - near) < 1e-9, near, idx)
    inside = (idx >= 0.0) & (idx <= grid.n - 1)
    i0 = np.clip(np.floor(idx), 0, grid.n - 2).astype(np.intp)
    frac = np.clip(idx - i0, 0.0, 1.0)
    return i0, frac, inside


def interp_linear(grid: UniformGrid1D, values: np.ndarray, x):
    """Linear interpolation of 1-D samples, zero outside the grid."""
    i0, frac, inside = _locate(grid, x)
    out = (1.0 - frac) * values[i0] + frac * values[i0 + 1]
    return np.where(inside, out, 0.0)


def interp_bilinear(grid_a: UniformGrid1D, grid_b: UniformGrid1D, values: np.ndarray, a, b):
    """Bilinear interpolation of ``values[i, j]`` sampled on ``grid_a x grid_b``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    i0, fa, in_a = _locate(grid_a, a)
    j0, fb, in_b = _locate(grid_b, b)
    out = (
        (1.0 - fa) * (1.0 - fb) * values[i0, j0]
        + fa * (1.0 - fb) * values[i0 + 1, j0]
        + (1.0 - fa) * fb * values[i0, j0 + 1]
        + fa * fb * values[i0 + 1, j0 + 1]
    )
    return np.where(in_a & in_b, out, 0.0)


@dataclass
class PhaseSpaceField:
    """Real samples ``f(q_i, p_j)`` of a phase-space function at one time.

    ``classical`` marks the field as a genuine probability density; it is
    only set after the nonnegativity and normalization checks pass.
    """

    qgrid: UniformGrid1D
    pgrid: UniformGrid1D
    values: np.ndarray
    time: float = 0.0
    classical: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.qgrid.n, self.pgrid.n)
        if self.values.shape != expected:
            raise FieldInvariantError(f"values shape {self.values.shape} != grid shape {expected}")
        if not np.all(np.isfinite(self.values)):
            raise FieldInvariantError("phase-space field contains non-finite values")
        self.time = float(self.time)
        if self.classical:
            self.validate()

    def integral(self) -> float:
        return float(self.qgrid.weights @ self.values @ self.pgrid.weights)

    def q_marginal(self) -> np.ndarray:
        return self.values @ self.pgrid.weights

    def at(self, q, p):
        return interp_bilinear(self.qgrid, self.pgrid, self.values, q, p)

    def validate(self) -> None:
        if not self.classical:
            return
        low = float(self.values.min())
        if low < -EPS_NEG:
            raise FieldInvariantError(f"classical density has negative sample {low:.3e}")
        total = self.integral()
        if abs(total - 1.0) > NORM_TOL:
            raise FieldInvariantError(f"classical density integrates to {total:.12g}")


@dataclass
class DensityMatrixField:
    """Complex samples ``rho(x_i, x_j)`` on a square grid at one time."""

    xgrid: UniformGrid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (self.xgrid.n, self.xgrid.n)
        if self.values.shape != expected:
            raise FieldInvariantError(f"values shape {self.values.shape} != grid shape {expected}")
        if not np.all(np.isfinite(self.values)):
            raise FieldInvariantError("density matrix contains non-finite values")
        self.time = float(self.time)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def trace(self) -> complex:
        return complex(self.xgrid.weights @ np.diag(self.values))

    def at(self, x, xp):
        v = self.values
        re = interp_bilinear(self.xgrid, self.xgrid, v.real, x, xp)
        im = interp_bilinear(self.xgrid, self.xgrid, v.imag, x, xp)
        return re + 1j * im

    def validate(self) -> None:
        herm = self.hermiticity_error()
        if herm > HERMITIAN_TOL:
            raise FieldInvariantError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = self.trace().real
        if abs(tr - 1.0) > NORM_TOL:
            raise FieldInvariantError(f"density matrix trace {tr:.12g} is not 1")
        diag = np.diag(self.values)
        if np.max(np.abs(diag.imag)) > HERMITIAN_TOL or diag.real.min() < -HERMITIAN_TOL:
            raise FieldInvariantError("density matrix diagonal must be real and nonnegative")


@dataclass
class WaveFunctionField:
    """Complex samples ``psi(x_i)`` at one time.

    ``gauge_anchor`` is the index of the sample made real-positive when a
    global phase was fixed by convention; ``None`` means the phase carries
    dynamical meaning (e.g. the output of Green-function propagation).
    """

    xgrid: UniformGrid1D
    values: np.ndarray
    time: float = 0.0
    gauge_anchor: Optional[int] = None
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.xgrid.n,):
            raise FieldInvariantError(
                f"values shape {self.values.shape} != grid shape {(self.xgrid.n,)}"
            )
        if not np.all(np.isfinite(self.values)):
            raise FieldInvariantError("wave function contains non-finite values")
        self.time = float(self.time)
        if self.gauge_anchor is not None:
            self.gauge_anchor = int(self.gauge_anchor)
            if not 0 <= self.gauge_anchor < self.xgrid.n:
                raise FieldInvariantError(f"gauge anchor {self.gauge_anchor} outside grid")

    def norm(self) -> float:
        return float(self.xgrid.weights @ np.abs(self.values) ** 2)

    def at(self, x):
        re = interp_linear(self.xgrid, self.values.real, x)
        im = interp_linear(self.xgrid, self.values.imag, x)
        return re + 1j * im

    def density(self) -> DensityMatrixField:
        v = self.values
        return DensityMatrixField(self.xgrid, np.outer(v, v.conj()), self.time)

    def validate(self) -> None:
        nrm = self.norm()
        if abs(nrm - 1.0) > NORM_TOL:
            raise FieldInvariantError(f"wave function norm {nrm:.12g} is not 1")
        if self.gauge_anchor is not None:
            a = self.values[self.gauge_anchor]
            if abs(a.imag) > 1e-12 or not a.real > 0.0:
                raise FieldInvariantError(f"gauge anchor sample {a} is not real-positive")
