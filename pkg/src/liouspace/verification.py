"""Acceptance checks, grouped into the suites exposed by ``liouspace verify``.

Every check returns :class:`CheckResult` records carrying the measured
quantity, the tolerance and the verdict.  Grids and sample sizes are pinned
here so results are reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import duality_maps as dm
from . import oracles
from . import phase_flow as pf
from . import schrodinger_like as sl
from .fields import PhaseSpaceField, UniformGrid1D


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float
    comparison: str = "<="

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.measured):
            return False
        if self.comparison == "<=":
            return self.measured <= self.tolerance
        return self.measured >= self.tolerance

    def line(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "measured": float(self.measured),
                "tolerance": float(self.tolerance),
                "comparison": self.comparison,
                "pass": bool(self.passed),
            }
        )


WIDE_GRID = UniformGrid1D(-10.0, 10.0, 401)
NARROW_GRID = UniformGrid1D(-6.0, 6.0, 241)
MOMENTUM_GRID = UniformGrid1D(-8.0, 8.0, 321)
MC_SAMPLES = 100_000
MC_SEED = 20090501


def check_dispersion() -> List[CheckResult]:
    g0 = pf.GaussianPhaseState(0.0, 0.0, 0.5 * np.eye(2))
    g = pf.evolve_gaussian(g0, 2.0)
    exact = 0.5 * np.array([[5.0, 2.0], [2.0, 1.0]])
    out = [
        CheckResult("A1.cov_closed_form", float(np.abs(g.cov - exact).max()), 1e-12),
        CheckResult("A1.mean_closed_form", float(np.abs(g.mean - [-2.0, -2.0]).max()), 1e-12),
    ]
    rng = np.random.default_rng(MC_SEED)
    cloud = rng.multivariate_normal([0.0, 0.0], g0.cov, size=MC_SAMPLES)
    moved = pf.flow_forward(pf.PhasePoint(cloud[:, 0], cloud[:, 1]), 2.0)
    emp = np.cov(np.vstack([moved.q, moved.p]))
    for (i, j), label in zip([(0, 0), (0, 1), (1, 1)], ["qq", "qp", "pp"]):
        out.append(CheckResult(f"A1.cov_monte_carlo_{label}", abs(emp[i, j] - exact[i, j]), 2e-2))
    return out


def check_density_oracle() -> List[CheckResult]:
    x = np.linspace(-4.0, 4.0, 33)
    X, XP = np.meshgrid(x, x, indexing="ij")
    out = []
    for t in (0.0, 0.5, 1.0, 2.0):
        ref = oracles.brute_force_rho(X, XP, t)
        psi = sl.psi_gaussian_gauged(X, t) * np.conj(sl.psi_gaussian_gauged(XP, t))
        out.append(CheckResult(f"A2.corrected_t={t:g}", float(np.abs(ref - psi).max()), 1e-8))
        if t in (0.5, 2.0):
            bad = sl.psi_gaussian_t2_offset(X, t) * np.conj(sl.psi_gaussian_t2_offset(XP, t))
            out.append(
                CheckResult(f"A2.t2_offset_rejected_t={t:g}", float(np.abs(ref - bad).max()), 1e-2, ">=")
            )
    return out


def check_norm() -> List[CheckResult]:
    grid = UniformGrid1D(-60.0, 50.0, 4401)
    out = []
    for t in (0.0, 0.5, 1.0, 2.0, 4.0):
        nrm = grid.integrate(np.abs(sl.psi_gaussian_raw(grid.points, t)) ** 2)
        out.append(CheckResult(f"A3.norm_t={t:g}", abs(float(nrm) - 1.0), 1e-9))
    return out


def check_raw_residual() -> List[CheckResult]:
    x = np.linspace(-2.0, 2.0, 41)
    t = 1.0
    fd = sl.schrodinger_residual(sl.psi_gaussian_raw, x, t, 1e-4, 1e-4) / sl.psi_gaussian_raw(x, t)
    exact = oracles.gaussian_schrodinger_ratio(x, t)
    return [
        CheckResult("A4.fd_coefficient", float(np.abs(fd - 0.5).max()), 1e-4),
        CheckResult("A4.fd_x_spread", float(np.ptp(fd.real) + np.ptp(fd.imag)), 1e-6),
        CheckResult("A4.analytic_coefficient", float(np.abs(exact - 0.5).max()), 1e-10),
        CheckResult("A4.analytic_x_spread", float(np.ptp(exact.real)), 1e-8),
        CheckResult("A4.analytic_imag", float(np.abs(exact.imag).max()), 1e-8),
        CheckResult(
            "A4.coefficient_formula", abs(float(sl.residual_coefficient(t)) - 0.5), 1e-12
        ),
    ]


def check_phase() -> List[CheckResult]:
    phase = sl.phase_integrate(5.0, 1e-3)
    ts, phis = phase.samples
    knots = float(np.abs(phis - sl.phase_closed(ts)).max())
    between = np.linspace(0.0, 5.0, 1237)
    interp = float(np.abs(phase(between) - sl.phase_closed(between)).max())
    h = 1e-5
    tt = np.linspace(0.0, 5.0, 501)
    deriv = (sl.phase_closed(tt + h) - sl.phase_closed(tt - h)) / (2 * h)
    return [
        CheckResult("A5.rk4_vs_closed_knots", knots, 1e-8),
        CheckResult("A5.rk4_vs_closed_interpolated", interp, 1e-8),
        CheckResult(
            "A5.closed_at_1", abs(float(sl.phase_closed(1.0)) - (-5.0 / 48.0 - math.pi / 8.0)), 1e-12
        ),
        CheckResult("A5.antiderivative", float(np.abs(deriv - sl.phase_rhs(tt)).max()), 1e-6),
    ]


def check_gauged_solution() -> List[CheckResult]:
    x = np.linspace(-4.0, 4.0, 161)
    out = []
    for t in (0.1, 1.0, 3.0):
        psi = sl.psi_gaussian_gauged(x, t)
        res = oracles.gaussian_gauged_residual(x, t, psi)
        out.append(CheckResult(f"A6.analytic_residual_t={t:g}", float(np.abs(res).max()), 1e-10))
        fd = sl.schrodinger_residual(sl.psi_gaussian_gauged, x, t, 1e-4, 1e-4)
        out.append(CheckResult(f"A6.fd_residual_t={t:g}", float(np.abs(fd).max()), 1e-6))
    return out


def check_green_propagation() -> List[CheckResult]:
    grid = WIDE_GRID
    psi0 = sl.psi_gaussian_field(grid, 0.0)
    out1 = sl.propagate_psi(psi0, 1.0)
    ref = sl.psi_gaussian_gauged(grid.points, 1.0)
    mask = np.abs(ref) > 1e-6
    dphi = np.unwrap(np.angle(out1.values[mask] / ref[mask]))
    twice = sl.propagate_psi(sl.propagate_psi(psi0, 0.5), 0.5)
    amp = sl.greens(np.array([-3.0, 0.0, 2.5]), np.array([1.0, 0.0, -4.0]), 1.0)
    return [
        CheckResult("A7.modulus", float(np.abs(np.abs(out1.values) - np.abs(ref)).max()), 1e-6),
        CheckResult("A7.phase_constancy", float(np.ptp(dphi)), 1e-6),
        CheckResult("A7.norm", abs(out1.norm() - 1.0), 1e-6),
        CheckResult("A7.semigroup", float(np.abs(twice.values - out1.values).max()), 1e-5),
        CheckResult(
            "A7.green_amplitude", float(np.abs(np.abs(amp) - 1 / math.sqrt(2 * math.pi)).max()), 1e-14
        ),
    ]


def check_round_trip() -> List[CheckResult]:
    grid = WIDE_GRID
    out = []
    for t in (0.0, 1.0):
        exact = lambda q, p, t=t: oracles.gaussian_solution(q, p, t)  # noqa: E731
        rho = dm.f_to_rho(exact, grid, t=t)
        back = dm.rho_to_f(rho, grid, MOMENTUM_GRID)
        Q, P = np.meshgrid(grid.points, MOMENTUM_GRID.points, indexing="ij")
        out.append(
            CheckResult(
                f"A8.round_trip_t={t:g}", float(np.abs(back.values - exact(Q, P)).max()), 1e-6
            )
        )
        pg = UniformGrid1D(-10.0, 10.0, 401)
        Q, P = np.meshgrid(grid.points, pg.points, indexing="ij")
        field = PhaseSpaceField(grid, pg, exact(Q, P), t)
        rep = oracles.marginal_check(field, sl.psi_gaussian_field(grid, t))
        out.append(CheckResult(f"A8.marginal_t={t:g}", rep.max_abs, 1e-8))
    return out


def check_negativity() -> List[CheckResult]:
    grid = WIDE_GRID
    w1 = dm.wavefunction_to_f(oracles.hermite_state(1, grid), pgrid=MOMENTUM_GRID)
    rep = oracles.negativity_scan(w1)
    gauss = pf.propagate_distribution(
        lambda q, p: oracles.gaussian_solution(q, p, 0.0), 1.0, grid, MOMENTUM_GRID
    )
    grep = oracles.negativity_scan(gauss)
    return [
        CheckResult("A9.hermite1_min", abs(rep.min_value + 1.0 / math.pi), 1e-3),
        CheckResult("A9.hermite1_argmin_distance", float(np.hypot(*rep.argmin)), 1e-12),
        CheckResult("A9.hermite1_nonclassical", float(rep.classical), 0.0),
        CheckResult("A9.gaussian_classical", float(grep.classical), 1.0, ">="),
    ]


def check_commuting_square() -> List[CheckResult]:
    wide, narrow = WIDE_GRID, NARROW_GRID
    psi0 = sl.psi_gaussian_field(wide, 0.0)
    lhs = dm.wavefunction_to_f(sl.propagate_psi(psi0, 1.0), narrow, narrow)
    f0 = dm.wavefunction_to_f(psi0, wide, wide)
    rhs = pf.propagate_distribution(f0, 1.0, narrow, narrow)
    return [CheckResult("A10.commuting_square", float(np.abs(lhs.values - rhs.values).max()), 1e-5)]


def _order_result(name, fn, h0=0.05, levels=4):
    order = oracles.convergence_order(fn, h0, levels)
    return CheckResult(name, abs(order - 2.0), 0.1)


def check_liouville_order() -> List[CheckResult]:
    pt = pf.PhasePoint(0.3, -0.2)
    return [
        _order_result(
            "A11.liouville_order",
            lambda h: pf.liouville_residual(oracles.gaussian_solution, pt, 0.7, h),
        )
    ]


def check_von_neumann_order() -> List[CheckResult]:
    def rho(x, xp, t):
        return sl.psi_gaussian_gauged(x, t) * np.conj(sl.psi_gaussian_gauged(xp, t))

    frozen = dm.von_neumann_residual(lambda x, xp, t: rho(x, xp, 0.0), 1.0, 0.0, 0.0)
    return [
        _order_result(
            "A11.von_neumann_order", lambda h: dm.von_neumann_residual(rho, 0.4, -0.3, 0.8, h)
        ),
        CheckResult("vonneumann.exact_residual", abs(dm.von_neumann_residual(rho, 0.4, -0.3, 0.8)), 1e-5),
        CheckResult("vonneumann.frozen_detected", abs(frozen), 1e-2, ">="),
    ]


def check_schrodinger_order() -> List[CheckResult]:
    return [
        _order_result(
            "A11.schrodinger_order",
            lambda h: sl.schrodinger_residual(sl.psi_gaussian_gauged, 0.7, 1.3, h, h),
        )
    ]


CRITERIA: Dict[str, Callable[[], List[CheckResult]]] = {
    "A1": check_dispersion,
    "A2": check_density_oracle,
    "A3": check_norm,
    "A4": check_raw_residual,
    "A5": check_phase,
    "A6": check_gauged_solution,
    "A7": check_green_propagation,
    "A8": check_round_trip,
    "A9": check_negativity,
    "A10": check_commuting_square,
    "A11.liouville": check_liouville_order,
    "A11.vonneumann": check_von_neumann_order,
    "A11.schrodinger": check_schrodinger_order,
}

SUITES: Dict[str, List[str]] = {
    "liouville": ["A1", "A11.liouville"],
    "vonneumann": ["A11.vonneumann"],
    "schrodinger": ["A2", "A3", "A4", "A5", "A6", "A11.schrodinger"],
    "roundtrip": ["A8", "A10"],
    "negativity": ["A9"],
    "greens": ["A7"],
}
SUITES["all"] = [key for suite in list(SUITES.values()) for key in suite]


def run_suite(name: str) -> List[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = []
    for key in SUITES[name]:
        results.extend(CRITERIA[key]())
    return results
