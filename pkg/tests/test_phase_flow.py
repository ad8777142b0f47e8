import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouspace.fields import PhaseSpaceField, UniformGrid1D
from liouspace.oracles import convergence_order, gaussian_solution
from liouspace.phase_flow import (
    GaussianPhaseState,
    PhasePoint,
    TransformMatrix,
    evolve_gaussian,
    flow_backward,
    flow_forward,
    gaussian_density,
    gaussian_sampler,
    hamiltonian,
    liouville_residual,
    propagate_distribution,
)

coord = st.floats(-10, 10, allow_nan=False)
HALF_I = GaussianPhaseState(0.0, 0.0, 0.5 * np.eye(2))


@pytest.mark.parametrize(
    "q, p, energy", [(0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (-0.5, -1.0, 0.0)]
)
def test_hamiltonian_values(q, p, energy):
    assert hamiltonian(PhasePoint(q, p)) == pytest.approx(energy, abs=1e-15)


@pytest.mark.parametrize(
    "start, t, end",
    [((0, 0), 0, (0, 0)), ((0, 0), 1, (-0.5, -1)), ((1, 2), 2, (3, 0))],
)
def test_flow_forward_values(start, t, end):
    pt = flow_forward(PhasePoint(*start), t)
    assert (pt.q, pt.p) == pytest.approx(end, abs=1e-15)


def test_flow_backward_values():
    assert flow_backward(PhasePoint(0.0, 0.0), 0.0) == PhasePoint(0.0, 0.0)
    pt = flow_backward(PhasePoint(0.0, 0.0), 1.0)
    assert (pt.q, pt.p) == pytest.approx((-0.5, 1.0))
    back = flow_backward(flow_forward(PhasePoint(0.3, -0.7), 1.4), 1.4)
    assert (back.q, back.p) == pytest.approx((0.3, -0.7), abs=1e-15)


def test_phase_point_rejects_non_finite():
    with pytest.raises(ValueError):
        PhasePoint(float("nan"), 0.0)
    with pytest.raises(ValueError):
        PhasePoint(0.0, np.array([1.0, np.inf]))


@settings(max_examples=200)
@given(coord, coord, coord)
def test_energy_conserved(q, p, t):
    pt = PhasePoint(q, p)
    assert abs(hamiltonian(flow_forward(pt, t)) - hamiltonian(pt)) <= 1e-12


@settings(max_examples=200)
@given(coord, coord, coord, coord)
def test_group_law(q, p, t1, t2):
    a = flow_forward(flow_forward(PhasePoint(q, p), t1), t2)
    b = flow_forward(PhasePoint(q, p), t1 + t2)
    assert abs(a.q - b.q) <= 1e-12 and abs(a.p - b.p) <= 1e-12


@settings(max_examples=200)
@given(coord, coord, coord)
def test_backward_inverts_forward(q, p, t):
    back = flow_backward(flow_forward(PhasePoint(q, p), t), t)
    assert abs(back.q - q) <= 1e-12 and abs(back.p - p) <= 1e-12


@given(coord, st.floats(0.1, 3), st.floats(-0.9, 0.9), st.floats(0.1, 3))
def test_covariance_determinant_invariant(t, s_qq, rho, s_pp):
    s_qp = rho * math.sqrt(s_qq * s_pp)
    g0 = GaussianPhaseState.from_entries(0.0, 0.0, s_qq, s_qp, s_pp)
    g = evolve_gaussian(g0, t)
    d0, d = np.linalg.det(g0.cov), np.linalg.det(g.cov)
    assert abs(d - d0) <= 1e-12 * d0 * max(1.0, t * t) ** 2
    assert np.array_equal(g.cov, g.cov.T)
    assert np.linalg.eigvalsh(g.cov).min() > 0


def test_transform_matrix_unit_determinant():
    assert np.linalg.det(TransformMatrix.at_time(3.7).a) == 1.0
    with pytest.raises(ValueError):
        TransformMatrix(np.array([[2.0, 0.0], [0.0, 1.0]]))


def test_gaussian_state_validation():
    with pytest.raises(ValueError):
        GaussianPhaseState.from_entries(0, 0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        GaussianPhaseState(0, 0, np.array([[1.0, 0.1], [0.2, 1.0]]))


def test_evolve_gaussian_examples():
    assert np.array_equal(evolve_gaussian(HALF_I, 0.0).cov, HALF_I.cov)
    for t in (-1.5, 0.3, 1.0, 4.0):
        g = evolve_gaussian(HALF_I, t)
        np.testing.assert_allclose(g.cov, 0.5 * np.array([[1 + t * t, t], [t, 1]]), atol=1e-14)
    g = evolve_gaussian(HALF_I, 2.0)
    np.testing.assert_array_equal(g.mean, [-2.0, -2.0])
    np.testing.assert_allclose(g.cov, 0.5 * np.array([[5, 2], [2, 1]]), atol=1e-15)


def test_gaussian_density_examples():
    assert gaussian_density(HALF_I, PhasePoint(0.0, 0.0)) == pytest.approx(1 / math.pi, rel=1e-15)
    assert gaussian_density(HALF_I, PhasePoint(1.0, 0.0)) == pytest.approx(
        math.exp(-1) / math.pi, rel=1e-15
    )
    for t in (0.5, 1.0, 2.5):
        g = evolve_gaussian(HALF_I, t)
        peak = gaussian_density(g, PhasePoint(-0.5 * t * t, -t))
        assert peak == pytest.approx(1 / math.pi, rel=1e-13)


@pytest.mark.parametrize("t", [0.0, 0.7, 1.0, 2.0, -1.3])
def test_gaussian_density_matches_closed_form(t):
    q, p = np.meshgrid(np.linspace(-5, 5, 23), np.linspace(-5, 5, 19), indexing="ij")
    got = gaussian_density(evolve_gaussian(HALF_I, t), PhasePoint(q, p))
    np.testing.assert_allclose(got, gaussian_solution(q, p, t), rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("t", [0.0, 1.0, 2.0])
def test_gaussian_density_normalized(t):
    g = evolve_gaussian(GaussianPhaseState.from_entries(0.4, -0.3, 0.8, 0.2, 0.5), t)
    sq, sp = np.sqrt(np.diag(g.cov))
    qg = UniformGrid1D(g.mean_q - 8 * sq, g.mean_q + 8 * sq, 401)
    pg = UniformGrid1D(g.mean_p - 8 * sp, g.mean_p + 8 * sp, 401)
    q, p = np.meshgrid(qg.points, pg.points, indexing="ij")
    total = qg.weights @ gaussian_density(g, PhasePoint(q, p)) @ pg.weights
    assert abs(total - 1.0) <= 1e-9


def test_propagate_distribution_matches_exact_solution():
    qg, pg = UniformGrid1D(-6, 6, 61), UniformGrid1D(-5, 5, 51)
    f0 = lambda q, p: np.exp(-q * q - p * p) / math.pi  # noqa: E731
    out = propagate_distribution(f0, 1.0, qg, pg)
    q, p = np.meshgrid(qg.points, pg.points, indexing="ij")
    np.testing.assert_allclose(
        out.values, np.exp(-((p + 1) ** 2) - (q - p - 0.5) ** 2) / math.pi, rtol=1e-13, atol=1e-300
    )
    assert out.time == 1.0
    ident = propagate_distribution(f0, 0.0, qg, pg)
    np.testing.assert_array_equal(ident.values, f0(q, p))


def test_propagate_distribution_moves_bump():
    qg = pg = UniformGrid1D(-4, 4, 81)
    bump = lambda q, p: np.where(q * q + p * p < 0.09, 1.0, 0.0)  # noqa: E731
    out = propagate_distribution(bump, 2.0, qg, pg)
    q, p = np.meshgrid(qg.points, pg.points, indexing="ij")
    w = out.values
    center = ((q * w).sum() / w.sum(), (p * w).sum() / w.sum())
    # the bump is not symmetric after the shear, but its center moves with the flow
    assert center == pytest.approx((-2.0, -2.0), abs=0.05)


def test_propagate_distribution_from_field_is_exact_on_nodes():
    # offsets 0.5 and 1 are multiples of the spacing, so pulled-back points are nodes
    g0 = UniformGrid1D(-10, 10, 401)
    q, p = np.meshgrid(g0.points, g0.points, indexing="ij")
    f0 = PhaseSpaceField(g0, g0, gaussian_solution(q, p, 0.0))
    out_grid = UniformGrid1D(-4, 4, 161)
    out = propagate_distribution(f0, 1.0, out_grid, out_grid)
    Q, P = np.meshgrid(out_grid.points, out_grid.points, indexing="ij")
    np.testing.assert_allclose(out.values, gaussian_solution(Q, P, 1.0), atol=1e-13)


def test_liouville_residual_exact_solution():
    for pt, t in [(PhasePoint(0.3, -0.2), 0.7), (PhasePoint(-1.0, 0.5), 2.0)]:
        assert abs(liouville_residual(gaussian_solution, pt, t, 1e-3)) < 1e-6


def test_liouville_residual_static_gaussian():
    static = lambda q, p, t: np.exp(-q * q - p * p) / math.pi  # noqa: E731
    # p df/dq - df/dp = 2 p (1 - q) f vanishes at (1, 1) but not at (0, 1)
    assert abs(liouville_residual(static, PhasePoint(1.0, 1.0), 0.0)) < 1e-12
    got = liouville_residual(static, PhasePoint(0.0, 1.0), 0.0, 1e-4)
    assert got == pytest.approx(2 * math.exp(-1) / math.pi, rel=1e-7)


def test_liouville_residual_rejects_bad_step():
    with pytest.raises(ValueError):
        liouville_residual(gaussian_solution, PhasePoint(0, 0), 0.0, 0.0)


def test_liouville_residual_richardson_ratio_on_perturbed_field():
    eps = 0.1

    def bump(q, p, t):
        return eps * np.sin(q) * np.exp(-p * p) * np.cos(t)

    def operator_exact(q, p, t):
        e = eps * np.exp(-p * p)
        return -e * np.sin(q) * np.sin(t) + p * e * np.cos(q) * np.cos(t) + 2 * p * e * np.sin(q) * np.cos(t)

    def perturbed(q, p, t):
        return gaussian_solution(q, p, t) + bump(q, p, t)

    pt, t = PhasePoint(0.4, 0.6), 0.9
    exact = operator_exact(pt.q, pt.p, t)
    assert abs(exact) > 1e-2

    def err(h):
        return liouville_residual(perturbed, pt, t, h) - exact

    assert err(0.02) / err(0.01) == pytest.approx(4.0, rel=0.02)
    assert convergence_order(err, 0.04, 4) == pytest.approx(2.0, abs=0.1)


def test_liouville_residual_order_on_exact_solution():
    pt = PhasePoint(0.3, -0.2)
    order = convergence_order(lambda h: liouville_residual(gaussian_solution, pt, 0.7, h), 0.05, 4)
    assert order == pytest.approx(2.0, abs=0.1)


def test_gaussian_sampler_time_dependence():
    f = gaussian_sampler(HALF_I)
    assert f(0.0, 0.0, 0.0) == pytest.approx(1 / math.pi)
    assert abs(liouville_residual(f, PhasePoint(0.2, 0.1), 1.1)) < 1e-6
