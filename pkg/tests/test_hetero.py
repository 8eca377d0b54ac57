import numpy as np
import pytest

from subshock_lab import hetero
from subshock_lab.model import ModelSpec, WaveProblem
from subshock_lab.errors import (
    BoundaryDefectTooLarge,
    DegenerateTransversality,
    ValidationError,
)
from subshock_lab.spectral import fast_jacobian


@pytest.fixture(scope="session")
def hamer_singular(hamer_problem):
    return hetero.assemble_singular_orbit(hamer_problem)


@pytest.fixture(scope="session")
def asym_singular(asym_problem):
    return hetero.assemble_singular_orbit(asym_problem)


@pytest.fixture(scope="session")
def hamer_sweep(hamer_problem):
    return hetero.sweep_epsilon(hamer_problem, [0.2, 0.1, 0.05])


def _rest(problem, u):
    return np.array([u, 0.0, float(problem.g(u))])


def test_singular_orbit_rejects_corner_matching():
    # du = 1.43 sits in the folded-focus band where the sub-shock amplitude
    # is below float resolution; assembly must refuse the degenerate splice
    problem = WaveProblem.build(ModelSpec.hamer(), 0.715, -0.715)
    with pytest.raises(DegenerateTransversality, match="sonic corner"):
        hetero.assemble_singular_orbit(problem)


def test_singular_orbit_splice_is_continuous(hamer_singular):
    s = hamer_singular
    m = s.matching
    assert s.x_left[-1] == 0.0 and s.x_right[0] == 0.0
    np.testing.assert_allclose(
        s.vals_left[-1], [m.u_left, m.v_star, m.w_star], atol=1e-12
    )
    np.testing.assert_allclose(
        s.vals_right[0], [m.u_right, m.v_star, m.w_star], atol=1e-12
    )
    # layer endpoints meet the slow arcs' u values
    y_end = s.layer.samples[-1, 0]
    assert abs(s.layer.u_at(-y_end) - m.u_left) < 1e-7
    assert abs(s.layer.u_at(y_end) - m.u_right) < 1e-7


def test_singular_orbit_arcs_start_at_rest_states(hamer_singular, hamer_problem):
    s = hamer_singular
    assert np.max(np.abs(s.vals_left[0] - _rest(hamer_problem, 1.0))) < 1e-4
    assert np.max(np.abs(s.vals_right[-1] - _rest(hamer_problem, -1.0))) < 1e-4


def test_point_cloud_contains_layer_fiber(hamer_singular):
    pc = hamer_singular.point_cloud()
    m = hamer_singular.matching
    fiber = pc[np.abs(pc[:, 1] - m.v_star) < 1e-14]
    assert fiber.shape[0] >= 100
    assert fiber[:, 0].min() < m.u_right + 1e-6
    assert fiber[:, 0].max() > m.u_left - 1e-6


def test_guess_is_phase_anchored_and_clamped(hamer_singular, hamer_problem):
    x = np.array([-60.0, -1.0, 0.0, 1.0, 60.0])
    Y = hamer_singular.guess(x, 0.05)
    mid = 0.5 * (hamer_singular.matching.u_left + hamer_singular.matching.u_right)
    assert abs(Y[2, 0] - mid) < 1e-9
    np.testing.assert_allclose(Y[0], _rest(hamer_problem, 1.0), atol=1e-4)
    np.testing.assert_allclose(Y[-1], _rest(hamer_problem, -1.0), atol=1e-4)


def test_heteroclinic_from_singular_guess(hamer_problem, hamer_singular):
    sol = hetero.solve_heteroclinic(hamer_problem, 0.2, singular=hamer_singular)
    assert sol.residual_norm < 1e-9
    assert sol.newton_iterations <= 25
    assert sol.boundary_defect < 1e-6
    u = sol.values[:, 0]
    assert np.all(np.diff(u) < 0.0)
    v = sol.values[:, 1]
    assert np.max(v) < 1e-8
    # single interior minimum: one descending-to-ascending switch in v
    dv = np.diff(v)
    sw = np.diff(np.sign(dv[np.abs(dv) > 1e-9]))
    assert np.count_nonzero(sw) == 1


def test_endpoints_reach_rest_states(hamer_problem, hamer_sweep):
    for sol in hamer_sweep:
        np.testing.assert_allclose(
            sol.values[0], _rest(hamer_problem, 1.0), atol=1e-6
        )
        np.testing.assert_allclose(
            sol.values[-1], _rest(hamer_problem, -1.0), atol=1e-6
        )


def test_profile_inherits_odd_symmetry(hamer_sweep):
    sol = hamer_sweep[1]
    x = np.linspace(-20.0, 20.0, 801)
    Y = sol.at(x)
    Yr = sol.at(-x)
    assert np.max(np.abs(Y[:, 0] + Yr[:, 0])) < 1e-8
    assert np.max(np.abs(Y[:, 1] - Yr[:, 1])) < 1e-8
    assert np.max(np.abs(Y[:, 2] + Yr[:, 2])) < 1e-8


def test_sweep_residuals_and_hausdorff_decrease(hamer_sweep, hamer_singular):
    dists = []
    for sol in hamer_sweep:
        assert sol.residual_norm < 1e-9
        dists.append(hetero.hausdorff_to_singular(sol, hamer_singular))
    assert dists[0] > dists[1] > dists[2]


def test_vw_distance_to_singular_shrinks(hamer_problem, hamer_sweep, hamer_singular):
    # the planar (v, w) trace closes in on the singular arcs as eps drops;
    # at eps = 0.05 the gap is 0.040 (set by |v(0) - v_star|, still in the
    # transitional regime for this weak sub-shock), decaying roughly like
    # eps^(2/3)
    from scipy.spatial import cKDTree

    sing = cKDTree(hamer_singular.point_cloud()[:, 1:])

    def gap(sol):
        return float(sing.query(sol.values[:, 1:])[0].max())

    sol_05 = next(s for s in hamer_sweep if s.epsilon == 0.05)
    d_05 = gap(sol_05)
    assert d_05 < 0.05
    sol_0125 = hetero.solve_heteroclinic(
        hamer_problem, 0.0125, singular=hamer_singular, initial=sol_05
    )
    assert gap(sol_0125) < 0.6 * d_05


def test_mesh_doubling_leaves_profile_unchanged(hamer_problem, hamer_singular):
    a = hetero.solve_heteroclinic(
        hamer_problem, 0.1, mesh_size=1000, singular=hamer_singular
    )
    b = hetero.solve_heteroclinic(
        hamer_problem, 0.1, mesh_size=2000, singular=hamer_singular
    )
    x = np.linspace(-40.0, 40.0, 2001)
    assert np.max(np.abs(a.at(x) - b.at(x))) < 1e-6


def test_warm_start_converges_quickly(hamer_problem, hamer_singular, hamer_sweep):
    warm = hetero.solve_heteroclinic(
        hamer_problem, 0.04, singular=hamer_singular, initial=hamer_sweep[-1]
    )
    assert warm.residual_norm < 1e-9
    assert warm.newton_iterations <= 10


def test_shooting_oracle_matches_collocation(hamer_problem, hamer_singular, hamer_sweep):
    sol = next(s for s in hamer_sweep if s.epsilon == 0.1)
    shot = hetero.shoot_heteroclinic(hamer_problem, 0.1, singular=hamer_singular)
    assert shot.residual_norm < 1e-10
    x = np.linspace(shot.mesh[0], shot.mesh[-1], 4001)
    assert np.max(np.abs(sol.at(x) - shot.at(x))) < 1e-6


def test_width_halving_sets_in_at_small_epsilon(hamer_problem):
    # the 10/90 width only tracks the fast-layer scaling once eps is far
    # below the square of the sub-shock strength; the ratio drifts down
    # toward 1/2 along the way
    eps = [0.2, 0.1, 0.05, 0.02, 0.01, 0.004, 0.002, 0.001, 0.0005]
    sols = hetero.sweep_epsilon(hamer_problem, eps, mesh_size=4000)
    widths = {s.epsilon: s.layer_width_80 for s in sols}
    ratios = [widths[e] / widths[2 * e] for e in (0.1, 0.05, 0.01, 0.001, 0.0005)]
    assert ratios[0] > 0.7  # still transitional two decades in
    assert ratios[1] > ratios[2] > ratios[3] > ratios[4]
    assert 0.45 < ratios[4] < 0.62
    # width over viscosity climbs toward the layer's own 10/90 width
    singular = hetero.assemble_singular_orbit(hamer_problem)
    frac = widths[0.0005] / 0.0005 / singular.layer.width_80
    assert 0.7 < frac < 1.0


def test_asymmetric_problem_solves(asym_problem, asym_singular):
    sol = hetero.solve_heteroclinic(asym_problem, 0.05, singular=asym_singular)
    assert sol.residual_norm < 1e-9
    assert sol.boundary_defect < 1e-6
    assert np.all(np.diff(sol.values[:, 0]) < 0.0)
    assert np.max(sol.values[:, 1]) < 1e-8


def test_projection_rows_isolate_the_offending_modes(hamer_problem):
    eps = 0.1
    rows = hetero.projection_rows(hamer_problem, eps, 11, 0.0)
    for (node, l_vec, _), u0, want in (
        (rows[0], 1.0, "stable"),
        (rows[1], -1.0, "unstable"),
    ):
        J = fast_jacobian(hamer_problem, u0, eps)
        lam, V = np.linalg.eig(J)
        lam, V = np.real(lam), np.real(V)
        for k in range(3):
            proj = abs(l_vec @ V[:, k])
            offending = lam[k] < 0.0 if want == "stable" else lam[k] > 0.0
            if offending:
                assert proj > 0.1
            else:
                assert proj < 1e-10


def test_sweep_schedule_validation(hamer_problem):
    with pytest.raises(ValidationError):
        hetero.sweep_epsilon(hamer_problem, [0.1, 0.2])
    with pytest.raises(ValidationError):
        hetero.sweep_epsilon(hamer_problem, [0.1, -0.05])


def test_short_domain_raises_boundary_defect(hamer_problem, hamer_singular):
    with pytest.raises(BoundaryDefectTooLarge):
        hetero.solve_heteroclinic(hamer_problem, 0.1, L=8.0, singular=hamer_singular)


def test_negative_epsilon_rejected(hamer_problem, hamer_singular):
    with pytest.raises(ValidationError):
        hetero.solve_heteroclinic(hamer_problem, -0.1, singular=hamer_singular)
