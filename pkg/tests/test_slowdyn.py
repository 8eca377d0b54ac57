from __future__ import annotations

import numpy as np
import pytest

from subshock_lab.errors import NoIntersection
from subshock_lab.model import Branch, ModelSpec, WaveProblem
from subshock_lab import slowdyn

# frozen from tests/oracles/gen_slowdyn_golden.py (fixed-step RK4, h = 1e-5)
GOLDEN_V_STAR_HAMER = -0.4949558375501395
GOLDEN_V_STAR_ASYM = -0.6866492867285506
GOLDEN_W_STAR_ASYM = 0.2999999999973656
GOLDEN_V_STAR_CUBIC = -0.5946798571186336


def test_seed_lies_on_eigenvector(hamer_problem):
    for branch in (Branch.MINUS, Branch.PLUS):
        u0 = hamer_problem.u_minus if branch is Branch.MINUS else hamer_problem.u_plus
        rest = np.array([0.0, float(hamer_problem.g(u0))])
        seed = slowdyn.seed_saddle_manifold(hamer_problem, branch)
        offset = seed - rest
        assert np.linalg.norm(offset) == pytest.approx(1e-6, rel=1e-9)

        a = float(hamer_problem.dg(u0)) / hamer_problem.df_c(u0)
        M = np.array([[-a, 1.0], [1.0, 0.0]])
        evals, evecs = np.linalg.eig(M)
        pick = np.argmax(evals) if branch is Branch.MINUS else np.argmin(evals)
        e = evecs[:, pick]
        cosang = abs(np.dot(offset, e)) / np.linalg.norm(offset)
        assert cosang == pytest.approx(1.0, abs=1e-12)


def test_seed_signs(hamer_problem):
    sm = slowdyn.seed_saddle_manifold(hamer_problem, Branch.MINUS)
    sp = slowdyn.seed_saddle_manifold(hamer_problem, Branch.PLUS)
    assert sm[0] < 0.0 and sm[1] < float(hamer_problem.g(hamer_problem.u_minus))
    assert sp[0] < 0.0 and sp[1] > float(hamer_problem.g(hamer_problem.u_plus))


def _curves(problem):
    cm = slowdyn.integrate_phase_curve(problem, Branch.MINUS)
    cp = slowdyn.integrate_phase_curve(problem, Branch.PLUS)
    return cm, cp


def test_curve_monotonicity_and_endpoints(hamer_problem):
    cm, cp = _curves(hamer_problem)
    assert np.all(np.diff(cm.w) < 0.0)
    assert np.all(np.diff(cp.w) < 0.0)
    assert np.all(np.diff(cm.v) < 0.0)
    assert np.all(np.diff(cp.v) > 0.0)
    assert cm.orientation == "forward" and cp.orientation == "backward"

    rest_m = np.array([0.0, float(hamer_problem.g(hamer_problem.u_minus))])
    rest_p = np.array([0.0, float(hamer_problem.g(hamer_problem.u_plus))])
    assert np.linalg.norm(cm.samples[0, 1:3] - rest_m) < 1.1e-6
    assert np.linalg.norm(cp.samples[-1, 1:3] - rest_p) < 1.1e-6

    # both curves run down to the branch-domain floor
    floor = hamer_problem.v_floor
    margin = slowdyn.FLOOR_MARGIN * max(1.0, abs(hamer_problem.fc_plateau))
    assert cm.v.min() == pytest.approx(floor + margin, abs=1e-12)
    assert cp.v.min() == pytest.approx(floor + margin, abs=1e-12)


def test_curve_interpolation_density(hamer_problem):
    cm, _ = _curves(hamer_problem)
    mid_v = 0.5 * (cm.v[:-1] + cm.v[1:])
    mid_w = 0.5 * (cm.w[:-1] + cm.w[1:])
    # chord midpoints must stay 1e-8-close to the curve, checked through w(v)
    interp_w = np.interp(mid_v[::20], cm.v[::-1], cm.w[::-1])
    assert np.max(np.abs(interp_w - mid_w[::20])) < 5e-8


def test_matching_golden_hamer(hamer_matching):
    m = hamer_matching
    assert m.v_star == pytest.approx(GOLDEN_V_STAR_HAMER, abs=1e-7)
    assert abs(m.w_star) < 1e-8
    assert m.u_left == pytest.approx(-m.u_right, abs=1e-9)
    assert m.u_left == pytest.approx(np.sqrt(1.0 + 2.0 * m.v_star), abs=1e-8)
    assert -0.5 < m.v_star < 0.0


def test_matching_golden_asym(asym_matching):
    m = asym_matching
    assert m.v_star == pytest.approx(GOLDEN_V_STAR_ASYM, abs=1e-7)
    assert m.w_star == pytest.approx(GOLDEN_W_STAR_ASYM, abs=1e-7)


def test_matching_golden_cubic(cubic_matching):
    m = cubic_matching
    assert m.v_star == pytest.approx(GOLDEN_V_STAR_CUBIC, abs=1e-7)
    assert abs(m.w_star) < 1e-8


def test_matching_orderings(asym_problem, asym_matching):
    m = asym_matching
    p = asym_problem
    assert m.v_star < 0.0
    assert m.u_right < p.u_star < m.u_left
    assert float(p.g(m.u_right)) - 1e-8 <= m.w_star <= float(p.g(m.u_left)) + 1e-8


def test_hamer_symmetry_between_curves(hamer_problem):
    cm, cp = _curves(hamer_problem)
    # (v, w) -> (v, -w) maps one saddle curve onto the other
    w_probe = np.linspace(-0.02, 0.9, 200)
    v_minus = np.interp(w_probe, cm.w[::-1], cm.v[::-1])
    v_plus_reflected = np.interp(w_probe, -cp.w, cp.v)
    assert np.max(np.abs(v_minus - v_plus_reflected)) < 1e-7


def test_matching_stable_under_tolerance_halving(hamer_problem, hamer_matching):
    cm = slowdyn.integrate_phase_curve(hamer_problem, Branch.MINUS, rtol=5e-11, atol=5e-13)
    cp = slowdyn.integrate_phase_curve(hamer_problem, Branch.PLUS, rtol=5e-11, atol=5e-13)
    m2 = slowdyn.find_matching_point(hamer_problem, cm, cp)
    assert abs(m2.v_star - hamer_matching.v_star) < 1e-7
    assert abs(m2.w_star - hamer_matching.w_star) < 1e-7


def test_small_shock_has_no_intersection():
    prob = WaveProblem.build(ModelSpec.hamer(), 0.6, -0.6)
    cm, cp = _curves(prob)
    with pytest.raises(NoIntersection):
        slowdyn.find_matching_point(prob, cm, cp)


def test_fold_classification_flips_exactly_at_sqrt2():
    # desingularized fold Jacobian [[-dg, 1], [d2f * v_floor, 0]]: for the
    # radiating-gas model the discriminant 1 - du^2/2 crosses zero at sqrt(2)
    for du, kind in ((1.2, "node"), (1.4142, "node"), (1.4143, "focus"), (2.0, "focus")):
        prob = WaveProblem.build(ModelSpec.hamer(), du / 2.0, -du / 2.0)
        fold = slowdyn.classify_fold(prob)
        assert fold.kind == kind
        assert fold.discriminant == pytest.approx(1.0 - du * du / 2.0, abs=1e-12)
    pair = slowdyn.classify_fold(WaveProblem.build(ModelSpec.hamer(), 1.0, -1.0)).eigenvalues
    assert pair[0] == pytest.approx(complex(-0.5, -0.5), abs=1e-14)
    assert pair[1] == pytest.approx(complex(-0.5, 0.5), abs=1e-14)


def test_corner_matching_just_above_threshold():
    # at du = 1.43 the crossing clearance is below float resolution; the
    # folded-focus verdict returns the corner as the rounded matching point
    prob = WaveProblem.build(ModelSpec.hamer(), 0.715, -0.715)
    cm, cp = _curves(prob)
    m = slowdyn.find_matching_point(prob, cm, cp)
    assert m.u_left == prob.u_star == m.u_right
    assert m.v_star == prob.v_floor
    assert m.w_star == 0.0


def test_matching_verdict_flips_at_subshock_threshold():
    found = []
    for du in (1.30, 1.35, 1.40, 1.45, 1.50):
        prob = WaveProblem.build(ModelSpec.hamer(), du / 2.0, -du / 2.0)
        cm, cp = _curves(prob)
        try:
            slowdyn.find_matching_point(prob, cm, cp)
            found.append(True)
        except NoIntersection:
            found.append(False)
    assert found == [False, False, False, True, True]
