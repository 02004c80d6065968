import math

import numpy as np
import pytest

from cfmac import (
    ConditionedJoint,
    SolverConfig,
    check_cstar,
    conditional_mutual_information,
    continuity_envelope,
    dueck_mac,
    dueck_outer_bound,
    mutual_information,
    output_distribution,
    sigma1,
    sigma_n,
    sqrt_law_curve,
    sum_capacity_bounds,
    validate_mac,
    wringing_extract,
    wringing_upper_bound,
)
from cfmac.errors import (
    CapExceededError,
    DeltaOutOfRangeError,
    DimensionCapExceededError,
    InfeasibleInputError,
    InvalidBoundsError,
    InversionFailedError,
    NotInCstarError,
    NotProductError,
    ValidationError,
)
from cfmac.solver import project_simplex

MAC = dueck_mac()

# Hand-derived anchors for the collapse channel: with independent inputs the
# best joint is uniform-on-{A,B} against a balanced second sender (2.5 bits);
# with unconstrained dependence all six distinguishable outputs can be hit
# uniformly (log2 6 bits).
COLLAPSE_AT_ZERO = 2.5
COLLAPSE_UNCONSTRAINED = math.log2(6.0)


def _fast_cfg(restarts=16, seed=0):
    return SolverConfig(restarts=restarts, max_iters=4000, seed=seed)


# --- simplex projection -----------------------------------------------------------


def test_project_simplex():
    np.testing.assert_allclose(project_simplex(np.array([0.3, 0.7])), [0.3, 0.7])
    got = project_simplex(np.array([1.0, 1.0]))
    np.testing.assert_allclose(got, [0.5, 0.5])
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=6) * 3
        p = project_simplex(v)
        assert p.min() >= 0
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # Projection property: no feasible point is closer to v.
        q = rng.dirichlet(np.ones(6))
        assert np.sum((v - p) ** 2) <= np.sum((v - q) ** 2) + 1e-12


# --- curve anchors ----------------------------------------------------------------


def test_collapse_curve_anchors():
    at_zero = sigma1(MAC, 0.0, _fast_cfg())
    assert at_zero.value == pytest.approx(COLLAPSE_AT_ZERO, abs=2e-3)
    assert at_zero.feasibility_slack >= -1e-9
    free = sigma1(MAC, 1.2, _fast_cfg())
    assert free.value == pytest.approx(COLLAPSE_UNCONSTRAINED, abs=2e-3)


def test_sigma1_witness_is_feasible_and_certified():
    point = sigma1(MAC, 0.05, _fast_cfg())
    dep = conditional_mutual_information(point.argmax)
    assert dep <= 0.05 + 1e-9
    assert point.feasibility_slack == pytest.approx(0.05 - dep, abs=1e-12)
    assert point.restarts == 16
    # The reported value is recomputed from the witness, not trusted from
    # the ascent: rebuild it here.
    value = 0.0
    for u in range(point.argmax.u_size):
        w = float(point.argmax.weights[u])
        if w > 0:
            cells = point.argmax.conditionals[u].ravel()
            joint = cells[:, None] * MAC.transition.reshape(-1, MAC.y_size)
            value += w * mutual_information(joint)
    assert point.value == pytest.approx(value, abs=1e-12)


def test_sigma_n_reduces_and_caps():
    cfg = _fast_cfg(restarts=8)
    assert sigma_n(MAC, 1, 0.1, cfg) == sigma1(MAC, 0.1, cfg).value
    with pytest.raises(ValidationError):
        sigma_n(MAC, 0, 0.1, cfg)
    with pytest.raises(DimensionCapExceededError):
        sigma_n(MAC, 2, 0.1, cfg, cap=32)  # (4*2)**2 = 64 cells
    with pytest.raises(DimensionCapExceededError):
        sigma_n(MAC, 9, 0.1, cfg, cap=10**9)  # output tensor would blow up


# --- sandwich ---------------------------------------------------------------------


def test_sum_capacity_bounds():
    lo, hi = sum_capacity_bounds(2.5, 2.6, 0.3, 0.5)
    assert lo == pytest.approx(2.2)
    assert hi == 2.6
    lo, _ = sum_capacity_bounds(0.2, 2.6, 0.5, 0.3)
    assert lo == 0.0  # clamped
    with pytest.raises(InvalidBoundsError):
        sum_capacity_bounds(2.6, 2.5, 0.3, 0.3)
    with pytest.raises(InvalidBoundsError):
        sum_capacity_bounds(2.5, 2.6, -0.1, 0.3)


def test_outer_bound_closed_form():
    p_star, value = dueck_outer_bound()
    assert p_star == pytest.approx(1 / 3, abs=1e-6)
    # H(1/3) + 2/3 - 1/3 + H(1/3) = 2 H(1/3) + 1/3.
    from cfmac import binary_entropy

    assert value == pytest.approx(2 * binary_entropy(1 / 3) + 1 / 3, abs=1e-9)
    with pytest.raises(ValidationError):
        dueck_outer_bound(grid_step=0.01)


# --- coordinate extraction ----------------------------------------------------------


def test_wringing_fixture_extracts_the_dependent_coordinate(wringing_words):
    cj, n, s1, s2 = wringing_words
    res = wringing_extract(cj, n, s1, s2, epsilon=0.1, delta=0.2)
    assert res.T == (1,)
    assert res.bound == 6
    assert set(res.residuals) == {0, 2}
    assert all(v <= 0.1 + 1e-9 for v in res.residuals.values())


def test_wringing_independent_input_needs_no_extraction():
    ind = np.full((4, 4), 1 / 16)
    cj = ConditionedJoint(np.array([1.0]), ind[None])
    res = wringing_extract(cj, 2, 2, 2, epsilon=0.05, delta=0.0)
    assert res.T == ()
    assert all(v <= 1e-12 for v in res.residuals.values())


def test_wringing_infeasible_and_cap(wringing_words):
    cj, n, s1, s2 = wringing_words
    # The word-level dependence is ~0.531 bits; delta=0.1 budgets only 0.3.
    with pytest.raises(InfeasibleInputError):
        wringing_extract(cj, n, s1, s2, epsilon=0.1, delta=0.1)
    with pytest.raises(CapExceededError):
        wringing_extract(cj, n, s1, s2, epsilon=0.1, delta=0.2, cap=8)
    with pytest.raises(ValidationError):
        wringing_extract(cj, n, s1, s2, epsilon=0.0, delta=0.2)
    with pytest.raises(ValidationError):
        wringing_extract(cj, n + 1, s1, s2, epsilon=0.1, delta=0.2)


def test_wringing_upper_bound_formula():
    cfg = _fast_cfg(restarts=8)
    eps = 0.25
    got = wringing_upper_bound(MAC, 0.05, eps, cfg)
    want = (0.05 / eps) * math.log2(8) + sigma1(MAC, eps, cfg).value
    assert got == pytest.approx(want, abs=1e-9)
    with pytest.raises(ValidationError):
        wringing_upper_bound(MAC, 0.05, 0.0, cfg)


# --- continuity envelope -------------------------------------------------------------


def test_continuity_envelope_values_and_range():
    val = continuity_envelope(MAC, 1e-2, COLLAPSE_AT_ZERO)
    s = math.sqrt(2e-2 * math.log(2.0))
    want = s * math.log2(12**3 / s) + s * math.log2(12) + COLLAPSE_AT_ZERO
    assert val == pytest.approx(want, abs=1e-12)
    with pytest.raises(DeltaOutOfRangeError):
        continuity_envelope(MAC, 0.0, COLLAPSE_AT_ZERO)
    # 2x2x2 channel: |Y|/e ~ 0.736, so already delta = 0.5 is out of scope.
    tiny = validate_mac(np.full((2, 2, 2), 0.5))
    with pytest.raises(DeltaOutOfRangeError):
        continuity_envelope(tiny, 0.5, 0.0)


# --- strict-gain membership and the square-root law ----------------------------------


def test_check_cstar_accepts_the_fixture(cstar_triple):
    mac, p_ind, p_dep = cstar_triple
    report = check_cstar(mac, p_ind, p_dep)
    assert report.member
    assert report.support_ok
    assert report.margin > 0.05
    assert report.margin == pytest.approx(
        report.i_dep + report.kl_outputs - report.i_ind, abs=1e-12
    )
    assert report.ind_optimal is None
    d = report.to_dict()
    assert set(d) == {
        "i_ind", "i_dep", "kl_outputs", "support_ok", "margin", "member", "ind_optimal",
    }


def test_check_cstar_rejects_non_product(cstar_triple):
    mac, _, p_dep = cstar_triple
    with pytest.raises(NotProductError):
        check_cstar(mac, p_dep, p_dep)


def test_check_cstar_non_member_when_inputs_match(cstar_triple):
    mac, p_ind, _ = cstar_triple
    report = check_cstar(mac, p_ind, p_ind)
    assert report.margin == pytest.approx(0.0, abs=1e-12)
    assert not report.member


def test_output_distribution(cstar_triple):
    mac, p_ind, _ = cstar_triple
    out = output_distribution(mac, p_ind)
    assert out.shape == (mac.y_size,)
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        output_distribution(mac, np.full((5, 5), 0.04))


def test_sqrt_law_curve_tracks_the_budget(cstar_triple):
    mac, p_ind, p_dep = cstar_triple
    deltas = (1e-6, 1e-5, 1e-4)
    rep = sqrt_law_curve(mac, p_ind, p_dep, eps_tilde=0.05, deltas=deltas)
    assert rep.k1 > 0
    assert np.all(np.diff(rep.lambda_star) > 0)
    assert np.all(rep.dep_at_lambda <= np.asarray(deltas) + 1e-15)
    assert np.all(rep.gain >= 0)
    # The budget at lambda* must essentially exhaust delta (bisection gap).
    for lam, d in zip(rep.lambda_star, rep.deltas):
        q = (1 - lam) * np.asarray(p_ind.probs) + lam * np.asarray(p_dep.probs)
        used = mutual_information(q) + 0.05 * lam * lam
        assert used <= d <= used + 1e-6


def test_sqrt_law_rejections(cstar_triple):
    mac, p_ind, p_dep = cstar_triple
    with pytest.raises(NotInCstarError):
        sqrt_law_curve(mac, p_ind, p_ind)
    with pytest.raises(ValidationError):
        sqrt_law_curve(mac, p_ind, p_dep, eps_tilde=0.0)
    with pytest.raises(ValidationError):
        sqrt_law_curve(mac, p_ind, p_dep, deltas=())
    with pytest.raises(InversionFailedError):
        # No mixture reaches a unit budget on this family.
        sqrt_law_curve(mac, p_ind, p_dep, eps_tilde=0.05, deltas=(1.0,))
