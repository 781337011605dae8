import math

import numpy as np
import pytest

from twooptlab import (
    CovarianceSpec,
    NotPositiveDefiniteError,
    equicorrelated_spec,
    identity_spec,
    orthant_moment_bound,
    orthant_prob_mc,
    reduced_orthant_bound,
    second_moment_formula,
    truncated_moments_mc,
)
from twooptlab.orthants import (
    amemiya_residuals,
    equicorrelated_closed_forms,
    equicorrelated_g_sum,
)


def bivariate_orthant(rho: float) -> float:
    return 0.25 + math.asin(rho) / (2 * math.pi)


def test_spec_validation():
    with pytest.raises(ValueError):
        CovarianceSpec.from_precision([[1.0, 0.5], [0.2, 1.0]])
    with pytest.raises(NotPositiveDefiniteError):
        CovarianceSpec.from_precision([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        equicorrelated_spec(1)


def test_equicorrelated_closed_forms_d2_hand_values():
    forms = equicorrelated_closed_forms(2)
    assert forms["det_precision"] == pytest.approx(15 / 16, rel=1e-15)
    assert forms["sigma_diag"] == pytest.approx(16 / 15, rel=1e-15)
    assert forms["sigma_off"] == pytest.approx(-4 / 15, rel=1e-15)
    spec = equicorrelated_spec(2)
    assert spec.covariance[0, 0] == pytest.approx(16 / 15, rel=1e-12)
    assert spec.covariance[0, 1] == pytest.approx(-4 / 15, rel=1e-12)


@pytest.mark.parametrize("d", [2, 5, 10, 25, 50])
def test_equicorrelated_closed_forms_match_dense_linear_algebra(d):
    spec = equicorrelated_spec(d)
    forms = spec.closed_form
    assert abs(spec.det_precision - forms["det_precision"]) <= 1e-10 * forms["det_precision"]
    assert abs(spec.covariance[0, 0] - forms["sigma_diag"]) <= 1e-10 * abs(forms["sigma_diag"])
    assert abs(spec.covariance[0, 1] - forms["sigma_off"]) <= 1e-10 * abs(forms["sigma_off"])
    off = spec.covariance[~np.eye(d, dtype=bool)]
    assert np.allclose(off, forms["sigma_off"], rtol=1e-10)


def test_orthant_mc_identity_d3():
    est = orthant_prob_mc(identity_spec(3), 200_000, seed=3)
    assert abs(est.estimate - 0.125) <= 3 * est.stderr


def test_orthant_mc_equicorrelated_d2_closed_form():
    est = orthant_prob_mc(equicorrelated_spec(2), 200_000, seed=4)
    assert abs(est.estimate - bivariate_orthant(-0.25)) <= 3 * est.stderr


def test_orthant_mc_never_exceeds_half():
    for d, seed in ((2, 5), (4, 6), (7, 7)):
        est = orthant_prob_mc(equicorrelated_spec(d), 100_000, seed=seed)
        assert est.estimate <= 0.5 + 3 * est.stderr


def test_orthant_mc_deterministic_given_seed_and_workers():
    spec = equicorrelated_spec(3)
    a = orthant_prob_mc(spec, 60_000, seed=8, workers=3)
    b = orthant_prob_mc(spec, 60_000, seed=8, workers=3)
    assert a.estimate == b.estimate


def test_truncated_moments_identity_spec():
    moments = truncated_moments_mc(identity_spec(3), 30_000, seed=9)
    assert moments.sampler == "rejection"
    diag = moments.diagonal()
    off = 2 / math.pi
    for i in range(3):
        assert abs(diag[i] - 1.0) <= 3 * moments.stderr[i, i]
        for j in range(3):
            if i != j:
                assert abs(moments.matrix[i, j] - off) <= 3 * moments.stderr[i, j]


@pytest.mark.parametrize("d", [2, 3, 4])
def test_amemiya_identity_equicorrelated(d):
    spec = equicorrelated_spec(d)
    moments = truncated_moments_mc(spec, 30_000, seed=10 + d)
    residuals = amemiya_residuals(spec, moments)
    # Conservative error: weighted sum of entry stderrs per row.
    tol = 3 * (np.abs(spec.precision) * moments.stderr).sum(axis=1)
    assert np.all(np.abs(residuals) <= tol)


def test_gibbs_and_rejection_cross_validate_at_d5():
    spec = equicorrelated_spec(5)
    rej = truncated_moments_mc(spec, 15_000, seed=20, sampler="rejection")
    gib = truncated_moments_mc(spec, 15_000, seed=21, sampler="gibbs")
    assert rej.sampler == "rejection" and gib.sampler == "gibbs"
    diff = np.abs(rej.matrix - gib.matrix)
    tol = 3 * np.hypot(rej.stderr, gib.stderr)
    assert np.all(diff <= tol)


def test_gibbs_selected_beyond_rejection_cap():
    moments = truncated_moments_mc(equicorrelated_spec(9), 400, seed=22)
    assert moments.sampler == "gibbs"
    assert np.all(moments.draws > 0.0)


def test_second_moment_formula_identity_kills_corrections():
    result = second_moment_formula(identity_spec(4), "lower-bound-2-over-pi")
    assert np.allclose(result.values, 1.0, atol=1e-14)


def test_second_moment_formula_limit_value():
    # 2/pi mode approaches 1 - 4/(9 pi) for large dimension.
    value = second_moment_formula(equicorrelated_spec(200), "lower-bound-2-over-pi").values[0]
    assert abs(value - (1 - 4 / (9 * math.pi))) < 2 / 200


def test_second_moment_formula_modes_order():
    # The 2/pi substitution is a lower bound on the pair density entering a
    # negative total coefficient, so it can only raise the evaluation.
    spec = equicorrelated_spec(4)
    moments = truncated_moments_mc(spec, 40_000, seed=23)
    mc_mode = second_moment_formula(spec, "mc-estimate", draws=moments.draws)
    lb_mode = second_moment_formula(spec, "lower-bound-2-over-pi")
    assert np.all(lb_mode.values >= mc_mode.values - 1e-9)
    assert all(v >= 2 / math.pi for v in mc_mode.f_at_origin.values())


def test_second_moment_formula_matches_sampled_moments_d3():
    spec = equicorrelated_spec(3)
    moments = truncated_moments_mc(spec, 60_000, seed=24)
    evaluated = second_moment_formula(spec, "mc-estimate", draws=moments.draws).values
    diag = moments.diagonal()
    # KDE bias at this sample size stays within a few percent; allow a loose
    # band on top of the MC error.
    tol = 3 * np.diag(moments.stderr) + 0.02
    assert np.all(np.abs(evaluated - diag) <= tol)


def test_second_moment_formula_requires_draws_for_mc_mode():
    with pytest.raises(ValueError):
        second_moment_formula(equicorrelated_spec(3), "mc-estimate")
    with pytest.raises(ValueError):
        second_moment_formula(equicorrelated_spec(3), "bogus-mode")


def test_moment_bound_identity_plugin():
    d = 5
    log_bound = orthant_moment_bound(identity_spec(d), np.ones(d))
    assert log_bound == pytest.approx(-(d - 1) * math.log(2.0), rel=1e-12)
    # Bound 2^(1-d) vs truth 2^(-d): valid with factor-2 slack.
    assert math.exp(log_bound) >= 2.0**-d


@pytest.mark.parametrize("d", [2, 6])
def test_moment_bound_dominates_mc_truth(d):
    spec = equicorrelated_spec(d)
    moments = truncated_moments_mc(spec, 30_000, seed=30 + d)
    log_bound = orthant_moment_bound(spec, moments.diagonal())
    mc = orthant_prob_mc(spec, 200_000, seed=40 + d)
    assert math.exp(log_bound) >= mc.estimate - 3 * mc.stderr


def test_reduced_bound_dominates_d2_truth():
    assert reduced_orthant_bound(2) >= math.log(bivariate_orthant(-0.25))


def test_reduced_bound_beats_trivial_at_d7():
    assert reduced_orthant_bound(7) < -(7 - 1) * math.log(2.0)


def test_reduced_bound_asymptotic_slope():
    xs = np.array([8.0, 16.0, 32.0, 64.0])
    ys = np.array([reduced_orthant_bound(int(d)) for d in xs])
    slope = np.polyfit(xs, ys, 1)[0]
    target = -(math.log(2.0) + 2.0 / (9.0 * math.pi))
    assert abs(slope - target) <= 0.1 * abs(target)


def test_g_sum_is_negative_and_converges():
    for d in (2, 3, 8, 64, 512):
        assert equicorrelated_g_sum(d) < 0.0
    assert equicorrelated_g_sum(10_000) == pytest.approx(-2 / 9, abs=1e-3)
