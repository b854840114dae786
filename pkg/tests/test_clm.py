"""Fixed-effects cumulative model fitting."""

import numpy as np
import pytest

from cumlink.clm import (
    ClmSpec,
    SeparationError,
    category_probabilities,
    fit_clm,
    modal_category,
    negative_log_likelihood,
    nll_gradient,
    predict_probs,
)
from cumlink.data import (
    Dataset,
    Factor,
    FrequencyTable,
    OrdinalScale,
    expand_frequency_table,
)
from cumlink.links import cloglog, logit, probit

SCALE5 = OrdinalScale(("1", "2", "3", "4", "5"))

# four-condition rating study, 102 rows, used across the suite
COUNTS = np.array(
    [
        [0, 1, 3, 6, 16],   # Active
        [0, 3, 3, 6, 13],   # Dissimilar
        [0, 0, 3, 7, 15],   # Self
        [1, 0, 4, 12, 9],   # Minimal
    ],
    dtype=float,
)
CONDITION = Factor("Condition", ("Active", "Dissimilar", "Self", "Minimal"))


def rating_data():
    return expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)


def rating_fit(link=probit):
    spec = ClmSpec(location=("Condition",), link=link, response_name="Usefulness")
    return fit_clm(spec, rating_data())


def test_probit_fit_reaches_stationary_point():
    fit = rating_fit()
    assert fit.convergence.converged
    assert fit.convergence.max_grad < 1e-6
    grad = nll_gradient(fit.spec, fit.data, fit.estimates)
    assert np.max(np.abs(grad)) < 1e-6


def test_parameter_names_and_layout():
    fit = rating_fit()
    assert fit.param_names == (
        "1|2", "2|3", "3|4", "4|5",
        "ConditionDissimilar", "ConditionSelf", "ConditionMinimal",
    )
    assert np.all(np.diff(fit.thresholds) > 0)


def test_known_coefficients_recovered():
    fit = rating_fit()
    np.testing.assert_allclose(
        [fit.coef(n) for n in fit.x_names],
        [-0.32161, 0.04704, -0.49092],
        atol=1e-4,
    )
    np.testing.assert_allclose(fit.log_lik, -113.99, atol=0.01)
    np.testing.assert_allclose(fit.aic, 241.97, atol=0.02)


def test_saturated_intercept_only_fit_matches_proportions():
    counts = np.array([[4, 9, 2, 7, 3]], dtype=float)
    data = expand_frequency_table(
        FrequencyTable(Factor("g", ("only",)), counts), SCALE5
    )
    props = counts[0] / counts.sum()
    for link in (probit, logit, cloglog):
        fit = fit_clm(ClmSpec(link=link), data)
        np.testing.assert_allclose(
            fit.thresholds, link.quantile(np.cumsum(props)[:-1]), atol=1e-6
        )
        np.testing.assert_allclose(
            category_probabilities(fit), props, atol=1e-6
        )


def test_label_invariance():
    # the same data under non-contiguous labels gives the same fit
    relabeled = OrdinalScale(("1", "7", "91", "95", "99"))
    data_a = rating_data()
    data_b = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), relabeled)
    spec = ClmSpec(location=("Condition",), link=probit)
    fit_a = fit_clm(spec, data_a)
    fit_b = fit_clm(spec, data_b)
    np.testing.assert_allclose(fit_a.log_lik, fit_b.log_lik, atol=1e-9)
    np.testing.assert_allclose(fit_a.estimates, fit_b.estimates, atol=1e-8)
    assert fit_b.param_names[0] == "1|7"


def test_relevel_invariance():
    data = rating_data()
    spec = ClmSpec(location=("Condition",), link=probit)
    base = fit_clm(spec, data)
    moved = fit_clm(spec, data.with_reference("Condition", "Self"))
    np.testing.assert_allclose(base.log_lik, moved.log_lik, atol=1e-9)
    # latent difference Minimal - Dissimilar survives the recoding
    d_base = base.coef("ConditionMinimal") - base.coef("ConditionDissimilar")
    d_moved = moved.coef("ConditionMinimal") - moved.coef("ConditionDissimilar")
    np.testing.assert_allclose(d_base, d_moved, atol=1e-7)


def test_modal_category_uses_latent_interval_not_argmax():
    fit = rating_fit()
    assert modal_category(fit, {"Condition": "Active"}) == "5"
    assert modal_category(fit, {"Condition": "Minimal"}) == "4"
    # the interval rule and the probability argmax genuinely disagree here
    probs = predict_probs(fit, {"Condition": "Minimal"})
    assert max(probs, key=probs.get) == "5"


def test_category_probabilities_sum_to_one():
    fit = rating_fit()
    for level in CONDITION.levels:
        p = category_probabilities(fit, {"Condition": level})
        assert np.all(p >= 0)
        np.testing.assert_allclose(p.sum(), 1.0, atol=1e-12)


@pytest.mark.parametrize("link", [logit, probit], ids=lambda l: l.name)
def test_separation_is_reported(link):
    # groups are fully ordered on the response: the slope has no finite MLE
    factor = Factor("g", ("lo", "hi"))
    counts = np.array([[6, 2, 0], [0, 2, 6]], dtype=float)
    data = expand_frequency_table(
        FrequencyTable(factor, counts), OrdinalScale(("1", "2", "3"))
    )
    with pytest.raises(SeparationError, match="separated"):
        fit_clm(ClmSpec(location=("g",), link=link), data)


def test_boundary_categories_trimmed_inside_fit():
    factor = Factor("g", ("a", "b"))
    counts = np.array([[0, 3, 4, 2, 0], [0, 2, 5, 3, 0]], dtype=float)
    data = expand_frequency_table(FrequencyTable(factor, counts), SCALE5)
    fit = fit_clm(ClmSpec(location=("g",), link=probit), data)
    assert fit.data.scale.labels == ("2", "3", "4")
    assert len(fit.thresholds) == 2
    assert len(fit.notes) == 2


def test_scale_effects_add_named_parameters_and_fit_better():
    data = rating_data()
    plain = fit_clm(ClmSpec(location=("Condition",), link=probit), data)
    flex = fit_clm(
        ClmSpec(location=("Condition",), scale_terms=("Condition",), link=probit),
        data,
    )
    assert "scale.ConditionSelf" in flex.param_names
    assert flex.log_lik >= plain.log_lik - 1e-9


def test_nominal_effects_relax_equal_slopes():
    # all-positive cell counts; a zero cell would push the per-level
    # effective thresholds together and the saturated MLE onto the
    # ordering boundary
    factor = Factor("cond", ("a", "b", "c"))
    counts = np.array(
        [[3, 5, 7, 4], [6, 2, 4, 8], [2, 9, 3, 5]], dtype=float
    )
    data = expand_frequency_table(
        FrequencyTable(factor, counts), OrdinalScale(("1", "2", "3", "4"))
    )
    plain = fit_clm(ClmSpec(location=("cond",), link=probit), data)
    nominal = fit_clm(ClmSpec(nominal=("cond",), link=probit), data)
    assert "1|2.condb" in nominal.param_names
    assert "3|4.condc" in nominal.param_names
    assert nominal.log_lik >= plain.log_lik - 1e-9
    # fully relaxed one-factor model is saturated: per-level fitted
    # probabilities equal the observed proportions
    for i, level in enumerate(factor.levels):
        props = counts[i] / counts[i].sum()
        np.testing.assert_allclose(
            category_probabilities(nominal, {"cond": level}), props, atol=1e-6
        )


def test_interior_zero_cell_under_nominal_stops_at_the_ordering_wall():
    # level b never uses category 2, so its effective 1|2 and 2|3 want to
    # touch; the supremum sits on the ordering boundary, so the fit stops
    # short of it, flags itself, and still returns a usable distribution
    # with the empty cell pinched to nothing
    factor = Factor("g", ("a", "b", "c"))
    counts = np.array([[4, 3, 3, 2], [3, 0, 4, 5], [2, 4, 3, 3]], dtype=float)
    data = expand_frequency_table(
        FrequencyTable(factor, counts), OrdinalScale(("1", "2", "3", "4"))
    )
    fit = fit_clm(ClmSpec(nominal=("g",), link=probit), data)
    assert not fit.convergence.converged
    probs = category_probabilities(fit, {"g": "b"})
    assert probs[1] < 0.02
    assert np.all(probs >= 0.0)
    assert abs(probs.sum() - 1.0) < 1e-8


def test_empty_bottom_cell_under_nominal_has_no_finite_optimum():
    # three conditions never use category 1, so their effective first
    # thresholds escape to -inf; that is a per-level separation
    data = rating_data()
    with pytest.raises(SeparationError, match="Condition"):
        fit_clm(ClmSpec(nominal=("Condition",), link=probit), data)


def test_probabilities_refuse_an_extrapolated_threshold_inversion():
    # per-threshold slopes on a numeric regressor stay ordered over the
    # data but cross somewhere outside its range; reading probabilities
    # there must name the crossed pair instead of returning negatives
    scale = OrdinalScale(("1", "2", "3"))
    y = np.array([0] * 5 + [1] * 5 + [2] * 5 + [0] * 8 + [1] * 5 + [2] * 2)
    x = np.concatenate([np.zeros(15), np.ones(15)])
    data = Dataset(
        scale=scale,
        response=y,
        factors=(),
        factor_codes=(),
        covariate_names=("x",),
        covariates=x.reshape(-1, 1),
    )
    fit = fit_clm(ClmSpec(nominal=("x",), link=probit), data)
    assert fit.convergence.converged
    with pytest.raises(ValueError, match=r"1\|2 >= 2\|3"):
        category_probabilities(fit, {"x": -10.0})


def test_location_and_nominal_overlap_rejected():
    with pytest.raises(ValueError, match="both"):
        ClmSpec(location=("Condition",), nominal=("Condition",))


def test_warm_start_and_disabled_covariance():
    data = rating_data()
    spec = ClmSpec(location=("Condition",), link=probit)
    first = fit_clm(spec, data)
    again = fit_clm(spec, data, start=first.estimates, compute_covariance=False)
    assert again.convergence.iterations <= 1
    assert np.all(np.isnan(again.covariance))
    with pytest.raises(ValueError, match="length"):
        fit_clm(spec, data, start=first.estimates[:-1])


def test_nll_matches_multinomial_entropy_for_saturated_fit():
    counts = np.array([[6, 2, 5]], dtype=float)
    data = expand_frequency_table(
        FrequencyTable(Factor("g", ("only",)), counts), OrdinalScale(("1", "2", "3"))
    )
    fit = fit_clm(ClmSpec(link=logit), data)
    props = counts[0] / counts.sum()
    entropy_nll = -float(np.sum(counts[0] * np.log(props)))
    np.testing.assert_allclose(-fit.log_lik, entropy_nll, atol=1e-8)
    np.testing.assert_allclose(
        negative_log_likelihood(fit.spec, fit.data, fit.estimates),
        entropy_nll,
        atol=1e-8,
    )


def test_condition_number_reported():
    fit = rating_fit()
    assert np.isfinite(fit.convergence.cond_hessian)
    assert fit.convergence.cond_hessian > 1
    assert fit.convergence.iteration_label().endswith(")")
