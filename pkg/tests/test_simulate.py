"""Forward models, cut point recovery, and seeded sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cumlink.data import Factor, OrdinalScale
from cumlink.links import cloglog, logit, probit
from cumlink.simulate import (
    ForwardModel,
    cutpoints_from_proportions,
    forward_probabilities,
    sample_ordinal,
    simulate_dataset,
    simulate_hierarchical,
)

SCALE3 = OrdinalScale(("1", "2", "3"))


def test_forward_probabilities_form_a_distribution():
    model = ForwardModel(cutpoints=(-1.0, 0.2, 1.3), shift=0.4, scale=1.7)
    probs = forward_probabilities(model)
    assert probs.shape == (4,)
    assert np.all(probs > 0)
    assert probs.sum() == pytest.approx(1.0, abs=1e-15)


def test_shift_moves_mass_upward():
    cuts = (-0.6, 0.6)
    lo = forward_probabilities(ForwardModel(cutpoints=cuts, shift=0.0))
    hi = forward_probabilities(ForwardModel(cutpoints=cuts, shift=1.0))
    # cumulative distribution drops everywhere when the location rises
    assert np.all(np.cumsum(hi)[:-1] < np.cumsum(lo)[:-1])


def test_forward_model_rejects_bad_inputs():
    with pytest.raises(ValueError, match="increasing"):
        ForwardModel(cutpoints=(0.5, 0.5))
    with pytest.raises(ValueError, match="finite"):
        ForwardModel(cutpoints=(0.0, np.inf))
    with pytest.raises(ValueError, match="positive"):
        ForwardModel(cutpoints=(0.0, 1.0), scale=0.0)
    with pytest.raises(ValueError, match="1-D"):
        ForwardModel(cutpoints=np.zeros((2, 2)))


def test_cutpoints_reproduce_the_reference_proportions():
    cuts = cutpoints_from_proportions([0.10, 0.15, 0.75])
    np.testing.assert_allclose(cuts, [-1.2815515655, -0.6744897502], atol=1e-9)
    probs = forward_probabilities(ForwardModel(cutpoints=cuts))
    np.testing.assert_allclose(probs, [0.10, 0.15, 0.75], atol=1e-12)


def test_cutpoints_require_positive_proportions_summing_to_one():
    with pytest.raises(ValueError, match="strictly positive"):
        cutpoints_from_proportions([0.5, 0.0, 0.5])
    with pytest.raises(ValueError, match="sum"):
        cutpoints_from_proportions([0.4, 0.4])
    with pytest.raises(ValueError, match="at least 2"):
        cutpoints_from_proportions([1.0])


@settings(deadline=None, max_examples=60)
@given(
    raw=st.lists(st.floats(0.02, 1.0), min_size=2, max_size=7),
    link_ix=st.integers(0, 2),
)
def test_cutpoint_round_trip_for_every_link(raw, link_ix):
    link = (probit, logit, cloglog)[link_ix]
    props = np.asarray(raw) / np.sum(raw)
    props = props / props.sum()  # renormalize the float dust
    cuts = cutpoints_from_proportions(props, link=link)
    assert np.all(np.diff(cuts) > 0)
    back = forward_probabilities(ForwardModel(cutpoints=cuts, link=link))
    np.testing.assert_allclose(back, props, atol=1e-9)


def test_sampling_is_seed_deterministic():
    model = ForwardModel(cutpoints=(-0.6, 0.6))
    a = sample_ordinal(model, 50, seed=7)
    b = sample_ordinal(model, 50, seed=7)
    c = sample_ordinal(model, 50, seed=8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 0 and a.max() <= 2


def test_sampled_frequencies_approach_the_forward_probabilities():
    model = ForwardModel(cutpoints=(-0.6, 0.6), shift=0.3)
    probs = forward_probabilities(model)
    draws = sample_ordinal(model, 20000, seed=1)
    freq = np.bincount(draws, minlength=3) / 20000
    np.testing.assert_allclose(freq, probs, atol=0.02)


def test_flat_dataset_shape_and_determinism():
    factor = Factor("arm", ("a", "b"))
    models = {
        "a": ForwardModel(cutpoints=(-0.6, 0.6)),
        "b": ForwardModel(cutpoints=(-0.6, 0.6), shift=0.8),
    }
    data = simulate_dataset(SCALE3, factor, models, n_per_level=40, seed=3)
    again = simulate_dataset(SCALE3, factor, models, n_per_level=40, seed=3)
    assert data.n_obs == 80
    np.testing.assert_array_equal(data.response, again.response)
    codes = data.factor_codes[0]
    assert list(np.bincount(codes)) == [40, 40]
    # b's shift should show up as a higher mean response
    assert data.response[codes == 1].mean() > data.response[codes == 0].mean()


def test_flat_dataset_validates_models():
    factor = Factor("arm", ("a", "b"))
    with pytest.raises(ValueError, match="no forward model"):
        simulate_dataset(
            SCALE3, factor, {"a": ForwardModel(cutpoints=(-0.6, 0.6))}, 10, seed=0
        )
    with pytest.raises(ValueError, match="categories"):
        simulate_dataset(
            SCALE3,
            factor,
            {
                "a": ForwardModel(cutpoints=(-0.6, 0.6)),
                "b": ForwardModel(cutpoints=(-0.6, 0.0, 0.6)),
            },
            10,
            seed=0,
        )


def test_hierarchical_layout_and_streams():
    factor = Factor("cond", ("ctrl", "treat"))
    data = simulate_hierarchical(
        SCALE3,
        factor,
        cutpoints=(-0.6, 0.6),
        effects={"ctrl": 0.0, "treat": 0.7},
        sigma_b=1.0,
        n_groups=5,
        reps_per_cell=3,
        seed=4,
    )
    assert data.n_obs == 5 * 2 * 3
    assert data.group_name == "group"
    assert len(data.group_labels) == 5
    # every group appears under every level: a within-subject layout
    for g in range(5):
        levels_seen = set(data.factor_codes[0][data.group_codes == g])
        assert levels_seen == {0, 1}
    # growing the design re-users the same group draws for shared groups
    wider = simulate_hierarchical(
        SCALE3,
        factor,
        cutpoints=(-0.6, 0.6),
        effects={"ctrl": 0.0, "treat": 0.7},
        sigma_b=1.0,
        n_groups=5,
        reps_per_cell=4,
        seed=4,
    )
    assert wider.n_obs == 40


def test_hierarchical_validates_inputs():
    factor = Factor("cond", ("ctrl", "treat"))
    with pytest.raises(ValueError, match="nonnegative"):
        simulate_hierarchical(
            SCALE3, factor, (-0.6, 0.6), {"ctrl": 0.0, "treat": 1.0}, -0.5, 4
        )
    with pytest.raises(ValueError, match="no effect"):
        simulate_hierarchical(SCALE3, factor, (-0.6, 0.6), {"ctrl": 0.0}, 1.0, 4)


def test_zero_group_variance_still_samples():
    factor = Factor("cond", ("ctrl", "treat"))
    data = simulate_hierarchical(
        SCALE3,
        factor,
        cutpoints=(-0.6, 0.6),
        effects={"ctrl": 0.0, "treat": 0.0},
        sigma_b=0.0,
        n_groups=6,
        reps_per_cell=2,
        seed=9,
    )
    assert data.n_obs == 24
    assert set(data.response) <= {0, 1, 2}
