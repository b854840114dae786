"""Model archives: canonical bytes, round trips, validation failures."""

import numpy as np
import pytest

from cumlink.archive import (
    FORMAT_VERSION,
    archive_dict,
    load_archive,
    parse_archive,
    save_archive,
    to_json,
)
from cumlink.clm import ClmSpec, fit_clm
from cumlink.clmm import fit_clmm
from cumlink.data import Factor, FrequencyTable, OrdinalScale, expand_frequency_table
from cumlink.links import logit, probit
from cumlink.simulate import simulate_hierarchical

SCALE5 = OrdinalScale(("1", "2", "3", "4", "5"))
CONDITION = Factor("Condition", ("Active", "Dissimilar", "Self", "Minimal"))
COUNTS = np.array(
    [
        [0, 1, 3, 6, 16],
        [0, 3, 3, 6, 13],
        [0, 0, 3, 7, 15],
        [1, 0, 4, 12, 9],
    ],
    dtype=float,
)


@pytest.fixture(scope="module")
def clm_fit():
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    return fit_clm(
        ClmSpec(location=("Condition",), link=probit, response_name="Rating"),
        data,
    )


@pytest.fixture(scope="module")
def clmm_fit():
    scale = OrdinalScale(("1", "2", "3", "4", "5"))
    cond = Factor("cond", ("ctrl", "treat"))
    data = simulate_hierarchical(
        scale,
        cond,
        cutpoints=(-1.0, -0.3, 0.3, 1.0),
        effects={"ctrl": 0.0, "treat": 0.6},
        sigma_b=0.8,
        n_groups=10,
        reps_per_cell=2,
        seed=7,
    )
    return fit_clmm(ClmSpec(location=("cond",), link=logit), data)


def test_flat_model_round_trips_byte_identically(clm_fit):
    text = to_json(archive_dict(clm_fit))
    assert to_json(parse_archive(text)) == text
    assert text.endswith("\n")
    assert not text.endswith("\n\n")


def test_mixed_model_round_trips_byte_identically(clmm_fit):
    text = to_json(archive_dict(clmm_fit))
    assert to_json(parse_archive(text)) == text


def test_flat_document_contents(clm_fit):
    doc = archive_dict(clm_fit)
    assert doc["format_version"] == FORMAT_VERSION
    assert doc["kind"] == "clm"
    assert doc["link"] == "probit"
    assert doc["response"] == "Rating"
    assert doc["group"] is None
    assert doc["n_obs"] == 102
    names = doc["estimates"]["names"]
    values = doc["estimates"]["values"]
    assert len(names) == len(values) == 7
    est = dict(zip(names, values))
    assert est["ConditionDissimilar"] == pytest.approx(-0.32161, abs=1e-3)
    cov = np.asarray(doc["covariance"])
    assert cov.shape == (7, 7)
    assert np.allclose(cov, cov.T)
    assert doc["scale_labels"] == ["1", "2", "3", "4", "5"]
    assert doc["factors"][0]["levels"][0] == "Active"
    assert doc["convergence"]["converged"] is True


def test_mixed_document_contents(clmm_fit):
    doc = archive_dict(clmm_fit)
    assert doc["kind"] == "clmm"
    assert doc["group"] == {"name": "group", "n_groups": 10}
    vc = doc["variance_component"]
    assert vc["variance"] == pytest.approx(vc["std_dev"] ** 2, rel=1e-9)
    modes = doc["conditional_modes"]
    assert len(modes["labels"]) == len(modes["values"]) == 10
    assert doc["method"] in ("laplace", "agq")
    assert isinstance(doc["boundary"], bool)


def test_non_finite_cells_become_null(clm_fit):
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    bare = fit_clm(
        ClmSpec(location=("Condition",)), data, compute_covariance=False
    )
    doc = archive_dict(bare)
    # an all-nan covariance collapses to a single null
    assert doc["covariance"] is None
    text = to_json(doc)
    assert "NaN" not in text
    assert to_json(parse_archive(text)) == text


def test_rejects_malformed_documents():
    with pytest.raises(ValueError, match="not valid JSON"):
        parse_archive("{nope")
    with pytest.raises(ValueError, match="JSON object"):
        parse_archive("[1, 2]")
    with pytest.raises(ValueError, match="format_version"):
        parse_archive('{"format_version": 2}')
    with pytest.raises(ValueError, match="format_version"):
        parse_archive('{"kind": "clm"}')


def test_rejects_missing_fields(clm_fit):
    doc = archive_dict(clm_fit)
    doc.pop("log_lik")
    doc.pop("link")
    with pytest.raises(ValueError, match="missing fields.*link.*log_lik"):
        parse_archive(to_json(doc))


def test_rejects_ragged_estimates(clm_fit):
    doc = archive_dict(clm_fit)
    doc["estimates"]["values"] = doc["estimates"]["values"][:-1]
    with pytest.raises(ValueError, match="parallel"):
        parse_archive(to_json(doc))
    doc["estimates"] = [1.0, 2.0]
    with pytest.raises(ValueError, match="parallel"):
        parse_archive(to_json(doc))


def test_save_and_load(tmp_path, clm_fit):
    path = tmp_path / "model.json"
    save_archive(clm_fit, str(path))
    doc = load_archive(str(path))
    assert doc["kind"] == "clm"
    assert path.read_text(encoding="utf-8") == to_json(archive_dict(clm_fit))
