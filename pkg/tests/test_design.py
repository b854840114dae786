"""Treatment-coded design matrices and prediction rows."""

import numpy as np
import pytest

from cumlink.data import Dataset, Factor, FrequencyTable, OrdinalScale, expand_frequency_table
from cumlink.design import design_matrix, design_row

SCALE = OrdinalScale(("1", "2", "3"))


def _two_factor_data():
    cond = Factor("cond", ("a", "b", "c"))
    base = expand_frequency_table(
        FrequencyTable(cond, np.array([[1, 1, 1], [1, 1, 1], [1, 1, 1]])), SCALE
    )
    other = Factor("sex", ("m", "f"))
    codes = np.arange(base.n_obs) % 2
    return Dataset(
        scale=base.scale,
        response=base.response,
        factors=(base.factors[0], other),
        factor_codes=(base.factor_codes[0], codes),
        covariate_names=("age",),
        covariates=np.linspace(20, 60, base.n_obs).reshape(-1, 1),
    )


def test_factor_coding_drops_reference_and_names_columns():
    data = _two_factor_data()
    X, names = design_matrix(data, ("cond",))
    assert names == ("condb", "condc")
    assert X.shape == (9, 2)
    # each non-reference level indicates itself; reference rows are all zero
    codes = data.factor_codes[0]
    np.testing.assert_array_equal(X[:, 0], (codes == 1).astype(float))
    np.testing.assert_array_equal(X[:, 1], (codes == 2).astype(float))
    assert not np.any(X[codes == 0])


def test_no_intercept_column():
    data = _two_factor_data()
    X, _ = design_matrix(data, ("cond", "sex", "age"))
    # an intercept would be a constant column
    assert not any(np.allclose(X[:, j], X[0, j]) for j in range(X.shape[1]))


def test_reference_change_swaps_indicator():
    data = _two_factor_data()
    X, names = design_matrix(data.with_reference("cond", "b"), ("cond",))
    assert names == ("conda", "condc")
    codes = data.factor_codes[0]
    np.testing.assert_array_equal(X[:, 0], (codes == 0).astype(float))


def test_numeric_covariate_passes_through():
    data = _two_factor_data()
    X, names = design_matrix(data, ("age",))
    assert names == ("age",)
    np.testing.assert_allclose(X[:, 0], data.covariates[:, 0])


def test_unknown_term_is_rejected():
    data = _two_factor_data()
    with pytest.raises(ValueError, match="height"):
        design_matrix(data, ("height",))


def test_rank_deficiency_is_named():
    cond = Factor("cond", ("a", "b"))
    base = expand_frequency_table(
        FrequencyTable(cond, np.array([[1, 1], [1, 1]])), OrdinalScale(("1", "2"))
    )
    # a numeric copy of the factor indicator is perfectly collinear
    data = Dataset(
        scale=base.scale,
        response=base.response,
        factors=base.factors,
        factor_codes=base.factor_codes,
        covariate_names=("condcopy",),
        covariates=base.factor_codes[0].astype(float).reshape(-1, 1),
    )
    with pytest.raises(ValueError):
        design_matrix(data, ("cond", "condcopy"))


def test_constant_column_is_rejected():
    data = _two_factor_data()
    flat = Dataset(
        scale=data.scale,
        response=data.response,
        factors=data.factors,
        factor_codes=data.factor_codes,
        covariate_names=("one",),
        covariates=np.ones((data.n_obs, 1)),
    )
    with pytest.raises(ValueError, match="one"):
        design_matrix(flat, ("one",))


def test_design_row_defaults_and_validation():
    data = _two_factor_data()
    row = design_row(data, ("cond", "age"), {"cond": "c", "age": 35})
    np.testing.assert_allclose(row, [0.0, 1.0, 35.0])
    # omitted factor sits at reference, omitted covariate at zero
    np.testing.assert_allclose(design_row(data, ("cond", "age"), {}), [0, 0, 0])
    with pytest.raises(ValueError, match="typo"):
        design_row(data, ("cond",), {"typo": "a"})
    with pytest.raises(ValueError):
        design_row(data, ("cond",), {"cond": "zzz"})
