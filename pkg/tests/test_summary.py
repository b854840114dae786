"""Rendered summary blocks: reference layout, stars, NA cells, mixed extras."""

import numpy as np
import pytest

from cumlink.clm import ClmSpec, fit_clm
from cumlink.clmm import fit_clmm
from cumlink.data import (
    Dataset,
    Factor,
    FrequencyTable,
    OrdinalScale,
    expand_frequency_table,
)
from cumlink.links import logit, probit
from cumlink.simulate import ForwardModel, simulate_dataset, simulate_hierarchical
from cumlink.summary import _p_strings, _stars, summarize

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

# the reference rendering for the usefulness ratings, up to optimizer
# bookkeeping (niter, max.grad) that any header regenerates
REFERENCE_TAIL = """\
Coefficients:
                    Estimate Std. Error z value Pr(>|z|)
ConditionDissimilar -0.32161    0.32288  -0.996    0.319
ConditionSelf        0.04704    0.33048   0.142    0.887
ConditionMinimal    -0.49092    0.31466  -1.560    0.119

Threshold coefficients:
    Estimate Std. Error z value
1|2  -2.5897     0.4409  -5.874
2|3  -1.8801     0.2965  -6.340
3|4  -1.1437     0.2519  -4.540
4|5  -0.2450     0.2358  -1.039
"""


@pytest.fixture(scope="module")
def usefulness_text():
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    spec = ClmSpec(
        location=("Condition",), link=probit, response_name="Usefulness"
    )
    fit = fit_clm(spec, data)
    return summarize(fit, data_name="usefulness_dataframe")


def test_reference_block_reproduced(usefulness_text):
    lines = usefulness_text.split("\n")
    assert lines[0] == "formula: Usefulness ~ 1 + Condition"
    assert lines[1] == "data:    usefulness_dataframe"
    assert lines[2] == ""
    assert lines[3].startswith("link   threshold nobs logLik  AIC    niter")
    assert lines[4].startswith("probit flexible  102  -113.99 241.97 ")
    # everything below the header is pinned byte for byte
    tail = "\n".join(lines[6:])
    assert tail == REFERENCE_TAIL


def test_header_cells_align_and_carry_diagnostics(usefulness_text):
    lines = usefulness_text.split("\n")
    head, row = lines[3], lines[4]
    assert head.split() == [
        "link",
        "threshold",
        "nobs",
        "logLik",
        "AIC",
        "niter",
        "max.grad",
        "cond.H",
    ]
    cells = row.split()
    assert cells[:5] == ["probit", "flexible", "102", "-113.99", "241.97"]
    assert "(" in cells[5] and cells[5].endswith(")")
    assert "e" in cells[6] and "e+" in cells[7]


def test_rendering_is_deterministic():
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    spec = ClmSpec(location=("Condition",), link=probit)
    a = summarize(fit_clm(spec, data))
    b = summarize(fit_clm(spec, data))
    assert a == b


def test_no_stars_means_no_legend(usefulness_text):
    # every p here exceeds 0.1, so no marks and no legend block
    assert "Signif. codes" not in usefulness_text
    assert "---" not in usefulness_text


def strong_effect_fit():
    scale = OrdinalScale(("1", "2", "3", "4", "5"))
    arm = Factor("arm", ("base", "boost"))
    tau = (-1.2, -0.3, 0.4, 1.1)
    data = simulate_dataset(
        scale,
        arm,
        {
            "base": ForwardModel(tau, 0.0, 1.0, logit),
            "boost": ForwardModel(tau, 1.6, 1.0, logit),
        },
        n_per_level=250,
        seed=11,
    )
    return fit_clm(ClmSpec(location=("arm",), link=logit), data)


def test_stars_and_legend_appear_for_significant_rows():
    text = summarize(strong_effect_fit())
    lines = text.split("\n")
    starred = [ln for ln in lines if ln.startswith("armboost")]
    assert len(starred) == 1
    assert starred[0].rstrip().endswith("***")
    assert "<2e-16" in starred[0]
    i = lines.index(
        "Signif. codes:  0 ‘***’ 0.001 ‘**’ 0.01 "
        "‘*’ 0.05 ‘.’ 0.1 ‘ ’ 1"
    )
    assert lines[i - 1] == "---"
    # thresholds never get significance marks
    thr = lines[lines.index("Threshold coefficients:") + 1]
    assert "Pr(>|z|)" not in thr


def test_p_column_formats():
    out = _p_strings(np.array([0.5, 0.003, 2e-7, 1e-20, np.nan]))
    assert out == ["0.50000", "0.00300", "2.00e-07", "<2e-16", "NA"]
    assert _stars(0.0005) == "***"
    assert _stars(0.009) == "**"
    assert _stars(0.04) == "*"
    assert _stars(0.07) == "."
    assert _stars(0.1) == ""
    assert _stars(0.74) == ""


def test_scale_and_nominal_sections_render():
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    scaled = fit_clm(
        ClmSpec(location=("Condition",), scale_terms=("Condition",)), data
    )
    text = summarize(scaled)
    assert "Scale coefficients (log scale):" in text
    scale_block = text.split("Scale coefficients (log scale):")[1]
    assert scale_block.split("\n\n")[0].count("Condition") == 3

    g = Factor("g", ("a", "b", "c"))
    counts = np.array(
        [[4, 3, 3, 2], [3, 2, 4, 5], [2, 4, 3, 3]], dtype=float
    )
    four = OrdinalScale(("1", "2", "3", "4"))
    nomdata = expand_frequency_table(FrequencyTable(g, counts), four)
    nominal = fit_clm(ClmSpec(nominal=("g",)), nomdata)
    ntext = summarize(nominal)
    assert "Nominal coefficients:" in ntext
    # every threshold-by-level parameter gets its own row
    for name in ("1|2.gb", "2|3.gc", "3|4.gb"):
        assert name in ntext
    assert "No coefficients" in ntext


def test_intercept_only_block(usefulness_text):
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    fit = fit_clm(ClmSpec(), data)
    text = summarize(fit)
    assert "No coefficients" in text
    assert "Coefficients:" not in text.replace("Threshold coefficients:", "")
    assert "Threshold coefficients:" in text


def test_mixed_block_reports_random_effects():
    scale7 = OrdinalScale(tuple(str(i) for i in range(1, 8)))
    cond = Factor("cond", ("ctrl", "treat"))
    data = simulate_hierarchical(
        scale7,
        cond,
        cutpoints=(-1.5, -0.8, -0.25, 0.25, 0.8, 1.5),
        effects={"ctrl": 0.0, "treat": 0.7},
        sigma_b=1.0,
        n_groups=12,
        reps_per_cell=3,
        seed=3,
    )
    fit = fit_clmm(
        ClmSpec(location=("cond",), link=probit, response_name="score"), data
    )
    text = summarize(fit, data_name="sim")
    lines = text.split("\n")
    assert lines[0] == "formula: score ~ 1 + cond + (1 | group)"
    # mixed headers are indented one space, as are the random-effect rows
    assert lines[3].startswith(" link   threshold")
    assert lines[4].startswith(" probit flexible  72 ")
    i = lines.index("Random effects:")
    assert lines[i + 1].split() == ["Groups", "Name", "Variance", "Std.Dev."]
    name, intercept, var_s, sd_s = lines[i + 2].split()
    assert (name, intercept) == ("group", "(Intercept)")
    assert float(var_s) == pytest.approx(float(sd_s) ** 2, rel=1e-3)
    assert lines[i + 3] == "Number of groups:  group 12 "
    assert "condtreat" in text
    assert "Threshold coefficients:" in text


def test_missing_covariance_prints_na_cells():
    data = expand_frequency_table(FrequencyTable(CONDITION, COUNTS), SCALE5)
    fit = fit_clm(
        ClmSpec(location=("Condition",)), data, compute_covariance=False
    )
    text = summarize(fit)
    rows = [ln for ln in text.split("\n") if ln.startswith("Condition")]
    assert len(rows) == 3
    for row in rows:
        assert row.count("NA") == 3
    assert "Signif. codes" not in text


def test_summarize_rejects_foreign_objects():
    with pytest.raises(TypeError, match="cannot summarize"):
        summarize(object())
