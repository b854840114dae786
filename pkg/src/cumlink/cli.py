"""Command-line front end.

Subcommands: fit, contrast, brant, boot-ci, baseline, simulate,
cutpoints, report, serve.  Exit codes: 0 on success, 1 on usage or data
errors, 2 when a model fails to converge.  Output is deterministic for
fixed inputs; the package version appears only in a footer line.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .archive import FORMAT_VERSION, archive_dict, load_archive, save_archive, to_json
from .baselines import (
    REGISTRY,
    friedman,
    kruskal_wallis,
    oneway_anova,
    registry_entry,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)
from .clm import ClmSpec, FitError, NonConvergenceError, fit_clm
from .clmm import fit_clmm
from .data import Dataset, Factor, OrdinalScale, load_csv
from .formula import FormulaError, parse_formula
from .inference import (
    bootstrap_response_scale_ci,
    brant_test,
    interpret_values,
    pairwise_contrasts,
)
from .links import LINKS
from .simulate import (
    ForwardModel,
    cutpoints_from_proportions,
    forward_probabilities,
    simulate_dataset,
    simulate_hierarchical,
)
from .summary import summarize


class UsageError(ValueError):
    """Bad flags or inputs; maps to exit code 1."""


def _split_list(text: str) -> list[str]:
    items = [t.strip() for t in text.split(",")]
    if any(not t for t in items):
        raise UsageError(f"empty item in list {text!r}")
    return items


def _split_terms(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split("+") if t.strip())


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in _split_list(text)]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_assignment(text: str, flag: str) -> tuple[str, str]:
    if "=" not in text:
        raise UsageError(f"{flag} expects NAME=VALUE, got {text!r}")
    name, _, value = text.partition("=")
    if not name.strip() or not value.strip():
        raise UsageError(f"{flag} expects NAME=VALUE, got {text!r}")
    return name.strip(), value.strip()


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(doc))


def _load_dataset(args, formula) -> Dataset:
    if not os.path.exists(args.csv):
        raise UsageError(f"no such file: {args.csv}")
    numeric = _split_list(args.numeric) if args.numeric else []
    terms: list[str] = list(formula.location)
    for extra in (args.scale, args.nominal):
        if extra:
            terms.extend(_split_terms(extra))
    factor_cols = [t for t in dict.fromkeys(terms) if t not in numeric]
    levels = _split_list(args.levels) if args.levels else None
    data = load_csv(
        args.csv,
        response_col=formula.response,
        levels=levels,
        factor_cols=factor_cols,
        numeric_cols=numeric,
        group_col=formula.group,
        delimiter=args.delim,
    )
    for pair in args.ref or []:
        name, level = _parse_assignment(pair, "--ref")
        data = data.with_reference(name, level)
    return data


def _build_spec(args, formula) -> ClmSpec:
    if args.link not in LINKS:
        raise UsageError(f"unknown link {args.link!r}")
    return ClmSpec(
        location=formula.location,
        scale_terms=_split_terms(args.scale) if args.scale else (),
        nominal=_split_terms(args.nominal) if args.nominal else (),
        link=LINKS[args.link],
        response_name=formula.response,
    )


def _fit_from_args(args, need_covariance: bool = True):
    formula = parse_formula(args.formula)
    data = _load_dataset(args, formula)
    spec = _build_spec(args, formula)
    if formula.group is not None:
        if args.scale or args.nominal:
            raise UsageError(
                "scale and nominal terms are not supported with a random term"
            )
        if args.agq is not None:
            fitted = fit_clmm(spec, data, method="agq", nodes=args.agq)
        else:
            fitted = fit_clmm(spec, data)
    else:
        fitted = fit_clm(spec, data, compute_covariance=need_covariance)
    return fitted, data, spec


def _footer() -> str:
    return f"cumlink {__version__}"


# ---------------------------------------------------------------- fit


def cmd_fit(args) -> int:
    fitted, _, _ = _fit_from_args(args)
    stem = os.path.splitext(os.path.basename(args.csv))[0]
    print(summarize(fitted, data_name=stem))
    if args.json:
        save_archive(fitted, args.json)
        print(f"archive written to {args.json}")
    print(_footer())
    return 0 if fitted.convergence.converged else 2


# ----------------------------------------------------------- contrast


def _default_factor(data: Dataset, requested: str | None) -> str:
    if requested:
        return requested
    if len(data.factors) == 1:
        return data.factors[0].name
    raise UsageError(
        "--factor is required when the model has more than one factor"
    )


def cmd_contrast(args) -> int:
    fitted, data, _ = _fit_from_args(args)
    factor = _default_factor(data, args.factor)
    rows = pairwise_contrasts(fitted, factor, adjustment=args.adjust)
    width = max(len(f"{a} - {b}") for a, b, in (r.pair for r in rows))
    print(f"Pairwise latent-scale contrasts for {factor} "
          f"({args.adjust} adjustment):")
    header = (f"{'contrast':<{width}}  {'estimate':>10}  {'std.err':>9}  "
              f"{'z':>8}  {'p.raw':>9}  {'p.adj':>9}")
    print(header)
    for r in rows:
        name = f"{r.pair[0]} - {r.pair[1]}"
        print(f"{name:<{width}}  {r.estimate:>10.5f}  {r.std_error:>9.5f}  "
              f"{r.z:>8.3f}  {r.p_raw:>9.4g}  {r.p_adjusted:>9.4g}")
    if args.json:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "contrasts",
            "factor": factor,
            "adjustment": args.adjust,
            "contrasts": [
                {
                    "pair": list(r.pair),
                    "estimate": r.estimate,
                    "std_error": r.std_error,
                    "z": r.z,
                    "p_raw": r.p_raw,
                    "p_adjusted": r.p_adjusted,
                }
                for r in rows
            ],
        }
        _write_json(args.json, doc)
        print(f"results written to {args.json}")
    print(_footer())
    return 0


# -------------------------------------------------------------- brant


def cmd_brant(args) -> int:
    fitted, data, _ = _fit_from_args(args)
    result = brant_test(fitted, data)
    width = max(9, max((len(p.name) for p in result.predictors), default=0))
    print("Test of constant slopes across cumulative splits:")
    print(f"{'predictor':<{width}}  {'statistic':>10}  {'df':>4}  {'p':>9}")
    print(f"{'(omnibus)':<{width}}  {result.omnibus_statistic:>10.4f}  "
          f"{result.omnibus_df:>4d}  {result.omnibus_p:>9.4g}")
    for pred in result.predictors:
        print(f"{pred.name:<{width}}  {pred.statistic:>10.4f}  "
              f"{pred.df:>4d}  {pred.p:>9.4g}")
    if args.json:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "brant",
            "omnibus": {
                "statistic": result.omnibus_statistic,
                "df": result.omnibus_df,
                "p": result.omnibus_p,
            },
            "predictors": [
                {"name": p.name, "statistic": p.statistic, "df": p.df, "p": p.p}
                for p in result.predictors
            ],
        }
        _write_json(args.json, doc)
        print(f"results written to {args.json}")
    print(_footer())
    return 0


# ------------------------------------------------------------ boot-ci


def cmd_boot_ci(args) -> int:
    formula = parse_formula(args.formula)
    data = _load_dataset(args, formula)
    spec = _build_spec(args, formula)
    if formula.group is not None:
        raise UsageError("boot-ci supports fixed-effects models only")
    factor = _default_factor(data, args.factor)
    fobj = next(f for f in data.factors if f.name == factor)
    pairs = list(itertools.combinations(fobj.levels, 2))
    coding = _parse_floats(args.coding) if args.coding else None
    cis = bootstrap_response_scale_ci(
        spec, data, pairs, B=args.B, seed=args.seed, level=args.level,
        factor=factor, coding=coding,
    )
    pct = round(args.level * 100, 6)
    pct_text = f"{pct:g}"
    print(f"Bootstrap {pct_text}% CIs for expected response-scale "
          f"differences ({args.B} replicates, seed {args.seed}):")
    width = max(len(f"{a} - {b}") for a, b in pairs)
    for ci in cis:
        name = f"{ci.pair[0]} - {ci.pair[1]}"
        print(f"{name:<{width}}  [{ci.lower:.4f}, {ci.upper:.4f}]")
    failures = max(ci.failures for ci in cis)
    if failures:
        print(f"note: {failures} of {args.B} resamples failed to fit "
              f"and were dropped")
    if args.json:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "bootstrap_ci",
            "factor": factor,
            "level": args.level,
            "replicates": args.B,
            "seed": args.seed,
            "intervals": [
                {
                    "pair": list(ci.pair),
                    "lower": ci.lower,
                    "upper": ci.upper,
                    "failures": ci.failures,
                }
                for ci in cis
            ],
        }
        _write_json(args.json, doc)
        print(f"results written to {args.json}")
    print(_footer())
    return 0


# ----------------------------------------------------------- baseline


def _read_columns(path: str, delim: str) -> dict[str, list[str]]:
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=delim)
        if reader.fieldnames is None:
            raise UsageError(f"{path} has no header row")
        cols: dict[str, list[str]] = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in cols:
                cols[name].append(row[name] if row[name] is not None else "")
    return cols


def _numeric_column(cols: dict[str, list[str]], name: str) -> np.ndarray:
    if name not in cols:
        raise UsageError(f"no column {name!r}; have {sorted(cols)}")
    try:
        return np.array([float(v) for v in cols[name]])
    except ValueError as exc:
        raise UsageError(f"column {name!r} is not numeric: {exc}") from exc


def _grouped_samples(
    cols: dict[str, list[str]], value: str, by: str
) -> dict[str, np.ndarray]:
    values = _numeric_column(cols, value)
    if by not in cols:
        raise UsageError(f"no column {by!r}; have {sorted(cols)}")
    keys = cols[by]
    order = list(dict.fromkeys(keys))
    return {k: values[np.array([g == k for g in keys])] for k in order}


def cmd_baseline(args) -> int:
    entry = registry_entry(args.test, design=args.design)
    if not entry.implemented:
        print(f"{entry.name} is registered but not implemented here; "
              f"designs: {', '.join(entry.designs)}")
        print(_footer())
        return 1
    cols = _read_columns(args.csv, args.delim)

    if args.test == "wilcoxon-signed-rank":
        if not args.paired:
            raise UsageError("wilcoxon-signed-rank needs --paired colA,colB")
        a_name, b_name = (_split_list(args.paired) + [None, None])[:2]
        if b_name is None:
            raise UsageError("--paired expects exactly two column names")
        a = _numeric_column(cols, a_name)
        b = _numeric_column(cols, b_name)
        result = wilcoxon_signed_rank(a, b, exact=args.exact)
    elif args.test == "friedman":
        if not (args.value and args.by and args.block):
            raise UsageError("friedman needs --value, --by and --block")
        values = _numeric_column(cols, args.value)
        blocks = cols[args.block] if args.block in cols else None
        if blocks is None:
            raise UsageError(f"no column {args.block!r}")
        treatments = cols[args.by] if args.by in cols else None
        if treatments is None:
            raise UsageError(f"no column {args.by!r}")
        block_order = list(dict.fromkeys(blocks))
        treat_order = list(dict.fromkeys(treatments))
        table = np.full((len(block_order), len(treat_order)), np.nan)
        for v, b, t in zip(values, blocks, treatments):
            table[block_order.index(b), treat_order.index(t)] = v
        if np.isnan(table).any():
            missing = int(np.isnan(table).sum())
            raise UsageError(
                f"{missing} block x treatment cell(s) missing; friedman "
                f"needs a complete within-subject table"
            )
        result = friedman(table)
    else:
        if not (args.value and args.by):
            raise UsageError(f"{args.test} needs --value and --by")
        groups = _grouped_samples(cols, args.value, args.by)
        samples = list(groups.values())
        if args.test == "one-way-anova":
            result = oneway_anova(samples)
        elif args.test == "kruskal-wallis":
            result = kruskal_wallis(samples)
        elif args.test == "wilcoxon-rank-sum":
            if len(samples) != 2:
                raise UsageError(
                    f"wilcoxon-rank-sum needs exactly 2 groups, "
                    f"got {len(samples)}"
                )
            result = wilcoxon_rank_sum(samples[0], samples[1], exact=args.exact)
        else:
            raise UsageError(f"unhandled test {args.test!r}")

    df_text = "" if result.df is None else f"  df = {result.df}"
    print(f"{result.name}: statistic = {result.statistic:.6g}{df_text}  "
          f"p = {result.p:.6g}")
    print(f"assumes metric data: {'yes' if result.metric_data else 'no'}; "
          f"normality: {'yes' if result.normality else 'no'}; "
          f"equal variances: {'yes' if result.equal_variance else 'no'}; "
          f"design: {result.design}")
    if result.note:
        print(f"note: {result.note}")
    if result.metric_data and args.ordinal:
        print(
            "assumption warning: this test treats the response as metric, "
            "but the input was declared ordinal; category distances are "
            "not defined, so the statistic may not mean what it appears to."
        )
    if args.json:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "baseline",
            "test": args.test,
            "name": result.name,
            "statistic": result.statistic,
            "df": list(result.df) if isinstance(result.df, tuple) else result.df,
            "p": result.p,
            "assumptions": {
                "metric_data": result.metric_data,
                "normality": result.normality,
                "equal_variance": result.equal_variance,
            },
            "design": result.design,
            "note": result.note,
            "declared_ordinal": bool(args.ordinal),
        }
        _write_json(args.json, doc)
        print(f"results written to {args.json}")
    print(_footer())
    return 0


# ----------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    levels = _split_list(args.levels)
    scale = OrdinalScale(tuple(levels))
    fname, _, flevels_text = args.factor.partition("=")
    if not fname.strip() or not flevels_text.strip():
        raise UsageError("--factor expects NAME=lev1,lev2,...")
    factor = Factor(fname.strip(), tuple(_split_list(flevels_text)))
    cutpoints = _parse_floats(args.cutpoints)
    if len(cutpoints) != len(levels) - 1:
        raise UsageError(
            f"{len(levels)} levels need {len(levels) - 1} cutpoints, "
            f"got {len(cutpoints)}"
        )
    link = LINKS[args.link]
    effects = {lev: 0.0 for lev in factor.levels}
    for pair in args.effect or []:
        name, value = _parse_assignment(pair, "--effect")
        if name not in effects:
            raise UsageError(f"--effect names unknown level {name!r}")
        effects[name] = float(value)

    if args.group:
        data = simulate_hierarchical(
            scale,
            factor,
            cutpoints=cutpoints,
            effects=effects,
            sigma_b=args.sigma_b,
            n_groups=args.n_groups,
            reps_per_cell=args.reps,
            seed=args.seed,
            link=link,
            group_name=args.group,
        )
    else:
        disp = {lev: 1.0 for lev in factor.levels}
        for pair in args.disp or []:
            name, value = _parse_assignment(pair, "--disp")
            if name not in disp:
                raise UsageError(f"--disp names unknown level {name!r}")
            disp[name] = float(value)
        models = {
            lev: ForwardModel(
                cutpoints=np.asarray(cutpoints),
                shift=effects[lev],
                scale=disp[lev],
                link=link,
            )
            for lev in factor.levels
        }
        data = simulate_dataset(scale, factor, models, args.n, args.seed)

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        header = [factor.name, args.response]
        if data.group_name:
            header.append(data.group_name)
        writer.writerow(header)
        codes = data.factor_codes[0]
        for i in range(data.n_obs):
            row = [factor.levels[codes[i]], scale.labels[data.response[i]]]
            if data.group_codes is not None:
                row.append(data.group_labels[data.group_codes[i]])
            writer.writerow(row)
    finally:
        if args.out:
            out.close()
            print(f"{data.n_obs} rows written to {args.out}")
    return 0


# ---------------------------------------------------------- cutpoints


def cmd_cutpoints(args) -> int:
    props = _parse_floats(args.props)
    tau = cutpoints_from_proportions(props, LINKS[args.link])
    for name, value in zip(
        (f"{k}|{k + 1}" for k in range(1, len(props))), tau
    ):
        print(f"{name}  {value:.8f}")
    probs = forward_probabilities(
        ForwardModel(cutpoints=tau, link=LINKS[args.link])
    )
    print("implied proportions:", " ".join(f"{p:.6f}" for p in probs))
    if args.json:
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "cutpoints",
            "link": args.link,
            "props": props,
            "tau": [float(t) for t in tau],
        }
        _write_json(args.json, doc)
        print(f"results written to {args.json}")
    print(_footer())
    return 0


# ------------------------------------------------------------- report


_LATENT_NOTE = (
    "The categories are modeled as bands of an underlying continuous "
    "score, so the estimate describes movement of that latent quantity, "
    "not arithmetic on the category codes."
)


def cmd_report(args) -> int:
    if not os.path.exists(args.archive):
        raise UsageError(f"no such file: {args.archive}")
    try:
        doc = load_archive(args.archive)
    except ValueError as exc:
        raise UsageError(f"cannot read archive: {exc}") from exc
    names = doc["estimates"]["names"]
    values = doc["estimates"]["values"]
    if args.term not in names:
        locations = [n for n in names if "|" not in n]
        raise UsageError(
            f"unknown term {args.term!r}; coefficients: {locations}"
        )
    idx = names.index(args.term)
    cov = doc.get("covariance")
    if cov is not None and cov[idx][idx] is not None and cov[idx][idx] > 0:
        se = float(np.sqrt(cov[idx][idx]))
    else:
        se = float("nan")
    text = interpret_values(doc["link"], args.term, values[idx], se)
    print(text)
    if doc["link"] == "probit":
        print(_LATENT_NOTE)
    print(_footer())
    return 0


# -------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    from .serve import run_server

    model_doc = None
    if args.model:
        if not os.path.exists(args.model):
            raise UsageError(f"no such file: {args.model}")
        model_doc = load_archive(args.model)
    run_server(
        host=args.bind,
        port=args.port,
        model_doc=model_doc,
        static_dir=args.static,
    )
    return 0


# -------------------------------------------------------------- wiring


def _add_model_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("csv", help="long-format CSV with a header row")
    p.add_argument("formula", help="e.g. 'rating ~ 1 + condition'")
    p.add_argument("--link", default="probit",
                   choices=sorted(LINKS), help="cumulative link")
    p.add_argument("--levels", default=None,
                   help="ordered response levels, comma-separated")
    p.add_argument("--ref", action="append", metavar="FACTOR=LEVEL",
                   help="reference level override; repeatable")
    p.add_argument("--scale", default=None,
                   help="terms with multiplicative latent-spread effects")
    p.add_argument("--nominal", default=None,
                   help="terms freed from the equal-slopes restriction")
    p.add_argument("--numeric", default=None,
                   help="columns to treat as numeric covariates")
    p.add_argument("--agq", type=int, default=None, metavar="NODES",
                   help="adaptive quadrature with this many nodes "
                        "(mixed models; default Laplace)")
    p.add_argument("--delim", default=",", help="CSV delimiter")
    p.add_argument("--json", default=None, metavar="PATH",
                   help="also write results as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cumlink",
        description="Cumulative link models for ordinal responses",
    )
    parser.add_argument("--version", action="version",
                        version=f"cumlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model and print its summary")
    _add_model_io_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("contrast", help="pairwise latent-scale contrasts")
    _add_model_io_flags(p)
    p.add_argument("--factor", default=None)
    p.add_argument("--adjust", default="holm",
                   choices=("holm", "bonferroni", "none"))
    p.set_defaults(func=cmd_contrast)

    p = sub.add_parser("brant", help="test the equal-slopes restriction")
    _add_model_io_flags(p)
    p.set_defaults(func=cmd_brant)

    p = sub.add_parser("boot-ci",
                       help="bootstrap CIs for expected-score differences")
    _add_model_io_flags(p)
    p.add_argument("--factor", default=None)
    p.add_argument("--B", type=int, default=2000, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--coding", default=None,
                   help="numeric codes for the response levels")
    p.set_defaults(func=cmd_boot_ci)

    p = sub.add_parser("baseline", help="classical tests with assumption "
                                        "metadata")
    p.add_argument("csv")
    p.add_argument("--test", required=True, choices=sorted(REGISTRY))
    p.add_argument("--value", default=None, help="numeric response column")
    p.add_argument("--by", default=None, help="grouping / treatment column")
    p.add_argument("--block", default=None, help="subject column (friedman)")
    p.add_argument("--paired", default=None, metavar="A,B",
                   help="two paired columns (signed-rank)")
    p.add_argument("--design", default=None,
                   choices=("between", "within", "mixed"),
                   help="required for tests registered under several designs")
    p.add_argument("--exact", action="store_true", default=None,
                   help="force the exact null distribution")
    p.add_argument("--ordinal", action="store_true",
                   help="declare the response ordinal (enables the "
                        "assumption warning for metric tests)")
    p.add_argument("--delim", default=",")
    p.add_argument("--json", default=None, metavar="PATH")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("simulate", help="sample an ordinal dataset as CSV")
    p.add_argument("--levels", required=True,
                   help="ordered response levels, e.g. 1,2,3,4,5")
    p.add_argument("--factor", required=True, metavar="NAME=lev1,lev2",
                   help="between/within factor and its levels")
    p.add_argument("--cutpoints", required=True,
                   help="baseline latent cutpoints, comma-separated; "
                        "write --cutpoints=-1.2,0.3 when the first "
                        "value is negative")
    p.add_argument("--effect", action="append", metavar="LEVEL=SHIFT",
                   help="latent shift for a level; repeatable")
    p.add_argument("--disp", action="append", metavar="LEVEL=SCALE",
                   help="latent spread multiplier for a level; repeatable")
    p.add_argument("--n", type=int, default=20,
                   help="observations per level (flat design)")
    p.add_argument("--group", default=None, metavar="NAME",
                   help="grouping column name; switches to a "
                        "random-intercept design")
    p.add_argument("--n-groups", type=int, default=10)
    p.add_argument("--reps", type=int, default=1,
                   help="replicates per group x level cell")
    p.add_argument("--sigma-b", type=float, default=0.5,
                   help="random-intercept standard deviation")
    p.add_argument("--response", default="response",
                   help="response column name in the output")
    p.add_argument("--link", default="probit", choices=sorted(LINKS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cutpoints",
                       help="latent cutpoints matching given proportions")
    p.add_argument("--props", required=True,
                   help="category proportions, comma-separated, sum 1")
    p.add_argument("--link", default="probit", choices=sorted(LINKS))
    p.add_argument("--json", default=None, metavar="PATH")
    p.set_defaults(func=cmd_cutpoints)

    p = sub.add_parser("report", help="plain-language reading of a "
                                      "stored coefficient")
    p.add_argument("archive", help="model archive JSON from fit --json")
    p.add_argument("--term", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="local HTTP endpoints for the explorer")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--bind", default="127.0.0.1",
                   help="listen address (localhost only by default)")
    p.add_argument("--model", default=None,
                   help="archive to expose at GET /model")
    p.add_argument("--static", default=None,
                   help="directory of explorer assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; remap to the documented 1.
        code = exc.code if isinstance(exc.code, int) else 0
        return 1 if code else 0
    try:
        return args.func(args)
    except (UsageError, FormulaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
