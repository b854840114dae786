"""Serialized fitted models: a versioned, canonical JSON document.

The document is what the serve mode hands to the explorer and what the
report command reads back, so its byte form is pinned: keys sorted,
two-space indent, one trailing newline.  Serializing a parsed archive
reproduces the original bytes exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .clm import FittedClm
from .clmm import FittedClmm

FORMAT_VERSION = 1


def _finite(x: float) -> float | None:
    x = float(x)
    return x if np.isfinite(x) else None


def _matrix(m: np.ndarray) -> list[list[float | None]] | None:
    if not np.all(np.isfinite(m)):
        if not np.any(np.isfinite(m)):
            return None
        return [[_finite(v) for v in row] for row in m]
    return [[float(v) for v in row] for row in m]


def archive_dict(fitted: FittedClm | FittedClmm) -> dict[str, Any]:
    """The archive document for a fitted model, as plain data."""
    data = fitted.data
    spec = fitted.spec
    conv = fitted.convergence
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "kind": "clmm" if isinstance(fitted, FittedClmm) else "clm",
        "link": fitted.link.name,
        "response": spec.response_name,
        "location": list(spec.location),
        "scale_terms": list(spec.scale_terms),
        "nominal": list(spec.nominal),
        "scale_labels": list(data.scale.labels),
        "estimates": {
            "names": list(fitted.param_names),
            "values": [float(v) for v in fitted.estimates],
        },
        "covariance": _matrix(fitted.covariance),
        "log_lik": _finite(fitted.log_lik),
        "aic": _finite(fitted.aic),
        "n_obs": data.n_obs,
        "convergence": {
            "iterations": conv.iterations,
            "step_halvings": conv.step_halvings,
            "max_grad": _finite(conv.max_grad),
            "cond_hessian": _finite(conv.cond_hessian),
            "converged": bool(conv.converged),
            "stalled": bool(conv.stalled),
        },
        "factors": [
            {
                "name": f.name,
                "levels": list(f.levels),
                "reference": f.reference,
            }
            for f in data.factors
        ],
        "covariate_names": list(data.covariate_names),
    }
    if isinstance(fitted, FittedClmm):
        vc = fitted.variance_component
        doc["group"] = {"name": vc.group, "n_groups": fitted.n_groups}
        doc["variance_component"] = {
            "group": vc.group,
            "variance": float(vc.variance),
            "std_dev": float(vc.std_dev),
            "std_err": _finite(vc.std_err),
        }
        doc["conditional_modes"] = {
            "labels": list(data.group_labels),
            "values": [float(b) for b in fitted.conditional_modes],
        }
        doc["method"] = fitted.method
        doc["nodes"] = int(fitted.nodes)
        doc["boundary"] = bool(fitted.boundary)
    else:
        doc["group"] = None
    return doc


def to_json(doc: dict[str, Any]) -> str:
    """Canonical rendering; the only byte form archives are written in."""
    return json.dumps(
        doc, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False
    ) + "\n"


def parse_archive(text: str) -> dict[str, Any]:
    """Parse and validate an archive document.

    Raises:
        ValueError: not JSON, wrong format_version, or missing required
            fields.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("archive must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"unsupported format_version {version!r}; expected {FORMAT_VERSION}"
        )
    required = (
        "kind", "link", "response", "location", "scale_labels",
        "estimates", "log_lik", "n_obs",
    )
    missing = [k for k in required if k not in doc]
    if missing:
        raise ValueError(f"archive is missing fields: {missing}")
    est = doc["estimates"]
    if (
        not isinstance(est, dict)
        or "names" not in est
        or "values" not in est
        or len(est["names"]) != len(est["values"])
    ):
        raise ValueError("estimates must hold parallel names and values")
    return doc


def save_archive(fitted: FittedClm | FittedClmm, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(archive_dict(fitted)))


def load_archive(path: str) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        return parse_archive(fh.read())
