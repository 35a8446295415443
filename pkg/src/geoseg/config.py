"""Flat configuration document mapping onto DualCutConfig plus solver
options; loadable from JSON or key=value text."""

from __future__ import annotations

import json
from dataclasses import asdict

from .dualcut import METRIC_CHOICES, DualCutConfig
from .errors import ParameterError

_FLOAT_KEYS = {"alpha", "alpha_tilde", "lam", "beta", "alpha_orient", "mu",
               "T", "tau", "tau_eps", "sigma"}
_INT_KEYS = {"n_theta", "stencil_radius"}


def config_from_dict(doc: dict) -> DualCutConfig:
    kwargs = {}
    for key, val in doc.items():
        if key == "metric":
            if val not in METRIC_CHOICES:
                raise ParameterError(f"metric must be one of {METRIC_CHOICES}")
            kwargs[key] = val
        elif key in _FLOAT_KEYS:
            try:
                kwargs[key] = float(val)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"bad value for {key}: {val!r}") from exc
        elif key in _INT_KEYS:
            try:
                kwargs[key] = int(val)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"bad value for {key}: {val!r}") from exc
        else:
            raise ParameterError(f"unknown config key {key!r}")
    return DualCutConfig(**kwargs)


def config_to_dict(config: DualCutConfig) -> dict:
    return asdict(config)


def load_config_file(path: str) -> dict:
    """JSON object, or line-oriented key=value pairs."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ParameterError("config JSON must be an object")
        return doc
    doc = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"bad config line: {line!r}")
        key, val = line.split("=", 1)
        doc[key.strip()] = val.strip()
    return doc
