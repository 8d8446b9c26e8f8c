"""Declarative JSON configuration for the command-line tool.

A run configuration is one JSON object with named sections; each command
reads the sections it needs.  Validation is eager and reports the exact
offending path (``exponent.value``, ``family.seed``, ...) so a bad file
fails before any computation starts.  All randomness is seeded from the
config (default 0), making every run reproducible.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ConfigError, DomainError
from .exponents import (ExponentFunction, bump_exponent, constant_exponent,
                        log_decay_exponent, piecewise_exponent)
from .fields import (ScalarField, constant_weight, power_weight,
                     product_weight)
from .geometry import Cube, CubeFamily, FamilySpec, build_family
from .matrices import (MatrixWeight, congruent_power_weight,
                       constant_matrix_weight, diagonal_power_weight,
                       matrix_from_scalar)
from .quadrature import IntegrationPlan

__all__ = [
    "load_config",
    "require",
    "optional",
    "build_exponent",
    "build_weight",
    "build_matrix_weight",
    "build_cube",
    "build_family_from_config",
    "build_plan",
    "config_seed",
]


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(path, "config file not found")
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    return cfg


def _type_name(expected) -> str:
    if isinstance(expected, tuple):
        return " or ".join(t.__name__ for t in expected)
    return expected.__name__


def require(cfg: dict, path: str, expected=None):
    """Fetch a dotted path from nested dicts; missing or mistyped raises
    :class:`ConfigError` naming the path."""
    node = cfg
    walked = []
    for key in path.split("."):
        walked.append(key)
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(".".join(walked), "missing required key")
        node = node[key]
    if expected is not None:
        if expected is float and isinstance(node, int) \
                and not isinstance(node, bool):
            node = float(node)
        if not isinstance(node, expected) or isinstance(node, bool) \
                and expected is not bool:
            raise ConfigError(path, f"expected {_type_name(expected)}, "
                                    f"got {type(node).__name__}")
    return node


def optional(cfg: dict, path: str, default=None, expected=None):
    node = cfg
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    if expected is not None:
        if expected is float and isinstance(node, int) \
                and not isinstance(node, bool):
            node = float(node)
        if not isinstance(node, expected) or isinstance(node, bool) \
                and expected is not bool:
            raise ConfigError(path, f"expected {_type_name(expected)}, "
                                    f"got {type(node).__name__}")
    return node


def _point(cfg: dict, path: str, dim: int, default=None) -> tuple:
    raw = optional(cfg, path)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(path, "missing required key")
    if not isinstance(raw, list) or len(raw) != dim \
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in raw):
        raise ConfigError(path, f"expected a list of {dim} numbers")
    return tuple(float(v) for v in raw)


def config_dimension(cfg: dict) -> int:
    dim = optional(cfg, "dimension", 1, int)
    if dim < 1 or dim > 2:
        raise ConfigError("dimension", "spatial dimension must be 1 or 2")
    return dim


def config_seed(cfg: dict) -> int:
    return optional(cfg, "seed", 0, int)


def build_exponent(cfg: dict, section: str = "exponent") -> ExponentFunction:
    spec = require(cfg, section, dict)
    kind = require(spec, "kind", str)
    dim = config_dimension(cfg)
    prefix = f"{section}."
    try:
        if kind == "constant":
            return constant_exponent(require(spec, "value", float), dim)
        if kind == "log-decay":
            return log_decay_exponent(require(spec, "base", float),
                                      require(spec, "amplitude", float), dim)
        if kind == "piecewise":
            return piecewise_exponent(require(spec, "left", float),
                                      require(spec, "right", float),
                                      threshold=optional(spec, "threshold",
                                                         0.0, float),
                                      axis=optional(spec, "axis", 0, int),
                                      dim=dim)
        if kind == "bump":
            return bump_exponent(require(spec, "base", float),
                                 require(spec, "amplitude", float),
                                 width=optional(spec, "width", 1.0, float),
                                 center=_point(spec, "center", dim,
                                               default=(0.0,) * dim),
                                 dim=dim)
    except ConfigError as exc:
        raise ConfigError(prefix + exc.path, exc.reason)
    except (ValueError, DomainError) as exc:
        raise ConfigError(section, str(exc))
    raise ConfigError(prefix + "kind", f"unknown exponent kind {kind!r}")


def build_weight(cfg: dict, section: str = "weight") -> ScalarField:
    spec = require(cfg, section, dict)
    dim = config_dimension(cfg)
    return _weight_from(spec, section, dim)


def _weight_from(spec: dict, section: str, dim: int) -> ScalarField:
    kind = require(spec, "kind", str)
    prefix = f"{section}."
    try:
        if kind == "power":
            return power_weight(require(spec, "exponent", float),
                                _point(spec, "center", dim,
                                       default=(0.0,) * dim), dim)
        if kind == "constant":
            value = require(spec, "value", float)
            if value <= 0 or not math.isfinite(value):
                raise ConfigError("value", "weight must be positive and finite")
            return constant_weight(value, dim)
        if kind == "product":
            factors = require(spec, "factors", list)
            if not factors:
                raise ConfigError("factors", "product needs at least one factor")
            fields = [_weight_from(f, f"{section}.factors[{i}]", dim)
                      for i, f in enumerate(factors)]
            return product_weight(*fields)
    except ConfigError as exc:
        if exc.path.startswith(section):
            raise
        raise ConfigError(prefix + exc.path, exc.reason)
    except (ValueError, DomainError) as exc:
        raise ConfigError(section, str(exc))
    raise ConfigError(prefix + "kind", f"unknown weight kind {kind!r}")


def build_matrix_weight(cfg: dict, section: str = "matrix_weight") -> MatrixWeight:
    spec = require(cfg, section, dict)
    kind = require(spec, "kind", str)
    dim = config_dimension(cfg)
    prefix = f"{section}."
    try:
        if kind == "diagonal-power":
            exps = require(spec, "exponents", list)
            if not exps or not all(isinstance(a, (int, float))
                                   and not isinstance(a, bool) for a in exps):
                raise ConfigError("exponents", "expected a list of numbers")
            return diagonal_power_weight(
                [float(a) for a in exps],
                center=_point(spec, "center", dim, default=(0.0,) * dim),
                dim=dim)
        if kind == "constant":
            entries = require(spec, "entries", list)
            return constant_matrix_weight(np.asarray(entries, dtype=float),
                                          dim=dim)
        if kind == "congruent-power":
            exps = require(spec, "exponents", list)
            rot = require(spec, "rotation", list)
            return congruent_power_weight(
                [float(a) for a in exps], np.asarray(rot, dtype=float),
                center=_point(spec, "center", dim, default=(0.0,) * dim),
                dim=dim)
        if kind == "scalar-identity":
            w = _weight_from(require(spec, "weight", dict),
                             f"{section}.weight", dim)
            size = require(spec, "size", int)
            if size < 1 or size > 3:
                raise ConfigError("size", "matrix size must be 1, 2, or 3")
            return matrix_from_scalar(w, size)
    except ConfigError as exc:
        if exc.path.startswith(section):
            raise
        raise ConfigError(prefix + exc.path, exc.reason)
    except (ValueError, DomainError) as exc:
        raise ConfigError(section, str(exc))
    raise ConfigError(prefix + "kind", f"unknown matrix weight kind {kind!r}")


def build_cube(cfg: dict, section: str = "cube") -> Cube:
    spec = require(cfg, section, dict)
    dim = config_dimension(cfg)
    center = _point(spec, "center", dim)
    side = require(spec, "side", float)
    if side <= 0:
        raise ConfigError(f"{section}.side", "cube side must be positive")
    return Cube(center, side)


def build_family_from_config(cfg: dict, singular_points=(),
                             section: str = "family") -> CubeFamily:
    spec_cfg = optional(cfg, section, {}, dict)
    dim = config_dimension(cfg)
    kwargs = dict(
        dim=dim,
        box_halfwidth=optional(spec_cfg, "box_halfwidth", 2.0, float),
        min_level=optional(spec_cfg, "min_level", -8, int),
        max_level=optional(spec_cfg, "max_level", 1, int),
        dense_min_level=optional(spec_cfg, "dense_min_level", -4, int),
        near_radius_factor=optional(spec_cfg, "near_radius_factor", 8.0, float),
        shrink_levels=optional(spec_cfg, "shrink_levels", 10, int),
        landmark_cubes=optional(spec_cfg, "landmark_cubes", 3, int),
        random_cubes=optional(spec_cfg, "random_cubes", 8, int),
        seed=optional(spec_cfg, "seed", config_seed(cfg), int),
    )
    if kwargs["min_level"] > kwargs["max_level"]:
        raise ConfigError(f"{section}.min_level",
                          "min_level must not exceed max_level")
    if kwargs["box_halfwidth"] <= 0:
        raise ConfigError(f"{section}.box_halfwidth", "must be positive")
    try:
        spec = FamilySpec(**kwargs)
        return build_family(spec, singular_points=tuple(singular_points))
    except (ValueError, DomainError) as exc:
        raise ConfigError(section, str(exc))


def build_plan(cfg: dict) -> IntegrationPlan:
    tol = optional(cfg, "tolerances", {}, dict)
    rel = optional(tol, "quadrature_rel", 1e-10, float)
    depth = optional(tol, "max_depth", 30, int)
    if rel <= 0 or rel >= 1:
        raise ConfigError("tolerances.quadrature_rel", "must be in (0, 1)")
    if depth < 4 or depth > 60:
        raise ConfigError("tolerances.max_depth", "must be between 4 and 60")
    return IntegrationPlan(max_depth=depth, rel_tol=rel)


def norm_tolerance(cfg: dict) -> float:
    tol = optional(cfg, "tolerances", {}, dict)
    val = optional(tol, "norm", 1e-8, float)
    if val <= 0 or val >= 1:
        raise ConfigError("tolerances.norm", "must be in (0, 1)")
    return val
