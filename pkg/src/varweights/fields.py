"""Scalar fields and weights: pointwise evaluation plus singularity metadata.

A field knows how to evaluate itself on a batch of points and declares
where it is singular and with what local power (``|x - x0|**power`` times
a slowly varying factor).  The declarations drive quadrature grading,
analytic tail corrections, and integrability decisions; they compose under
products, powers, and inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import Box, Cube

__all__ = [
    "FieldSingularity",
    "ScalarField",
    "constant_weight",
    "power_weight",
    "product_weight",
    "indicator_field",
    "callable_field",
]


@dataclass(frozen=True)
class FieldSingularity:
    """Location and local power of a field's singular (or kink) point."""

    point: tuple
    power: float

    def __post_init__(self):
        pt = tuple(float(v) for v in np.atleast_1d(self.point))
        object.__setattr__(self, "point", pt)
        object.__setattr__(self, "power", float(self.power))


@dataclass(frozen=True)
class ScalarField:
    """A nonnegative measurable function with declared singular structure.

    ``support`` restricts the field to a box (the field vanishes outside);
    ``None`` means the whole space.  ``descriptor`` is a JSON-friendly
    record of how the field was built, kept for report echoes.
    """

    fn: object
    dim: int
    singularities: tuple = ()
    support: Box | None = None
    descriptor: dict | None = None
    label: str = "field"

    def __post_init__(self):
        sings = tuple(s if isinstance(s, FieldSingularity) else FieldSingularity(*s)
                      for s in self.singularities)
        object.__setattr__(self, "singularities", sings)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None] if self.dim == 1 else pts[None, :]
        vals = np.asarray(self.fn(pts), dtype=float)
        if self.support is not None:
            lo = np.asarray(self.support.lo)
            hi = np.asarray(self.support.hi)
            inside = np.all((pts >= lo) & (pts <= hi), axis=-1)
            vals = np.where(inside, vals, 0.0)
        return vals

    def local_power_at(self, point) -> float:
        pt = tuple(float(v) for v in np.atleast_1d(point))
        for s in self.singularities:
            if all(math.isclose(a, b, rel_tol=0.0, abs_tol=1e-14)
                   for a, b in zip(s.point, pt)):
                return s.power
        return 0.0

    def __mul__(self, other: "ScalarField") -> "ScalarField":
        if not isinstance(other, ScalarField):
            return NotImplemented
        if other.dim != self.dim:
            raise DomainError("field dimensions differ")
        f, g = self, other
        support = f.support
        if g.support is not None:
            support = g.support if support is None else support.intersect(g.support)
        merged: dict = {}
        for s in f.singularities + g.singularities:
            merged[s.point] = merged.get(s.point, 0.0) + s.power
        sings = tuple(FieldSingularity(pt, pw) for pt, pw in sorted(merged.items()))
        return ScalarField(
            fn=lambda pts: f.fn(pts) * g.fn(pts), dim=f.dim,
            singularities=sings, support=support,
            label=f"{f.label}*{g.label}")

    def __pow__(self, exponent: float) -> "ScalarField":
        e = float(exponent)
        base = self
        if base.support is not None and e < 0:
            raise DomainError("cannot invert a field that vanishes off its support")
        sings = tuple(FieldSingularity(s.point, e * s.power)
                      for s in base.singularities)
        return ScalarField(
            fn=lambda pts: base.fn(pts) ** e, dim=base.dim,
            singularities=sings, support=base.support,
            label=f"{base.label}^{e:g}")

    def inverse(self) -> "ScalarField":
        """Pointwise reciprocal; singular powers flip sign."""
        return self ** (-1.0)

    def scaled(self, c: float) -> "ScalarField":
        if c < 0:
            raise DomainError("fields are nonnegative; scale must be too")
        base = self
        return ScalarField(
            fn=lambda pts: c * base.fn(pts), dim=base.dim,
            singularities=base.singularities, support=base.support,
            label=f"{c:g}*{base.label}")

    def restrict(self, domain) -> "ScalarField":
        """The field times the indicator of a cube or box."""
        box = domain.as_box() if isinstance(domain, Cube) else domain
        support = box if self.support is None else self.support.intersect(box)
        return ScalarField(fn=self.fn, dim=self.dim,
                           singularities=self.singularities, support=support,
                           descriptor=self.descriptor,
                           label=f"{self.label}|cube")


def constant_weight(value: float, dim: int = 1) -> ScalarField:
    if value <= 0:
        raise DomainError("constant weights must be positive")
    v = float(value)
    return ScalarField(fn=lambda pts: np.full(pts.shape[0], v), dim=dim,
                       descriptor={"kind": "constant", "value": v},
                       label=f"const({v:g})")


def power_weight(exponent: float, center=None, dim: int = 1) -> ScalarField:
    """The radial power weight ``|x - center|**exponent``."""
    a = float(exponent)
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)

    def fn(pts):
        r = np.linalg.norm(pts - c, axis=-1)
        with np.errstate(divide="ignore"):
            return r ** a

    return ScalarField(
        fn=fn, dim=dim,
        singularities=(FieldSingularity(tuple(c), a),),
        descriptor={"kind": "power", "exponent": a, "center": list(map(float, c))},
        label=f"|x-c|^{a:g}")


def product_weight(*factors: ScalarField) -> ScalarField:
    if not factors:
        raise DomainError("product needs at least one factor")
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def indicator_field(domain, dim: int | None = None) -> ScalarField:
    """The characteristic function of a cube or box."""
    box = domain.as_box() if isinstance(domain, Cube) else domain
    d = box.dim if dim is None else dim
    return ScalarField(fn=lambda pts: np.ones(pts.shape[0]), dim=d,
                       support=box,
                       descriptor={"kind": "indicator",
                                   "lo": list(box.lo), "hi": list(box.hi)},
                       label="chi")


def callable_field(fn, dim: int, singularities=(), support=None,
                   label: str = "field") -> ScalarField:
    return ScalarField(fn=fn, dim=dim, singularities=singularities,
                       support=support, label=label)
