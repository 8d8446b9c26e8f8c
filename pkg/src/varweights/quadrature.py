"""Cubature on boxes with geometric grading toward declared singular points.

The mesh on each axis is a tensor factor: smooth stretches get a uniform
composite Gauss-Legendre rule, while stretches adjacent to a singular
coordinate are subdivided geometrically (cell-size ratio ``grading_ratio``,
the square of a dyadic split) so that fixed-order Gauss-Legendre per cell
resolves power-type integrands.  In one dimension, when the local power
``b`` of the integrand at a singular point is declared, the innermost
stretch ``[s, s + delta]`` is not meshed at all; its contribution is added
analytically as ``f(probe) * |probe - s|**(-b) * integral(|x - s|**b)``,
which removes the truncation error that otherwise dominates for
``b`` close to ``-1``.

Integrability is decided before any mesh is built: a declared power
``b <= -dim`` at a point of the closed box means the integral is infinite
and :class:`NonIntegrableError` is raised.  Undeclared powers fall back to
a refinement ladder whose estimates either settle (converged), grow
geometrically (flagged non-integrable), or neither (quadrature failure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NonIntegrableError, QuadratureError
from .geometry import Box, Cube

__all__ = [
    "SingularPoint",
    "IntegrationPlan",
    "Grid",
    "build_grid",
    "integrate_cube",
    "check_integrable",
]


@dataclass(frozen=True)
class SingularPoint:
    """A point the mesh must grade toward.

    ``power`` is the local power of the integrand: near the point the
    integrand behaves like ``|x - point|**power`` times a slowly varying
    factor.  ``None`` means the behaviour is unknown (grade, but decide
    convergence empirically).  Points with ``power >= 0`` still mark kinks
    worth grading toward, e.g. ``|x|`` factors or exponent breakpoints.
    """

    point: tuple
    power: float | None = None

    def __post_init__(self):
        pt = tuple(float(v) for v in np.atleast_1d(self.point))
        object.__setattr__(self, "point", pt)
        if self.power is not None:
            object.__setattr__(self, "power", float(self.power))


@dataclass(frozen=True)
class IntegrationPlan:
    """Mesh and tolerance parameters for cubature on a box."""

    order: int = 12
    max_depth: int = 30
    rel_tol: float = 1e-10
    abs_floor: float = 1e-300
    smooth_cells: int = 4
    grading_ratio: float = 0.25
    ladder_rungs: int = 4
    singularities: tuple = ()

    def __post_init__(self):
        if self.order < 2:
            raise DomainError("quadrature order must be at least 2")
        if not (0.0 < self.grading_ratio < 1.0):
            raise DomainError("grading ratio must lie in (0, 1)")
        sings = tuple(s if isinstance(s, SingularPoint) else SingularPoint(*s)
                      for s in self.singularities)
        object.__setattr__(self, "singularities", sings)

    def with_singularities(self, singularities) -> "IntegrationPlan":
        return IntegrationPlan(
            order=self.order, max_depth=self.max_depth, rel_tol=self.rel_tol,
            abs_floor=self.abs_floor, smooth_cells=self.smooth_cells,
            grading_ratio=self.grading_ratio, ladder_rungs=self.ladder_rungs,
            singularities=tuple(singularities))


@dataclass(frozen=True)
class TailCell:
    """Analytic remainder descriptor for the stretch hugging a singularity.

    The contribution to the integral is
    ``f(points[probe_index]) * probe_dist**(-power) * scale`` where
    ``scale`` integrates ``|x - point|**power`` over the unmeshed stretch.
    """

    probe_index: int
    probe_dist: float
    power: float
    scale: float
    point: float


@dataclass(frozen=True)
class Grid:
    """Cubature nodes and weights, plus analytic tail descriptors."""

    points: np.ndarray   # (N, dim)
    weights: np.ndarray  # (N,)
    tails: tuple = ()
    depth: int = 0

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def integrate_values(self, values: np.ndarray,
                         tail_factors: np.ndarray | None = None) -> float:
        """Weighted sum plus tail terms; ``values`` aligns with ``points``.

        ``tail_factors`` optionally replaces the probe value of each tail
        term (callers that rescale node values may need a different scaling
        law at the tail).
        """
        total = float(np.dot(self.weights, values))
        for k, t in enumerate(self.tails):
            probe = (float(values[t.probe_index]) if tail_factors is None
                     else float(tail_factors[k]))
            total += probe * t.probe_dist ** (-t.power) * t.scale
        return total


@lru_cache(maxsize=64)
def _gl_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w  # on [0, 1]


def _cells_to_nodes(breaks: np.ndarray, order: int):
    """Gauss-Legendre nodes and weights for the cells between breakpoints."""
    ref_x, ref_w = _gl_rule(order)
    lo = breaks[:-1]
    width = np.diff(breaks)
    nodes = (lo[:, None] + width[:, None] * ref_x[None, :]).ravel()
    weights = (width[:, None] * ref_w[None, :]).ravel()
    return nodes, weights


def _mesh_toward_zero(length: float, depth: int, ratio: float, order: int,
                      analytic_tail: bool):
    """Mesh ``[0, length]`` graded toward 0 with increasing nodes.

    Returns ``(nodes, weights, delta)`` where ``delta`` is the length of the
    innermost stretch left unmeshed (0.0 when ``analytic_tail`` is False, in
    which case the innermost cell is meshed like the others).
    """
    deltas = length * ratio ** np.arange(depth, -1, -1.0)
    if analytic_tail:
        breaks = deltas
        delta = deltas[0]
    else:
        breaks = np.concatenate(([0.0], deltas))
        delta = 0.0
    nodes, weights = _cells_to_nodes(breaks, order)
    return nodes, weights, delta


def _mesh_away_from_zero(d0: float, d1: float, ratio: float, order: int):
    """Mesh the stretch at distances ``[d0, d1]`` from an exterior singularity."""
    grow = 1.0 / ratio
    steps = max(1, math.ceil(math.log(d1 / d0) / math.log(grow)))
    dist = d0 * grow ** np.arange(steps + 1, dtype=float)
    dist = np.minimum(dist, d1)
    dist = np.unique(dist)
    if dist.size < 2:
        dist = np.array([d0, d1])
    return _cells_to_nodes(dist, order)


class _AxisParts:
    """Accumulates per-axis node/weight blocks and tail descriptors."""

    def __init__(self):
        self.nodes = []
        self.weights = []
        self.tails = []  # dicts: probe (global index), scale-free data

    def add(self, nodes, weights):
        self.nodes.append(nodes)
        self.weights.append(weights)

    def add_tail(self, point: float, delta: float, power: float, probe_node: float):
        self.tails.append({"point": point, "delta": delta, "power": power,
                           "probe_node": probe_node})

    def flatten(self):
        if not self.nodes:
            return np.empty(0), np.empty(0), []
        nodes = np.concatenate(self.nodes)
        weights = np.concatenate(self.weights)
        tails = []
        for t in self.tails:
            probe = int(np.argmin(np.abs(nodes - t["probe_node"])))
            scale = t["delta"] ** (1.0 + t["power"]) / (1.0 + t["power"])
            tails.append({"point": t["point"], "power": t["power"],
                          "probe": probe, "scale": scale})
        return nodes, weights, tails


def _resolvable_depth(length: float, s: float, depth: int, ratio: float) -> int:
    """Cap grading depth so the innermost cell stays resolvable near ``s``.

    Offsets below ``eps * |s|`` round onto a nonzero coordinate ``s`` in
    double precision, which would put quadrature nodes (and the analytic
    tail probe) exactly at the singular point.  The cap keeps the innermost
    cell a few hundred float spacings wide; rungs requesting more depth
    reuse the capped mesh, so refinement ladders settle instead of
    degenerating.
    """
    if s == 0.0 or length <= 0.0:
        return depth
    floor = 256.0 * abs(s) * np.finfo(float).eps
    if length <= floor:
        raise QuadratureError(
            f"segment of width {length:.3e} cannot resolve the singular "
            f"coordinate {s!r} in double precision")
    cap = int(math.log(floor / length) / math.log(ratio))
    return max(2, min(depth, cap))


def _graded_segment(parts: _AxisParts, lo: float, hi: float, s: float,
                    depth: int, ratio: float, order: int, power):
    """Mesh ``[lo, hi]`` graded toward coordinate ``s`` into ``parts``."""
    use_tail = power is not None and power > -1.0
    if lo < s < hi:
        _graded_segment(parts, lo, s, s, depth, ratio, order, power)
        _graded_segment(parts, s, hi, s, depth, ratio, order, power)
        return
    if s <= lo:
        length = hi - lo
        if s == lo:
            depth = _resolvable_depth(length, s, depth, ratio)
            nodes, weights, delta = _mesh_toward_zero(length, depth, ratio,
                                                      order, use_tail)
            parts.add(s + nodes, weights)
            if use_tail and delta > 0.0:
                parts.add_tail(s, delta, power, s + nodes[0])
        else:
            nodes, weights = _mesh_away_from_zero(lo - s, hi - s, ratio, order)
            parts.add(s + nodes, weights)
    else:  # s >= hi, mirror image
        length = hi - lo
        if s == hi:
            depth = _resolvable_depth(length, s, depth, ratio)
            nodes, weights, delta = _mesh_toward_zero(length, depth, ratio,
                                                      order, use_tail)
            parts.add(s - nodes[::-1], weights[::-1])
            if use_tail and delta > 0.0:
                parts.add_tail(s, delta, power, s - nodes[0])
        else:
            nodes, weights = _mesh_away_from_zero(s - hi, s - lo, ratio, order)
            parts.add(s - nodes[::-1], weights[::-1])


def _axis_mesh(lo: float, hi: float, singular, depth: int, plan: IntegrationPlan):
    """Mesh one axis; ``singular`` is a list of (coordinate, power) pairs.

    Coordinates further than one box width from the axis extent are ignored.
    Multiple singular coordinates partition the axis at midpoints, each part
    graded toward its own coordinate.
    """
    width = hi - lo
    merged: dict = {}
    for c, b in singular:
        if not (lo - width <= c <= hi + width):
            continue
        prev = merged.get(c)
        if prev is None or (b is not None and (prev[1] is None or b < prev[1])):
            merged[c] = (c, b)
    near = [merged[c] for c in sorted(merged)]
    if not near:
        breaks = np.linspace(lo, hi, plan.smooth_cells + 1)
        nodes, weights = _cells_to_nodes(breaks, plan.order)
        return nodes, weights, []
    cuts = [lo]
    for (c0, _), (c1, _) in zip(near[:-1], near[1:]):
        cuts.append(min(hi, max(lo, 0.5 * (c0 + c1))))
    cuts.append(hi)
    parts = _AxisParts()
    for (c, b), a0, a1 in zip(near, cuts[:-1], cuts[1:]):
        if a1 - a0 > 0:
            _graded_segment(parts, a0, a1, c, depth, plan.grading_ratio,
                            plan.order, b)
    return parts.flatten()


def _as_box(domain) -> Box:
    if isinstance(domain, Cube):
        return domain.as_box()
    if isinstance(domain, Box):
        return domain
    raise DomainError(f"expected Cube or Box, got {type(domain).__name__}")


def check_integrable(domain, plan: IntegrationPlan):
    """Raise :class:`NonIntegrableError` if a declared power forbids the integral."""
    box = _as_box(domain)
    dim = box.dim
    for s in plan.singularities:
        if s.power is None:
            continue
        pt = np.asarray(s.point)
        inside = bool(np.all(pt >= np.asarray(box.lo)) and np.all(pt <= np.asarray(box.hi)))
        if inside and s.power <= -dim:
            loc = ", ".join(f"{v:.6g}" for v in pt)
            raise NonIntegrableError(
                f"integrand power {s.power:.6g} at ({loc}) is not integrable "
                f"in dimension {dim}")


def build_grid(domain, plan: IntegrationPlan, depth: int | None = None) -> Grid:
    """Tensor cubature grid on a cube or box, graded per the plan."""
    box = _as_box(domain)
    if box.is_empty():
        return Grid(points=np.empty((0, box.dim)), weights=np.empty(0),
                    tails=(), depth=0)
    depth = plan.max_depth if depth is None else int(depth)
    dim = box.dim

    axis_nodes, axis_weights, axis_tails = [], [], []
    for axis in range(dim):
        # analytic tails only apply in one dimension, where the declared
        # power is the power along the axis itself
        singular = [(s.point[axis], s.power if dim == 1 else None)
                    for s in plan.singularities]
        nd, wt, tl = _axis_mesh(box.lo[axis], box.hi[axis], singular, depth, plan)
        axis_nodes.append(nd)
        axis_weights.append(wt)
        axis_tails.append(tl)

    if dim == 1:
        points = axis_nodes[0][:, None]
        weights = axis_weights[0]
        tails = tuple(
            TailCell(probe_index=t["probe"],
                     probe_dist=abs(float(points[t["probe"], 0]) - t["point"]),
                     power=t["power"], scale=t["scale"], point=t["point"])
            for t in axis_tails[0])
        return Grid(points=points, weights=weights, tails=tails, depth=depth)

    mesh = np.meshgrid(*axis_nodes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*axis_weights, indexing="ij")
    weights = np.ones(points.shape[0])
    for wm in wmesh:
        weights = weights * wm.ravel()
    return Grid(points=points, weights=weights, tails=(), depth=depth)


def _ladder_depths(plan: IntegrationPlan) -> list:
    step = 2
    depths = [plan.max_depth - step * k for k in range(plan.ladder_rungs)]
    depths = sorted(d for d in depths if d >= 2)
    return depths or [plan.max_depth]


def integrate_cube(f, domain, plan: IntegrationPlan | None = None) -> float:
    """Integrate ``f`` over a cube or box to the plan's relative tolerance.

    ``f`` maps an ``(N, dim)`` array of points to ``(N,)`` values.  The
    refinement ladder deepens the graded mesh; estimates must settle to
    ``rel_tol`` or the call raises.  Estimates growing by a factor of at
    least ``sqrt(2)`` per rung across the final rungs are reported as
    non-integrability (the blow-up pattern certifies divergence), anything
    else as :class:`QuadratureError` carrying the last estimates.
    """
    plan = plan or IntegrationPlan()
    box = _as_box(domain)
    if box.is_empty():
        return 0.0
    check_integrable(box, plan)

    estimates = []
    for depth in _ladder_depths(plan):
        grid = build_grid(box, plan, depth=depth)
        values = np.asarray(f(grid.points), dtype=float)
        estimates.append(grid.integrate_values(values))
        if len(estimates) >= 2:
            prev, cur = estimates[-2], estimates[-1]
            scale = max(abs(cur), plan.abs_floor)
            if abs(cur - prev) <= plan.rel_tol * scale:
                return cur
    growth = [b / a for a, b in zip(estimates[:-1], estimates[1:])
              if a > 0 and b > 0]
    if len(growth) >= 2 and all(g >= math.sqrt(2.0) - 1e-12 for g in growth[-2:]):
        raise NonIntegrableError(
            "estimates grow geometrically under refinement", estimates)
    raise QuadratureError(
        f"no convergence to rel_tol={plan.rel_tol:g} at depth {plan.max_depth}",
        estimates[-2:])
