"""Axis-aligned cubes and the finite cube families used for suprema."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "Cube",
    "Box",
    "CubeFamily",
    "FamilySpec",
    "build_family",
    "origin_cube",
]


@dataclass(frozen=True)
class Cube:
    """Axis-aligned cube given by its center and side length."""

    center: tuple
    side: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "side", float(self.side))
        if self.side <= 0.0:
            raise DomainError(f"cube side must be positive, got {self.side}")
        if not (1 <= len(c) <= 3):
            raise DomainError("cubes are supported in dimensions 1 to 3")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        return self.side ** self.dim

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.center) - 0.5 * self.side

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.center) + 0.5 * self.side

    def dilate(self, k: float) -> "Cube":
        """Concentric cube with side scaled by ``k``."""
        if k <= 0:
            raise DomainError("dilation factor must be positive")
        return Cube(self.center, k * self.side)

    def contains_point(self, x, closed: bool = True) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if closed:
            return bool(np.all(x >= self.lo - 1e-300) and np.all(x <= self.hi + 1e-300))
        return bool(np.all(x > self.lo) and np.all(x < self.hi))

    def contains_cube(self, other: "Cube") -> bool:
        return bool(np.all(other.lo >= self.lo - 1e-12 * self.side)
                    and np.all(other.hi <= self.hi + 1e-12 * self.side))

    def children(self) -> list:
        """The 2^n dyadic children."""
        half = 0.5 * self.side
        lo = self.lo
        out = []
        for idx in np.ndindex(*(2,) * self.dim):
            c = lo + (np.asarray(idx) + 0.5) * half
            out.append(Cube(tuple(c), half))
        return out

    def central_grandchild(self) -> "Cube":
        return Cube(self.center, self.side / 4.0)

    def random_subcubes(self, count: int, rng: np.random.Generator,
                        min_frac: float = 0.05, max_frac: float = 0.5) -> list:
        """Seeded random sub-cubes, fully contained in this cube."""
        out = []
        for _ in range(count):
            frac = math.exp(rng.uniform(math.log(min_frac), math.log(max_frac)))
            side = frac * self.side
            lo = self.lo + 0.5 * side
            hi = self.hi - 0.5 * side
            center = tuple(rng.uniform(l, h) for l, h in zip(lo, hi))
            out.append(Cube(center, side))
        return out

    def as_box(self) -> "Box":
        return Box(tuple(self.lo), tuple(self.hi))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; the integration domains that cube intersections produce."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi):
            raise DomainError("box corner dimensions differ")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def measure(self) -> float:
        return float(np.prod(np.maximum(np.asarray(self.hi) - np.asarray(self.lo), 0.0)))

    def is_empty(self) -> bool:
        return any(h <= l for l, h in zip(self.lo, self.hi))

    def intersect(self, other: "Box") -> "Box":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        return Box(lo, hi)


def origin_cube(k: int) -> Cube:
    """Cube centered at the origin with side ``2 * e**(k+1)``; dimension 1.

    The side grows geometrically in ``k`` so the family probes arbitrarily
    large scales.  ``origin_cube(0)`` has side ``2e``.
    """
    if k < 0:
        raise DomainError("origin cube index must be nonnegative")
    return Cube((0.0,), 2.0 * math.exp(k + 1))


def origin_cube_nd(k: int, dim: int) -> Cube:
    if k < 0:
        raise DomainError("origin cube index must be nonnegative")
    return Cube((0.0,) * dim, 2.0 * math.exp(k + 1))


@dataclass(frozen=True)
class FamilySpec:
    """Deterministic description of a finite cube family.

    The family is the union of
      * all dyadic cubes with side ``2**level`` for ``level`` in
        ``[dense_min_level, max_level]`` meeting the bounding box,
      * dyadic cubes at finer levels down to ``min_level`` that lie within
        ``near_radius_factor`` side lengths of a singular point,
      * cubes shrinking geometrically onto each singular point
        (sides ``box_halfwidth * 2**(1-j)``, ``j = 0..shrink_levels``),
      * landmark cubes centered at the origin with sides ``2 e**(k+1)``,
      * seeded random cubes inside the bounding box.

    Finite families cannot certify a supremum over all cubes; they
    concentrate cubes where extremizers of power-type weights live
    (small scales at singularities, large scales at infinity).
    """

    dim: int = 1
    box_halfwidth: float = 2.0
    min_level: int = -8
    max_level: int = 1
    dense_min_level: int = -4
    near_radius_factor: float = 8.0
    shrink_levels: int = 10
    landmark_cubes: int = 3
    random_cubes: int = 8
    seed: int = 7


@dataclass
class CubeFamily:
    """A finite list of cubes plus bookkeeping for shrinking subsequences."""

    cubes: list
    spec: FamilySpec
    shrink_groups: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.cubes:
            raise DomainError("cube family must be non-empty")

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)


def _dyadic_cubes_at_level(level: int, dim: int, halfwidth: float,
                           centers_near=None, radius=None) -> list:
    """Dyadic cubes of side 2**level meeting [-halfwidth, halfwidth]^dim.

    When ``centers_near``/``radius`` are given, only cubes whose center
    is within ``radius`` of one of those points are kept.
    """
    side = 2.0 ** level
    k_lo = math.floor(-halfwidth / side)
    k_hi = math.ceil(halfwidth / side)
    idx_range = range(k_lo, k_hi)
    out = []
    for idx in np.ndindex(*(len(idx_range),) * dim):
        ks = [idx_range[i] for i in idx]
        center = tuple((k + 0.5) * side for k in ks)
        if centers_near is not None:
            ok = False
            for pt in centers_near:
                if np.linalg.norm(np.asarray(center) - np.asarray(pt)) <= radius:
                    ok = True
                    break
            if not ok:
                continue
        out.append(Cube(center, side))
    return out


def build_family(spec: FamilySpec, singular_points=()) -> CubeFamily:
    """Construct the deterministic cube family described by ``spec``."""
    if spec.min_level > spec.max_level:
        raise DomainError("family min_level exceeds max_level")
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in singular_points]
    for p in pts:
        if p.size != spec.dim:
            raise DomainError("singular point dimension does not match family")

    cubes = []
    dense_floor = max(spec.dense_min_level, spec.min_level)
    for level in range(spec.max_level, dense_floor - 1, -1):
        cubes.extend(_dyadic_cubes_at_level(level, spec.dim, spec.box_halfwidth))
    if pts:
        for level in range(dense_floor - 1, spec.min_level - 1, -1):
            radius = spec.near_radius_factor * (2.0 ** level)
            cubes.extend(_dyadic_cubes_at_level(level, spec.dim, spec.box_halfwidth,
                                                centers_near=pts, radius=radius))

    shrink_groups = {}
    for p in pts:
        indices = []
        for j in range(spec.shrink_levels + 1):
            side = spec.box_halfwidth * (2.0 ** (1 - j))
            indices.append(len(cubes))
            cubes.append(Cube(tuple(p), side))
        shrink_groups[tuple(float(v) for v in p)] = indices

    for k in range(spec.landmark_cubes):
        cubes.append(origin_cube_nd(k, spec.dim))

    rng = np.random.default_rng(spec.seed)
    bounding = Cube((0.0,) * spec.dim, 2.0 * spec.box_halfwidth)
    cubes.extend(bounding.random_subcubes(spec.random_cubes, rng))

    return CubeFamily(cubes=cubes, spec=spec, shrink_groups=shrink_groups)
