"""Cubes, boxes, and dyadic cube families."""

import numpy as np
import pytest

from varweights.errors import DomainError
from varweights.geometry import (Box, Cube, CubeFamily, FamilySpec,
                                 build_family, origin_cube)


def test_cube_measure_and_box():
    q = Cube((0.5, -0.5), 2.0)
    assert q.measure == pytest.approx(4.0)
    box = q.as_box()
    assert box.lo == pytest.approx((-0.5, -1.5))
    assert box.hi == pytest.approx((1.5, 0.5))
    assert q.contains_point((0.0, 0.0))
    assert not q.contains_point((2.0, 0.0))


def test_cube_children_partition_measure():
    q = Cube((0.0, 0.0), 1.0)
    kids = q.children()
    assert len(kids) == 4
    assert sum(k.measure for k in kids) == pytest.approx(q.measure)
    assert all(q.contains_cube(k) for k in kids)
    grand = q.central_grandchild()
    assert grand.side == pytest.approx(q.side / 4)
    assert q.contains_cube(grand)


def test_cube_random_subcubes_seeded():
    q = Cube((0.0,), 1.0)
    a = q.random_subcubes(5, np.random.default_rng(3))
    b = q.random_subcubes(5, np.random.default_rng(3))
    assert [s.center for s in a] == [s.center for s in b]
    assert all(q.contains_cube(s) for s in a)
    c = q.random_subcubes(5, np.random.default_rng(4))
    assert [s.center for s in c] != [s.center for s in a]


def test_box_intersection():
    a = Box((0.0,), (2.0,))
    b = Box((1.0,), (3.0,))
    inter = a.intersect(b)
    assert inter.lo == pytest.approx((1.0,))
    assert inter.hi == pytest.approx((2.0,))
    empty = a.intersect(Box((5.0,), (6.0,)))
    assert empty.is_empty()
    assert empty.measure == 0.0


def test_build_family_contains_shrink_ladder():
    spec = FamilySpec(dim=1, shrink_levels=6, random_cubes=0)
    fam = build_family(spec, singular_points=((0.0,),))
    assert len(fam) > 0
    sides = sorted({c.side for c in fam if c.contains_point((0.0,))})
    # the shrink ladder provides a run of dyadically decreasing sides
    assert sides[0] <= 2.0 ** (1 - spec.shrink_levels)
    assert fam.shrink_groups  # bookkeeping present for divergence detection


def test_build_family_deterministic_by_seed():
    spec = FamilySpec(dim=1, random_cubes=4, seed=11)
    fam1 = build_family(spec, singular_points=((0.0,),))
    fam2 = build_family(spec, singular_points=((0.0,),))
    assert [c.center for c in fam1] == [c.center for c in fam2]


def test_family_requires_cubes():
    with pytest.raises(DomainError):
        CubeFamily(cubes=[], spec=FamilySpec(dim=1))


def test_origin_cube_ladder():
    c0, c1 = origin_cube(0), origin_cube(1)
    assert c1.side > c0.side
    assert c0.contains_point((0.0,))
    with pytest.raises(DomainError):
        origin_cube(-1)


def test_dilate():
    q = Cube((1.0,), 1.0)
    big = q.dilate(2.0)
    assert big.side == pytest.approx(2.0)
    assert big.center == q.center
    assert big.contains_cube(q)


def test_cube_dim_mismatch_rejected():
    with pytest.raises(DomainError):
        Cube((0.0, 0.0), -1.0)
