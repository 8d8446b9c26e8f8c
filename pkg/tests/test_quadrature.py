"""Graded tensor quadrature: exactness, singular accuracy, gate, ladder."""

import math

import numpy as np
import pytest

from varweights.errors import NonIntegrableError, QuadratureError
from varweights.geometry import Box, Cube
from varweights.quadrature import (IntegrationPlan, SingularPoint, build_grid,
                                   integrate_cube)


def test_polynomial_exactness():
    # Gauss-Legendre of order 12 integrates degree <= 23 exactly per cell
    cube = Cube((0.25,), 1.5)
    plan = IntegrationPlan()
    value = integrate_cube(lambda pts: pts[:, 0] ** 11, cube, plan)
    lo, hi = cube.as_box().lo[0], cube.as_box().hi[0]
    exact = (hi ** 12 - lo ** 12) / 12.0
    assert value == pytest.approx(exact, rel=1e-13)


def test_smooth_2d():
    cube = Cube((0.0, 0.0), 2.0)
    plan = IntegrationPlan()
    value = integrate_cube(
        lambda pts: np.cos(pts[:, 0]) * np.exp(pts[:, 1]), cube, plan)
    exact = (2 * math.sin(1.0)) * (math.e - 1 / math.e)
    assert value == pytest.approx(exact, rel=1e-12)


def test_declared_power_singularity_1d():
    cube = Cube((0.0,), 2.0)
    plan = IntegrationPlan().with_singularities((SingularPoint((0.0,), -0.5),))
    value = integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -0.5, cube, plan)
    assert value == pytest.approx(4.0, rel=1e-9)


def test_declared_power_singularity_offcenter():
    cube = Cube((1.0,), 2.0)   # [0, 2], singularity at the left edge
    plan = IntegrationPlan().with_singularities((SingularPoint((0.0,), -0.25),))
    value = integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -0.25, cube, plan)
    exact = 2.0 ** 0.75 / 0.75
    assert value == pytest.approx(exact, rel=1e-9)


def test_separable_singularity_2d():
    cube = Cube((0.0, 0.0), 2.0)
    plan = IntegrationPlan().with_singularities(
        (SingularPoint((0.0, 0.0), -0.5),))
    value = integrate_cube(
        lambda pts: (np.abs(pts[:, 0]) * np.abs(pts[:, 1])) ** -0.25,
        cube, plan)
    exact = (2 / 0.75) ** 2   # per-axis integral of |t|^-0.25 over [-1, 1]
    assert value == pytest.approx(exact, rel=1e-7)


def test_integrability_gate_raises():
    cube = Cube((0.0,), 2.0)
    plan = IntegrationPlan().with_singularities((SingularPoint((0.0,), -1.0),))
    with pytest.raises(NonIntegrableError):
        integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -1.0, cube, plan)


def test_gate_ignores_singularity_outside_box():
    cube = Cube((3.0,), 1.0)   # [2.5, 3.5], away from the singular point
    plan = IntegrationPlan().with_singularities((SingularPoint((0.0,), -2.0),))
    value = integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -2.0, cube, plan)
    assert value == pytest.approx(1 / 2.5 - 1 / 3.5, rel=1e-10)


def test_divergence_ladder_detects_undeclared_blowup():
    # declared point with unknown power: grading happens, the gate cannot
    # fire, and the refinement ladder must certify divergence instead
    cube = Cube((0.0,), 2.0)
    plan = IntegrationPlan(max_depth=12).with_singularities(
        (SingularPoint((0.0,), None),))
    with pytest.raises(NonIntegrableError) as err:
        integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -1.25, cube, plan)
    estimates = err.value.estimates
    assert len(estimates) >= 3
    ratios = [b / a for a, b in zip(estimates[:-1], estimates[1:])]
    assert all(r >= math.sqrt(2.0) - 1e-9 for r in ratios)


def test_slow_convergence_raises_quadrature_error():
    # integrable endpoint power, no analytic tail: estimates settle too
    # slowly for the requested tolerance and never look divergent
    cube = Cube((0.5,), 1.0)
    plan = IntegrationPlan(max_depth=10, rel_tol=1e-12).with_singularities(
        (SingularPoint((0.0,), None),))
    with pytest.raises(QuadratureError):
        integrate_cube(lambda pts: np.abs(pts[:, 0]) ** -0.9, cube, plan)


def test_grid_depth_controls_resolution():
    cube = Cube((0.0,), 2.0)
    plan = IntegrationPlan().with_singularities((SingularPoint((0.0,), -0.5),))
    g1 = build_grid(cube, plan, depth=4)
    g2 = build_grid(cube, plan, depth=8)
    assert g2.size > g1.size
    assert g1.points.shape[1] == 1
    assert np.all(g1.weights > 0)


def test_empty_box_integrates_to_zero():
    box = Box((1.0,), (1.0,))
    assert integrate_cube(lambda pts: pts[:, 0], box, IntegrationPlan()) == 0.0


def test_plan_validation():
    with pytest.raises(Exception):
        IntegrationPlan(order=1)
    with pytest.raises(Exception):
        IntegrationPlan(grading_ratio=1.5)
