"""Matrix weights: operator norms, nested characteristics, reducing operators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varweights.errors import DomainError
from varweights.exponents import constant_exponent, log_decay_exponent
from varweights.fields import power_weight
from varweights.geometry import Cube, CubeFamily, FamilySpec
from varweights.matrices import (apply_averaging, averaging_norm_lower_bound,
                                 averaging_ratio_rows, constant_matrix_weight,
                                 diagonal_power_weight, matrix_from_scalar,
                                 matrix_app_characteristic,
                                 matrix_characteristic_on_cube,
                                 matrix_openness_sweep, matrix_to_scalar_check,
                                 op_norm, op_norms, reduced_characteristic_on_cube,
                                 reducing_operator, unit_directions,
                                 validate_matrix_weight)
from varweights.scalar import muckenhoupt_characteristic

SPD_2 = np.array([[2.0, 0.5], [0.5, 1.0]])


def one_cube_family(cube):
    return CubeFamily(cubes=[cube], spec=FamilySpec(dim=cube.dim))


def test_op_norm_diagonal():
    assert op_norm(np.diag([3.0, -2.0])) == pytest.approx(3.0)


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_op_norms_match_svd(seed):
    rng = np.random.default_rng(seed)
    mats = rng.normal(size=(5, 2, 2))
    ours = op_norms(mats)
    ref = np.array([np.linalg.svd(m, compute_uv=False)[0] for m in mats])
    assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12)


def test_op_norms_3d_batch():
    rng = np.random.default_rng(3)
    mats = rng.normal(size=(7, 3, 3))
    ours = op_norms(mats)
    ref = np.array([np.linalg.svd(m, compute_uv=False)[0] for m in mats])
    assert np.allclose(ours, ref, rtol=1e-10)


def test_unit_directions_properties():
    for d in (1, 2, 3):
        dirs = unit_directions(d, 16, seed=0)
        assert dirs.shape == (16, d)
        assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    again = unit_directions(2, 16, seed=0)
    assert np.array_equal(again, unit_directions(2, 16, seed=0))
    held_out = unit_directions(2, 16, seed=0, offset=0.5)
    assert not np.allclose(held_out, again)


def test_validate_matrix_weight_rejects_asymmetric():
    bad = constant_matrix_weight(SPD_2, dim=1)
    skewed = bad.fn

    def asym(pts):
        out = np.array(skewed(pts))
        out[:, 0, 1] += 1.0   # break symmetry
        return out

    from varweights.matrices import MatrixWeight
    broken = MatrixWeight(fn=asym, dim=1, size=2)
    with pytest.raises(DomainError):
        validate_matrix_weight(broken, np.array([[0.3]]))


def test_constant_matrix_characteristic_is_one():
    weight = constant_matrix_weight(SPD_2, dim=1)
    p = constant_exponent(2.0)
    value, _ = matrix_characteristic_on_cube(weight, p, Cube((0.2,), 1.5))
    assert value == pytest.approx(1.0, abs=1e-8)


def test_dimension_one_matches_scalar_characteristic():
    w = power_weight(-0.3)
    weight = matrix_from_scalar(w, size=1)
    p = log_decay_exponent(1.7, 0.4)
    cube = Cube((0.0,), 1.0)
    fam = one_cube_family(cube)
    scalar_value = muckenhoupt_characteristic(w, p, fam).value
    matrix_value, _ = matrix_characteristic_on_cube(weight, p, cube)
    assert matrix_value == pytest.approx(scalar_value, rel=1e-6)


def test_matrix_characteristic_report_over_family():
    weight = diagonal_power_weight([-0.3, 0.2])
    p = constant_exponent(2.0)
    fam = CubeFamily(cubes=[Cube((0.0,), 1.0), Cube((0.5,), 0.5)],
                     spec=FamilySpec(dim=1))
    rep = matrix_app_characteristic(weight, p, fam)
    assert not rep.divergent
    assert rep.value >= 1.0 - 1e-9
    assert rep.inner_resolution > 0


def test_scalar_identity_duality_exact():
    # for w * I the nested norm factorizes, so the characteristic of the
    # inverse weight at the conjugate exponent matches exactly
    w = power_weight(-0.3)
    weight = matrix_from_scalar(w, size=2)
    p = constant_exponent(1.8)
    cube = Cube((0.0,), 1.0)
    a, _ = matrix_characteristic_on_cube(weight, p, cube)
    b, _ = matrix_characteristic_on_cube(weight.inverse(), p.conjugate(), cube)
    assert a == pytest.approx(b, rel=1e-6)


def test_reducing_operator_constant_weight_tight():
    weight = constant_matrix_weight(SPD_2, dim=1)
    p = constant_exponent(2.0)
    red = reducing_operator(weight, p, Cube((0.0,), 1.0))
    assert red.sandwich_factor <= 1.0 + 1e-6
    assert red.lower_margin >= 1.0 - 1e-9
    # the reducing matrix reproduces the directional norm function: here
    # it must be congruent to SPD_2 scaled by |Q|^(1/p) = 1
    assert np.allclose(red.matrix, SPD_2, rtol=1e-6)


def test_reducing_operator_variable_weight_sandwich():
    weight = diagonal_power_weight([-0.5, 0.0], dim=2)
    p = constant_exponent(1.5)
    red = reducing_operator(weight, p, Cube((0.4, 0.0), 0.5), holdout=32)
    limit = math.sqrt(2.0) * (1.0 + 1e-4)
    assert 1.0 - 1e-4 <= red.lower_margin
    assert red.sandwich_factor <= limit


def test_reduced_characteristic_dimension_one_matches_scalar():
    w = power_weight(-0.3)
    weight = matrix_from_scalar(w, size=1)
    p = constant_exponent(1.6)
    cube = Cube((0.25,), 0.5)
    scalar_value = muckenhoupt_characteristic(
        w, p, one_cube_family(cube)).value
    reduced = reduced_characteristic_on_cube(weight, p, cube)
    assert reduced == pytest.approx(scalar_value, rel=1e-6)


def test_apply_averaging_constant_weight_averages():
    weight = constant_matrix_weight(np.eye(2), dim=1)
    cube = Cube((0.0,), 2.0)

    def f(pts):
        out = np.zeros((len(pts), 2))
        out[:, 0] = pts[:, 0] ** 2
        out[:, 1] = 1.0
        return out

    averaged = apply_averaging(weight, cube, f)
    val = averaged(np.array([[0.3]]))[0]
    # mean of x^2 over [-1, 1] is 1/3; mean of 1 is 1
    assert val[0] == pytest.approx(1.0 / 3.0, rel=1e-9)
    assert val[1] == pytest.approx(1.0, rel=1e-9)


def test_averaging_lower_bound_positive_and_reported():
    weight = diagonal_power_weight([-0.3, 0.1])
    p = constant_exponent(2.0)
    cube = Cube((0.0,), 1.0)
    rows = averaging_ratio_rows(weight, cube, p, seed=11)
    assert rows and all(ratio > 0 for _, ratio in rows)
    bound = averaging_norm_lower_bound(weight, cube, p,
                                       test_fields=[tf for tf, _ in rows])
    assert bound == pytest.approx(max(r for _, r in rows), rel=1e-9)


def test_averaging_dimension_one_matches_scalar():
    # scalar route: the averaging operator norm on constant-direction test
    # fields reduces to a ratio of weighted norms
    w = power_weight(-0.3)
    weight = matrix_from_scalar(w, size=1)
    p = constant_exponent(1.6)
    cube = Cube((0.25,), 0.5)
    bound = averaging_norm_lower_bound(weight, cube, p)
    assert bound > 0.0
    char = muckenhoupt_characteristic(w, p, one_cube_family(cube)).value
    # test-field ratios never exceed the characteristic-type quantity by
    # more than the normalization slack
    assert bound <= char * (1.0 + 1e-6) * 4.0


def test_matrix_to_scalar_directional_bound():
    weight = diagonal_power_weight([-0.3, 0.1])
    p = constant_exponent(2.0)
    fam = CubeFamily(cubes=[Cube((0.0,), 1.0)], spec=FamilySpec(dim=1))
    cmp = matrix_to_scalar_check(weight, np.array([1.0, 0.0]), p, fam)
    assert cmp.passed
    assert cmp.scalar_value <= cmp.bound + 1e-9


def test_matrix_openness_boundary_matches_scalar():
    weight = diagonal_power_weight([-0.5, 0.0])
    p = constant_exponent(1.5)
    fam = CubeFamily(cubes=[Cube((0.0,), 1.0)], spec=FamilySpec(dim=1))
    sweep = matrix_openness_sweep(weight, p, fam, [1.0, 1.34])
    by_s = {row.s: row for row in sweep.rows}
    assert not by_s[1.0].divergent
    assert by_s[1.34].divergent
    assert sweep.boundary == pytest.approx(1.34)


def test_diagonal_power_weight_singular_points():
    weight = diagonal_power_weight([-0.5, 0.0], center=(0.3,))
    pts = weight.singular_points()
    assert pts == ((0.3,),)
    mats = weight(np.array([[0.3 + 1e-3], [5.0]]))
    assert mats.shape == (2, 2, 2)
    assert mats[0, 0, 0] > mats[1, 0, 0]
