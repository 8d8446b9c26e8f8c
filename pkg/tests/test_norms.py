"""Modulars, Luxemburg norms, Holder defect, unit-function characteristics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varweights.errors import InfiniteModularError
from varweights.exponents import (bump_exponent, constant_exponent,
                                  log_decay_exponent, piecewise_exponent)
from varweights.fields import (callable_field, constant_weight,
                               indicator_field, power_weight, product_weight)
from varweights.geometry import Cube, CubeFamily, FamilySpec
from varweights.norms import (holder_defect, large_cube_norm_constants,
                              luxemburg_norm, modular, modular_samples,
                              unit_characteristic, weighted_norm)
from varweights.quadrature import IntegrationPlan

CUBE = Cube((0.0,), 2.0)


def test_norm_piecewise_indicator_oracle():
    # the norm of the indicator of [-1, 1] with p = 2 on x < 0 and
    # p = 3 on x > 0 solves lambda**-2 + lambda**-3 = 1
    p = piecewise_exponent(2.0, 3.0)
    f = indicator_field(CUBE)
    value = luxemburg_norm(f, p, CUBE).value
    root = np.roots([1.0, 0.0, -1.0, -1.0])
    expected = float([r.real for r in root if abs(r.imag) < 1e-12
                      and r.real > 0][0])
    assert value == pytest.approx(expected, abs=1e-8)
    assert value == pytest.approx(1.3247180, abs=1e-6)


def test_constant_exponent_norm_closed_form():
    # ||c * chi_Q||_p = c |Q|^(1/p)
    p = constant_exponent(2.5)
    f = constant_weight(3.0)
    value = luxemburg_norm(f, p, Cube((0.7,), 1.3)).value
    assert value == pytest.approx(3.0 * 1.3 ** (1 / 2.5), rel=1e-10)


def test_modular_power_weight_closed_form():
    # modular of |x|^(-1/2) with p = 3/2: integral of |x|^(-3/4) on [-1,1]
    p = constant_exponent(1.5)
    w = power_weight(-0.5)
    assert modular(w, p, CUBE) == pytest.approx(8.0, rel=1e-9)


def test_modular_at_computed_norm_is_one():
    p = log_decay_exponent(1.8, 0.5)
    w = power_weight(-0.3)
    res = luxemburg_norm(w, p, CUBE)
    assert res.modular_at_value == pytest.approx(1.0, abs=1e-6)
    scaled = w.scaled(1.0 / res.value)
    assert modular(scaled, p, CUBE) == pytest.approx(1.0, abs=1e-6)


def test_infinite_modular_raises():
    p = constant_exponent(2.5)
    w = power_weight(-0.5)   # |x|^(-1.25) is not integrable
    with pytest.raises(InfiniteModularError):
        modular(w, p, CUBE)
    with pytest.raises(InfiniteModularError):
        luxemburg_norm(w, p, CUBE)


def test_zero_field_norm_is_zero():
    p = constant_exponent(2.0)
    zero = constant_weight(1.0).scaled(0.0)
    res = luxemburg_norm(zero, p, CUBE)
    assert res.value == 0.0


EXPONENTS = [
    constant_exponent(1.5),
    constant_exponent(3.0),
    log_decay_exponent(2.0, 0.6),
    piecewise_exponent(1.5, 2.5, threshold=0.37),
    bump_exponent(1.4, 0.9, width=0.7),
]

FIELDS = [
    constant_weight(2.0),
    power_weight(-0.3),
    power_weight(0.4),
    callable_field(lambda x: 1.0 + np.abs(np.sin(3 * x[:, 0])), dim=1),
    product_weight(power_weight(-0.2), constant_weight(0.5)),
]


@given(st.integers(0, len(EXPONENTS) - 1), st.integers(0, len(FIELDS) - 1),
       st.floats(min_value=0.05, max_value=20.0))
@settings(max_examples=40)
def test_norm_homogeneity(pi, fi, alpha):
    p, f = EXPONENTS[pi], FIELDS[fi]
    base = luxemburg_norm(f, p, CUBE).value
    scaled = luxemburg_norm(f.scaled(alpha), p, CUBE).value
    assert scaled == pytest.approx(alpha * base, rel=1e-7)


@given(st.integers(0, len(EXPONENTS) - 1), st.integers(0, len(FIELDS) - 1))
@settings(max_examples=25)
def test_norm_modular_sandwich(pi, fi):
    p, f = EXPONENTS[pi], FIELDS[fi]
    res = luxemburg_norm(f, p, CUBE)
    rho = modular(f, p, CUBE)
    lo_exp, hi_exp = 1.0 / p.p_plus, 1.0 / p.p_minus
    lo, hi = rho ** lo_exp, rho ** hi_exp
    if rho < 1.0:
        lo, hi = hi, lo
    assert lo - 1e-8 <= res.value <= hi + 1e-8
    assert res.modular_at_value == pytest.approx(1.0, abs=1e-3)


@given(st.integers(0, len(EXPONENTS) - 1), st.integers(0, len(FIELDS) - 1),
       st.integers(0, len(FIELDS) - 1))
@settings(max_examples=25)
def test_holder_defect_bounds(pi, fi, gi):
    p, f, g = EXPONENTS[pi], FIELDS[fi], FIELDS[gi]
    if p.p_minus <= 1.0:
        return
    defect = holder_defect(f, g, p, CUBE)
    bound = 2.0 if p.p_minus > 1.0 else 3.0
    assert defect <= bound + 1e-6


def test_holder_defect_at_least_one_for_matched_pair():
    # equality direction: for constant p and matched powers the Holder
    # inequality is nearly sharp, so the defect must stay >= 1
    p = constant_exponent(2.0)
    f = power_weight(-0.2)
    defect = holder_defect(f, f, p, CUBE)
    assert 1.0 - 1e-9 <= defect <= 2.0 + 1e-9


def test_weighted_norm_matches_product():
    p = log_decay_exponent(1.7, 0.4)
    f = callable_field(lambda x: 1.0 + x[:, 0] ** 2, dim=1)
    w = power_weight(-0.25)
    direct = weighted_norm(f, w, p, CUBE).value
    via_product = luxemburg_norm(product_weight(f, w), p, CUBE).value
    assert direct == pytest.approx(via_product, rel=1e-10)


def test_unit_characteristic_constant_exponent_is_one():
    p = constant_exponent(2.0)
    fam = CubeFamily(cubes=[CUBE, Cube((0.5,), 1.0), Cube((-0.25,), 0.5)],
                     spec=FamilySpec(dim=1))
    assert unit_characteristic(p, fam) == pytest.approx(1.0, rel=1e-9)


def test_unit_characteristic_variable_exponent_bounded():
    p = log_decay_exponent(1.8, 0.5)
    fam = CubeFamily(cubes=[CUBE, Cube((1.0,), 0.5), Cube((-0.5,), 0.25)],
                     spec=FamilySpec(dim=1))
    value = unit_characteristic(p, fam)
    assert 1.0 - 1e-9 <= value < 4.0


def test_large_cube_norm_constants_finite():
    p = log_decay_exponent(2.0, 0.5)
    fam = [Cube((0.0,), 2.0 ** k) for k in range(1, 5)]
    d1, d2 = large_cube_norm_constants(p, fam)
    assert 0.0 < d1 < math.inf and 0.0 < d2 < math.inf
    # the two max-ratios bound each other's reciprocals
    assert d1 * d2 >= 1.0 - 1e-12


def test_modular_samples_model_consistency():
    p = piecewise_exponent(1.5, 2.5)
    w = power_weight(-0.3)
    model = modular_samples(w, p, CUBE)
    assert not model.is_zero()
    assert model.sample_count > 0
    # the sampled model evaluates the modular of w/lambda for any lambda
    for lam in (0.5, 1.0, 2.0):
        direct = modular(w.scaled(1.0 / lam), p, CUBE)
        assert model.eval(lam) == pytest.approx(direct, rel=1e-9)
    res = model.solve(tol=1e-10)
    assert model.eval(res.value) == pytest.approx(1.0, abs=1e-8)


def test_norm_respects_restriction():
    p = constant_exponent(2.0)
    w = constant_weight(1.0)
    inner = Cube((0.0,), 1.0)
    res = luxemburg_norm(w.restrict(inner), p, CUBE)
    assert res.value == pytest.approx(1.0, rel=1e-10)   # |inner|^(1/2) = 1
