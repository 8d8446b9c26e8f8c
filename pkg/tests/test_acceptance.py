"""Acceptance gate: ten numbered criteria, one pass/fail line each.

Each test prints ``criterion N: PASS — <detail>`` on success; a failing
criterion fails its test, so the pytest report carries the fail line.
Run with ``pytest -v tests/test_acceptance.py`` to see one line per
criterion.
"""

import math
import time

import numpy as np
import pytest

from varweights.errors import NonIntegrableError
from varweights.exponents import (bump_exponent, constant_exponent,
                                  log_decay_exponent, piecewise_exponent)
from varweights.fields import (callable_field, constant_weight,
                               indicator_field, power_weight, product_weight)
from varweights.geometry import Cube, CubeFamily, FamilySpec, build_family
from varweights.matrices import (TestField as MatrixTestField,
                                 averaging_norm_lower_bound,
                                 averaging_ratio_rows, constant_matrix_weight,
                                 diagonal_power_weight, matrix_from_scalar,
                                 matrix_characteristic_on_cube,
                                 matrix_openness_sweep,
                                 reduced_characteristic_on_cube,
                                 reducing_operator)
from varweights.norms import holder_defect, luxemburg_norm, modular
from varweights.quadrature import IntegrationPlan, SingularPoint, integrate_cube
from varweights.scalar import (classical_ap_characteristic,
                               fit_ainfty_constants,
                               muckenhoupt_characteristic, openness_sweep,
                               reverse_holder_exponent,
                               verify_average_reverse_holder,
                               verify_norm_reverse_holder)

_SUITE_START = time.perf_counter()
_SUITE_BUDGET_SECONDS = 600.0


def _report(num, detail):
    print(f"criterion {num}: PASS — {detail}")


def _single_cube_family(cube):
    return CubeFamily(cubes=[cube], spec=FamilySpec(dim=cube.dim))


# ---------------------------------------------------------------- criterion 1

def test_criterion_01_norm_oracle():
    start = time.perf_counter()
    p = piecewise_exponent(2.0, 3.0)
    cube = Cube((0.0,), 2.0)
    value = luxemburg_norm(indicator_field(cube), p, cube).value
    elapsed = time.perf_counter() - start
    # the norm solves lambda**-2 + lambda**-3 = 1, i.e. the real root of
    # t**3 - t - 1 (computed independently from the cubic)
    roots = np.roots([1.0, 0.0, -1.0, -1.0])
    oracle = float([r.real for r in roots
                    if abs(r.imag) < 1e-12 and r.real > 0][0])
    assert abs(value - oracle) <= 1e-6
    assert abs(value - 1.3247180) <= 1e-6
    assert elapsed < 1.0
    _report(1, f"norm {value:.9f} vs cubic root {oracle:.9f}, "
               f"{elapsed * 1e3:.0f} ms")


# ---------------------------------------------------------------- criterion 2

def _random_exponent(rng, dim):
    # exponent jumps across a hyperplane are only resolvable in 1-D, where
    # the jump locus is a point the mesh can grade toward
    kind = rng.integers(0, 4 if dim == 1 else 3)
    if kind == 0:
        return constant_exponent(float(rng.uniform(1.05, 3.0)), dim=dim)
    if kind == 1:
        base = float(rng.uniform(1.1, 2.2))
        return log_decay_exponent(base, float(rng.uniform(0.1, 0.8)), dim=dim)
    if kind == 2:
        base = float(rng.uniform(1.05, 2.0))
        return bump_exponent(base, float(rng.uniform(0.1, 1.0)),
                             width=float(rng.uniform(0.3, 1.5)),
                             center=tuple(rng.uniform(-1, 1, dim)), dim=dim)
    lo, hi = sorted(rng.uniform(1.05, 3.0, size=2))
    return piecewise_exponent(float(lo), float(hi), dim=dim,
                              threshold=float(rng.uniform(0.1, 0.4)))


def _random_field(rng, dim, p_plus, singular_center):
    kind = rng.integers(0, 4)
    if kind == 0:
        return constant_weight(float(rng.uniform(0.2, 3.0)), dim=dim)
    if kind == 1:
        # keep the declared modular power integrable (a * p_plus > -dim); in
        # higher dimensions stay at a * p_plus >= -1 so the graded tensor
        # mesh converges within the quadrature tolerance
        lo = -0.9 * dim / p_plus if dim == 1 else -0.5 * dim / p_plus
        a = float(rng.uniform(lo, 0.8))
        return power_weight(a, center=singular_center, dim=dim)
    if kind == 2:
        freq = float(rng.uniform(0.5, 3.0))
        shift = float(rng.uniform(0.5, 2.0))
        return callable_field(
            lambda x, f=freq, s=shift: s + np.cos(f * x[:, 0]), dim=dim)
    a = float(rng.uniform(-0.4 * dim / p_plus, 0.4))
    scale = float(rng.uniform(0.3, 2.0))
    return product_weight(power_weight(a, center=singular_center, dim=dim),
                          constant_weight(scale, dim=dim))


def _random_cube(rng, dim, singular_center):
    side = float(rng.uniform(0.4, 2.5))
    mode = rng.integers(0, 3)
    if mode == 0:
        center = tuple(singular_center)          # singularity at the center
    elif mode == 1:
        center = tuple(np.asarray(singular_center)
                       + rng.uniform(-0.2, 0.2, dim) * side)
    else:
        center = tuple(np.asarray(singular_center)
                       + (1.0 + rng.uniform(0.2, 1.0, dim)) * side)
    return Cube(center, side)


def test_criterion_02_norm_modular_suite():
    rng = np.random.default_rng(20260826)
    failures = []
    for case in range(100):
        dim = 2 if case % 7 == 0 else 1
        p = _random_exponent(rng, dim)
        singular_center = tuple(rng.uniform(-0.5, 0.5, dim))
        f = _random_field(rng, dim, p.p_plus, singular_center)
        cube = _random_cube(rng, dim, singular_center)
        res = luxemburg_norm(f, p, cube)
        rho = modular(f, p, cube)
        ok = 0.999 <= res.modular_at_value <= 1.001
        lo, hi = rho ** (1.0 / p.p_plus), rho ** (1.0 / p.p_minus)
        if rho < 1.0:
            lo, hi = hi, lo
        ok = ok and (lo - 1e-9 <= res.value <= hi + 1e-9)
        if not ok:
            failures.append((case, res.value, res.modular_at_value, lo, hi))
    assert not failures, failures
    _report(2, "100/100 randomized cases: modular at norm in [0.999, 1.001] "
               "and norm within the modular sandwich")


# ---------------------------------------------------------------- criterion 3

def test_criterion_03_holder_suite():
    rng = np.random.default_rng(402)
    worst_all, worst_strict = 0.0, 0.0
    violations = []
    for case in range(200):
        dim = 1
        p = _random_exponent(rng, dim)
        singular_center = tuple(rng.uniform(-0.5, 0.5, dim))
        f = _random_field(rng, dim, max(p.p_plus, 4.0), singular_center)
        g = _random_field(rng, dim, max(p.conjugate().p_plus, 4.0),
                          singular_center)
        cube = _random_cube(rng, dim, singular_center)
        defect = holder_defect(f, g, p, cube)
        worst_all = max(worst_all, defect)
        bound = 2.0 if p.p_minus > 1.0 else 3.0
        if defect > bound + 1e-6:
            violations.append((case, defect, bound))
        if p.p_minus > 1.0:
            worst_strict = max(worst_strict, defect)
    assert not violations, violations
    assert worst_all <= 3.0 + 1e-6
    assert worst_strict <= 2.0 + 1e-6
    _report(3, f"200/200 cases; worst defect {worst_all:.4f} <= 2 "
               "(p_minus > 1 throughout), no violations beyond 1e-6")


# ---------------------------------------------------------------- criterion 4

def _dyadic_family_to_level(min_side_level):
    spec = FamilySpec(dim=1, box_halfwidth=1.0, min_level=-4, max_level=1,
                      dense_min_level=-4, shrink_levels=1 - min_side_level,
                      random_cubes=4, seed=3)
    return build_family(spec, singular_points=((0.0,),))


def test_criterion_04_power_weight_boundary():
    start = time.perf_counter()
    w = power_weight(-0.5)
    fam = _dyadic_family_to_level(-12)
    sides = [c.side for c in fam]
    assert min(sides) <= 2.0 ** -12

    # inside the class: p = 1.5 stabilizes along the shrinking cubes
    rep_ok = muckenhoupt_characteristic(w, constant_exponent(1.5), fam)
    assert not rep_ok.divergent
    idx = fam.shrink_groups[(0.0,)]
    ladder = sorted((fam.cubes[i].side, rep_ok.rows[i].value) for i in idx)
    (s_a, v_a), (s_b, v_b) = ladder[0], ladder[1]   # two smallest levels
    assert s_b <= 2.0 ** -11 and s_a <= 2.0 ** -12
    assert abs(v_a - v_b) <= 0.01 * max(v_a, v_b)

    # outside the class: p = 2.5 trips the divergence flag
    rep_bad = muckenhoupt_characteristic(w, constant_exponent(2.5), fam)
    assert rep_bad.divergent
    assert rep_bad.witness is not None

    # growth exhibit: with the integrability gate disabled (declared point,
    # undeclared power) the refinement-ladder estimates of the modular of
    # w at p = 2.5 grow by a factor >= 2 per rung, and each rung halves
    # the innermost resolution scale twice
    plan = IntegrationPlan(max_depth=12).with_singularities(
        (SingularPoint((0.0,), None),))
    with pytest.raises(NonIntegrableError) as err:
        integrate_cube(lambda pts: np.abs(pts[:, 0]) ** (-0.5 * 2.5),
                       Cube((0.0,), 2.0), plan)
    estimates = err.value.estimates
    growth = [b / a for a, b in zip(estimates[:-1], estimates[1:])]
    assert len(growth) >= 2
    assert all(g >= 2.0 for g in growth)

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report(4, f"p=1.5 stable at sides 2^-12/2^-11 "
               f"(rel gap {abs(v_a - v_b) / v_a:.2e}); p=2.5 DIVERGENT, "
               f"ladder growth {min(growth):.3f}x per rung; {elapsed:.1f} s")


# ---------------------------------------------------------------- criterion 5

def test_criterion_05_constant_exponent_consistency():
    p0 = 2.0
    w = power_weight(-0.25)
    v = power_weight(-0.5)    # v = w**2
    rng = np.random.default_rng(5)
    cubes = [Cube((0.0,), 2.0), Cube((0.0,), 0.5)]
    while len(cubes) < 20:
        side = float(rng.uniform(0.2, 2.0))
        center = float(rng.uniform(-1.0, 1.0))
        cubes.append(Cube((center,), side))
    fam = CubeFamily(cubes=cubes, spec=FamilySpec(dim=1))
    rep_w = muckenhoupt_characteristic(w, constant_exponent(p0), fam)
    rep_v = classical_ap_characteristic(v, p0, fam)
    gaps = [abs(rw.value - rv.value ** (1.0 / p0))
            for rw, rv in zip(rep_w.rows, rep_v.rows)]
    assert len(gaps) == 20
    assert max(gaps) <= 1e-6
    _report(5, f"20/20 cubes: |multiplier char - classical char^(1/2)| "
               f"max {max(gaps):.2e} <= 1e-6")


# ---------------------------------------------------------------- criterion 6

def test_criterion_06_reverse_holder_chain():
    start = time.perf_counter()
    v = power_weight(-0.5)
    spec = FamilySpec(dim=1, box_halfwidth=1.0, min_level=-6, max_level=0,
                      shrink_levels=8, random_cubes=6, seed=9)
    fam = build_family(spec, singular_points=((0.0,),))
    est = fit_ainfty_constants(v, constant_exponent(1.5), fam)
    r = reverse_holder_exponent(est.delta, est.c1, 1)
    assert 1.0 < r < 1.5
    cert = verify_average_reverse_holder(v, r, fam, factor=2.0)
    assert cert.verified
    assert not cert.divergent
    violations = [row for row in cert.rows
                  if not row.finite or row.value > 2.0 + 1e-9]
    assert not violations
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report(6, f"fit delta={est.delta:.4f}, C1={est.c1:.4f} -> r={r:.5f}; "
               f"avg reverse Holder verified on {len(cert.rows)} cubes "
               f"(minimal c {cert.minimal_c:.4f} <= 2); {elapsed:.1f} s")


# ---------------------------------------------------------------- criterion 7

def test_criterion_07_norm_rh_reduction():
    rng = np.random.default_rng(707)
    cases = mismatches = 0
    near_ties = []
    while cases < 50:
        p0 = float(rng.uniform(1.2, 2.8))
        a = float(rng.uniform(-0.55, -0.05))
        r = float(rng.uniform(1.05, 1.8))
        if a * p0 * r <= -0.98:       # keep clear of the integrability edge
            continue
        side = float(rng.uniform(0.3, 2.0))
        center = float(rng.uniform(-0.3, 0.3)) * side
        cube = Cube((center,), side)
        w = power_weight(a)
        v = power_weight(a * p0)      # v = w**p0
        fam = _single_cube_family(cube)
        avg = verify_average_reverse_holder(v, r, fam, factor=2.0)
        budget = 2.0 ** (1.0 / (r * p0))
        nrm = verify_norm_reverse_holder(w, constant_exponent(p0), r, fam,
                                         budget)
        if avg.verified != nrm.verified:
            mismatches += 1
        if avg.rows[0].finite and abs(avg.rows[0].value - 2.0) < 1e-4:
            near_ties.append(cases)
        cases += 1
    assert mismatches == 0
    assert not near_ties   # seeded cases stay away from the budget boundary
    _report(7, "50/50 constant-exponent cases: norm-form reverse Holder "
               "decision matches the classical averaging decision")


# ---------------------------------------------------------------- criterion 8

def test_criterion_08_reducing_operator_sandwich():
    weight = diagonal_power_weight([-0.5, 0.0], dim=2)
    p = constant_exponent(1.5, dim=2)
    rng = np.random.default_rng(88)
    cubes = [Cube((0.0, 0.0), 1.0), Cube((0.0, 0.5), 0.5)]
    while len(cubes) < 10:
        side = float(rng.uniform(0.3, 1.2))
        cx = float(rng.uniform(-0.8, 0.8))
        cy = float(rng.uniform(-0.8, 0.8))
        cubes.append(Cube((cx, cy), side))
    limit = math.sqrt(2.0) * (1.0 + 1e-4)
    worst_hi, worst_lo = 0.0, math.inf
    for cube in cubes:
        red = reducing_operator(weight, p, cube, holdout=64)
        assert red.direction_samples >= 64
        worst_hi = max(worst_hi, red.sandwich_factor)
        worst_lo = min(worst_lo, red.lower_margin)
    assert worst_lo >= 1.0 - 1e-6
    assert worst_hi <= limit

    # scalar-multiple and constant-matrix weights: the norm ball is an
    # exact ellipsoid, so the sandwich collapses to a tight fit
    tight_cases = [
        matrix_from_scalar(power_weight(-0.4, dim=2), size=2),
        constant_matrix_weight(np.array([[2.0, 0.6], [0.6, 1.0]]), dim=2),
    ]
    for tw in tight_cases:
        red = reducing_operator(tw, p, Cube((0.3, 0.1), 0.8), holdout=64)
        assert red.sandwich_factor <= 1.0 + 1e-6
        assert red.lower_margin >= 1.0 - 1e-6
    _report(8, f"10/10 cubes: {worst_lo:.6f} <= |Re|/r(e) <= "
               f"{worst_hi:.6f} <= sqrt(2)(1+1e-4); tight cases within 1+1e-6")


# ---------------------------------------------------------------- criterion 9

def test_criterion_09_dimension_one_reduction():
    w = power_weight(-0.3)
    p = log_decay_exponent(1.7, 0.4)
    weight = matrix_from_scalar(w, size=1)
    rng = np.random.default_rng(99)
    cubes = [Cube((0.0,), 1.0)]
    while len(cubes) < 10:
        side = float(rng.uniform(0.25, 1.5))
        center = float(rng.uniform(-1.0, 1.0))
        cubes.append(Cube((center,), side))

    worst = {"matrix": 0.0, "reduced": 0.0, "averaging": 0.0}
    for cube in cubes:
        fam = _single_cube_family(cube)
        scalar_char = muckenhoupt_characteristic(w, p, fam).value

        matrix_char, _ = matrix_characteristic_on_cube(weight, p, cube)
        worst["matrix"] = max(worst["matrix"],
                              abs(matrix_char - scalar_char) / scalar_char)

        reduced = reduced_characteristic_on_cube(weight, p, cube)
        worst["reduced"] = max(worst["reduced"],
                               abs(reduced - scalar_char) / scalar_char)

        # averaging lower bound vs an independently assembled scalar route:
        # for f = chi_S the averaged field is w(x) * avg_Q(w^-1 chi_S), so
        # the ratio is avg * norm_p(w chi_Q) / norm_p(chi_S)
        fields = [MatrixTestField(direction=(1.0,), subcube=sub)
                  for sub in [cube] + cube.children()]
        bound = averaging_norm_lower_bound(weight, cube, p,
                                           test_fields=fields)
        scalar_ratios = []
        for tf in fields:
            sub = tf.subcube
            avg = integrate_cube(
                lambda pts: np.abs(pts[:, 0]) ** 0.3, sub,
                IntegrationPlan().with_singularities(
                    (SingularPoint((0.0,), 0.3),))) / cube.measure
            numer = avg * luxemburg_norm(w.restrict(cube), p, cube).value
            denom = luxemburg_norm(indicator_field(sub), p, cube).value
            scalar_ratios.append(numer / denom)
        scalar_bound = max(scalar_ratios)
        worst["averaging"] = max(worst["averaging"],
                                 abs(bound - scalar_bound) / scalar_bound)

    assert worst["matrix"] <= 1e-6
    assert worst["reduced"] <= 1e-6
    assert worst["averaging"] <= 1e-6
    _report(9, "10/10 cubes in d=1: matrix char, reduced char, averaging "
               f"bound match scalar routes (worst rel gaps "
               f"{worst['matrix']:.1e}, {worst['reduced']:.1e}, "
               f"{worst['averaging']:.1e})")


# --------------------------------------------------------------- criterion 10

def test_criterion_10_openness_sweeps():
    w = power_weight(-0.5)
    p = constant_exponent(1.5)
    spec = FamilySpec(dim=1, box_halfwidth=1.0, min_level=-3, max_level=0,
                      shrink_levels=4, random_cubes=2, seed=10)
    fam = build_family(spec, singular_points=((0.0,),))

    s_grid = [1.0, 1.1, 1.2, 1.3, 1.34, 1.4]
    sweep = openness_sweep(w, p, fam, s_grid, side="right")
    by_s = {row.s: row.divergent for row in sweep.rows}
    assert not any(by_s[s] for s in (1.0, 1.1, 1.2, 1.3))
    assert by_s[1.34] and by_s[1.4]
    assert sweep.boundary == pytest.approx(1.34)

    left = openness_sweep(w, p, fam, [1.0, 1.02, 1.05], side="left")
    assert all(not row.divergent for row in left.rows)

    matrix_weight = diagonal_power_weight([-0.5, 0.0], dim=1)
    small = CubeFamily(cubes=[Cube((0.0,), 1.0), Cube((0.25,), 0.5)],
                       spec=FamilySpec(dim=1))
    msweep = matrix_openness_sweep(matrix_weight, p, small,
                                   [1.0, 1.3, 1.34, 1.4])
    mby_s = {row.s: row.divergent for row in msweep.rows}
    assert not mby_s[1.0] and not mby_s[1.3]
    assert mby_s[1.34] and mby_s[1.4]
    assert msweep.boundary == pytest.approx(1.34)

    total = time.perf_counter() - _SUITE_START
    assert total < _SUITE_BUDGET_SECONDS
    _report(10, f"scalar right sweep finite through 1.3, divergent from "
                f"1.34; left sweep finite near 1; matrix sweep boundary "
                f"1.34; acceptance suite {total:.0f} s < 600 s")
