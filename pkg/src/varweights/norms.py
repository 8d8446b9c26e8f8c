"""Modulars and Luxemburg norms on variable Lebesgue spaces.

The modular of a sampled field is a finite sum ``sum(c_i * lam**(-p_i))``
whose coefficients come from one cubature grid (plus analytic tail
pseudo-samples at declared singularities).  The Luxemburg norm is the root
in ``lam`` of that strictly decreasing function, found by bisection from
the bracket the norm-modular inequalities provide:

    ``rho >= 1  ->  norm in [rho**(1/p_plus), rho**(1/p_minus)]``

and the reversed pair when ``rho < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, InfiniteModularError, NonIntegrableError,
                     QuadratureError)
from .exponents import ExponentFunction
from .fields import ScalarField
from .geometry import Box, Cube
from .quadrature import (Grid, IntegrationPlan, SingularPoint, build_grid,
                         check_integrable, integrate_cube)

__all__ = [
    "NormResult",
    "ModularModel",
    "modular_samples",
    "modular",
    "luxemburg_norm",
    "weighted_norm",
    "holder_defect",
    "unit_characteristic",
    "large_cube_norm_constants",
]

DEFAULT_NORM_TOL = 1e-8
_LADDER_AGREE = 8.0  # modular sums at successive depths must agree this tightly


@dataclass(frozen=True)
class NormResult:
    """Luxemburg norm value with its certification data.

    ``bracket`` is the final bisection bracket (both ends equal the value
    for degenerate constant-exponent solves; ``(0, 0)`` for the zero
    field).  ``modular_at_value`` re-evaluates the modular at the returned
    value and lands within bisection tolerance of one for nonzero fields.
    """

    value: float
    bracket: tuple
    modular_at_value: float
    iterations: int
    sample_count: int = 0


class ModularModel:
    """The sampled modular ``lam -> sum(c_i * lam**(-p_i))``."""

    def __init__(self, coeffs: np.ndarray, powers: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=float)
        powers = np.asarray(powers, dtype=float)
        keep = coeffs > 0.0
        self.coeffs = coeffs[keep]
        self.powers = powers[keep]
        self._log_coeffs = np.log(self.coeffs) if self.coeffs.size else self.coeffs

    @property
    def sample_count(self) -> int:
        return int(self.coeffs.size)

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def total(self) -> float:
        return float(np.sum(self.coeffs))

    def eval(self, lam: float) -> float:
        """Stable evaluation of the modular at scaling ``lam > 0``."""
        if self.is_zero():
            return 0.0
        t = math.log(lam)
        logs = self._log_coeffs - self.powers * t
        m = float(np.max(logs))
        if m == -math.inf:
            return 0.0
        return float(math.exp(m) * np.sum(np.exp(logs - m)))

    def solve(self, tol: float = DEFAULT_NORM_TOL, max_iter: int = 200) -> NormResult:
        """The Luxemburg norm of the sampled field."""
        if self.is_zero():
            return NormResult(0.0, (0.0, 0.0), 0.0, 0, 0)
        p_lo = float(np.min(self.powers))
        p_hi = float(np.max(self.powers))
        log_rho = math.log(self.total())
        if p_hi - p_lo < 1e-15:
            lam = math.exp(log_rho / p_hi)
            return NormResult(lam, (lam, lam), self.eval(lam), 0, self.sample_count)
        if log_rho >= 0.0:
            t_lo, t_hi = log_rho / p_hi, log_rho / p_lo
        else:
            t_lo, t_hi = log_rho / p_lo, log_rho / p_hi
        iterations = 0
        while t_hi - t_lo > tol and iterations < max_iter:
            t_mid = 0.5 * (t_lo + t_hi)
            if self.eval(math.exp(t_mid)) >= 1.0:
                t_lo = t_mid
            else:
                t_hi = t_mid
            iterations += 1
        lam = math.exp(0.5 * (t_lo + t_hi))
        return NormResult(lam, (math.exp(t_lo), math.exp(t_hi)),
                          self.eval(lam), iterations, self.sample_count)


def _domain_box(f: ScalarField, domain) -> Box:
    if domain is None:
        if f.support is None:
            raise DomainError(
                "norms of unsupported whole-space fields are not defined here; "
                "restrict the field to a cube first")
        return f.support
    box = domain.as_box() if isinstance(domain, Cube) else domain
    if f.support is not None:
        box = box.intersect(f.support)
    return box


def _modular_plan(f: ScalarField, p: ExponentFunction,
                  plan: IntegrationPlan) -> IntegrationPlan:
    """Attach integrand powers ``field_power * p(point)`` to the plan."""
    sings = []
    for s in f.singularities:
        sings.append(SingularPoint(s.point, s.power * p.at(s.point)))
    covered = {s.point for s in f.singularities}
    for pt in p.refinement_points:
        key = tuple(float(v) for v in np.atleast_1d(pt))
        if key not in covered:
            sings.append(SingularPoint(key, None))
    return plan.with_singularities(tuple(sings))


def _samples_from_grid(grid: Grid, f: ScalarField, p: ExponentFunction):
    vals = f(grid.points)
    powers = p(grid.points)
    integrand = np.abs(vals) ** powers
    coeffs = grid.weights * integrand
    tail_c, tail_p = [], []
    for t in grid.tails:
        probe_val = float(integrand[t.probe_index])
        tail_c.append(probe_val * t.probe_dist ** (-t.power) * t.scale)
        tail_p.append(float(powers[t.probe_index]))
    if tail_c:
        coeffs = np.concatenate((coeffs, np.asarray(tail_c)))
        powers = np.concatenate((powers, np.asarray(tail_p)))
    return coeffs, powers


def modular_samples(f: ScalarField, p: ExponentFunction, domain=None,
                    plan: IntegrationPlan | None = None) -> ModularModel:
    """Sample the modular of ``f`` with exponent ``p`` over a domain.

    Raises :class:`InfiniteModularError` when a declared singular power
    makes the modular infinite (it then is infinite for every scaling,
    since ``p_plus`` is finite), and :class:`QuadratureError` when the
    refinement ladder cannot certify the sampled sum.
    """
    plan = plan or IntegrationPlan()
    box = _domain_box(f, domain)
    if box.is_empty():
        return ModularModel(np.empty(0), np.empty(0))
    mplan = _modular_plan(f, p, plan)
    try:
        check_integrable(box, mplan)
    except NonIntegrableError as exc:
        raise InfiniteModularError(str(exc)) from exc

    best = None
    estimates = []
    depths = sorted({max(2, mplan.max_depth - 2 * k)
                     for k in range(mplan.ladder_rungs)})
    for depth in depths:
        grid = build_grid(box, mplan, depth=depth)
        coeffs, powers = _samples_from_grid(grid, f, p)
        total = float(np.sum(coeffs))
        estimates.append(total)
        best = (coeffs, powers)
        if len(estimates) >= 2:
            prev, cur = estimates[-2], estimates[-1]
            scale = max(abs(cur), mplan.abs_floor)
            if abs(cur - prev) <= _LADDER_AGREE * mplan.rel_tol * scale:
                return ModularModel(*best)
    growth = [b / a for a, b in zip(estimates[:-1], estimates[1:]) if a > 0 and b > 0]
    if len(growth) >= 2 and all(g >= math.sqrt(2.0) - 1e-12 for g in growth[-2:]):
        raise InfiniteModularError(
            "modular estimates grow geometrically under refinement", estimates)
    raise QuadratureError(
        f"modular did not settle to {mplan.rel_tol:g} at depth {mplan.max_depth}",
        estimates[-2:])


def modular(f: ScalarField, p: ExponentFunction, domain=None,
            plan: IntegrationPlan | None = None) -> float:
    """The modular: integral of ``|f(x)|**p(x)`` over the domain."""
    return modular_samples(f, p, domain, plan).total()


def luxemburg_norm(f: ScalarField, p: ExponentFunction, domain=None,
                   plan: IntegrationPlan | None = None,
                   tol: float = DEFAULT_NORM_TOL) -> NormResult:
    """Luxemburg norm: the scaling at which the modular equals one."""
    model = modular_samples(f, p, domain, plan)
    return model.solve(tol=tol)


def weighted_norm(f: ScalarField, w: ScalarField, p: ExponentFunction,
                  domain=None, plan: IntegrationPlan | None = None,
                  tol: float = DEFAULT_NORM_TOL) -> NormResult:
    """Norm of ``f`` in the weighted space: the Luxemburg norm of ``f * w``."""
    return luxemburg_norm(f * w, p, domain, plan, tol)


def holder_defect(f: ScalarField, g: ScalarField, p: ExponentFunction,
                  cube: Cube, plan: IntegrationPlan | None = None,
                  tol: float = DEFAULT_NORM_TOL) -> float:
    """``integral(|f g|) / (norm_p(f) * norm_conj(g))`` over a cube.

    Zero when either norm vanishes.  Bounded by 3 in general and by 2
    when ``p_minus > 1``.
    """
    plan = plan or IntegrationPlan()
    nf = luxemburg_norm(f, p, cube, plan, tol)
    ng = luxemburg_norm(g, p.conjugate(), cube, plan, tol)
    if nf.value == 0.0 or ng.value == 0.0:
        return 0.0
    prod = f * g
    pplan = plan.with_singularities(
        tuple(SingularPoint(s.point, s.power) for s in prod.singularities))
    box = _domain_box(prod, cube)
    if box.is_empty():
        return 0.0
    numer = integrate_cube(prod, box, pplan)
    return numer / (nf.value * ng.value)


def unit_characteristic(p: ExponentFunction, family,
                        plan: IntegrationPlan | None = None,
                        tol: float = DEFAULT_NORM_TOL) -> float:
    """Characteristic of the unit weight over a cube family.

    ``sup |Q|**(-1) * norm_p(chi_Q) * norm_conj(chi_Q)``; always at least
    a positive constant by the Holder inequality.
    """
    from .fields import indicator_field
    plan = plan or IntegrationPlan()
    pc = p.conjugate()
    worst = 0.0
    for cube in family:
        chi = indicator_field(cube)
        a = luxemburg_norm(chi, p, cube, plan, tol).value
        b = luxemburg_norm(chi, pc, cube, plan, tol).value
        worst = max(worst, a * b / cube.measure)
    return worst


def large_cube_norm_constants(p: ExponentFunction, family,
                              plan: IntegrationPlan | None = None,
                              tol: float = DEFAULT_NORM_TOL) -> tuple:
    """Two-sided comparison of ``norm(chi_Q)`` with ``|Q|**(1/p_infty)``.

    Returns ``(d1_hat, d2_hat)`` with
    ``d1_hat = max |Q|**(1/p_infty) / norm(chi_Q)`` and
    ``d2_hat = max norm(chi_Q) / |Q|**(1/p_infty)`` over family cubes of
    measure at least one; raises when the family has no such cube.
    """
    from .fields import indicator_field
    plan = plan or IntegrationPlan()
    d1, d2 = 0.0, 0.0
    found = False
    for cube in family:
        if cube.measure < 1.0:
            continue
        found = True
        ref = cube.measure ** (1.0 / p.p_infty)
        val = luxemburg_norm(indicator_field(cube), p, cube, plan, tol).value
        d1 = max(d1, ref / val)
        d2 = max(d2, val / ref)
    if not found:
        raise DomainError("family has no cube of measure >= 1")
    return d1, d2
