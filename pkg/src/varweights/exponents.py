"""Variable exponent functions with declared bounds and log-Holder data.

An exponent function carries its essential bounds ``p_minus``/``p_plus``,
its value at infinity ``p_infty``, and the two log-Holder constants as
declared metadata.  The declarations are inputs, not derived quantities;
:func:`ExponentFunction.validate_on` and :func:`fit_log_holder_constants`
check them against samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .quadrature import IntegrationPlan, integrate_cube

__all__ = [
    "ExponentFunction",
    "constant_exponent",
    "log_decay_exponent",
    "piecewise_exponent",
    "bump_exponent",
    "harmonic_mean",
    "fit_log_holder_constants",
    "diening_constant",
]

_TO_MAX_NEG_LOG = 0.5  # the local log-Holder condition applies for |x-y| < 1/2


@dataclass(frozen=True)
class ExponentFunction:
    """A measurable exponent ``p`` with declared metadata.

    ``fn`` maps an ``(N, dim)`` point array to ``(N,)`` exponent values in
    ``[p_minus, p_plus]``.  ``refinement_points`` lists locations where the
    function is not smooth (kinks, jumps); quadrature grids grade toward
    them.  ``lh_local``/``lh_infinity`` are the declared log-Holder
    constants; ``math.inf`` is allowed and means "no continuity claimed"
    (e.g. step exponents).
    """

    fn: object
    dim: int
    p_minus: float
    p_plus: float
    p_infty: float
    lh_local: float
    lh_infinity: float
    refinement_points: tuple = ()
    label: str = "exponent"

    def __post_init__(self):
        if not (1.0 <= self.p_minus <= self.p_plus):
            raise DomainError(
                f"need 1 <= p_minus <= p_plus, got [{self.p_minus}, {self.p_plus}]")
        if not math.isfinite(self.p_plus):
            raise DomainError("p_plus must be finite (essentially bounded exponents only)")
        if not (self.p_minus <= self.p_infty <= self.p_plus):
            raise DomainError("p_infty must lie within [p_minus, p_plus]")

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None] if self.dim == 1 else pts[None, :]
        vals = np.asarray(self.fn(pts), dtype=float)
        return vals

    def at(self, point) -> float:
        return float(self(np.atleast_2d(np.asarray(point, dtype=float)))[0])

    def conjugate(self) -> "ExponentFunction":
        """The pointwise conjugate ``p' = p / (p - 1)``.

        Requires ``p_minus > 1`` so the conjugate stays bounded.
        """
        if self.p_minus <= 1.0:
            raise DomainError("conjugate is unbounded where p = 1; need p_minus > 1")
        base = self

        def conj(pts):
            v = base(pts)
            return v / (v - 1.0)

        lh_scale = 1.0 / (self.p_minus - 1.0) ** 2
        lhinf_scale = 1.0 / ((self.p_minus - 1.0) * (self.p_infty - 1.0))
        return ExponentFunction(
            fn=conj, dim=self.dim,
            p_minus=self.p_plus / (self.p_plus - 1.0),
            p_plus=self.p_minus / (self.p_minus - 1.0),
            p_infty=self.p_infty / (self.p_infty - 1.0),
            lh_local=self.lh_local * lh_scale,
            lh_infinity=self.lh_infinity * lhinf_scale,
            refinement_points=self.refinement_points,
            label=f"conj({self.label})")

    def scale(self, s: float) -> "ExponentFunction":
        """The exponent ``s * p`` for ``s >= 1/p_minus`` (keeps values >= 1)."""
        if s * self.p_minus < 1.0 - 1e-12:
            raise DomainError(f"scaling by {s} drops the exponent below 1")
        base = self

        def scaled(pts):
            return s * base(pts)

        return ExponentFunction(
            fn=scaled, dim=self.dim, p_minus=s * self.p_minus,
            p_plus=s * self.p_plus, p_infty=s * self.p_infty,
            lh_local=s * self.lh_local, lh_infinity=s * self.lh_infinity,
            refinement_points=self.refinement_points,
            label=f"{s:g}*{self.label}")

    def left_compose(self, s: float) -> "ExponentFunction":
        """The exponent ``q`` defined through the conjugate: ``q' = s * p'``.

        Explicitly ``q = s p / ((s - 1) p + 1)``, the left-opened exponent.
        """
        if s < 1.0:
            raise DomainError("left composition needs s >= 1")
        if self.p_minus <= 1.0:
            raise DomainError("left composition needs p_minus > 1")
        base = self

        def lowered(pts):
            v = base(pts)
            return s * v / ((s - 1.0) * v + 1.0)

        def phi(t):
            return s * t / ((s - 1.0) * t + 1.0)

        # |phi'(t)| = s / ((s-1) t + 1)^2 <= s for t >= 1
        return ExponentFunction(
            fn=lowered, dim=self.dim, p_minus=phi(self.p_minus),
            p_plus=phi(self.p_plus), p_infty=phi(self.p_infty),
            lh_local=s * self.lh_local, lh_infinity=s * self.lh_infinity,
            refinement_points=self.refinement_points,
            label=f"leftop({self.label},{s:g})")

    def validate_on(self, points, rtol: float = 1e-9) -> None:
        """Check declared bounds and log-Holder inequalities on samples.

        Raises :class:`DomainError` on violation.  Points should include
        close pairs (for the local condition) and far points (for the decay
        condition).
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        vals = self(pts)
        lo, hi = vals.min(), vals.max()
        if lo < self.p_minus - rtol * max(1.0, abs(self.p_minus)):
            raise DomainError(f"sampled value {lo} below declared p_minus {self.p_minus}")
        if hi > self.p_plus + rtol * max(1.0, abs(self.p_plus)):
            raise DomainError(f"sampled value {hi} above declared p_plus {self.p_plus}")
        if math.isfinite(self.lh_local):
            d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            close = (d > 0) & (d < _TO_MAX_NEG_LOG)
            if np.any(close):
                gap = np.abs(vals[:, None] - vals[None, :])[close]
                bound = self.lh_local / (-np.log(d[close]))
                worst = np.max(gap - bound)
                if worst > rtol:
                    raise DomainError(
                        f"local log-Holder violation by {worst:.3g} "
                        f"(declared constant {self.lh_local})")
        if math.isfinite(self.lh_infinity):
            radii = np.linalg.norm(pts, axis=-1)
            lhs = np.abs(vals - self.p_infty) * np.log(math.e + radii)
            worst = float(np.max(lhs)) - self.lh_infinity
            if worst > rtol:
                raise DomainError(
                    f"decay log-Holder violation by {worst:.3g} "
                    f"(declared constant {self.lh_infinity})")


def constant_exponent(value: float, dim: int = 1) -> ExponentFunction:
    v = float(value)

    def fn(pts):
        return np.full(pts.shape[0], v)

    return ExponentFunction(fn=fn, dim=dim, p_minus=v, p_plus=v, p_infty=v,
                            lh_local=0.0, lh_infinity=0.0,
                            label=f"const({v:g})")


def log_decay_exponent(base: float, amplitude: float, dim: int = 1) -> ExponentFunction:
    """``p(x) = base + amplitude / log(e + |x|)``; tends to ``base`` at infinity.

    The decay constant is exactly ``amplitude``; the local constant follows
    from the gradient bound ``amplitude / e`` and ``sup t(-log t) = 1/e``
    on ``(0, 1/2)``.
    """
    if amplitude < 0:
        raise DomainError("amplitude must be nonnegative")
    b, a = float(base), float(amplitude)

    def fn(pts):
        r = np.linalg.norm(pts, axis=-1)
        return b + a / np.log(math.e + r)

    return ExponentFunction(
        fn=fn, dim=dim, p_minus=b, p_plus=b + a, p_infty=b,
        lh_local=a / math.e * 0.37 if a else 0.0,
        lh_infinity=a,
        refinement_points=((0.0,) * dim,),
        label=f"logdecay({b:g},{a:g})")


def piecewise_exponent(left: float, right: float, dim: int = 1, axis: int = 0,
                       threshold: float = 0.0) -> ExponentFunction:
    """Step exponent: ``left`` where ``x[axis] < threshold``, else ``right``.

    Not log-Holder continuous (both constants are infinite); still valid
    for norms and modulars.  The jump location is a refinement point.
    """
    l, r = float(left), float(right)

    def fn(pts):
        return np.where(pts[..., axis] < threshold, l, r)

    point = [0.0] * dim
    point[axis] = threshold
    return ExponentFunction(
        fn=fn, dim=dim, p_minus=min(l, r), p_plus=max(l, r),
        p_infty=min(l, r), lh_local=math.inf, lh_infinity=math.inf,
        refinement_points=(tuple(point),),
        label=f"step({l:g},{r:g})")


def bump_exponent(base: float, amplitude: float, width: float = 1.0,
                  center=None, dim: int = 1) -> ExponentFunction:
    """Smooth exponent ``base + amplitude * exp(-|x - c|^2 / width^2)``."""
    if amplitude < 0:
        raise DomainError("amplitude must be nonnegative")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    b, a, w = float(base), float(amplitude), float(width)

    def fn(pts):
        r2 = np.sum((pts - c) ** 2, axis=-1)
        return b + a * np.exp(-r2 / w ** 2)

    # |grad| <= a * sqrt(2/e) / w; sup of t(-log t) on (0, 1/2) is 1/e
    lip = a * math.sqrt(2.0 / math.e) / w
    return ExponentFunction(
        fn=fn, dim=dim, p_minus=b, p_plus=b + a, p_infty=b,
        lh_local=lip / math.e + 1e-12, lh_infinity=a * 10.0,
        label=f"bump({b:g},{a:g},{w:g})")


def harmonic_mean(p: ExponentFunction, cube, plan: IntegrationPlan | None = None) -> float:
    """The cube-level exponent ``p_Q``: ``1 / p_Q = average of 1/p over Q``."""
    plan = plan or IntegrationPlan()
    plan = plan.with_singularities(
        tuple((pt, None) for pt in p.refinement_points))

    def recip(pts):
        return 1.0 / p(pts)

    mean = integrate_cube(recip, cube, plan) / cube.measure
    return 1.0 / mean


def fit_log_holder_constants(p: ExponentFunction, points) -> tuple:
    """Smallest constants making the two log-Holder inequalities hold on a grid.

    Returns ``(lh_local_hat, lh_infinity_hat, p_infty_hat)``.  The limit
    value ``p_infty_hat`` is chosen to minimize the decay constant; the
    minimax objective is convex in the candidate limit, so golden-section
    search converges.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    vals = p(pts)

    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    close = (d > 0) & (d < _TO_MAX_NEG_LOG)
    if np.any(close):
        gap = np.abs(vals[:, None] - vals[None, :])[close]
        lh_local = float(np.max(gap * (-np.log(d[close]))))
    else:
        lh_local = 0.0

    logs = np.log(math.e + np.linalg.norm(pts, axis=-1))

    def decay_const(c):
        return float(np.max(np.abs(vals - c) * logs))

    lo, hi = float(vals.min()), float(vals.max())
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1, c2 = b - phi * (b - a), a + phi * (b - a)
    f1, f2 = decay_const(c1), decay_const(c2)
    for _ in range(200):
        if b - a < 1e-13 * max(1.0, abs(b)):
            break
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - phi * (b - a)
            f1 = decay_const(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + phi * (b - a)
            f2 = decay_const(c2)
    p_infty_hat = 0.5 * (a + b)
    return lh_local, decay_const(p_infty_hat), p_infty_hat


def diening_constant(dim: int, p_minus: float, p_plus: float, lh_local: float) -> float:
    """Constant controlling ``|Q|^(p_minus(Q) - p_plus(Q))`` on small cubes.

    ``max((2 sqrt(n))^(n (p_plus - p_minus)), exp(C0 (1 + log2(sqrt(n)))))``
    for cubes of measure at most one.
    """
    if dim < 1:
        raise DomainError("dimension must be at least 1")
    if p_plus < p_minus:
        raise DomainError("p_plus must dominate p_minus")
    root = math.sqrt(dim)
    geo = (2.0 * root) ** (dim * (p_plus - p_minus))
    osc = math.exp(lh_local * (1.0 + math.log2(root)))
    return max(geo, osc)
