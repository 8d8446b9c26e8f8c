"""Maximum-volume inscribed ellipsoids of symmetric polytopes.

Input is a set of boundary samples ``u_j`` of a symmetric convex body;
the body is approximated from inside by ``conv(±u_j)`` and the John
(maximum-volume inscribed) ellipsoid of that polytope is computed.  The
ellipsoid is returned through the positive definite matrix ``R`` with
``E = {x : |R x| <= 1}``, so ``|R x|`` is the ellipsoidal norm.

When the samples already lie on an ellipsoid (quadratic fit residual is
negligible) the fit is returned directly; this path is exact for bodies
that are ellipsoids, where the polytope route would lose a few parts in
``1e5`` to facet flattening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["EllipsoidResult", "inscribed_ellipsoid_matrix"]

_QUADRIC_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class EllipsoidResult:
    """Shape matrix and provenance of an inscribed-ellipsoid computation."""

    matrix: np.ndarray  # R, symmetric positive definite
    method: str         # "quadric-fit" or "polytope-maxdet"
    residual: float     # quadratic fit residual (max |u^T S u - 1|)
    facets: int         # facet count of the polytope (0 on the fit path)

    def norm(self, x: np.ndarray) -> np.ndarray:
        return np.linalg.norm(np.asarray(x) @ self.matrix.T, axis=-1)


def _symmetric_basis(d: int) -> list:
    basis = []
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d))
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
    return basis


def _fit_quadric(us: np.ndarray) -> tuple:
    """Least-squares fit of ``u^T S u = 1``; returns (S, max residual)."""
    m, d = us.shape
    cols = []
    for i in range(d):
        cols.append(us[:, i] ** 2)
    for i in range(d):
        for j in range(i + 1, d):
            cols.append(2.0 * us[:, i] * us[:, j])
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, np.ones(m), rcond=None)
    s = np.zeros((d, d))
    idx = 0
    for i in range(d):
        s[i, i] = coef[idx]
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            s[i, j] = s[j, i] = coef[idx]
            idx += 1
    residual = float(np.max(np.abs(design @ coef - 1.0))) if m else math.inf
    return s, residual


def _polytope_facets(us: np.ndarray) -> np.ndarray:
    """Facet normals ``a_i`` of ``conv(±u_j)`` scaled so facets are ``a_i . x = 1``."""
    d = us.shape[1]
    pts = np.vstack([us, -us])
    if d == 1:
        top = float(np.max(np.abs(pts)))
        if top <= 0:
            raise DomainError("all boundary samples are zero")
        return np.array([[1.0 / top]])
    from scipy.spatial import ConvexHull

    hull = ConvexHull(pts)
    # hull.equations rows are [normal, offset] with normal.x + offset <= 0
    normals = hull.equations[:, :-1]
    offsets = hull.equations[:, -1]
    if np.any(offsets >= -1e-14):
        raise DomainError("hull facet passes through the origin; "
                          "boundary samples do not span a solid body")
    facets = normals / (-offsets[:, None])
    # symmetric body: keep one representative per +-pair
    seen = []
    kept = []
    for a in facets:
        key = tuple(np.round(a, 12))
        neg = tuple(np.round(-a, 12))
        if key in seen or neg in seen:
            continue
        seen.append(key)
        kept.append(a)
    return np.asarray(kept)


def _maxdet_inscribed(facets: np.ndarray) -> np.ndarray:
    """Maximize ``log det Y`` over ``a_i^T Y a_i <= 1``; returns ``Y``.

    Log-barrier path following with exact Newton steps; the problem has
    at most six unknowns, so dense linear algebra per step is trivial.
    """
    m, d = facets.shape
    basis = _symmetric_basis(d)
    k = len(basis)
    # a_i^T E_k a_i, precomputed: (m, k)
    quad = np.column_stack([np.einsum("ij,jl,il->i", facets, e, facets)
                            for e in basis])

    norms_sq = np.einsum("ij,ij->i", facets, facets)
    y = np.eye(d) * (0.9 / float(np.max(norms_sq)))

    def slacks(mat: np.ndarray) -> np.ndarray:
        return 1.0 - np.einsum("ij,jl,il->i", facets, mat, facets)

    def objective(mat: np.ndarray, mu: float) -> float:
        s = slacks(mat)
        if np.any(s <= 0):
            return -math.inf
        sign, logdet = np.linalg.slogdet(mat)
        if sign <= 0:
            return -math.inf
        return logdet + mu * float(np.sum(np.log(s)))

    mu = 1.0
    for _ in range(60):  # barrier stages
        for _ in range(80):  # Newton iterations per stage
            y_inv = np.linalg.inv(y)
            s = slacks(y)
            grad_mat = y_inv - mu * np.einsum("i,ij,il->jl", 1.0 / s,
                                              facets, facets)
            grad = np.array([np.sum(grad_mat * e) for e in basis])
            hess = np.empty((k, k))
            for a in range(k):
                ya = y_inv @ basis[a] @ y_inv
                for b in range(a, k):
                    val = -np.sum(ya * basis[b]) \
                        - mu * float(np.sum(quad[:, a] * quad[:, b] / s ** 2))
                    hess[a, b] = hess[b, a] = val
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                break
            direction = sum(c * e for c, e in zip(step, basis))
            # Newton decrement for the concave objective: grad @ step >= 0
            decrement = float(grad @ step)
            if decrement < 1e-13:
                break
            base = objective(y, mu)
            t = 1.0
            accepted = False
            for _ in range(50):
                cand = y + t * direction
                if np.all(np.linalg.eigvalsh(cand) > 0) \
                        and np.all(slacks(cand) > 0) \
                        and objective(cand, mu) >= base + 0.25 * t * decrement:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
            y = y + t * direction
        if mu < 1e-13:
            break
        mu *= 0.2
    return y


def inscribed_ellipsoid_matrix(us: np.ndarray) -> EllipsoidResult:
    """John ellipsoid of ``conv(±u_j)`` as a norm matrix ``R``.

    Guarantees by construction ``|R u_j| >= 1`` for every sample up to
    solver tolerance (the ellipsoid is inscribed), and by John's theorem
    the polytope sits inside ``sqrt(d) * E``.
    """
    us = np.atleast_2d(np.asarray(us, dtype=float))
    if us.ndim != 2:
        raise DomainError("boundary samples must form an (m, d) array")
    m, d = us.shape
    if m < d:
        raise DomainError(f"need at least {d} samples in dimension {d}")
    if not np.all(np.isfinite(us)):
        raise DomainError("boundary samples must be finite")

    s_fit, residual = _fit_quadric(us)
    eigvals = np.linalg.eigvalsh(s_fit)
    if residual <= _QUADRIC_RESIDUAL_TOL and np.all(eigvals > 0):
        r = _sqrtm_spd(s_fit)
        return EllipsoidResult(matrix=r, method="quadric-fit",
                               residual=residual, facets=0)

    facets = _polytope_facets(us)
    y = _maxdet_inscribed(facets)
    r = _sqrtm_spd(np.linalg.inv(y))
    return EllipsoidResult(matrix=r, method="polytope-maxdet",
                           residual=residual, facets=2 * len(facets))


def _sqrtm_spd(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    if np.any(vals <= 0):
        raise DomainError("shape matrix is not positive definite")
    return (vecs * np.sqrt(vals)) @ vecs.T
