"""Checks for lambda-symmetry claims and for equivalence of two pairs."""

from __future__ import annotations

import numpy as np

from .expr import (
    DEFAULT_SEED,
    Box,
    Expr,
    compile_expr,
    singular_loci,
    ZERO,
    add,
    as_expr,
    diff,
    div,
    is_zero_sampled,
    mul,
    neg,
    power,
    sub,
    Num,
    Var,
)
from .expr.sampling import LOCUS_EPS
from .jetfield import JetField, LambdaPair, apply, evolution_field, lambda_prolong, lie_bracket


class DegenerateCharacteristic(ValueError):
    pass


def determining_residual(lam, phi) -> Expr:
    lam, phi = as_expr(lam), as_expr(phi)
    ux = Var("ux")
    return add(
        diff(lam, "x"),
        mul(diff(lam, "u"), ux),
        mul(diff(lam, "ux"), phi),
        power(lam, Num(2)),
        neg(diff(phi, "u")),
        neg(mul(lam, diff(phi, "ux"))),
    )


def symmetry_defect(pair: LambdaPair, phi) -> JetField:
    """[V, A] - lam*V - mu*A for the prolonged field V; zero for a symmetry."""
    A = evolution_field(phi)
    V = lambda_prolong(pair, phi)
    mu = neg(add(apply(A, pair.xi), mul(pair.lam, pair.xi)))
    return lie_bracket(V, A) - V.scale(pair.lam) - A.scale(mu)


def canonical_lambda(pair: LambdaPair, phi, box: Box | None = None) -> Expr:
    Q = pair.characteristic
    if Q == ZERO:
        raise DegenerateCharacteristic("characteristic vanishes identically")
    if box is not None:
        pts = box.sample(64)
        if np.all(np.abs(compile_expr(Q)(pts)) < LOCUS_EPS):
            raise DegenerateCharacteristic("characteristic vanishes on the box")
    A = evolution_field(phi)
    return add(pair.lam, div(apply(A, Q), Q))


def equivalence_determinant(p1: LambdaPair, p2: LambdaPair, phi) -> Expr:
    A = evolution_field(phi)
    V1 = lambda_prolong(p1, phi)
    V2 = lambda_prolong(p2, phi)
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = A.components, V1.components, V2.components
    return add(
        mul(a1, sub(mul(b2, c3), mul(b3, c2))),
        neg(mul(a2, sub(mul(b1, c3), mul(b3, c1)))),
        mul(a3, sub(mul(b1, c2), mul(b2, c1))),
    )


def are_equivalent(
    p1: LambdaPair,
    p2: LambdaPair,
    phi,
    box: Box,
    tol: float = 1e-9,
    n: int = 200,
    seed: int = DEFAULT_SEED,
) -> bool:
    """Sampled test of linear dependence of A and the two prolonged fields.

    Isolated failures (at most 1% of points) are treated as suspected
    singular loci: the test is repeated on fresh points kept away from
    them, and only persistent failures give a negative verdict.
    """
    det = equivalence_determinant(p1, p2, phi)
    first = is_zero_sampled(det, box, n=n, tol=tol, seed=seed)
    if first:
        return True
    bad = np.flatnonzero(~(first.residuals <= tol))
    if len(bad) > max(1, n // 100):
        return False
    names = box.variables
    suspects = np.array([[first.points[k][i] for k in names] for i in bad])
    width = np.array([box.intervals[k][1] - box.intervals[k][0] for k in names])
    pts = box.sample(4 * n, seed=seed + 1, extra_loci=singular_loci(det))
    arr = np.stack([pts[k] for k in names], axis=1)
    # keep fresh points at least 2% of the box width away from every suspect
    d = np.abs((arr[:, None, :] - suspects[None, :, :]) / width).max(axis=2)
    keep = np.flatnonzero(d.min(axis=1) > 0.02)[:n]
    second = is_zero_sampled(det, box, tol=tol, points={k: pts[k][keep] for k in names})
    return bool(second)
