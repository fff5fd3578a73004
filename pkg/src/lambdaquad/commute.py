"""Commuting fields built from two vertical lambda-symmetries."""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import (
    DEFAULT_SEED,
    Box,
    Expr,
    ZERO,
    ZeroTest,
    as_expr,
    div,
    is_zero_sampled,
    mul,
    sub,
)
from .jetfield import JetField, LambdaPair, apply, evolution_field, lambda_prolong, lie_bracket


class EquivalentPairsError(ValueError):
    """The two lambdas coincide, so the construction degenerates."""


class ResidualCheckFailed(ValueError):
    def __init__(self, name: str, test: ZeroTest):
        self.name = name
        self.test = test
        super().__init__(
            f"{name}: residual {test.max_residual:.3e} > {test.tol:.1e} at {test.witness}"
        )


def vertical_field(lam, phi) -> JetField:
    """The prolonged field d/du + lam d/dux."""
    return lambda_prolong(LambdaPair.vertical(lam), phi)


def rho_fn(lambda1, lambda2, phi=ZERO) -> Expr:
    l1, l2 = as_expr(lambda1), as_expr(lambda2)
    gap = sub(l1, l2)
    if l1 == l2 or gap == ZERO:
        raise EquivalentPairsError("equivalent symmetry pairs: lambda1 == lambda2")
    X1, X2 = vertical_field(l1, phi), vertical_field(l2, phi)
    return div(sub(apply(X1, l2), apply(X2, l1)), gap)


def verify_f_pair(f1, f2, rho, lambda1, lambda2, phi=ZERO) -> tuple[Expr, Expr]:
    X1, X2 = vertical_field(lambda1, phi), vertical_field(lambda2, phi)
    return (sub(apply(X2, f1), mul(rho, f1)), sub(apply(X1, f2), mul(rho, f2)))


def verify_g_pair(g1, g2, rho1, rho2, phi, Y1: JetField, Y2: JetField) -> tuple[Expr, ...]:
    A = evolution_field(phi)
    return (
        sub(apply(A, g1), mul(rho1, g1)),
        apply(Y2, g1),
        sub(apply(A, g2), mul(rho2, g2)),
        apply(Y1, g2),
    )


@dataclass
class CommutingData:
    phi: Expr
    lambda1: Expr
    lambda2: Expr
    rho: Expr
    f1: Expr
    f2: Expr
    rho1: Expr
    rho2: Expr
    g1: Expr
    g2: Expr
    h1: Expr
    h2: Expr
    X1: JetField
    X2: JetField
    Y1: JetField
    Y2: JetField
    Z1: JetField
    Z2: JetField
    A: JetField = field(repr=False, default=None)

    def bracket_residuals(self) -> dict[str, JetField]:
        A = self.A
        return {
            "[Y1,A]-rho1*Y1": lie_bracket(self.Y1, A) - self.Y1.scale(self.rho1),
            "[Y2,A]-rho2*Y2": lie_bracket(self.Y2, A) - self.Y2.scale(self.rho2),
            "[Y1,Y2]": lie_bracket(self.Y1, self.Y2),
            "[Z1,A]": lie_bracket(self.Z1, A),
            "[Z2,A]": lie_bracket(self.Z2, A),
            "[Z1,Z2]": lie_bracket(self.Z1, self.Z2),
        }


def construct(phi, lambda1, lambda2, f1, f2, g1, g2) -> CommutingData:
    """Assemble every field without checking anything."""
    phi, l1, l2 = as_expr(phi), as_expr(lambda1), as_expr(lambda2)
    f1, f2, g1, g2 = (as_expr(e) for e in (f1, f2, g1, g2))
    A = evolution_field(phi)
    rho = rho_fn(l1, l2, phi)
    X1, X2 = vertical_field(l1, phi), vertical_field(l2, phi)
    rho1 = sub(l1, div(apply(A, f1), f1))
    rho2 = sub(l2, div(apply(A, f2), f2))
    h1, h2 = mul(f1, g1), mul(f2, g2)
    return CommutingData(
        phi=phi,
        lambda1=l1,
        lambda2=l2,
        rho=rho,
        f1=f1,
        f2=f2,
        rho1=rho1,
        rho2=rho2,
        g1=g1,
        g2=g2,
        h1=h1,
        h2=h2,
        X1=X1,
        X2=X2,
        Y1=X1.scale(f1),
        Y2=X2.scale(f2),
        Z1=X1.scale(h1),
        Z2=X2.scale(h2),
        A=A,
    )


def build_commuting(
    phi,
    lambda1,
    lambda2,
    f1,
    f2,
    g1,
    g2,
    box: Box,
    tol: float = 1e-8,
    n: int = 200,
    seed: int = DEFAULT_SEED,
    params=None,
) -> tuple[CommutingData, dict[str, list[ZeroTest]]]:
    """Check the f- and g-pair hypotheses, then build and bracket-check the fields.

    Raises `ResidualCheckFailed` when a hypothesis fails.  The returned
    report maps each bracket identity to its three componentwise tests.
    """
    kw = dict(n=n, tol=tol, seed=seed, params=params)
    if is_zero_sampled(sub(as_expr(lambda1), as_expr(lambda2)), box, avoid_singular=False, **kw):
        raise EquivalentPairsError("equivalent symmetry pairs: lambda1 == lambda2")
    data = construct(phi, lambda1, lambda2, f1, f2, g1, g2)
    for name, r in zip(
        ("X2(f1)-rho*f1", "X1(f2)-rho*f2"),
        verify_f_pair(data.f1, data.f2, data.rho, data.lambda1, data.lambda2, data.phi),
    ):
        t = is_zero_sampled(r, box, **kw)
        if not t:
            raise ResidualCheckFailed(name, t)
    for name, r in zip(
        ("A(g1)-rho1*g1", "Y2(g1)", "A(g2)-rho2*g2", "Y1(g2)"),
        verify_g_pair(data.g1, data.g2, data.rho1, data.rho2, data.phi, data.Y1, data.Y2),
    ):
        t = is_zero_sampled(r, box, **kw)
        if not t:
            raise ResidualCheckFailed(name, t)
    report = {
        name: [is_zero_sampled(c, box, **kw) for c in V.components]
        for name, V in data.bracket_residuals().items()
    }
    return data, report
