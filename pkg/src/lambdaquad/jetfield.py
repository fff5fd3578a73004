"""Vector fields on first-order jet space (x, u, ux)."""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    ONE,
    ZERO,
    Box,
    Expr,
    add,
    as_expr,
    diff,
    is_zero_sampled,
    mul,
    sub,
    Var,
)

COORDS = ("x", "u", "ux")


@dataclass(frozen=True)
class JetField:
    """cx*d/dx + cu*d/du + cux*d/dux."""

    cx: Expr
    cu: Expr
    cux: Expr

    def __post_init__(self):
        for k in ("cx", "cu", "cux"):
            object.__setattr__(self, k, as_expr(getattr(self, k)))

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.cx, self.cu, self.cux)

    def __call__(self, f) -> Expr:
        return apply(self, f)

    def __add__(self, other: "JetField") -> "JetField":
        return JetField(*(add(a, b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "JetField") -> "JetField":
        return JetField(*(sub(a, b) for a, b in zip(self.components, other.components)))

    def scale(self, f) -> "JetField":
        f = as_expr(f)
        return JetField(*(mul(f, c) for c in self.components))

    def __rmul__(self, f) -> "JetField":
        return self.scale(f)

    def __str__(self):
        return f"({self.cx})∂x + ({self.cu})∂u + ({self.cux})∂ux"


@dataclass(frozen=True)
class LambdaPair:
    """A field xi*d/dx + eta*d/du together with its lambda function."""

    xi: Expr
    eta: Expr
    lam: Expr

    def __post_init__(self):
        for k in ("xi", "eta", "lam"):
            object.__setattr__(self, k, as_expr(getattr(self, k)))

    @property
    def characteristic(self) -> Expr:
        return sub(self.eta, mul(self.xi, Var("ux")))

    @classmethod
    def vertical(cls, lam, eta=ONE) -> "LambdaPair":
        return cls(ZERO, eta, lam)


def evolution_field(phi) -> JetField:
    return JetField(ONE, Var("ux"), as_expr(phi))


def apply(V: JetField, f) -> Expr:
    f = as_expr(f)
    return add(*(mul(c, diff(f, v)) for c, v in zip(V.components, COORDS)))


def lambda_prolong(pair: LambdaPair, phi) -> JetField:
    A = evolution_field(phi)

    def A_lam(g):
        return add(apply(A, g), mul(pair.lam, g))

    top = sub(A_lam(pair.eta), mul(A_lam(pair.xi), Var("ux")))
    return JetField(pair.xi, pair.eta, top)


def lie_bracket(V: JetField, W: JetField) -> JetField:
    return JetField(*(sub(apply(V, w), apply(W, v)) for v, w in zip(V.components, W.components)))


def field_is_zero(V: JetField, box: Box, n: int = 200, tol: float = 1e-9, **kw):
    """Componentwise sampled zero test; returns the three `ZeroTest`s."""
    return [is_zero_sampled(c, box, n=n, tol=tol, **kw) for c in V.components]
