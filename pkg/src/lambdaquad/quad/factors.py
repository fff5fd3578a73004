"""Forms, integrating factors and multipliers derived from commuting data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..commute import CommutingData
from ..expr import (
    Box,
    Expr,
    Num,
    Var,
    add,
    as_expr,
    compile_expr,
    diff,
    div,
    is_zero_sampled,
    mul,
    neg,
    sub,
    substitute,
)
from ..jetfield import apply
from .forms import OneForm

ux = Var("ux")


def w_forms(data: CommutingData, box: Box) -> tuple[OneForm, OneForm]:
    """Gradients in (u, ux) of the invariants of the two commuting fields."""
    l1, l2 = data.lambda1, data.lambda2
    d1 = mul(data.f2, sub(l1, l2))
    d2 = mul(data.f1, sub(l2, l1))
    w1 = OneForm({"u": div(l1, d1), "ux": neg(div(Num(1), d1))}, box, name="dw1")
    w2 = OneForm({"u": div(l2, d2), "ux": neg(div(Num(1), d2))}, box, name="dw2")
    return w1, w2


def I_forms(data: CommutingData, box: Box) -> tuple[OneForm, OneForm]:
    """Gradients in (x, u, ux) of the two first integrals."""
    mu1, mu2 = integrating_factors(data)
    return (
        _first_integral_form(mu1, data.lambda1, data.phi, box, "dI1"),
        _first_integral_form(mu2, data.lambda2, data.phi, box, "dI2"),
    )


def _first_integral_form(mu, lam, phi, box, name) -> OneForm:
    return OneForm(
        {"x": mul(mu, sub(mul(lam, ux), phi)), "u": neg(mul(lam, mu)), "ux": mu}, box, name=name
    )


def solved_I_forms(data: CommutingData, box: Box) -> tuple[OneForm, OneForm]:
    """First-integral gradients obtained by solving A(I) = 0, X_i(I) = 0, Z_j(I) = 1.

    Independent of the integrating-factor formulas: each gradient is
    cross(A, X_i) / (Z_j . cross(A, X_i)), so comparing it with `I_forms`
    checks those formulas against the defining linear system.
    """
    out = []
    for i, (X, Z) in enumerate(((data.X1, data.Z2), (data.X2, data.Z1)), 1):
        (a1, a2, a3), (b1, b2, b3) = data.A.components, X.components
        g = (
            sub(mul(a2, b3), mul(a3, b2)),
            sub(mul(a3, b1), mul(a1, b3)),
            sub(mul(a1, b2), mul(a2, b1)),
        )
        det = add(*(mul(z, c) for z, c in zip(Z.components, g)))
        out.append(OneForm({v: div(c, det) for v, c in zip(("x", "u", "ux"), g)}, box, name=f"dI{i} (solved)"))
    return tuple(out)


def integrating_factors(data: CommutingData) -> tuple[Expr, Expr]:
    mu1 = div(Num(1), mul(data.f2, data.g2, sub(data.lambda2, data.lambda1)))
    mu2 = div(Num(1), mul(data.f1, data.g1, sub(data.lambda1, data.lambda2)))
    return mu1, mu2


def integrating_factor_identities(mu, lam, phi, form: OneForm) -> list[Expr]:
    """Residuals I_x - mu(lam*ux - phi), I_u + lam*mu, I_ux - mu against a form."""
    c = form.components
    return [
        sub(c["x"], mul(mu, sub(mul(lam, ux), phi))),
        add(c["u"], mul(lam, mu)),
        sub(c["ux"], mu),
    ]


def jacobi_last_multiplier(data: CommutingData) -> Expr:
    return div(
        Num(1), mul(data.f1, data.g1, data.f2, data.g2, sub(data.lambda2, data.lambda1))
    )


def divergence_residual(M, phi) -> Expr:
    """M_x + d/du(M*ux) + d/dux(M*phi)."""
    M, phi = as_expr(M), as_expr(phi)
    return add(diff(M, "x"), diff(mul(M, ux), "u"), diff(mul(M, phi), "ux"))


def cross_identity_residual(M, form_I1: OneForm, f1, g1) -> Expr:
    """M/(I1)_ux - 1/(f1*g1)."""
    return sub(div(M, form_I1.components["ux"]), div(Num(1), mul(f1, g1)))


def first_order_factor_residual(nu, rhs, dep: str) -> Expr:
    """nu_x + d/d(dep)(rhs*nu) for the first-order equation dep' = rhs."""
    nu, rhs = as_expr(nu), as_expr(rhs)
    return add(diff(nu, "x"), diff(mul(rhs, nu), dep))


def reduced_integrating_factors(g1_reduced, g2_reduced) -> tuple[Expr, Expr]:
    """Factors 1/g2(x, w) and 1/g1(x, w) for the first and second reduced equations."""
    return div(Num(1), as_expr(g2_reduced)), div(Num(1), as_expr(g1_reduced))


def auxiliary_factor(data: CommutingData, H, i: int) -> Expr:
    """1/(f_i*g_i) with ux replaced by H(x, u, C)."""
    h = data.h1 if i == 1 else data.h2
    return substitute(div(Num(1), h), {"ux": as_expr(H)})


def auxiliary_relation_residual(H, phi) -> Expr:
    """H_x + H*H_u - phi(x, u, H): solutions of u' = H then solve u'' = phi."""
    H = as_expr(H)
    return sub(add(diff(H, "x"), mul(H, diff(H, "u"))), substitute(as_expr(phi), {"ux": H}))


@dataclass
class DependenceCheck:
    """Outcome of checking that A(w) is a function of (x, w) only."""

    max_discrepancy: float
    pairs: int
    passed: bool


def reduced_dependence(
    data: CommutingData,
    w: Expr,
    box: Box,
    n: int = 100,
    tol: float = 1e-8,
    seed: int = 11,
    params=None,
) -> DependenceCheck:
    """Compare A(w) at pairs of points sharing (x, w) but not u.

    For each sampled point the partner has u moved by a fifth of the box
    width and ux solved from w(x, u', ux') = w(x, u, ux) by bracketing.
    """
    Aw = compile_expr(apply(data.A, w))
    wf = compile_expr(w)
    pts = box.sample(n, seed=seed, params=params)
    lo_u, hi_u = box.intervals["u"]
    lo_p, hi_p = box.intervals["ux"]
    shift = 0.2 * (hi_u - lo_u)
    extra = dict(params or {})
    worst, count = 0.0, 0
    for i in range(n):
        x, u0, p0 = (float(pts[k][i]) for k in ("x", "u", "ux"))
        target = float(wf({"x": x, "u": u0, "ux": p0, **extra}))
        u1 = u0 + shift if u0 + shift <= hi_u else u0 - shift
        grid = np.linspace(lo_p, hi_p, 401)
        vals = wf({"x": x, "u": u1, "ux": grid, **extra}) - target
        ok = np.isfinite(vals)
        idx = np.flatnonzero(ok[:-1] & ok[1:] & (np.sign(vals[:-1]) != np.sign(vals[1:])))
        if idx.size == 0:
            continue
        j = idx[0]
        if not box.admissible({"x": x, "u": u1, "ux": grid[j], **extra}).all():
            continue
        p1 = brentq(
            lambda p: float(wf({"x": x, "u": u1, "ux": p, **extra})) - target,
            grid[j],
            grid[j + 1],
            xtol=1e-14,
        )
        a = float(Aw({"x": x, "u": u0, "ux": p0, **extra}))
        b = float(Aw({"x": x, "u": u1, "ux": p1, **extra}))
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        worst = max(worst, abs(a - b) / (1 + max(abs(a), abs(b))))
        count += 1
    return DependenceCheck(worst, count, count > 0 and worst <= tol)


def reduced_rhs_residual(data: CommutingData, w: Expr, rhs_reduced) -> Expr:
    """A(w) - rhs(x, w) with w substituted; zero when rhs is the reduced equation."""
    return sub(apply(data.A, w), substitute(as_expr(rhs_reduced), {"w": w}))


def reduced_box(w: Expr, box: Box, n: int = 400, params=None, margin: float = 0.0) -> Box:
    """(x, w) box spanned by the values of w over the jet box."""
    pts = box.sample(n, params=params)
    env = dict(pts)
    env.update(params or {})
    vals = compile_expr(w)(env)
    vals = vals[np.isfinite(vals)]
    lo, hi = float(np.min(vals)), float(np.max(vals))
    pad = margin * (hi - lo)
    return Box({"x": box.intervals["x"], "w": (lo - pad, hi + pad)})


