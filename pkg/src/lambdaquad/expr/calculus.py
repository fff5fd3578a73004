"""Symbolic differentiation."""

from __future__ import annotations

from functools import lru_cache

from .nodes import (
    ONE,
    ZERO,
    Add,
    Call,
    Div,
    Expr,
    Mul,
    Num,
    Pow,
    Var,
    add,
    call,
    div,
    free_vars,
    mul,
    power,
    sub,
    FUNCTIONS,
)


@lru_cache(maxsize=65536)
def diff(e: Expr, var: str) -> Expr:
    """Partial derivative of `e` with respect to the variable named `var`."""
    if var not in free_vars(e):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Add):
        return add(*(diff(a, var) for a in e.args))
    if isinstance(e, Mul):
        terms = []
        for i, a in enumerate(e.args):
            da = diff(a, var)
            if da == ZERO:
                continue
            terms.append(mul(*e.args[:i], da, *e.args[i + 1 :]))
        return add(*terms)
    if isinstance(e, Div):
        n, d = e.num, e.den
        dn, dd = diff(n, var), diff(d, var)
        if dd == ZERO:
            return div(dn, d)
        if dn == ZERO:
            return div(mul(Num(-1), n, dd), power(d, Num(2)))
        return div(sub(mul(dn, d), mul(n, dd)), power(d, Num(2)))
    if isinstance(e, Pow):
        b, x = e.base, e.exp
        db, dx = diff(b, var), diff(x, var)
        out = []
        if db != ZERO:
            out.append(mul(x, power(b, sub(x, ONE)), db))
        if dx != ZERO:
            out.append(mul(e, call(FUNCTIONS["ln"], b), dx))
        return add(*out)
    if isinstance(e, Call):
        da = diff(e.arg, var)
        return mul(e.func.derivative(e.arg), da)
    raise TypeError(e)  # pragma: no cover


def gradient(e: Expr, variables=("x", "u", "ux")) -> tuple[Expr, ...]:
    return tuple(diff(e, v) for v in variables)
