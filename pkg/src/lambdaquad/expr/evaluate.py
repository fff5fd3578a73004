"""Numeric evaluation.

`evaluate` walks the tree and, in strict mode, raises `DomainError` naming
the first subexpression that left the real domain.  `compile_expr` emits a
flat numpy function with shared subexpressions computed once; it never
raises and returns NaN/inf where the expression is undefined.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .nodes import Add, Call, Div, DomainError, Expr, Mul, Num, Pow, Var, nodes


def _num_value(v):
    return float(v) if isinstance(v, Fraction) else v


def _first_bad(mask):
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return None
    return int(np.flatnonzero(mask)[0])


def evaluate(e: Expr, env: Mapping[str, object], strict: bool = True):
    """Value of `e` with variables bound by `env` (floats or numpy arrays)."""
    memo: dict = {}
    with np.errstate(all="ignore"):
        for n in nodes(e):
            memo[n] = _eval_node(n, memo, env, strict)
    out = memo[e]
    return float(out) if np.ndim(out) == 0 else out


def _eval_node(n, memo, env, strict):
    if isinstance(n, Num):
        return _num_value(n.value)
    if isinstance(n, Var):
        try:
            return np.asarray(env[n.name], dtype=float) if not np.isscalar(env[n.name]) else float(env[n.name])
        except KeyError:
            raise KeyError(f"no value bound for variable {n.name!r}") from None
    if isinstance(n, Add):
        r = memo[n.args[0]]
        for a in n.args[1:]:
            r = r + memo[a]
        return r
    if isinstance(n, Mul):
        r = memo[n.args[0]]
        for a in n.args[1:]:
            r = r * memo[a]
        return r
    if isinstance(n, Div):
        den = memo[n.den]
        if strict:
            bad = np.asarray(den) == 0
            if np.any(bad):
                raise DomainError("division by zero", n.den, _first_bad(bad))
        return memo[n.num] / den
    if isinstance(n, Pow):
        b, x = memo[n.base], memo[n.exp]
        if strict:
            xa = np.asarray(x, dtype=float)
            ba = np.asarray(b, dtype=float)
            bad = (ba < 0) & (xa != np.round(xa))
            bad = bad | ((ba == 0) & (xa < 0))
            if np.any(bad):
                raise DomainError("power outside the real domain", n, _first_bad(bad))
        return np.power(np.asarray(b, dtype=float), x) if np.ndim(b) or np.ndim(x) else _scalar_pow(b, x)
    if isinstance(n, Call):
        a = memo[n.arg]
        if strict and n.func.invalid is not None:
            bad = n.func.invalid(np.asarray(a, dtype=float))
            if np.any(bad):
                raise DomainError(f"{n.func.name} argument outside its domain", n.arg, _first_bad(bad))
        r = n.func.numeric(a)
        if strict:
            bad = ~np.isfinite(np.asarray(r, dtype=float))
            if np.any(bad):
                raise DomainError(f"{n.func.name} is undefined", n, _first_bad(bad))
        return r
    raise TypeError(n)  # pragma: no cover


def _scalar_pow(b, x):
    b = float(b)
    x = float(x)
    if b < 0 and not x.is_integer():
        return float("nan")
    if b == 0 and x < 0:
        return float("inf")
    return b**x


_ARGS = ("x", "u", "ux", "w", "C", "C1", "C2")


@lru_cache(maxsize=4096)
def compile_expr(e: Expr) -> Callable:
    """Compile `e` to ``f(env) -> ndarray`` evaluating every node once."""
    order = nodes(e)
    names: dict = {}
    ns: dict = {"np": np}
    lines = []
    for k, n in enumerate(order):
        t = f"t{k}"
        names[n] = t
        if isinstance(n, Num):
            ns[t] = float(n.value)
            continue
        if isinstance(n, Var):
            rhs = f"env_{n.name}"
        elif isinstance(n, Add):
            rhs = " + ".join(names[a] for a in n.args)
        elif isinstance(n, Mul):
            rhs = " * ".join(names[a] for a in n.args)
        elif isinstance(n, Div):
            rhs = f"{names[n.num]} / {names[n.den]}"
        elif isinstance(n, Pow):
            if isinstance(n.exp, Num) and float(n.exp.value) == 2:
                rhs = f"{names[n.base]} * {names[n.base]}"
            else:
                rhs = f"np.power({names[n.base]}, {names[n.exp]})"
        elif isinstance(n, Call):
            fname = f"f_{n.func.name}"
            ns[fname] = n.func.numeric
            rhs = f"{fname}({names[n.arg]})"
        else:  # pragma: no cover
            raise TypeError(n)
        lines.append(f"    {t} = {rhs}")
    used = sorted({n.name for n in order if isinstance(n, Var)})
    src = ["def _f(env):"]
    src += [f"    env_{v} = env[{v!r}]" for v in used]
    src.append("    with np.errstate(all='ignore'):")
    src += ["    " + ln for ln in lines]
    src.append(f"        return {names[e]}")
    code = "\n".join(src)
    exec(compile(code, f"<compiled {str(e)[:60]}>", "exec"), ns)
    raw = ns["_f"]

    def f(env: Mapping[str, object]):
        vals = {v: np.asarray(env[v], dtype=float) for v in used}
        out = raw(vals)
        shape = np.broadcast_shapes(*(np.shape(env[k]) for k in env if k in _ARGS)) if env else ()
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast_shapes(np.shape(out), shape)).copy()

    f.source = code
    f.variables = tuple(used)
    return f


def lambdify(e: Expr, variables=("x", "u", "ux")) -> Callable:
    """Positional wrapper: ``lambdify(e)(x, u, ux)``."""
    f = compile_expr(e)

    def g(*args, **params):
        env = dict(zip(variables, args))
        env.update(params)
        return f(env)

    return g
