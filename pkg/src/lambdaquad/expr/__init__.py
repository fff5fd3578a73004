from .calculus import diff, gradient
from .evaluate import compile_expr, evaluate, lambdify
from .nodes import (
    FUNCTIONS,
    ONE,
    VARIABLES,
    ZERO,
    Add,
    Call,
    Div,
    DomainError,
    Expr,
    ExprError,
    Function,
    Mul,
    Num,
    Pow,
    UserFunction,
    Var,
    add,
    additive_terms,
    as_expr,
    call,
    div,
    fn,
    free_vars,
    mul,
    neg,
    power,
    render,
    singular_loci,
    sqrt,
    sub,
    substitute,
    user_functions,
)
from .parser import ArityError, ParseError, UnknownIdentifier, parse
from .sampling import DEFAULT_SEED, Box, BoxExhausted, Point, ZeroTest, is_zero_sampled, relative_residual

x, u, ux, w, C = (Var(n) for n in ("x", "u", "ux", "w", "C"))


def eval_at(e: Expr, p, **params) -> float:
    """Strict scalar evaluation at a `Point` (or x, u, ux triple)."""
    env = Point.of(p).as_dict()
    env.update(params)
    return evaluate(e, env, strict=True)
