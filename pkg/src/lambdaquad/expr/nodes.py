"""Immutable expression trees over the jet coordinates.

Nodes are built through the smart constructors (`add`, `mul`, `div`, ...)
which apply a deliberately weak normal form: constant folding, removal of
neutral elements, flattening of sums and products, and sign normalization
of quotients.  Semantic equality is never decided here; see
`lambdaquad.expr.sampling.is_zero_sampled`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

#: Variables an expression may mention.  ``w`` is the coordinate of a
#: reduced equation, ``C``/``C1``/``C2`` are integration constants bound at
#: evaluation time.
VARIABLES = ("x", "u", "ux", "w", "C", "C1", "C2")


class ExprError(Exception):
    """Base class for expression errors."""


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain of a subexpression."""

    def __init__(self, message: str, node: "Expr | None" = None, index=None):
        self.node = node
        self.index = index
        if node is not None:
            message = f"{message} in subexpression {render(node)!r}"
        super().__init__(message)


class Expr:
    __slots__ = ("_hash",)

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        # subclasses define __eq__, which would otherwise drop __hash__
        cls.__hash__ = Expr.__hash__

    # operator sugar used by the catalog and the tests
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __hash__(self):
        return self._hash

    def __str__(self):
        return render(self)

    def __setattr__(self, name, value):
        if hasattr(self, "_hash"):
            raise AttributeError("expressions are immutable")
        object.__setattr__(self, name, value)

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            value = Fraction(value)
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ExprError(f"non-finite constant {value!r}")
        elif not isinstance(value, Fraction):
            raise TypeError(f"unsupported constant {value!r}")
        self.value = value
        self._hash = hash(("Num", value))

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    def __repr__(self):
        return f"Num({self.value!r})"

    @property
    def is_negative(self) -> bool:
        return self.value < 0


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in VARIABLES:
            raise ExprError(f"unknown variable {name!r}")
        self.name = name
        self._hash = hash(("Var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __repr__(self):
        return f"Var({self.name!r})"


class Add(Expr):
    __slots__ = ("args",)

    def __init__(self, args: tuple[Expr, ...]):
        self.args = args
        self._hash = hash(("Add", args))

    def __eq__(self, other):
        return isinstance(other, Add) and self._hash == other._hash and self.args == other.args

    def __repr__(self):
        return f"Add{self.args!r}"

    @property
    def children(self):
        return self.args


class Mul(Expr):
    """Product; a constant factor, when present, is ``args[0]``."""

    __slots__ = ("args",)

    def __init__(self, args: tuple[Expr, ...]):
        self.args = args
        self._hash = hash(("Mul", args))

    def __eq__(self, other):
        return isinstance(other, Mul) and self._hash == other._hash and self.args == other.args

    def __repr__(self):
        return f"Mul{self.args!r}"

    @property
    def children(self):
        return self.args

    @property
    def coeff(self):
        a = self.args[0]
        return a.value if isinstance(a, Num) else Fraction(1)


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        self.num = num
        self.den = den
        self._hash = hash(("Div", num, den))

    def __eq__(self, other):
        return (
            isinstance(other, Div)
            and self._hash == other._hash
            and self.num == other.num
            and self.den == other.den
        )

    def __repr__(self):
        return f"Div({self.num!r}, {self.den!r})"

    @property
    def children(self):
        return (self.num, self.den)


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Expr):
        self.base = base
        self.exp = exp
        self._hash = hash(("Pow", base, exp))

    def __eq__(self, other):
        return (
            isinstance(other, Pow)
            and self._hash == other._hash
            and self.base == other.base
            and self.exp == other.exp
        )

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exp!r})"

    @property
    def children(self):
        return (self.base, self.exp)


class Call(Expr):
    __slots__ = ("func", "arg")

    def __init__(self, func: "Function", arg: Expr):
        self.func = func
        self.arg = arg
        self._hash = hash(("Call", func.name, arg))

    def __eq__(self, other):
        return (
            isinstance(other, Call)
            and self.func is other.func
            and self.arg == other.arg
        )

    def __repr__(self):
        return f"Call({self.func.name!r}, {self.arg!r})"

    @property
    def children(self):
        return (self.arg,)


# ---------------------------------------------------------------------------
# functions


class Function:
    """A scalar function of one argument.

    ``derivative(arg)`` returns f'(arg) as an expression (the chain rule is
    applied by `diff`).  ``invalid(values)`` flags arguments outside the real
    domain; ``loci(arg)`` lists expressions whose zero sets are singular.
    """

    def __init__(
        self,
        name: str,
        numeric: Callable,
        derivative: Callable[[Expr], Expr],
        invalid: Callable | None = None,
        loci: Callable[[Expr], list] | None = None,
    ):
        self.name = name
        self.numeric = numeric
        self.derivative = derivative
        self.invalid = invalid
        self.loci = loci

    def __call__(self, arg) -> Expr:
        return call(self, as_expr(arg))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class UserFunction(Function):
    """A numerically tabulated function of ``x`` (e.g. a linear-ODE solution).

    Outside its tabulated range the callable must return NaN.
    """

    def __init__(self, name: str, numeric: Callable, derivative: Callable[[Expr], Expr]):
        super().__init__(
            name,
            numeric,
            derivative,
            invalid=None,
        )


def _sqrt_d(a):
    return div(Num(1), mul(Num(2), call(FUNCTIONS["sqrt"], a)))


def _tan_d(a):
    return div(Num(1), power(call(FUNCTIONS["cos"], a), Num(2)))


FUNCTIONS: dict[str, Function] = {}


def _register(*fs: Function):
    for f in fs:
        FUNCTIONS[f.name] = f


_register(
    Function("sqrt", np.sqrt, _sqrt_d, invalid=lambda a: a < 0, loci=lambda a: [a]),
    Function("exp", np.exp, lambda a: call(FUNCTIONS["exp"], a)),
    Function("ln", np.log, lambda a: div(Num(1), a), invalid=lambda a: a <= 0, loci=lambda a: [a]),
    Function("sin", np.sin, lambda a: call(FUNCTIONS["cos"], a)),
    Function("cos", np.cos, lambda a: neg(call(FUNCTIONS["sin"], a))),
    Function("tan", np.tan, _tan_d, loci=lambda a: [call(FUNCTIONS["cos"], a)]),
    Function("arctan", np.arctan, lambda a: div(Num(1), add(Num(1), power(a, Num(2))))),
    Function(
        "arctanh",
        np.arctanh,
        lambda a: div(Num(1), sub(Num(1), power(a, Num(2)))),
        invalid=lambda a: np.abs(a) >= 1,
        loci=lambda a: [sub(Num(1), power(a, Num(2)))],
    ),
    Function("tanh", np.tanh, lambda a: sub(Num(1), power(call(FUNCTIONS["tanh"], a), Num(2)))),
    Function("sinh", np.sinh, lambda a: call(FUNCTIONS["cosh"], a)),
    Function("cosh", np.cosh, lambda a: call(FUNCTIONS["sinh"], a)),
    Function("abs", np.abs, lambda a: div(a, call(FUNCTIONS["abs"], a)), loci=lambda a: [a]),
)

#: parse-time aliases
ALIASES = {"log": "ln", "atan": "arctan", "atanh": "arctanh"}

# ---------------------------------------------------------------------------
# smart constructors

ZERO = Num(0)
ONE = Num(1)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, str):
        return Var(v)
    return Num(v)


def _num(v) -> Num:
    # keep exact integers exact after float arithmetic on fractions
    return Num(v)


def add(*args: Expr) -> Expr:
    terms: list[Expr] = []
    const: Fraction | float = Fraction(0)
    for a in args:
        a = as_expr(a)
        parts = a.args if isinstance(a, Add) else (a,)
        for t in parts:
            if isinstance(t, Num):
                const = const + t.value
            else:
                terms.append(t)
    if const != 0:
        terms.append(_num(const))
    if not terms:
        return _num(const) if isinstance(const, float) else ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def mul(*args: Expr) -> Expr:
    factors: list[Expr] = []
    const: Fraction | float = Fraction(1)
    for a in args:
        a = as_expr(a)
        parts = a.args if isinstance(a, Mul) else (a,)
        for f in parts:
            if isinstance(f, Num):
                const = const * f.value
            else:
                factors.append(f)
    if const == 0:
        return ZERO
    if not factors:
        return _num(const)
    if const == 1:
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))
    return Mul((_num(const),) + tuple(factors))


def neg(a: Expr) -> Expr:
    return mul(Num(-1), a)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def is_negative(e: Expr) -> bool:
    """True when `e` renders with a leading minus sign."""
    if isinstance(e, Num):
        return e.value < 0
    if isinstance(e, Mul):
        return isinstance(e.args[0], Num) and e.args[0].value < 0
    return False


def div(a: Expr, b: Expr) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(b, Num):
        if b.value == 0:
            raise ZeroDivisionError("division by the constant zero")
        inv = Fraction(1) / b.value if isinstance(b.value, Fraction) else 1.0 / b.value
        return mul(_num(inv), a)
    if a == ZERO:
        return ZERO
    if is_negative(a):
        return neg(div(neg(a), b))
    return Div(a, b)


def power(a: Expr, b: Expr) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(b, Num):
        if b.value == 0:
            return ONE
        if b.value == 1:
            return a
        if isinstance(a, Num):
            folded = _fold_pow(a.value, b.value)
            if folded is not None:
                return _num(folded)
    if a == ONE:
        return ONE
    return Pow(a, b)


def _fold_pow(base, exp):
    if isinstance(exp, Fraction) and exp.denominator == 1:
        n = int(exp)
        if base == 0 and n < 0:
            return None
        if isinstance(base, Fraction) and abs(n) > 64:
            return None
        return base**n
    if isinstance(base, float) or isinstance(exp, float):
        if base > 0:
            return float(base) ** float(exp)
    return None


def call(f: Function, a: Expr) -> Expr:
    return Call(f, a)


def sqrt(a) -> Expr:
    return call(FUNCTIONS["sqrt"], as_expr(a))


def fn(name: str, a) -> Expr:
    return call(FUNCTIONS[name], as_expr(a))


# ---------------------------------------------------------------------------
# structural utilities


def free_vars(e: Expr) -> frozenset[str]:
    seen: dict[int, frozenset] = {}

    def walk(n):
        k = id(n)
        if k in seen:
            return seen[k]
        if isinstance(n, Var):
            r = frozenset((n.name,))
        else:
            r = frozenset().union(*(walk(c) for c in n.children)) if n.children else frozenset()
        seen[k] = r
        return r

    return walk(e)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding through the constructors."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    memo: dict[int, Expr] = {}

    def walk(n):
        k = id(n)
        if k in memo:
            return memo[k]
        if isinstance(n, Var):
            r = mapping.get(n.name, n)
        elif isinstance(n, Num):
            r = n
        elif isinstance(n, Add):
            r = add(*(walk(a) for a in n.args))
        elif isinstance(n, Mul):
            r = mul(*(walk(a) for a in n.args))
        elif isinstance(n, Div):
            r = div(walk(n.num), walk(n.den))
        elif isinstance(n, Pow):
            r = power(walk(n.base), walk(n.exp))
        elif isinstance(n, Call):
            r = call(n.func, walk(n.arg))
        else:  # pragma: no cover
            raise TypeError(n)
        memo[k] = r
        return r

    return walk(e)


def nodes(e: Expr) -> Iterable[Expr]:
    """Unique nodes of `e` in post-order."""
    seen: set = set()
    order: list[Expr] = []

    def walk(n):
        if n in seen:
            return
        for c in n.children:
            walk(c)
        seen.add(n)
        order.append(n)

    walk(e)
    return order


def size(e: Expr) -> int:
    return len(nodes(e))


def user_functions(e: Expr) -> dict[str, Function]:
    return {n.func.name: n.func for n in nodes(e) if isinstance(n, Call) and n.func.name not in FUNCTIONS}


def additive_terms(e: Expr) -> tuple[Expr, ...]:
    return e.args if isinstance(e, Add) else (e,)


def singular_loci(e: Expr) -> list[Expr]:
    """Expressions whose zero sets are singular for `e`.

    Denominators, bases raised to negative or fractional powers, and the
    boundaries of ``sqrt``/``ln``/``arctanh``/``tan`` arguments.
    """
    found: list[Expr] = []
    seen: set = set()

    def note(x):
        # split into factors so each locus is a single hypersurface with a sign
        if isinstance(x, Num):
            return
        if isinstance(x, Mul):
            for f in x.args:
                note(f)
        elif isinstance(x, Pow) and isinstance(x.exp, Num) and _is_integer(x.exp.value):
            note(x.base)
        elif isinstance(x, Div):
            note(x.num)
        elif x not in seen:
            seen.add(x)
            found.append(x)

    for n in nodes(e):
        if isinstance(n, Div):
            note(n.den)
        elif isinstance(n, Pow):
            ex = n.exp
            if not (isinstance(ex, Num) and ex.value >= 0 and _is_integer(ex.value)):
                note(n.base)
        elif isinstance(n, Call) and n.func.loci is not None:
            for x in n.func.loci(n.arg):
                note(x)
    return found


def _is_integer(v) -> bool:
    return float(v).is_integer()


# ---------------------------------------------------------------------------
# rendering

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 10, 20, 25, 30, 100


def _fmt_num(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _prec(e: Expr) -> int:
    if isinstance(e, Num):
        if e.value < 0:
            return _PREC_NEG
        if isinstance(e.value, Fraction) and e.value.denominator != 1:
            return _PREC_MUL
        return _PREC_ATOM
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_NEG if is_negative(e) else _PREC_MUL
    if isinstance(e, Div):
        return _PREC_MUL
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def render(e: Expr) -> str:
    """Infix text in the grammar accepted by `lambdaquad.expr.parse`."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func.name}({render(e.arg)})"
    if isinstance(e, Add):
        out = [render(e.args[0])]
        for t in e.args[1:]:
            if is_negative(t):
                out.append(" - " + _render_operand(neg(t), _PREC_ADD + 1))
            else:
                out.append(" + " + _render_operand(t, _PREC_ADD + 1))
        return "".join(out)
    if isinstance(e, Mul):
        c = e.args[0]
        if isinstance(c, Num) and c.value < 0:
            rest = neg(e)
            # unary minus binds tighter than * and /, so "-a*b/c" reparses
            # to the same normalized product
            if isinstance(rest, Mul):
                return "-" + "*".join(_render_factor(f) for f in rest.args)
            return "-" + _render_operand(rest, _PREC_MUL)
        return "*".join(_render_factor(f) for f in e.args)
    if isinstance(e, Div):
        num = _render_operand(e.num, _PREC_MUL)
        den = _render_operand(e.den, _PREC_POW)
        return f"{num}/{den}"
    if isinstance(e, Pow):
        base = _render_operand(e.base, _PREC_ATOM)
        ex = e.exp
        exs = render(ex) if _prec(ex) == _PREC_ATOM else f"({render(ex)})"
        return f"{base}^{exs}"
    raise TypeError(e)  # pragma: no cover


def _render_operand(e: Expr, min_prec: int) -> str:
    s = render(e)
    return s if _prec(e) >= min_prec else f"({s})"


def _render_factor(f: Expr) -> str:
    # a quotient inside a product must be parenthesized: a*b/c parses as (a*b)/c
    if isinstance(f, Div):
        return f"({render(f)})"
    if isinstance(f, Num):
        return _fmt_num(f.value)
    return _render_operand(f, _PREC_MUL)
