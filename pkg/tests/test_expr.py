import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaquad.expr import (
    ArityError,
    Box,
    BoxExhausted,
    DomainError,
    Num,
    ParseError,
    Point,
    UnknownIdentifier,
    Var,
    diff,
    eval_at,
    evaluate,
    compile_expr,
    is_zero_sampled,
    parse,
    render,
    singular_loci,
)

PHI_F0 = "ux^2/(2*u) - 2*u*ux - u^3/2 - 1/(2*u)"
LAMBDA1 = "ux/u - u + 1/u"


def test_parse_lambda1_structure():
    e = parse(LAMBDA1)
    assert type(e).__name__ == "Add" and len(e.args) == 3
    assert Var("ux") in set(_vars(e))
    assert eval_at(e, (0, 2, 1)) == pytest.approx(-1.0, abs=1e-15)


def _vars(e):
    from lambdaquad.expr.nodes import nodes

    return [n for n in nodes(e) if isinstance(n, Var)]


def test_parse_zero_and_nested():
    assert parse("0") == Num(0)
    e = parse("arctan(u/(1+ux))")
    assert render(e) == "arctan(u/(ux + 1))"
    assert eval_at(e, (0, 1, 0)) == pytest.approx(math.pi / 4)


def test_precedence():
    assert eval_at(parse("-2^2"), (0, 0, 0)) == -4
    assert eval_at(parse("2^3^2"), (0, 0, 0)) == 512
    assert eval_at(parse("1 - 2 - 3"), (0, 0, 0)) == -4
    assert eval_at(parse("8/2/2"), (0, 0, 0)) == 2
    assert eval_at(parse("2*x**2"), (3, 0, 0)) == 18


def test_ux_is_one_token():
    assert parse("ux") == Var("ux")
    assert parse("u*x") != Var("ux")


@pytest.mark.parametrize(
    "text, exc, offset",
    [("u + * 2", ParseError, 4), ("u + (", ParseError, 5), ("foo(u)", UnknownIdentifier, 0), ("y + 1", UnknownIdentifier, 0), ("sin(u, x)", ArityError, 0)],
)
def test_parse_errors(text, exc, offset):
    with pytest.raises(exc) as info:
        parse(text)
    assert info.value.offset == offset


def test_diff_examples():
    assert diff(parse("u^2"), "u") == parse("2*u")
    assert is_zero_sampled(diff(parse(LAMBDA1), "ux") - parse("1/u"), BOX)
    for c in ("3", "pi", "sqrt(2)"):
        assert diff(parse(c), "x") == Num(0)


def test_eval_examples():
    assert eval_at(parse(PHI_F0), (0, 1, 0)) == pytest.approx(-1.0)
    assert eval_at(parse("0"), (0.3, 0.7, -1)) == 0.0


@pytest.mark.parametrize("text", ["1/(u - 1)", "arctanh(ux)", "ln(u - 1)", "sqrt(u - 2)"])
def test_domain_errors_name_subtree(text):
    with pytest.raises(DomainError) as info:
        eval_at(parse(text), (0, 1, 1))
    assert info.value.node is not None


def test_compiled_matches_tree_walk():
    e = parse(PHI_F0) * parse("arctan(u/(1+ux))")
    pts = BOX.sample(50)
    fast = compile_expr(e)(pts)
    slow = [evaluate(e, {k: pts[k][i] for k in pts}) for i in range(50)]
    np.testing.assert_allclose(fast, slow, rtol=1e-13)


def test_point_finite():
    with pytest.raises(ValueError):
        Point(0.0, float("nan"), 1.0)


BOX = Box({"x": (0.0, 1.0), "u": (0.5, 2.0), "ux": (-2.0, 2.0)}, (parse("u"),))


def test_is_zero_sampled_examples():
    from lambdaquad.symcheck import determining_residual

    t = is_zero_sampled(determining_residual(parse(LAMBDA1), parse(PHI_F0)), BOX, n=200, tol=1e-9)
    assert t and t.n_points == 200
    assert is_zero_sampled(parse("x*u - x*u"), BOX)
    t = is_zero_sampled(parse("ux - u"), BOX)
    assert not t
    assert t.witness is not None and abs(t.witness_value) > 0


def test_excluded_loci_avoided():
    box = Box({"x": (0, 1), "u": (-1, 1), "ux": (-1, 1)}, (parse("u"),))
    pts = box.sample(300)
    assert np.all(np.abs(pts["u"]) >= 1e-3)


def test_box_exhausted():
    box = Box({"x": (0, 1), "u": (0, 1e-4), "ux": (0, 1)}, (parse("u"),))
    with pytest.raises(BoxExhausted):
        box.sample(10)


def test_degenerate_interval():
    with pytest.raises(ValueError):
        Box({"x": (1, 1)})


def test_sampling_reproducible_and_seeded():
    a, b, c = BOX.sample(20), BOX.sample(20), BOX.sample(20, seed=3)
    np.testing.assert_array_equal(a["u"], b["u"])
    assert not np.array_equal(a["u"], c["u"])


def test_singular_loci_split_factors():
    loci = singular_loci(parse("1/(u^2*(ux + 1)^2)"))
    assert parse("u") in loci and parse("ux + 1") in loci


CATALOG_TEXTS = [
    PHI_F0,
    LAMBDA1,
    "ux/u - u - 1/u",
    "-(ux + u^2 + 1)/(2*u)",
    "-1/2*(x - sqrt(2)*arctanh((u^2 + ux + 1)/(sqrt(2)*u)))",
    "1/2*(x + sqrt(2)*arctan((u^2 + ux - 1)/(sqrt(2)*u)))",
    "-u/((u^2 + ux + 1)^2 - 2*u^2)",
    "sqrt(u^2 + (ux + 1)^2) - ln(abs((sqrt(u^2 + (ux + 1)^2) + ux + 1)/u))",
    "-(1/u + (u^2 + 1)/(ux*u))",
    "sin(C2 - x)*(C1 - arctanh(cos(C2 - x)))",
    "2.5e-3*x - 0.1",
]


@pytest.mark.parametrize("text", CATALOG_TEXTS)
def test_round_trip(text):
    e = parse(text)
    assert parse(render(e)) == e


# -- properties ---------------------------------------------------------------

LEAVES = st.sampled_from(["x", "u", "ux", "2", "1/3", "0.5"])


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(children, children).map(lambda t: f"({t[0]})/(2 + ({t[1]})^2)"),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "arctan", "tanh"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda c: f"({c})^3"),
        children.map(lambda c: f"sqrt(1 + ({c})^2)"),
        children.map(lambda c: f"-({c})"),
    )


EXPRS = st.recursive(LEAVES, _combine, max_leaves=8)
PTS = BOX.sample(100, seed=99)


@settings(max_examples=60, deadline=None)
@given(EXPRS, st.sampled_from(["x", "u", "ux"]))
def test_diff_matches_central_difference(text, var):
    e = parse(text)
    d = compile_expr(diff(e, var))(PTS)
    f = compile_expr(e)
    h = 1e-6 * (1 + np.abs(PTS[var]))
    up, dn = dict(PTS), dict(PTS)
    up[var] = PTS[var] + h
    dn[var] = PTS[var] - h
    fd = (f(up) - f(dn)) / (2 * h)
    scale = 1 + np.abs(fd) + np.abs(f(PTS))
    assert np.all(np.abs(d - fd) <= 1e-6 * scale)


@settings(max_examples=60, deadline=None)
@given(EXPRS)
def test_render_parse_round_trip(text):
    e = parse(text)
    assert parse(render(e)) == e


@settings(max_examples=40, deadline=None)
@given(EXPRS, EXPRS, st.integers(-3, 3), st.integers(1, 4))
def test_diff_is_linear(a, b, p, q):
    e1, e2 = parse(a), parse(b)
    lhs = diff(e1 * p + e2 / q, "u")
    rhs = diff(e1, "u") * p + diff(e2, "u") / q
    assert is_zero_sampled(lhs - rhs, BOX, n=50)
